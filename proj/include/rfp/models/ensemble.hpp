#pragma once

#include <filesystem>
#include <vector>

#include "rfp/models/classifiers.hpp"

namespace rfp::models {

/// One distance classifier gating |D| device classifiers.
/// device_models[k] serves distance_model.distances_ft[k].
struct EnsembleModel {
    DistanceClassifier distance_model;
    std::vector<DeviceClassifier> device_models;

    std::size_t n_distances() const { return device_models.size(); }
    std::size_t n_devices() const { return device_models.empty() ? 0 : device_models.front().n_devices(); }
    /// Throws ConfigError when the slots disagree with the distance labels or
    /// device models differ in width or input shape.
    void validate() const;
};

/// Orders the device models to match the distance labels.
EnsembleModel assemble_ensemble(DistanceClassifier distance_model, std::vector<DeviceClassifier> device_models);

struct EnsembleOutput {
    std::size_t distance_index = 0;
    double distance_ft = 0.0;
    std::size_t device = 0;
    /// Length |D|*|M|: the concatenated device outputs with every segment
    /// except distance_index zeroed.
    std::vector<float> masked;
};

/// Every device model scores the window; the outputs are concatenated
/// (one-hot by default, softmax probabilities with `soft`), masked to the
/// segment chosen by the distance classifier, and the device is the argmax of
/// the masked vector modulo |M|.
std::vector<EnsembleOutput> ensemble_predict(const EnsembleModel& e, const nn::Tensor<float>& batch, bool soft = false);

struct RoutedPrediction {
    std::size_t distance_index = 0;
    std::size_t device = 0;
};

/// Runs only the device model the distance classifier selects for each
/// window. Gives the same devices as ensemble_predict at 1/|D| of the cost.
std::vector<RoutedPrediction> routed_predict(const EnsembleModel& e, const nn::Tensor<float>& batch);

/// Copies rows `rows` of a [B, ...] batch.
nn::Tensor<float> gather_rows(const nn::Tensor<float>& batch, std::span<const std::size_t> rows);

/// Writes ensemble.json plus distance.ckpt and one device_<d>ft.ckpt per slot
/// into `dir`.
void save_ensemble(const EnsembleModel& e, const std::filesystem::path& dir);
/// Accepts the directory or the ensemble.json path.
EnsembleModel load_ensemble(const std::filesystem::path& path);

}  // namespace rfp::models
