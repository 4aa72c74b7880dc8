#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rfp/data/dataset.hpp"
#include "rfp/models/architectures.hpp"

namespace rfp::models {

struct Prediction {
    std::size_t index = 0;
    std::vector<float> probabilities;
};

/// Device classifier trained at one distance. Output width == device_names.size().
struct DeviceClassifier {
    Net net;
    double distance_ft = 0.0;
    std::vector<std::string> device_names;

    std::size_t n_devices() const { return device_names.size(); }
    void validate() const;
};

/// Output k corresponds to distances_ft[k].
struct DistanceClassifier {
    Net net;
    std::vector<double> distances_ft;

    std::size_t n_distances() const { return distances_ft.size(); }
    void validate() const;
};

/// Throws DataError if any [2, W] row of the batch has RMS magnitude further
/// than `tolerance` from 1.
void check_normalized(const nn::Tensor<float>& batch, double tolerance = 1e-3);

/// Eval-mode class scores. Classes are picked by argmax over the logits,
/// which is the argmax of the softmax; ties go to the lowest index. Debug
/// builds reject unnormalized windows.
std::vector<Prediction> predict(const Net& net, const nn::Tensor<float>& batch);
std::vector<std::size_t> predict_classes(const Net& net, const nn::Tensor<float>& batch);

std::vector<Prediction> predict_device(const DeviceClassifier& m, const nn::Tensor<float>& batch);
std::vector<Prediction> predict_distance(const DistanceClassifier& m, const nn::Tensor<float>& batch);

/// Predicted class for every window of `ds`, in dataset order.
std::vector<std::size_t> predict_dataset(const Net& net, const data::LabeledDataset& ds, std::size_t batch_size = 256);

/// Network checkpoint at `path` plus a JSON sidecar (path + ".json") holding
/// the labels and, for device classifiers, the training distance.
void save_classifier(const DeviceClassifier& m, const std::filesystem::path& path);
void save_classifier(const DistanceClassifier& m, const std::filesystem::path& path);
DeviceClassifier load_device_classifier(const std::filesystem::path& path);
DistanceClassifier load_distance_classifier(const std::filesystem::path& path);

}  // namespace rfp::models
