#include "rfp/models/classifiers.hpp"

#include <algorithm>
#include <cmath>

#include "json_file.hpp"
#include "rfp/errors.hpp"
#include "rfp/nn/checkpoint.hpp"
#include "rfp/nn/loss.hpp"

namespace rfp::models {

using detail::json;
using nn::Tensor;

namespace {

void check_output(const Net& net, std::size_t expected, const char* what) {
    if (net.output_shape().size() != 1 || net.output_size() != expected) {
        throw ConfigError(std::string(what) + ": network emits " + nn::to_string(net.output_shape()) + " but " +
                          std::to_string(expected) + " labels are configured");
    }
}

std::filesystem::path meta_path(const std::filesystem::path& ckpt) {
    auto p = ckpt;
    p += ".json";
    return p;
}

json base_meta(const char* kind) { return {{"format", "rfp-classifier"}, {"version", 1}, {"kind", kind}}; }

json load_meta(const std::filesystem::path& ckpt, const char* kind) {
    auto j = detail::read_json(meta_path(ckpt));
    try {
        if (j.at("format") != "rfp-classifier" || j.at("version") != 1) {
            throw IoError(meta_path(ckpt).string() + ": not an rfp-classifier v1 sidecar");
        }
        if (j.at("kind") != kind) {
            throw ConfigError(ckpt.string() + " holds a " + j.at("kind").get<std::string>() + " classifier, expected " +
                              kind);
        }
    } catch (const json::exception& e) {
        throw IoError(meta_path(ckpt).string() + ": " + e.what());
    }
    return j;
}

}  // namespace

void DeviceClassifier::validate() const { check_output(net, device_names.size(), "device classifier"); }

void DistanceClassifier::validate() const {
    check_output(net, distances_ft.size(), "distance classifier");
    if (!std::is_sorted(distances_ft.begin(), distances_ft.end()) ||
        std::adjacent_find(distances_ft.begin(), distances_ft.end()) != distances_ft.end()) {
        throw ConfigError("distance labels must be strictly increasing");
    }
}

void check_normalized(const Tensor<float>& batch, double tolerance) {
    if (batch.rank() != 3 || batch.dim(1) != 2) {
        throw ConfigError("expected a [B, 2, W] window batch, got " + nn::to_string(batch.shape()));
    }
    std::size_t per = 2 * batch.dim(2);
    std::size_t w = batch.dim(2);
    for (std::size_t b = 0; b < batch.dim(0); ++b) {
        const float* x = batch.raw() + b * per;
        double s = 0.0;
        for (std::size_t i = 0; i < per; ++i) s += double(x[i]) * x[i];
        double r = std::sqrt(s / double(w));
        if (std::abs(r - 1.0) > tolerance) {
            throw DataError("window " + std::to_string(b) + " is not normalized (rms " + std::to_string(r) + ")");
        }
    }
}

std::vector<Prediction> predict(const Net& net, const Tensor<float>& batch) {
#ifndef NDEBUG
    check_normalized(batch);
#endif
    auto logits = net.predict(batch);
    auto probs = nn::softmax_rows(logits);
    std::size_t n = logits.dim(1);
    std::vector<Prediction> out(logits.dim(0));
    for (std::size_t b = 0; b < out.size(); ++b) {
        out[b].index = nn::argmax(std::span<const float>(logits.raw() + b * n, n));
        out[b].probabilities.assign(probs.raw() + b * n, probs.raw() + (b + 1) * n);
    }
    return out;
}

std::vector<std::size_t> predict_classes(const Net& net, const Tensor<float>& batch) {
#ifndef NDEBUG
    check_normalized(batch);
#endif
    auto logits = net.predict(batch);
    std::size_t n = logits.dim(1);
    std::vector<std::size_t> out(logits.dim(0));
    for (std::size_t b = 0; b < out.size(); ++b) out[b] = nn::argmax(std::span<const float>(logits.raw() + b * n, n));
    return out;
}

std::vector<Prediction> predict_device(const DeviceClassifier& m, const Tensor<float>& batch) {
    return predict(m.net, batch);
}

std::vector<Prediction> predict_distance(const DistanceClassifier& m, const Tensor<float>& batch) {
    return predict(m.net, batch);
}

std::vector<std::size_t> predict_dataset(const Net& net, const data::LabeledDataset& ds, std::size_t batch_size) {
    if (batch_size == 0) throw ConfigError("batch size must be positive");
    std::vector<std::size_t> out;
    out.reserve(ds.size());
    for (std::size_t first = 0; first < ds.size(); first += batch_size) {
        auto part = predict_classes(net, ds.batch(first, std::min(batch_size, ds.size() - first)));
        out.insert(out.end(), part.begin(), part.end());
    }
    return out;
}

void save_classifier(const DeviceClassifier& m, const std::filesystem::path& path) {
    m.validate();
    nn::save_checkpoint(m.net, path);
    auto j = base_meta("device");
    j["distance_ft"] = m.distance_ft;
    j["labels"] = m.device_names;
    detail::write_json(meta_path(path), j);
}

void save_classifier(const DistanceClassifier& m, const std::filesystem::path& path) {
    m.validate();
    nn::save_checkpoint(m.net, path);
    auto j = base_meta("distance");
    j["distances_ft"] = m.distances_ft;
    detail::write_json(meta_path(path), j);
}

DeviceClassifier load_device_classifier(const std::filesystem::path& path) {
    auto j = load_meta(path, "device");
    DeviceClassifier m{nn::load_checkpoint<float>(path), 0.0, {}};
    try {
        m.distance_ft = j.at("distance_ft").get<double>();
        m.device_names = j.at("labels").get<std::vector<std::string>>();
    } catch (const json::exception& e) {
        throw IoError(meta_path(path).string() + ": " + e.what());
    }
    m.validate();
    return m;
}

DistanceClassifier load_distance_classifier(const std::filesystem::path& path) {
    auto j = load_meta(path, "distance");
    DistanceClassifier m{nn::load_checkpoint<float>(path), {}};
    try {
        m.distances_ft = j.at("distances_ft").get<std::vector<double>>();
    } catch (const json::exception& e) {
        throw IoError(meta_path(path).string() + ": " + e.what());
    }
    m.validate();
    return m;
}

}  // namespace rfp::models
