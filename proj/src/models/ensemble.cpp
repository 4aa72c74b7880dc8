#include "rfp/models/ensemble.hpp"

#include <algorithm>
#include <cmath>

#include "json_file.hpp"
#include "rfp/data/dataset.hpp"
#include "rfp/errors.hpp"
#include "rfp/nn/checkpoint.hpp"
#include "rfp/nn/loss.hpp"

namespace rfp::models {

using detail::json;
using nn::Tensor;

namespace {

bool same_distance(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(a)); }

constexpr const char* kManifestName = "ensemble.json";

}  // namespace

void EnsembleModel::validate() const {
    distance_model.validate();
    if (device_models.size() != distance_model.n_distances()) {
        throw ConfigError("ensemble has " + std::to_string(device_models.size()) + " device models for " +
                          std::to_string(distance_model.n_distances()) + " distances");
    }
    for (std::size_t k = 0; k < device_models.size(); ++k) {
        const auto& m = device_models[k];
        m.validate();
        if (!same_distance(m.distance_ft, distance_model.distances_ft[k])) {
            throw ConfigError("ensemble slot " + std::to_string(k) + " expects " +
                              data::format_distance(distance_model.distances_ft[k]) + "ft but holds a " +
                              data::format_distance(m.distance_ft) + "ft model");
        }
        if (m.device_names != device_models.front().device_names) {
            throw ConfigError("device models disagree on the device labels");
        }
        if (m.net.input_shape() != distance_model.net.input_shape()) {
            throw ConfigError("device model input " + nn::to_string(m.net.input_shape()) +
                              " differs from the distance model input " +
                              nn::to_string(distance_model.net.input_shape()));
        }
    }
}

EnsembleModel assemble_ensemble(DistanceClassifier distance_model, std::vector<DeviceClassifier> device_models) {
    EnsembleModel e{std::move(distance_model), {}};
    for (double d : e.distance_model.distances_ft) {
        auto it = std::find_if(device_models.begin(), device_models.end(),
                               [&](const DeviceClassifier& m) { return same_distance(m.distance_ft, d); });
        if (it == device_models.end()) {
            throw ConfigError("no device model for distance " + data::format_distance(d) + "ft");
        }
        e.device_models.push_back(std::move(*it));
        device_models.erase(it);
    }
    if (!device_models.empty()) {
        throw ConfigError("device model for " + data::format_distance(device_models.front().distance_ft) + "ft" +
                          " has no matching distance label");
    }
    e.validate();
    return e;
}

std::vector<EnsembleOutput> ensemble_predict(const EnsembleModel& e, const Tensor<float>& batch, bool soft) {
    std::size_t n_d = e.n_distances();
    std::size_t n_m = e.n_devices();
    if (n_d == 0) throw ConfigError("empty ensemble");

    auto route = predict_classes(e.distance_model.net, batch);
    std::size_t n = route.size();
    std::vector<float> concat(n * n_d * n_m, 0.0f);
    for (std::size_t k = 0; k < n_d; ++k) {
        if (soft) {
            auto p = predict(e.device_models[k].net, batch);
            for (std::size_t b = 0; b < n; ++b) {
                std::copy(p[b].probabilities.begin(), p[b].probabilities.end(),
                          concat.begin() + std::ptrdiff_t((b * n_d + k) * n_m));
            }
        } else {
            auto c = predict_classes(e.device_models[k].net, batch);
            for (std::size_t b = 0; b < n; ++b) concat[(b * n_d + k) * n_m + c[b]] = 1.0f;
        }
    }

    std::vector<EnsembleOutput> out(n);
    for (std::size_t b = 0; b < n; ++b) {
        auto& o = out[b];
        o.distance_index = route[b];
        o.distance_ft = e.distance_model.distances_ft[route[b]];
        o.masked.assign(concat.begin() + std::ptrdiff_t(b * n_d * n_m),
                        concat.begin() + std::ptrdiff_t((b + 1) * n_d * n_m));
        for (std::size_t i = 0; i < o.masked.size(); ++i) {
            if (i / n_m != o.distance_index) o.masked[i] = 0.0f;
        }
        o.device = nn::argmax(std::span<const float>(o.masked)) % n_m;
    }
    return out;
}

Tensor<float> gather_rows(const Tensor<float>& batch, std::span<const std::size_t> rows) {
    auto shape = batch.shape();
    std::size_t per = batch.size() / shape.at(0);
    shape[0] = rows.size();
    Tensor<float> out(shape);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::copy_n(batch.raw() + rows[i] * per, per, out.raw() + i * per);
    }
    return out;
}

std::vector<RoutedPrediction> routed_predict(const EnsembleModel& e, const Tensor<float>& batch) {
    if (e.n_distances() == 0) throw ConfigError("empty ensemble");
    auto route = predict_classes(e.distance_model.net, batch);
    std::vector<RoutedPrediction> out(route.size());
    std::vector<std::size_t> rows;
    for (std::size_t k = 0; k < e.n_distances(); ++k) {
        rows.clear();
        for (std::size_t b = 0; b < route.size(); ++b) {
            if (route[b] == k) rows.push_back(b);
        }
        if (rows.empty()) continue;
        auto c = predict_classes(e.device_models[k].net, gather_rows(batch, rows));
        for (std::size_t i = 0; i < rows.size(); ++i) out[rows[i]] = {k, c[i]};
    }
    return out;
}

void save_ensemble(const EnsembleModel& e, const std::filesystem::path& dir) {
    e.validate();
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

    json slots = json::array();
    for (const auto& m : e.device_models) {
        std::string file = "device_" + data::format_distance(m.distance_ft) + "ft.ckpt";
        nn::save_checkpoint(m.net, dir / file);
        slots.push_back({{"distance_ft", m.distance_ft}, {"checkpoint", file}});
    }
    nn::save_checkpoint(e.distance_model.net, dir / "distance.ckpt");
    json j = {{"format", "rfp-ensemble"},
              {"version", 1},
              {"distances_ft", e.distance_model.distances_ft},
              {"device_labels", e.device_models.front().device_names},
              {"distance_checkpoint", "distance.ckpt"},
              {"device_models", slots}};
    detail::write_json(dir / kManifestName, j);
}

EnsembleModel load_ensemble(const std::filesystem::path& path) {
    auto file = std::filesystem::is_directory(path) ? path / kManifestName : path;
    auto dir = file.parent_path();
    auto j = detail::read_json(file);
    try {
        if (j.at("format") != "rfp-ensemble" || j.at("version") != 1) {
            throw IoError(file.string() + ": not an rfp-ensemble v1 manifest");
        }
        DistanceClassifier dist{nn::load_checkpoint<float>(dir / j.at("distance_checkpoint").get<std::string>()),
                                j.at("distances_ft").get<std::vector<double>>()};
        auto names = j.at("device_labels").get<std::vector<std::string>>();
        std::vector<DeviceClassifier> devices;
        for (const auto& s : j.at("device_models")) {
            devices.push_back({nn::load_checkpoint<float>(dir / s.at("checkpoint").get<std::string>()),
                               s.at("distance_ft").get<double>(), names});
        }
        EnsembleModel e{std::move(dist), std::move(devices)};
        e.validate();
        return e;
    } catch (const json::exception& ex) {
        throw IoError(file.string() + ": " + ex.what());
    }
}

}  // namespace rfp::models
