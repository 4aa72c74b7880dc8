#include "rfp/report/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "rfp/errors.hpp"

namespace rfp::report {

std::size_t EvalResult::support(std::size_t c) const {
    std::size_t s = 0;
    for (auto v : confusion.at(c)) s += v;
    return s;
}

EvalResult evaluate_predictions(std::span<const int> truth, std::span<const std::size_t> predicted,
                                std::vector<std::string> labels, std::string task) {
    if (truth.empty()) throw UsageError("cannot evaluate an empty test set");
    if (truth.size() != predicted.size()) {
        throw UsageError("have " + std::to_string(truth.size()) + " labels but " + std::to_string(predicted.size()) +
                         " predictions");
    }
    const std::size_t n = labels.size();
    EvalResult r;
    r.task = std::move(task);
    r.labels = std::move(labels);
    r.confusion.assign(n, std::vector<std::size_t>(n, 0));
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] < 0 || std::size_t(truth[i]) >= n || predicted[i] >= n) {
            throw DataError("label or prediction outside [0, " + std::to_string(n) + ") at index " + std::to_string(i));
        }
        ++r.confusion[std::size_t(truth[i])][predicted[i]];
    }
    r.total = truth.size();
    std::size_t diag = 0;
    r.precision.assign(n, 0.0);
    r.recall.assign(n, 0.0);
    r.empty_column.assign(n, false);
    for (std::size_t c = 0; c < n; ++c) {
        diag += r.confusion[c][c];
        std::size_t col = 0;
        for (std::size_t t = 0; t < n; ++t) col += r.confusion[t][c];
        if (col == 0) {
            r.empty_column[c] = true;
        } else {
            r.precision[c] = double(r.confusion[c][c]) / double(col);
        }
        if (auto row = r.support(c); row > 0) r.recall[c] = double(r.confusion[c][c]) / double(row);
    }
    r.accuracy = double(diag) / double(r.total);
    return r;
}

EvalResult evaluate(const models::Net& net, const data::LabeledDataset& ds) {
    if (net.output_size() != ds.n_classes()) {
        throw ConfigError("model emits " + std::to_string(net.output_size()) + " classes but the test set has " +
                          std::to_string(ds.n_classes()));
    }
    if (ds.empty()) throw UsageError("cannot evaluate an empty test set");
    auto pred = models::predict_dataset(net, ds);
    return evaluate_predictions(ds.labels, pred, ds.label_names, ds.task.describe());
}

namespace {

std::vector<std::size_t> routed_devices(const models::EnsembleModel& e, const data::LabeledDataset& ds) {
    if (ds.empty()) throw UsageError("cannot evaluate an empty test set");
    if (ds.label_names != e.device_models.at(0).device_names) {
        throw ConfigError("test set labels do not match the ensemble's devices");
    }
    std::vector<std::size_t> out;
    out.reserve(ds.size());
    for (std::size_t first = 0; first < ds.size(); first += 256) {
        for (const auto& p : models::routed_predict(e, ds.batch(first, std::min<std::size_t>(256, ds.size() - first)))) {
            out.push_back(p.device);
        }
    }
    return out;
}

}  // namespace

EvalResult evaluate(const models::EnsembleModel& e, const data::LabeledDataset& ds) {
    return evaluate_predictions(ds.labels, routed_devices(e, ds), ds.label_names, "ensemble " + ds.task.describe());
}

PrecisionGrid precision_grid(std::span<const int> true_device, std::span<const std::size_t> predicted_device,
                             std::span<const double> true_distance, std::vector<double> distances,
                             std::vector<std::string> devices) {
    if (true_device.empty()) throw UsageError("cannot build a precision grid from an empty test set");
    if (true_device.size() != predicted_device.size() || true_device.size() != true_distance.size()) {
        throw UsageError("precision grid inputs differ in length");
    }
    const std::size_t nd = distances.size(), nm = devices.size();
    std::vector<std::vector<std::size_t>> hit(nd, std::vector<std::size_t>(nm, 0)), called = hit;
    for (std::size_t i = 0; i < true_device.size(); ++i) {
        auto it = std::find_if(distances.begin(), distances.end(), [&](double d) {
            return std::abs(d - true_distance[i]) <= 1e-9 * std::max(1.0, d);
        });
        if (it == distances.end()) {
            throw DataError("window " + std::to_string(i) + " has a distance outside the grid");
        }
        if (true_device[i] < 0 || std::size_t(true_device[i]) >= nm || predicted_device[i] >= nm) {
            throw DataError("device label outside [0, " + std::to_string(nm) + ") at index " + std::to_string(i));
        }
        auto d = std::size_t(it - distances.begin());
        ++called[d][predicted_device[i]];
        if (predicted_device[i] == std::size_t(true_device[i])) ++hit[d][predicted_device[i]];
    }

    PrecisionGrid g;
    g.distances = std::move(distances);
    g.devices = std::move(devices);
    g.precision.assign(nd, std::vector<double>(nm, 0.0));
    g.empty.assign(nd, std::vector<bool>(nm, false));
    g.row_average.assign(nd, 0.0);
    g.column_average.assign(nm, 0.0);
    for (std::size_t d = 0; d < nd; ++d) {
        for (std::size_t m = 0; m < nm; ++m) {
            if (called[d][m] == 0) {
                g.empty[d][m] = true;
            } else {
                g.precision[d][m] = double(hit[d][m]) / double(called[d][m]);
            }
            g.row_average[d] += g.precision[d][m] / double(nm);
            g.column_average[m] += g.precision[d][m] / double(nd);
        }
    }
    return g;
}

PrecisionGrid ensemble_heatmap(const models::EnsembleModel& e, const data::LabeledDataset& test) {
    const auto& distances = e.distance_model.distances_ft;
    std::vector<std::vector<std::size_t>> cells(distances.size(), std::vector<std::size_t>(e.n_devices(), 0));
    std::vector<double> true_distance;
    true_distance.reserve(test.size());
    for (std::size_t i = 0; i < test.size(); ++i) {
        true_distance.push_back(test.sources[i].distance_ft);
        for (std::size_t d = 0; d < distances.size(); ++d) {
            if (std::abs(distances[d] - true_distance.back()) <= 1e-9 * std::max(1.0, distances[d]) &&
                test.labels[i] >= 0 && std::size_t(test.labels[i]) < e.n_devices()) {
                ++cells[d][std::size_t(test.labels[i])];
            }
        }
    }
    for (std::size_t d = 0; d < distances.size(); ++d) {
        for (std::size_t m = 0; m < e.n_devices(); ++m) {
            if (cells[d][m] == 0) {
                throw ConfigError("test set has no windows for " + e.device_models[0].device_names[m] + " at " +
                                  data::format_distance(distances[d]) + "ft");
            }
        }
    }
    auto pred = routed_devices(e, test);
    return precision_grid(test.labels, pred, true_distance, distances, e.device_models[0].device_names);
}

}  // namespace rfp::report
