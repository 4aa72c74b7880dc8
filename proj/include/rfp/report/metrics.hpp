#pragma once

#include <string>
#include <vector>

#include "rfp/data/dataset.hpp"
#include "rfp/models/ensemble.hpp"

namespace rfp::report {

/// Confusion matrix rows are true classes, columns predictions.
struct EvalResult {
    std::string task;
    std::vector<std::string> labels;
    std::vector<std::vector<std::size_t>> confusion;
    double accuracy = 0.0;
    /// precision_c = M[c][c] / column sum; 0 with empty_column[c] set when
    /// nothing was predicted as c.
    std::vector<double> precision;
    std::vector<double> recall;  // M[c][c] / row sum; 0 for an absent class
    std::vector<bool> empty_column;
    std::size_t total = 0;

    std::size_t support(std::size_t c) const;
};

/// Throws UsageError for an empty set and DataError for labels or
/// predictions outside [0, labels.size()).
EvalResult evaluate_predictions(std::span<const int> truth, std::span<const std::size_t> predicted,
                                std::vector<std::string> labels, std::string task = {});

/// Eval-mode pass of a single network over `ds`.
EvalResult evaluate(const models::Net& net, const data::LabeledDataset& ds);
/// Device accuracy of the routed ensemble on a device-task set.
EvalResult evaluate(const models::EnsembleModel& e, const data::LabeledDataset& ds);

/// Cell (d, m): precision of device m among windows whose true distance is
/// distances[d]. Averages are unweighted means over the row or column.
struct PrecisionGrid {
    std::vector<double> distances;
    std::vector<std::string> devices;
    std::vector<std::vector<double>> precision;
    std::vector<std::vector<bool>> empty;  // nothing predicted as m at d
    std::vector<double> row_average;
    std::vector<double> column_average;
};

PrecisionGrid precision_grid(std::span<const int> true_device, std::span<const std::size_t> predicted_device,
                             std::span<const double> true_distance, std::vector<double> distances,
                             std::vector<std::string> devices);

/// Routes every window of a device-task test set through the ensemble.
/// Throws ConfigError when some (distance, device) cell has no test window.
PrecisionGrid ensemble_heatmap(const models::EnsembleModel& e, const data::LabeledDataset& test);

}  // namespace rfp::report
