#pragma once

#include <filesystem>
#include <vector>

#include "rfp/report/csv.hpp"
#include "rfp/report/metrics.hpp"

namespace rfp::report {

/// Per-distance device accuracy of two or more model families on the same
/// test sets. models[s][k] is family s's classifier for tests[k].
SeriesTable compare_architectures(const std::vector<std::string>& names,
                                  const std::vector<std::vector<const models::DeviceClassifier*>>& models,
                                  const std::vector<const data::LabeledDataset*>& tests);

/// Writes <stem>.csv and <stem>.svg into `dir`.
void write_heatmap(const PrecisionGrid& g, const std::filesystem::path& dir, const std::string& stem = "heatmap");
void write_comparison(const SeriesTable& t, const std::filesystem::path& dir, const std::string& stem = "compare");
/// Writes <stem>_metrics.csv and <stem>_confusion.csv.
void write_evaluation(const EvalResult& r, const std::filesystem::path& dir, const std::string& stem = "eval");

}  // namespace rfp::report
