#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rfp/report/metrics.hpp"

namespace rfp::report {

/// Named numeric series over a shared key column, e.g. accuracy per distance.
struct SeriesTable {
    std::string key_name;
    std::vector<double> keys;
    std::vector<std::string> series_names;
    std::vector<std::vector<double>> values;  // values[s][k]

    bool operator==(const SeriesTable&) const = default;
};

/// Numbers use the shortest text that reads back to the same double.
std::string to_csv(const SeriesTable& t);
/// Inverse of to_csv. Lines starting with '#' are skipped.
SeriesTable parse_series_csv(const std::string& text);

/// class,precision,recall,support,empty_column per class, then a '#' line
/// with the overall accuracy.
std::string metrics_csv(const EvalResult& r);
/// Header row of predicted labels; each row starts with the true label.
std::string confusion_csv(const EvalResult& r);
/// distance_ft, one column per device, row_avg; last row holds column
/// averages. Empty cells are written as 0 and listed in '#' lines.
std::string grid_csv(const PrecisionGrid& g);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace rfp::report
