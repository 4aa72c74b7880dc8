#pragma once

#include <string>

#include "rfp/report/csv.hpp"
#include "rfp/report/metrics.hpp"

namespace rfp::report {

/// Standalone SVG documents. They only read the numbers they are given.
std::string heatmap_svg(const PrecisionGrid& g, const std::string& title);
std::string series_svg(const SeriesTable& t, const std::string& title, const std::string& y_label);

}  // namespace rfp::report
