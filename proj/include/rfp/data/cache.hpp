#pragma once

#include <filesystem>

#include "rfp/data/dataset.hpp"

namespace rfp::data {

/// Binary snapshot of one LabeledDataset so training can skip re-windowing.
/// Layout is documented in docs/formats.md.
void write_cache(const LabeledDataset& ds, const std::filesystem::path& path);
LabeledDataset read_cache(const std::filesystem::path& path);

}  // namespace rfp::data
