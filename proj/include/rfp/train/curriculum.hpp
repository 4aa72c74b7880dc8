#pragma once

#include "rfp/train/fit.hpp"

namespace rfp::train {

/// Seeded permutation of ds indices in which every prefix is stratified: a
/// prefix of length k holds within one window of k * n_c / n from class c.
/// Nested prefixes make the stage-1 draw a subset of the stage-2 pool.
std::vector<std::size_t> stratified_order(const data::LabeledDataset& ds, std::uint64_t seed);

struct CurriculumResult {
    TrainReport stage1;
    TrainReport stage2;
    std::vector<std::size_t> stage1_indices;  // into the training set
    std::vector<std::size_t> stage2_indices;
};

/// Stage 1 fits on stage1_windows, stage 2 continues from those weights on
/// stage2_windows. Throws ConfigError when `train` is smaller than stage 2.
CurriculumResult curriculum_fit(Net& net, const data::LabeledDataset& train, const data::LabeledDataset& val,
                                const CurriculumSpec& spec, const TrainConfig& cfg, const EpochCallback& on_epoch = {});

}  // namespace rfp::train
