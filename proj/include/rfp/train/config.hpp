#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "rfp/data/dataset.hpp"
#include "rfp/models/architectures.hpp"
#include "rfp/nn/sgd.hpp"

namespace rfp::train {

/// Early stopping and learning-rate decay, both keyed on validation accuracy.
struct StoppingPolicy {
    std::size_t early_stop_patience = 10;
    double lr_decay_factor = 0.5;
    std::size_t lr_decay_patience = 3;
    double min_lr = 1e-5;

    void validate() const;
};

struct TrainConfig {
    nn::SgdConfig sgd{0.01, 0.9};
    std::size_t batch_size = 64;
    std::size_t max_epochs = 50;
    StoppingPolicy policy;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Desk-scale defaults keep the 160,000 : 1,250,400 order of magnitude.
struct CurriculumSpec {
    std::size_t stage1_windows = 8000;
    std::size_t stage2_windows = 64000;
    std::size_t stage1_max_epochs = 10;
    std::size_t stage2_max_epochs = 50;

    void validate() const;
};

/// Everything a CLI run can be configured with. Text form is one `key = value`
/// per line; '#' starts a comment. See docs/formats.md for the key list.
struct RunConfig {
    TrainConfig train;
    CurriculumSpec curriculum;
    std::string preset = "tiny";
    std::size_t window_length = 256;
    models::Architecture architecture = models::Architecture::resnet;
    data::SplitSpec split;
    bool normalize = true;
    bool finetune_joint = false;

    void validate() const;
};

/// Starts from `base` and applies the keys present in `text`. Unknown keys and
/// malformed values throw ConfigError naming the line.
RunConfig parse_config(std::string_view text, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});
/// Full snapshot; parse_config(to_config_text(c)) == c.
std::string to_config_text(const RunConfig& c);

bool operator==(const RunConfig& a, const RunConfig& b);

}  // namespace rfp::train
