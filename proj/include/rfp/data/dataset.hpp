#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rfp/data/window.hpp"
#include "rfp/sim/capture.hpp"

namespace rfp::data {

enum class TaskKind : std::uint32_t {
    device_at_distance = 0,  // devices, windows of one distance only
    distance = 1,            // distances, all devices
    device = 2,              // devices, all distances (ensemble evaluation and fine-tuning)
};

struct Task {
    TaskKind kind = TaskKind::device;
    double distance_ft = 0.0;  // only for device_at_distance

    static Task device_at_distance(double d) { return {TaskKind::device_at_distance, d}; }
    static Task distance() { return {TaskKind::distance, 0.0}; }
    static Task device() { return {TaskKind::device, 0.0}; }

    bool includes(const WindowSource& s) const;
    std::string describe() const;
    bool operator==(const Task&) const = default;
};

enum class SplitMode { pooled_runs, run_holdout };
enum class Split : std::uint32_t { train = 0, val = 1, test = 2 };

std::string_view to_string(Split s);

/// pooled_runs: every class is shuffled and cut train/val/test at window level.
/// run_holdout: all windows from runs other than holdout_run go to train; the
/// held-out run is cut into val and test in the ratio val:test.
struct SplitSpec {
    SplitMode mode = SplitMode::pooled_runs;
    double train = 0.8, val = 0.1, test = 0.1;
    std::uint64_t seed = 0;
    int holdout_run = 1;

    void validate() const;
};

/// Windows of one split stored as a contiguous float block [n, 2, W].
struct LabeledDataset {
    Task task;
    Split split = Split::train;
    std::size_t window_length = 0;
    std::vector<std::string> label_names;
    std::vector<int> labels;
    std::vector<WindowSource> sources;
    std::vector<float> data;

    std::size_t size() const { return labels.size(); }
    bool empty() const { return labels.empty(); }
    std::size_t n_classes() const { return label_names.size(); }
    std::size_t sample_floats() const { return 2 * window_length; }
    std::span<const float> window(std::size_t i) const;

    /// [indices.size(), 2, W]
    nn::Tensor<float> batch(std::span<const std::size_t> indices) const;
    nn::Tensor<float> batch(std::size_t first, std::size_t count) const;
    LabeledDataset subset(std::span<const std::size_t> indices) const;
    /// Per-class counts, indexed by label.
    std::vector<std::size_t> class_counts() const;
};

struct DatasetSplits {
    LabeledDataset train, val, test;
};

/// Label names in label order for `task` over the devices/distances present.
std::vector<std::string> label_names_for(const Task& task, const std::vector<int>& device_ids,
                                         const std::vector<double>& distances);
int label_of(const Task& task, const WindowSource& s, const std::vector<int>& device_ids,
             const std::vector<double>& distances);

/// Labels and splits already-partitioned windows. Windows that the task does
/// not include are ignored. Throws ConfigError when a class ends up with no
/// training windows.
DatasetSplits split_windows(const std::vector<Window>& windows, const Task& task, const SplitSpec& split,
                            const std::vector<int>& device_ids, const std::vector<double>& distances);

/// Reads the recordings the task needs, partitions them into W-sample windows,
/// normalizes each window to unit RMS and splits them.
DatasetSplits build_dataset(const sim::Manifest& manifest, const Task& task, const SplitSpec& split,
                            std::size_t window_length, bool normalize = true);

std::string format_distance(double distance_ft);

}  // namespace rfp::data
