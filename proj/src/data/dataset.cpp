#include "rfp/data/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <cstring>
#include <numeric>
#include <random>
#include <sstream>

#include "rfp/errors.hpp"
#include "rfp/seed.hpp"

namespace rfp::data {

namespace {

std::size_t count_of(std::size_t n, double fraction) {
    // The small bias keeps products like 0.1 * 1000 from rounding down.
    return static_cast<std::size_t>(std::floor(static_cast<double>(n) * fraction + 1e-9));
}

template <typename V>
std::size_t index_in(const std::vector<V>& values, V v, const char* what) {
    auto it = std::find(values.begin(), values.end(), v);
    if (it == values.end()) {
        std::ostringstream os;
        os << "window " << what << ' ' << v << " is not one of the dataset's classes";
        throw DataError(os.str());
    }
    return static_cast<std::size_t>(it - values.begin());
}

LabeledDataset materialize(const std::vector<const Window*>& windows, const std::vector<int>& labels,
                           const Task& task, Split split, const std::vector<std::string>& names, std::size_t w) {
    LabeledDataset ds;
    ds.task = task;
    ds.split = split;
    ds.window_length = w;
    ds.label_names = names;
    ds.labels = labels;
    ds.data.resize(windows.size() * 2 * w);
    ds.sources.reserve(windows.size());
    for (std::size_t i = 0; i < windows.size(); ++i) {
        write_planar(*windows[i], ds.data.data() + i * 2 * w);
        ds.sources.push_back(windows[i]->source);
    }
    return ds;
}

}  // namespace

bool Task::includes(const WindowSource& s) const {
    return kind != TaskKind::device_at_distance || s.distance_ft == distance_ft;
}

std::string Task::describe() const {
    switch (kind) {
        case TaskKind::device_at_distance: return "device@" + format_distance(distance_ft) + "ft";
        case TaskKind::distance: return "distance";
        case TaskKind::device: return "device";
    }
    return "unknown";
}

std::string_view to_string(Split s) {
    switch (s) {
        case Split::train: return "train";
        case Split::val: return "val";
        case Split::test: return "test";
    }
    return "unknown";
}

std::string format_distance(double d) {
    std::ostringstream os;
    os << d;
    return os.str();
}

void SplitSpec::validate() const {
    if (!(train > 0 && val > 0 && test > 0)) throw ConfigError("split fractions must all be positive");
    if (std::abs(train + val + test - 1.0) > 1e-9) throw ConfigError("split fractions must sum to 1");
}

std::span<const float> LabeledDataset::window(std::size_t i) const {
    return {data.data() + i * sample_floats(), sample_floats()};
}

nn::Tensor<float> LabeledDataset::batch(std::span<const std::size_t> indices) const {
    nn::Tensor<float> t({indices.size(), 2, window_length});
    const std::size_t n = sample_floats();
    for (std::size_t i = 0; i < indices.size(); ++i) {
        std::memcpy(t.raw() + i * n, data.data() + indices[i] * n, n * sizeof(float));
    }
    return t;
}

nn::Tensor<float> LabeledDataset::batch(std::size_t first, std::size_t count) const {
    const std::size_t n = sample_floats();
    return nn::Tensor<float>({count, 2, window_length},
                             std::vector<float>(data.begin() + static_cast<std::ptrdiff_t>(first * n),
                                                data.begin() + static_cast<std::ptrdiff_t>((first + count) * n)));
}

LabeledDataset LabeledDataset::subset(std::span<const std::size_t> indices) const {
    LabeledDataset out;
    out.task = task;
    out.split = split;
    out.window_length = window_length;
    out.label_names = label_names;
    const std::size_t n = sample_floats();
    out.data.resize(indices.size() * n);
    for (std::size_t i = 0; i < indices.size(); ++i) {
        const std::size_t j = indices[i];
        out.labels.push_back(labels.at(j));
        out.sources.push_back(sources[j]);
        std::memcpy(out.data.data() + i * n, data.data() + j * n, n * sizeof(float));
    }
    return out;
}

std::vector<std::size_t> LabeledDataset::class_counts() const {
    std::vector<std::size_t> counts(n_classes(), 0);
    for (int l : labels) ++counts.at(static_cast<std::size_t>(l));
    return counts;
}

std::vector<std::string> label_names_for(const Task& task, const std::vector<int>& device_ids,
                                         const std::vector<double>& distances) {
    std::vector<std::string> names;
    if (task.kind == TaskKind::distance) {
        for (double d : distances) names.push_back(format_distance(d) + "ft");
    } else {
        for (int id : device_ids) {
            char buf[16];
            std::snprintf(buf, sizeof buf, "dev%02d", id);
            names.emplace_back(buf);
        }
    }
    return names;
}

int label_of(const Task& task, const WindowSource& s, const std::vector<int>& device_ids,
             const std::vector<double>& distances) {
    if (task.kind == TaskKind::distance) return static_cast<int>(index_in(distances, s.distance_ft, "distance"));
    return static_cast<int>(index_in(device_ids, s.device_id, "device"));
}

DatasetSplits split_windows(const std::vector<Window>& windows, const Task& task, const SplitSpec& split,
                            const std::vector<int>& device_ids, const std::vector<double>& distances) {
    split.validate();
    const auto names = label_names_for(task, device_ids, distances);
    if (task.kind == TaskKind::device_at_distance &&
        std::find(distances.begin(), distances.end(), task.distance_ft) == distances.end()) {
        throw ConfigError("distance " + format_distance(task.distance_ft) + "ft is not in the dataset");
    }

    std::vector<const Window*> included;
    std::size_t w = 0;
    for (const auto& win : windows) {
        if (!task.includes(win.source)) continue;
        if (w == 0) w = win.length();
        if (win.length() != w) throw DataError("windows of different lengths cannot share a dataset");
        included.push_back(&win);
    }
    // Sorting by provenance makes the split independent of input order.
    std::sort(included.begin(), included.end(), [](auto* a, auto* b) { return a->source < b->source; });

    // Strata are (device, distance) cells rather than task classes, so every
    // task derived from one manifest and seed sees the same partition: a
    // window that is test data for the ensemble is never training data for a
    // per-distance model.
    std::map<std::pair<int, long long>, std::vector<const Window*>> cells;
    for (auto* win : included) {
        cells[{win->source.device_id, std::llround(win->source.distance_ft * 1000.0)}].push_back(win);
    }

    std::vector<const Window*> parts[3];
    std::vector<int> part_labels[3];
    for (auto& [key, members] : cells) {
        std::mt19937_64 rng(derive_seed(split.seed, {static_cast<std::uint64_t>(key.first),
                                                     static_cast<std::uint64_t>(key.second)}));
        auto put = [&](Split s, auto first, auto last) {
            for (auto it = first; it != last; ++it) {
                parts[static_cast<int>(s)].push_back(*it);
                part_labels[static_cast<int>(s)].push_back(label_of(task, (*it)->source, device_ids, distances));
            }
        };
        if (split.mode == SplitMode::pooled_runs) {
            std::shuffle(members.begin(), members.end(), rng);
            const std::size_t n_val = count_of(members.size(), split.val);
            const std::size_t n_test = count_of(members.size(), split.test);
            const std::size_t n_train = members.size() - n_val - n_test;
            put(Split::train, members.begin(), members.begin() + static_cast<std::ptrdiff_t>(n_train));
            put(Split::val, members.begin() + static_cast<std::ptrdiff_t>(n_train),
                members.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
            put(Split::test, members.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), members.end());
        } else {
            std::vector<const Window*> held_in, held_out;
            for (auto* win : members) (win->source.run == split.holdout_run ? held_out : held_in).push_back(win);
            std::shuffle(held_in.begin(), held_in.end(), rng);
            std::shuffle(held_out.begin(), held_out.end(), rng);
            const std::size_t n_val = count_of(held_out.size(), split.val / (split.val + split.test));
            put(Split::train, held_in.begin(), held_in.end());
            put(Split::val, held_out.begin(), held_out.begin() + static_cast<std::ptrdiff_t>(n_val));
            put(Split::test, held_out.begin() + static_cast<std::ptrdiff_t>(n_val), held_out.end());
        }
    }

    for (std::size_t c = 0; c < names.size(); ++c) {
        if (std::find(part_labels[0].begin(), part_labels[0].end(), static_cast<int>(c)) == part_labels[0].end()) {
            throw ConfigError("class " + names[c] + " has no training windows for task " + task.describe());
        }
    }

    DatasetSplits out;
    LabeledDataset* targets[3] = {&out.train, &out.val, &out.test};
    for (int s = 0; s < 3; ++s) {
        // Interleave classes so that consecutive windows are not all one label.
        std::vector<std::size_t> order(parts[s].size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::mt19937_64 rng(derive_seed(split.seed, {0x5eedULL, static_cast<std::uint64_t>(s)}));
        std::shuffle(order.begin(), order.end(), rng);
        std::vector<const Window*> wins;
        std::vector<int> labels;
        for (auto i : order) {
            wins.push_back(parts[s][i]);
            labels.push_back(part_labels[s][i]);
        }
        *targets[s] = materialize(wins, labels, task, static_cast<Split>(s), names, w);
    }
    return out;
}

DatasetSplits build_dataset(const sim::Manifest& manifest, const Task& task, const SplitSpec& split,
                            std::size_t window_length, bool normalize) {
    if (window_length == 0) throw ConfigError("window length must be at least 1");
    std::vector<Window> windows;
    for (const auto& e : manifest.recordings) {
        if (task.kind == TaskKind::device_at_distance && e.distance_ft != task.distance_ft) continue;
        const sim::IQRecording rec = sim::load_recording(manifest.iq_path(e));
        for (auto& w : partition_windows(rec, window_length)) {
            windows.push_back(normalize ? normalize_window(std::move(w)) : std::move(w));
        }
    }
    return split_windows(windows, task, split, manifest.device_ids(), manifest.distances());
}

}  // namespace rfp::data
