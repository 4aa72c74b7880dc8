#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "rfp/data/cache.hpp"
#include "rfp/data/dataset.hpp"
#include "rfp/errors.hpp"

using namespace rfp;
using namespace rfp::data;
namespace fs = std::filesystem;
using cf = std::complex<float>;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path p = fs::path(testing::TempDir()) / ("rfp_data_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

sim::IQRecording ramp_recording(std::size_t n) {
    sim::IQRecording r;
    r.device_id = 3;
    r.distance_ft = 14;
    r.run = 1;
    for (std::size_t i = 0; i < n; ++i) r.samples.push_back({float(i), -float(i)});
    return r;
}

Window random_window(std::size_t w, std::mt19937_64& rng, WindowSource src = {}) {
    std::normal_distribution<float> g(0.0f, 1.0f);
    Window out;
    out.iq.resize(w);
    for (auto& z : out.iq) z = {g(rng), g(rng)};
    out.source = src;
    return out;
}

// Synthetic windows for devices x distances x runs, `per` windows each.
std::vector<Window> grid_windows(int devices, const std::vector<double>& distances, int runs, std::size_t per,
                                 std::size_t w = 8) {
    std::mt19937_64 rng(1);
    std::vector<Window> out;
    for (int d = 0; d < devices; ++d)
        for (double dist : distances)
            for (int r = 0; r < runs; ++r)
                for (std::size_t i = 0; i < per; ++i) out.push_back(random_window(w, rng, {d, dist, r, i}));
    return out;
}

std::vector<int> ids(int n) {
    std::vector<int> v(n);
    for (int i = 0; i < n; ++i) v[i] = i;
    return v;
}

}  // namespace

// ---------------------------------------------------------------- windows

TEST(Partition, CountsAndTiling) {
    EXPECT_EQ(partition_windows(ramp_recording(1024), 256).size(), 4u);
    EXPECT_TRUE(partition_windows(ramp_recording(255), 256).empty());
    const auto w = partition_windows(ramp_recording(600), 256);
    ASSERT_EQ(w.size(), 2u);
    EXPECT_EQ(w[0].iq.front(), cf(0, 0));
    EXPECT_EQ(w[0].iq.back(), cf(255, -255));
    EXPECT_EQ(w[1].iq.front(), cf(256, -256));
    EXPECT_EQ(w[1].iq.back(), cf(511, -511));
    EXPECT_EQ(w[1].source, (WindowSource{3, 14, 1, 1}));
    EXPECT_FALSE(w[0].normalized);
    EXPECT_THROW(partition_windows(ramp_recording(10), 0), ConfigError);
}

TEST(Normalize, ConstantWindowBecomesOne) {
    Window w;
    w.iq.assign(64, cf(2, 0));
    const Window n = normalize_window(w);
    EXPECT_TRUE(n.normalized);
    for (auto z : n.iq) EXPECT_EQ(z, cf(1, 0));
}

TEST(Normalize, SingleSpikeMatchesHandRms) {
    Window w;
    w.iq.assign(256, cf(0, 0));
    w.iq[0] = {3, 4};
    EXPECT_DOUBLE_EQ(rms(w), 5.0 / 16.0);
    const Window n = normalize_window(w);
    EXPECT_NEAR(n.iq[0].real(), 3.0 * 16.0 / 5.0, 1e-5);
    EXPECT_NEAR(n.iq[0].imag(), 4.0 * 16.0 / 5.0, 1e-5);
    for (std::size_t i = 1; i < 256; ++i) EXPECT_EQ(n.iq[i], cf(0, 0));
}

TEST(Normalize, AllZeroIsRejected) {
    Window w;
    w.iq.assign(16, cf(0, 0));
    EXPECT_THROW(normalize_window(w), DataError);
}

TEST(Normalize, PhaseIsPreserved) {
    std::mt19937_64 rng(4);
    const Window w = random_window(256, rng);
    const Window n = normalize_window(w);
    for (std::size_t i = 0; i < w.iq.size(); ++i) EXPECT_NEAR(std::arg(n.iq[i]), std::arg(w.iq[i]), 1e-5);
}

TEST(Tensor, EncodingLayout) {
    Window w;
    w.iq = {{1, 2}, {3, -4}};
    const auto t = to_tensor(w);
    EXPECT_EQ(t.shape(), (nn::Shape{2, 2}));
    EXPECT_EQ(t.values(), (std::vector<float>{1, 3, 2, -4}));
    Window real;
    real.iq = {{1, 0}, {-2, 0}, {5, 0}};
    const auto tr = to_tensor(real);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(tr[3 + i], 0.0f);
    std::mt19937_64 rng(2);
    const Window r = random_window(256, rng);
    EXPECT_EQ(from_tensor(to_tensor(r)).iq, r.iq);
}

// ---------------------------------------------------------------- splits

TEST(Split, PooledFractionsOnThousandWindows) {
    const auto windows = grid_windows(1, {2}, 1, 1000);
    const auto s = split_windows(windows, Task::device(), SplitSpec{}, ids(1), {2});
    EXPECT_EQ(s.train.size(), 800u);
    EXPECT_EQ(s.val.size(), 100u);
    EXPECT_EQ(s.test.size(), 100u);
}

TEST(Split, ClassCountsForFullSizeShapes) {
    std::vector<double> full_d = {2, 8, 14, 20, 26, 32, 38, 44, 50, 56, 62};
    const auto windows = grid_windows(16, full_d, 2, 10);
    const auto dev = split_windows(windows, Task::device_at_distance(8), SplitSpec{}, ids(16), full_d);
    EXPECT_EQ(dev.train.n_classes(), 16u);
    for (const auto& s : dev.train.sources) EXPECT_EQ(s.distance_ft, 8.0);
    EXPECT_EQ(dev.train.size() + dev.val.size() + dev.test.size(), 16u * 20);
    const auto dist = split_windows(windows, Task::distance(), SplitSpec{}, ids(16), full_d);
    EXPECT_EQ(dist.train.n_classes(), 11u);
    EXPECT_EQ(dist.train.label_names.front(), "2ft");
    EXPECT_EQ(dev.train.label_names.back(), "dev15");
}

TEST(Split, StratifiedBalanceAndLabelConsistency) {
    const std::vector<double> d = {2, 14, 26};
    const auto windows = grid_windows(4, d, 2, 37);
    SplitSpec spec;
    spec.seed = 9;
    for (const Task& task : {Task::device(), Task::distance(), Task::device_at_distance(14)}) {
        const auto s = split_windows(windows, task, spec, ids(4), d);
        const auto counts = s.train.class_counts();
        const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
        EXPECT_LE(*hi - *lo, 1u) << task.describe();
        for (const auto* ds : {&s.train, &s.val, &s.test}) {
            for (std::size_t i = 0; i < ds->size(); ++i) {
                EXPECT_EQ(ds->labels[i], label_of(task, ds->sources[i], ids(4), d));
                EXPECT_TRUE(task.includes(ds->sources[i]));
            }
        }
    }
}

TEST(Split, NoLeakageAndDeterminism) {
    const std::vector<double> d = {2, 14};
    auto windows = grid_windows(3, d, 2, 50);
    SplitSpec spec;
    spec.seed = 3;
    const auto a = split_windows(windows, Task::device(), spec, ids(3), d);
    std::set<WindowSource> seen;
    for (const auto* ds : {&a.train, &a.val, &a.test})
        for (const auto& s : ds->sources) EXPECT_TRUE(seen.insert(s).second);
    EXPECT_EQ(seen.size(), windows.size());
    // Input order does not matter.
    std::reverse(windows.begin(), windows.end());
    const auto b = split_windows(windows, Task::device(), spec, ids(3), d);
    EXPECT_EQ(a.train.sources, b.train.sources);
    EXPECT_EQ(a.test.data, b.test.data);
    spec.seed = 4;
    EXPECT_NE(split_windows(windows, Task::device(), spec, ids(3), d).train.sources, a.train.sources);
}

TEST(Split, TasksShareOnePartition) {
    const std::vector<double> d = {2, 14, 26};
    const auto windows = grid_windows(4, d, 2, 37);
    for (auto mode : {SplitMode::pooled_runs, SplitMode::run_holdout}) {
        SplitSpec spec;
        spec.mode = mode;
        spec.seed = 11;
        const auto all = split_windows(windows, Task::device(), spec, ids(4), d);
        const auto dist = split_windows(windows, Task::distance(), spec, ids(4), d);
        std::set<WindowSource> test(all.test.sources.begin(), all.test.sources.end());
        EXPECT_EQ(test, std::set<WindowSource>(dist.test.sources.begin(), dist.test.sources.end()));
        std::size_t per_distance_test = 0;
        for (double j : d) {
            const auto one = split_windows(windows, Task::device_at_distance(j), spec, ids(4), d);
            for (const auto& s : one.train.sources) EXPECT_EQ(test.count(s), 0u);
            for (const auto& s : one.test.sources) EXPECT_EQ(test.count(s), 1u);
            per_distance_test += one.test.size();
        }
        EXPECT_EQ(per_distance_test, test.size());
    }
}

TEST(Split, RunHoldoutKeepsHeldOutRunOutOfTraining) {
    const std::vector<double> d = {2, 14};
    const auto windows = grid_windows(3, d, 2, 40);
    SplitSpec spec;
    spec.mode = SplitMode::run_holdout;
    spec.holdout_run = 1;
    const auto s = split_windows(windows, Task::device(), spec, ids(3), d);
    for (const auto& src : s.train.sources) EXPECT_EQ(src.run, 0);
    for (const auto& src : s.val.sources) EXPECT_EQ(src.run, 1);
    for (const auto& src : s.test.sources) EXPECT_EQ(src.run, 1);
    EXPECT_EQ(s.train.size(), 3u * 2 * 40);
    EXPECT_EQ(s.val.size(), s.test.size());
}

TEST(Split, MissingClassIsConfigError) {
    const auto windows = grid_windows(2, {2}, 1, 10);
    EXPECT_THROW(split_windows(windows, Task::device(), SplitSpec{}, ids(3), {2}), ConfigError);
    EXPECT_THROW(split_windows(windows, Task::device_at_distance(5), SplitSpec{}, ids(2), {2}), ConfigError);
    SplitSpec bad;
    bad.train = 0.9;
    EXPECT_THROW(split_windows(windows, Task::device(), bad, ids(2), {2}), ConfigError);
}

TEST(Dataset, BatchAndSubsetCopyWindows) {
    const auto windows = grid_windows(2, {2}, 1, 20, 4);
    const auto s = split_windows(windows, Task::device(), SplitSpec{}, ids(2), {2});
    const std::vector<std::size_t> idx = {3, 0};
    const auto t = s.train.batch(idx);
    EXPECT_EQ(t.shape(), (nn::Shape{2, 2, 4}));
    for (std::size_t k = 0; k < 8; ++k) EXPECT_EQ(t[8 + k], s.train.window(0)[k]);
    const auto sub = s.train.subset(idx);
    EXPECT_EQ(sub.labels, (std::vector<int>{s.train.labels[3], s.train.labels[0]}));
    EXPECT_EQ(sub.batch(0, 2), t);
}

// ---------------------------------------------------------------- end to end

TEST(BuildDataset, FromSimulatedCaptures) {
    sim::SimPreset p = sim::preset("tiny");
    p.capture_seconds = 256 * 20 / p.sample_rate;
    const auto dir = fresh_dir("build");
    const auto m = sim::capture_dataset(sim::capture_spec(p, 7), dir);
    const auto s = build_dataset(sim::read_manifest(dir), Task::device_at_distance(14), SplitSpec{}, 256);
    EXPECT_EQ(s.train.n_classes(), 3u);
    EXPECT_EQ(s.train.size() + s.val.size() + s.test.size(), 3u * 2 * 20);
    for (const auto* ds : {&s.train, &s.val, &s.test}) {
        for (std::size_t i = 0; i < ds->size(); ++i) {
            EXPECT_EQ(ds->sources[i].distance_ft, 14.0);
            double p2 = 0;
            const auto w = ds->window(i);
            for (float v : w) p2 += double(v) * v;
            EXPECT_NEAR(p2 / 256, 1.0, 1e-6);
        }
    }
}

TEST(Cache, RoundTripAndCorruption) {
    const std::vector<double> d = {2, 14};
    const auto s = split_windows(grid_windows(3, d, 2, 10), Task::device_at_distance(14), SplitSpec{}, ids(3), d);
    const auto dir = fresh_dir("cache");
    write_cache(s.val, dir / "val.rfpds");
    const auto back = read_cache(dir / "val.rfpds");
    EXPECT_EQ(back.task, s.val.task);
    EXPECT_EQ(back.split, Split::val);
    EXPECT_EQ(back.window_length, s.val.window_length);
    EXPECT_EQ(back.label_names, s.val.label_names);
    EXPECT_EQ(back.labels, s.val.labels);
    EXPECT_EQ(back.sources, s.val.sources);
    EXPECT_EQ(back.data, s.val.data);

    const auto size = fs::file_size(dir / "val.rfpds");
    fs::resize_file(dir / "val.rfpds", size - 3);
    EXPECT_THROW(read_cache(dir / "val.rfpds"), IoError);
    std::ofstream(dir / "junk.rfpds") << "not a cache at all";
    EXPECT_THROW(read_cache(dir / "junk.rfpds"), IoError);
}
