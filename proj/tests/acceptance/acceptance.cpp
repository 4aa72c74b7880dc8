// Acceptance runner. Prints one PASS/FAIL line per requested criterion and
// exits non-zero when any of them fails.
//
//   rfp_acceptance [--work DIR] [criteria...]     (default: 1 to 9)
//
// Result lines are also appended to DIR/results.txt.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "rfp/cli/cli.hpp"
#include "rfp/data/dataset.hpp"
#include "rfp/data/window.hpp"
#include "rfp/models/architectures.hpp"
#include "rfp/models/classifiers.hpp"
#include "rfp/models/ensemble.hpp"
#include "rfp/nn/checkpoint.hpp"
#include "rfp/nn/gradient_check.hpp"
#include "rfp/report/metrics.hpp"
#include "rfp/seed.hpp"
#include "rfp/sim/capture.hpp"
#include "rfp/sim/profiles.hpp"
#include "rfp/train/curriculum.hpp"
#include "rfp/train/finetune.hpp"
#include "rfp/train/fit.hpp"

namespace fs = std::filesystem;
using namespace rfp;

namespace {

// Pinned thresholds and budgets.
constexpr double kGradTol = 1e-5;
constexpr double kGradTolBatchNorm = 1e-4;
constexpr double kGradEpsilon = 1e-3;
constexpr std::size_t kInvariantWindows = 100000;
constexpr double kRmsTol = 1e-6;
constexpr double kScaleTol = 1e-6;  // relative to max(1, |z|)
constexpr std::size_t kRoutingInputs = 10000;
constexpr double kDeviceAccuracy = 0.95;
constexpr double kDistanceAccuracy = 0.90;
constexpr double kFinetuneGain = 0.05;
constexpr double kShortBudget = 60.0;
constexpr double kTrainBudget = 900.0;
constexpr double kFinetuneBudget = 1800.0;
constexpr double kSmokeBudget = 600.0;

// Experiment setup.
constexpr std::uint64_t kSeed = 2026;
constexpr std::size_t kWindow = 256;
constexpr double kDeviceDistance = 14.0;
constexpr std::size_t kEasyEpochs = 2;
constexpr std::size_t kDistanceEpochs = 2;
constexpr std::size_t kNaiveEpochs = 3;
constexpr std::size_t kFinetuneEpochs = 3;
constexpr std::size_t kCurriculumStage1Windows = 1000;
constexpr std::size_t kCurriculumStage1Epochs = 3;
constexpr std::size_t kCurriculumStage2Epochs = 3;
constexpr std::size_t kSmokeEpochs = 2;

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::string pct(double v) { return fmt("%.2f%%", 100.0 * v); }

train::EpochCallback progress(std::string tag) {
    return [tag](const train::EpochRecord& r) {
        std::cerr << fmt("  [%s] epoch %zu lr %.3g train_loss %.4f val_loss %.4f val_acc %.4f\n", tag.c_str(),
                         r.epoch, r.lr, r.train_loss, r.val_loss, r.val_acc);
    };
}

train::TrainConfig train_config(std::size_t epochs, std::uint64_t seed) {
    train::TrainConfig c;
    c.max_epochs = epochs;
    c.seed = seed;
    return c;
}

data::SplitSpec pooled_split() {
    data::SplitSpec s;
    s.seed = kSeed;
    return s;
}

// Simulates the campaign into dir unless a manifest with the same preset and
// seed is already there.
sim::Manifest ensure_captures(const sim::CaptureSpec& spec, const fs::path& dir) {
    const auto manifest = dir / "manifest.json";
    if (fs::exists(manifest)) {
        auto m = sim::read_manifest(manifest);
        if (m.preset == spec.preset && m.master_seed == spec.master_seed &&
            m.samples_per_capture == spec.samples_per_capture &&
            m.recordings.size() == spec.devices.size() * spec.channels.size() * std::size_t(spec.runs)) {
            return m;
        }
    }
    fs::remove_all(dir);
    return sim::capture_dataset(spec, dir);
}

sim::CaptureSpec easy_single_distance() {
    auto spec = sim::capture_spec(sim::preset("easy"), kSeed);
    std::erase_if(spec.channels, [](const sim::ChannelProfile& c) { return c.distance_ft != kDeviceDistance; });
    return spec;
}

data::LabeledDataset only_run(const data::LabeledDataset& ds, int run) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        if (ds.sources[i].run == run) idx.push_back(i);
    }
    return ds.subset(idx);
}

// ------------------------------------------------------------------ 1

Outcome gradient_fidelity() {
    const auto t0 = Clock::now();
    auto probe = [](nn::Shape shape, std::uint64_t seed) {
        nn::Tensor<double> t(std::move(shape));
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (auto& v : t.values()) v = u(rng);
        return t;
    };
    // Pooling and relu are probed on distinct values spaced far beyond
    // epsilon and away from zero, so no perturbation crosses a kink.
    auto untied = [](nn::Shape shape, std::uint64_t seed) {
        nn::Tensor<double> t(std::move(shape));
        std::vector<double> v(t.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = 0.05 * double(i) - 0.025 * double(v.size()) + 0.0125;
        std::shuffle(v.begin(), v.end(), std::mt19937_64(seed));
        t.values() = v;
        return t;
    };
    struct Case {
        std::string name;
        nn::LayerSpec spec;
        nn::Tensor<double> x;
        nn::Mode mode;
        double tol;
    };
    std::vector<Case> cases;
    for (std::uint64_t s = 0; s < 5; ++s) {
        cases.push_back({"conv1d", nn::LayerSpec::conv1d(4, 5), probe({2, 3, 12}, 10 + s), nn::Mode::train, kGradTol});
        cases.push_back({"residual_block", nn::LayerSpec::residual_block(4, 5, false), probe({2, 3, 10}, 20 + s),
                         nn::Mode::train, kGradTol});
        cases.push_back({"residual_block+bn", nn::LayerSpec::residual_block(4, 5, true), probe({4, 3, 10}, 30 + s),
                         nn::Mode::train, kGradTolBatchNorm});
        cases.push_back({"batch_norm", nn::LayerSpec::batch_norm(), probe({4, 3, 8}, 40 + s), nn::Mode::train,
                         kGradTolBatchNorm});
        cases.push_back({"dense", nn::LayerSpec::dense(6), probe({3, 10}, 50 + s), nn::Mode::train, kGradTol});
        cases.push_back({"dropout(off)", nn::LayerSpec::dropout(0.3), probe({3, 10}, 60 + s), nn::Mode::eval,
                         kGradTol});
        cases.push_back({"max_pool1d", nn::LayerSpec::max_pool1d(2), untied({2, 3, 8}, 70 + s), nn::Mode::train,
                         kGradTol});
        cases.push_back({"relu", nn::LayerSpec::relu(), untied({2, 3, 8}, 80 + s), nn::Mode::train, kGradTol});
        cases.push_back({"softmax", nn::LayerSpec::softmax(), probe({3, 6}, 90 + s), nn::Mode::train, kGradTol});
        cases.push_back({"flatten", nn::LayerSpec::flatten(), probe({2, 3, 4}, 100 + s), nn::Mode::train, kGradTol});
    }
    std::map<std::string, double> worst;
    std::map<std::string, double> tol;
    bool ok = true;
    std::uint64_t n = 0;
    for (auto& c : cases) {
        nn::GradientCheckOptions opt;
        opt.epsilon = kGradEpsilon;
        opt.seed = derive_seed(kSeed, {1, n++});
        opt.mode = c.mode;
        const double e = nn::gradient_check(c.spec, c.x, opt).max_relative_error;
        worst[c.name] = std::max(worst[c.name], e);
        tol[c.name] = c.tol;
        if (!(e < c.tol)) ok = false;
    }
    std::string detail;
    for (const auto& [name, e] : worst) detail += fmt("%s %.1e < %.0e; ", name.c_str(), e, tol[name]);
    const double secs = seconds_since(t0);
    ok = ok && secs < kShortBudget;
    return {ok, detail + fmt("%.1f s", secs)};
}

// ------------------------------------------------------------------ 2

Outcome dataset_invariants() {
    const auto t0 = Clock::now();
    constexpr std::size_t W = 64, n_rec = 20, per_rec = kInvariantWindows / n_rec;
    std::mt19937_64 rng(kSeed);
    std::normal_distribution<float> g;
    std::uniform_real_distribution<double> logu(-3.0, 3.0);

    std::vector<data::Window> all;
    std::size_t overlap_bad = 0, rms_bad = 0, scale_bad = 0, idem_bad = 0;
    double worst_rms = 0.0, worst_scale = 0.0;
    for (std::size_t r = 0; r < n_rec; ++r) {
        sim::IQRecording rec;
        rec.device_id = int(r % 5);
        rec.distance_ft = 2.0 + 6.0 * double(r / 5);
        rec.run = 0;
        // A remainder that must be dropped.
        rec.samples.resize(per_rec * W + 17);
        for (auto& z : rec.samples) z = {g(rng), g(rng)};
        auto ws = data::partition_windows(rec, W);
        if (ws.size() != per_rec) ++overlap_bad;
        for (std::size_t k = 0; k < ws.size(); ++k) {
            const auto& w = ws[k];
            if (w.source.window_index != k) ++overlap_bad;
            for (std::size_t j = 0; j < W; ++j) {
                if (w.iq[j] != std::complex<float>(rec.samples[k * W + j])) {
                    ++overlap_bad;
                    break;
                }
            }
            const double alpha = std::pow(10.0, logu(rng));
            data::Window scaled = w;
            for (auto& z : scaled.iq) z *= static_cast<float>(alpha);
            const auto n1 = data::normalize_window(w);
            const auto n2 = data::normalize_window(scaled);
            const auto n3 = data::normalize_window(n1);
            const double e = std::abs(data::rms(n1) - 1.0);
            worst_rms = std::max(worst_rms, e);
            if (!(e <= kRmsTol)) ++rms_bad;
            double ws_err = 0.0, wi_err = 0.0;
            for (std::size_t j = 0; j < W; ++j) {
                const double m = std::max(1.0, double(std::abs(n1.iq[j])));
                ws_err = std::max(ws_err, double(std::abs(n1.iq[j] - n2.iq[j])) / m);
                wi_err = std::max(wi_err, double(std::abs(n1.iq[j] - n3.iq[j])) / m);
            }
            worst_scale = std::max(worst_scale, ws_err);
            if (!(ws_err <= kScaleTol)) ++scale_bad;
            if (!(wi_err <= kScaleTol)) ++idem_bad;
            all.push_back(n1);
        }
    }

    std::size_t leak_bad = 0;
    const std::vector<int> devices = {0, 1, 2, 3, 4};
    const std::vector<double> distances = {2, 8, 14, 20};
    for (auto task : {data::Task::device(), data::Task::distance(), data::Task::device_at_distance(8)}) {
        auto s = data::split_windows(all, task, pooled_split(), devices, distances);
        std::set<data::WindowSource> seen;
        std::size_t total = 0;
        for (const auto* part : {&s.train, &s.val, &s.test}) {
            for (const auto& src : part->sources) {
                ++total;
                if (!seen.insert(src).second) ++leak_bad;
            }
        }
        std::size_t expect = 0;
        for (const auto& w : all) expect += task.includes(w.source) ? 1 : 0;
        if (total != expect) ++leak_bad;
    }

    const double secs = seconds_since(t0);
    const bool ok = all.size() == kInvariantWindows && overlap_bad == 0 && rms_bad == 0 && scale_bad == 0 &&
                    idem_bad == 0 && leak_bad == 0 && secs < kShortBudget;
    return {ok, fmt("%zu windows; max |rms-1| %.1e; max scale deviation %.1e; violations: tiling %zu, rms %zu, "
                    "scale %zu, idempotence %zu, split %zu; %.1f s",
                    all.size(), worst_rms, worst_scale, overlap_bad, rms_bad, scale_bad, idem_bad, leak_bad, secs)};
}

// ------------------------------------------------------------------ 3

Outcome routing_equivalence() {
    const auto t0 = Clock::now();
    constexpr std::size_t W = 16, M = 16;
    std::string detail;
    bool ok = true;
    for (std::size_t n_d : {1u, 3u, 11u}) {
        std::vector<double> d;
        for (std::size_t k = 0; k < n_d; ++k) d.push_back(2.0 + 6.0 * double(k));
        models::DistanceClassifier dist{
            n_d == 1 ? models::Net({2, W}, {nn::LayerSpec::flatten(), nn::LayerSpec::dense(1)}, kSeed)
                     : models::build_resnet(n_d, W, derive_seed(kSeed, {n_d, 0})),
            d};
        std::vector<std::string> names;
        for (std::size_t m = 0; m < M; ++m) names.push_back(fmt("dev%02zu", m));
        std::vector<models::DeviceClassifier> devs;
        for (std::size_t k = 0; k < n_d; ++k) {
            devs.push_back({models::build_resnet(M, W, derive_seed(kSeed, {n_d, k + 1})), d[k], names});
        }
        auto e = models::assemble_ensemble(std::move(dist), std::move(devs));

        std::mt19937_64 rng(derive_seed(kSeed, {n_d, 99}));
        std::normal_distribution<float> g;
        std::uniform_real_distribution<float> shift(-1.0f, 1.0f);
        nn::Tensor<float> x({kRoutingInputs, 2, W});
        for (std::size_t b = 0; b < kRoutingInputs; ++b) {
            // Per-input offsets spread the router's decisions across segments.
            const float oi = shift(rng), oq = shift(rng);
            float* p = x.raw() + b * 2 * W;
            double s = 0.0;
            for (std::size_t j = 0; j < W; ++j) {
                p[j] = g(rng) + oi;
                p[W + j] = g(rng) + oq;
            }
            for (std::size_t j = 0; j < 2 * W; ++j) s += double(p[j]) * p[j];
            const float scale = float(1.0 / std::sqrt(s / double(W)));
            for (std::size_t j = 0; j < 2 * W; ++j) p[j] *= scale;
        }

        std::vector<models::EnsembleOutput> masked;
        std::vector<models::RoutedPrediction> routed;
        for (std::size_t b0 = 0; b0 < kRoutingInputs; b0 += 500) {
            std::vector<std::size_t> rows(std::min<std::size_t>(500, kRoutingInputs - b0));
            for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = b0 + i;
            const auto chunk = models::gather_rows(x, rows);
            auto m = models::ensemble_predict(e, chunk);
            auto r = models::routed_predict(e, chunk);
            masked.insert(masked.end(), m.begin(), m.end());
            routed.insert(routed.end(), r.begin(), r.end());
        }
        std::size_t mismatch = 0, not_one_hot = 0;
        std::set<std::size_t> segments;
        for (std::size_t b = 0; b < kRoutingInputs; ++b) {
            if (masked[b].distance_index != routed[b].distance_index || masked[b].device != routed[b].device) {
                ++mismatch;
            }
            segments.insert(masked[b].distance_index);
            // Exactly one nonzero entry, and it sits in the routed segment.
            std::size_t nonzero = 0, where = 0;
            for (std::size_t i = 0; i < masked[b].masked.size(); ++i) {
                if (masked[b].masked[i] != 0.0f) {
                    ++nonzero;
                    where = i;
                }
            }
            if (masked[b].masked.size() != n_d * M || nonzero != 1 || where / M != masked[b].distance_index ||
                where % M != masked[b].device) {
                ++not_one_hot;
            }
        }
        const bool covered = n_d == 1 || segments.size() > 1;
        ok = ok && mismatch == 0 && not_one_hot == 0 && covered;
        detail += fmt("|D|=%zu: %zu/%zu agree, %zu not one-hot, %zu segments used; ", n_d, kRoutingInputs - mismatch,
                      kRoutingInputs, not_one_hot, segments.size());
    }
    const double secs = seconds_since(t0);
    ok = ok && secs < kShortBudget;
    return {ok, detail + fmt("%.1f s", secs)};
}

// ------------------------------------------------------------------ 4 and 6

struct DeviceExperiment {
    data::DatasetSplits splits;
    double gen_seconds = 0.0;
};

DeviceExperiment easy_device_data(const fs::path& work) {
    const auto t0 = Clock::now();
    auto manifest = ensure_captures(easy_single_distance(), work / "easy_14ft");
    DeviceExperiment e;
    e.splits = data::build_dataset(manifest, data::Task::device_at_distance(kDeviceDistance), pooled_split(), kWindow);
    e.gen_seconds = seconds_since(t0);
    std::cerr << fmt("  easy preset at %gft: %zu train, %zu val, %zu test windows (%.1f s)\n", kDeviceDistance,
                     e.splits.train.size(), e.splits.val.size(), e.splits.test.size(), e.gen_seconds);
    return e;
}

fs::path easy_model_path(const fs::path& work, models::Architecture a) {
    return work / "easy_models" / (std::string(models::to_string(a)) + "_14ft.ckpt");
}

models::Net train_easy(const fs::path& work, const data::DatasetSplits& s, models::Architecture a) {
    auto net = models::build_network(a, s.train.n_classes(), kWindow, derive_seed(kSeed, {4, std::uint64_t(a)}));
    train::fit(net, s.train, s.val, train_config(kEasyEpochs, derive_seed(kSeed, {4, std::uint64_t(a), 1})),
               progress(std::string(models::to_string(a))));
    fs::create_directories(easy_model_path(work, a).parent_path());
    nn::save_checkpoint(net, easy_model_path(work, a));
    return net;
}

Outcome easy_device_accuracy(const fs::path& work) {
    const auto t0 = Clock::now();
    auto e = easy_device_data(work);
    auto net = train_easy(work, e.splits, models::Architecture::resnet);
    const double acc = report::evaluate(net, e.splits.test).accuracy;
    const double secs = seconds_since(t0);
    const bool ok = acc >= kDeviceAccuracy && secs <= kTrainBudget;
    return {ok, fmt("ResNet test accuracy %s (>= %s) on %zu windows, %zu train windows, %zu epochs, %.0f s (<= %.0f s)",
                    pct(acc).c_str(), pct(kDeviceAccuracy).c_str(), e.splits.test.size(), e.splits.train.size(),
                    kEasyEpochs, secs, kTrainBudget)};
}

Outcome architecture_ordering(const fs::path& work) {
    auto e = easy_device_data(work);
    std::map<models::Architecture, double> acc;
    for (auto a : {models::Architecture::resnet, models::Architecture::baseline}) {
        const auto path = easy_model_path(work, a);
        // Criterion 4 leaves the ResNet checkpoint behind; reuse it when present.
        auto net = fs::exists(path) ? nn::load_checkpoint<float>(path) : train_easy(work, e.splits, a);
        net.set_mode(nn::Mode::eval);
        acc[a] = report::evaluate(net, e.splits.test).accuracy;
    }
    const double r = acc[models::Architecture::resnet], b = acc[models::Architecture::baseline];
    return {r >= b, fmt("%gft: resnet %s, baseline %s", kDeviceDistance, pct(r).c_str(), pct(b).c_str())};
}

// ------------------------------------------------------------------ 5

Outcome easy_distance_accuracy(const fs::path& work) {
    const auto t0 = Clock::now();
    auto spec = sim::capture_spec(sim::preset("easy"), kSeed);
    // 50k windows over all captures, so the 0.8 train fraction gives ~40k.
    const std::size_t captures = spec.devices.size() * spec.channels.size() * std::size_t(spec.runs);
    spec.samples_per_capture = (50000 / captures + 1) * kWindow;
    auto manifest = ensure_captures(spec, work / "easy_distance");
    auto s = data::build_dataset(manifest, data::Task::distance(), pooled_split(), kWindow, true);
    double worst = 0.0;
    for (std::size_t i = 0; i < s.train.size(); ++i) {
        const auto w = s.train.window(i);
        double p = 0.0;
        for (float v : w) p += double(v) * v;
        worst = std::max(worst, std::abs(std::sqrt(p / double(kWindow)) - 1.0));
    }
    std::cerr << fmt("  distance task: %zu train, %zu val, %zu test windows, max |rms-1| %.1e\n", s.train.size(),
                     s.val.size(), s.test.size(), worst);
    auto net = models::build_resnet(s.train.n_classes(), kWindow, derive_seed(kSeed, {5}));
    train::fit(net, s.train, s.val, train_config(kDistanceEpochs, derive_seed(kSeed, {5, 1})), progress("distance"));
    const double acc = report::evaluate(net, s.test).accuracy;
    const double secs = seconds_since(t0);
    const bool ok = acc >= kDistanceAccuracy && worst <= 1e-3 && secs <= kTrainBudget;
    return {ok, fmt("distance test accuracy %s (>= %s) over %zu distances on normalized windows, %zu train windows, "
                    "%.0f s (<= %.0f s)",
                    pct(acc).c_str(), pct(kDistanceAccuracy).c_str(), s.train.n_classes(), s.train.size(), secs,
                    kTrainBudget)};
}

// ------------------------------------------------------------------ 7

Outcome finetune_direction(const fs::path& work) {
    const auto t0 = Clock::now();
    auto manifest = ensure_captures(sim::capture_spec(sim::preset("hard"), kSeed), work / "hard");
    const auto split = pooled_split();
    // Every task shares one window partition, so the run-0 parts never see
    // the mixed-run test windows.
    auto all = data::build_dataset(manifest, data::Task::device(), split, kWindow);
    auto dist = data::build_dataset(manifest, data::Task::distance(), split, kWindow);
    const auto distances = manifest.distances();

    auto dist_net = models::build_resnet(distances.size(), kWindow, derive_seed(kSeed, {7, 0}));
    train::fit(dist_net, only_run(dist.train, 0), only_run(dist.val, 0),
               train_config(kNaiveEpochs, derive_seed(kSeed, {7, 0, 1})), progress("run0 distance"));
    std::vector<models::DeviceClassifier> parts;
    for (std::size_t k = 0; k < distances.size(); ++k) {
        auto s = data::build_dataset(manifest, data::Task::device_at_distance(distances[k]), split, kWindow);
        auto net = models::build_resnet(s.train.n_classes(), kWindow, derive_seed(kSeed, {7, k + 1}));
        train::fit(net, only_run(s.train, 0), only_run(s.val, 0),
                   train_config(kNaiveEpochs, derive_seed(kSeed, {7, k + 1, 1})),
                   progress(fmt("run0 device@%gft", distances[k])));
        parts.push_back({std::move(net), distances[k], s.train.label_names});
    }
    auto e = models::assemble_ensemble({std::move(dist_net), distances}, std::move(parts));
    const double naive = report::evaluate(e, all.test).accuracy;
    const double naive_run1 = report::evaluate(e, only_run(all.test, 1)).accuracy;
    const double naive_run0 = report::evaluate(e, only_run(all.test, 0)).accuracy;
    std::cerr << fmt("  naive ensemble: mixed %s, run 0 %s, run 1 %s\n", pct(naive).c_str(), pct(naive_run0).c_str(),
                     pct(naive_run1).c_str());

    train::finetune_ensemble(e, all.train, all.val, train_config(kFinetuneEpochs, derive_seed(kSeed, {7, 9})), {},
                             progress("finetune"));
    const double tuned = report::evaluate(e, all.test).accuracy;
    const double tuned_run1 = report::evaluate(e, only_run(all.test, 1)).accuracy;
    const double secs = seconds_since(t0);
    const bool ok = tuned - naive >= kFinetuneGain && secs <= kFinetuneBudget;
    return {ok, fmt("mixed-run test accuracy %s -> %s (gain %+.2f points, need >= %.0f); run 1 %s -> %s; "
                    "%zu mixed test windows; %.0f s (<= %.0f s)",
                    pct(naive).c_str(), pct(tuned).c_str(), 100.0 * (tuned - naive), 100.0 * kFinetuneGain,
                    pct(naive_run1).c_str(), pct(tuned_run1).c_str(), all.test.size(), secs, kFinetuneBudget)};
}

// ------------------------------------------------------------------ 8

std::string epochs_to(const std::vector<train::EpochRecord>& epochs, double threshold) {
    for (std::size_t i = 0; i < epochs.size(); ++i) {
        if (epochs[i].val_acc >= threshold) return std::to_string(i + 1);
    }
    return "never";
}

Outcome curriculum_report(const fs::path& work) {
    const auto t0 = Clock::now();
    auto manifest = ensure_captures(sim::capture_spec(sim::preset("hard"), kSeed), work / "hard");
    auto s = data::build_dataset(manifest, data::Task::device_at_distance(kDeviceDistance), pooled_split(), kWindow);
    const std::size_t budget = kCurriculumStage1Epochs + kCurriculumStage2Epochs;

    train::CurriculumSpec cs;
    cs.stage1_windows = kCurriculumStage1Windows;
    cs.stage2_windows = s.train.size();
    cs.stage1_max_epochs = kCurriculumStage1Epochs;
    cs.stage2_max_epochs = kCurriculumStage2Epochs;
    auto cur_net = models::build_resnet(s.train.n_classes(), kWindow, derive_seed(kSeed, {8}));
    auto cur = train::curriculum_fit(cur_net, s.train, s.val, cs, train_config(budget, derive_seed(kSeed, {8, 1})),
                                     progress("curriculum"));
    const double cur_acc = report::evaluate(cur_net, s.test).accuracy;

    auto dir_net = models::build_resnet(s.train.n_classes(), kWindow, derive_seed(kSeed, {8}));
    auto direct = train::fit(dir_net, s.train, s.val, train_config(budget, derive_seed(kSeed, {8, 2})),
                             progress("direct"));
    const double dir_acc = report::evaluate(dir_net, s.test).accuracy;

    auto cur_epochs = cur.stage1.epochs;
    cur_epochs.insert(cur_epochs.end(), cur.stage2.epochs.begin(), cur.stage2.epochs.end());
    double best = 0.0;
    for (const auto* v : {&cur_epochs, &direct.epochs}) {
        for (const auto& r : *v) best = std::max(best, r.val_acc);
    }
    const double threshold = 0.9 * best;

    fs::create_directories(work / "curriculum");
    std::ofstream csv(work / "curriculum" / "curriculum_vs_direct.csv");
    csv << "method,epochs,windows_seen,test_acc,best_val_acc,epochs_to_threshold\n";
    const std::size_t cur_seen = cur.stage1.epochs.size() * cs.stage1_windows +
                                 cur.stage2.epochs.size() * cs.stage2_windows;
    csv << fmt("curriculum,%zu,%zu,%.6f,%.6f,%s\n", cur_epochs.size(), cur_seen, cur_acc,
               std::max(cur.stage1.best_val_acc, cur.stage2.best_val_acc), epochs_to(cur_epochs, threshold).c_str());
    csv << fmt("direct,%zu,%zu,%.6f,%.6f,%s\n", direct.epochs.size(), direct.epochs.size() * s.train.size(), dir_acc,
               direct.best_val_acc, epochs_to(direct.epochs, threshold).c_str());
    csv << fmt("# threshold=%.6f (0.9 x best validation accuracy of either run)\n", threshold);
    const bool ok = bool(csv) && cur_epochs.size() <= budget && direct.epochs.size() <= budget;
    return {ok, fmt("reported only: curriculum test %s (threshold at epoch %s), direct test %s (threshold at epoch %s), "
                    "budget %zu epochs, threshold val acc %.3f; %.0f s",
                    pct(cur_acc).c_str(), epochs_to(cur_epochs, threshold).c_str(), pct(dir_acc).c_str(),
                    epochs_to(direct.epochs, threshold).c_str(), budget, threshold, seconds_since(t0))};
}

// ------------------------------------------------------------------ 9

std::map<std::string, std::string> csv_files(const fs::path& root) {
    std::map<std::string, std::string> out;
    for (const auto& f : fs::recursive_directory_iterator(root)) {
        if (f.is_regular_file() && f.path().extension() == ".csv") {
            std::ifstream in(f.path(), std::ios::binary);
            std::stringstream ss;
            ss << in.rdbuf();
            out[fs::relative(f.path(), root).generic_string()] = ss.str();
        }
    }
    return out;
}

Outcome reproducibility(const fs::path& work) {
    const auto t0 = Clock::now();
    const std::string epochs = std::to_string(kSmokeEpochs);
    std::vector<std::map<std::string, std::string>> outputs;
    std::string failure;
    for (int pass = 0; pass < 2; ++pass) {
        const auto out = work / ("smoke_" + std::to_string(pass));
        fs::remove_all(out);
        const std::vector<std::vector<std::string>> steps = {
            {"generate", "--preset", "tiny"},
            {"dataset", "--task", "distance"},
            {"train", "distance", "--epochs", epochs},
            {"train", "device", "--distance", "2", "--epochs", epochs},
            {"train", "device", "--distance", "14", "--epochs", epochs},
            {"ensemble", "assemble"},
            {"eval"},
            {"report", "heatmap"},
        };
        for (const auto& step : steps) {
            std::vector<std::string> args = {"-q", "--seed", std::to_string(kSeed), "--out", out.string()};
            args.insert(args.end(), step.begin(), step.end());
            std::ostringstream so, se;
            if (cli::run(args, so, se) != 0 && failure.empty()) failure = step.front() + ": " + se.str();
        }
        outputs.push_back(csv_files(out));
    }
    std::size_t differing = 0;
    for (const auto& [name, text] : outputs[0]) {
        auto it = outputs[1].find(name);
        if (it == outputs[1].end() || it->second != text) ++differing;
    }
    if (outputs[0].size() != outputs[1].size()) ++differing;
    const double secs = seconds_since(t0);
    const bool ok = failure.empty() && differing == 0 && outputs[0].size() >= 6 && secs <= kSmokeBudget;
    std::string detail = fmt("%zu CSV files per run, %zu differ; %.0f s (<= %.0f s)", outputs[0].size(), differing,
                             secs, kSmokeBudget);
    if (!failure.empty()) detail += "; failed step " + failure;
    return {ok, detail};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria runner"};
    std::vector<int> which;
    std::string work = "acceptance_work";
    app.add_option("criteria", which, "Criteria to run (1-9); default all")->check(CLI::Range(1, 9));
    app.add_option("--work", work, "Scratch directory for captures and checkpoints");
    CLI11_PARSE(app, argc, argv);
    if (which.empty()) which = {1, 2, 3, 4, 5, 6, 7, 8, 9};
    fs::create_directories(work);

    const std::map<int, std::function<Outcome()>> criteria = {
        {1, gradient_fidelity},
        {2, dataset_invariants},
        {3, routing_equivalence},
        {4, [&] { return easy_device_accuracy(work); }},
        {5, [&] { return easy_distance_accuracy(work); }},
        {6, [&] { return architecture_ordering(work); }},
        {7, [&] { return finetune_direction(work); }},
        {8, [&] { return curriculum_report(work); }},
        {9, [&] { return reproducibility(work); }},
    };
    int failed = 0;
    for (int c : which) {
        Outcome o;
        try {
            o = criteria.at(c)();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        const std::string line =
            "criterion " + std::to_string(c) + ": " + (o.pass ? "PASS" : "FAIL") + "  " + o.detail;
        std::cout << line << std::endl;
        std::ofstream(fs::path(work) / "results.txt", std::ios::app) << line << "\n";
        failed += o.pass ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
