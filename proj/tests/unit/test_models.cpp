#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numeric>
#include <random>
#include <set>

#include "rfp/errors.hpp"
#include "rfp/models/ensemble.hpp"
#include "rfp/nn/checkpoint.hpp"

using namespace rfp;
using namespace rfp::models;
using nn::LayerKind;
using nn::LayerSpec;
using nn::Tensor;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path p = fs::path(testing::TempDir()) / ("rfp_models_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

// Unit-RMS random windows, [B, 2, W].
Tensor<float> random_windows(std::size_t b, std::size_t w, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<float> g;
    Tensor<float> t({b, 2, w});
    for (std::size_t i = 0; i < b; ++i) {
        float* x = t.raw() + i * 2 * w;
        double s = 0;
        for (std::size_t k = 0; k < 2 * w; ++k) {
            x[k] = g(rng);
            s += double(x[k]) * x[k];
        }
        float scale = float(1.0 / std::sqrt(s / double(w)));
        for (std::size_t k = 0; k < 2 * w; ++k) x[k] *= scale;
    }
    return t;
}

Net small_net(std::size_t n, std::size_t w, std::uint64_t seed) {
    return Net({2, w}, {LayerSpec::conv1d(4, 3), LayerSpec::relu(), LayerSpec::flatten(), LayerSpec::dense(n)}, seed);
}

std::vector<std::string> names(std::size_t m) {
    std::vector<std::string> v;
    for (std::size_t i = 0; i < m; ++i) v.push_back("dev" + std::to_string(i));
    return v;
}

EnsembleModel small_ensemble(std::size_t n_d, std::size_t n_m, std::size_t w, std::uint64_t seed) {
    std::vector<double> d;
    for (std::size_t k = 0; k < n_d; ++k) d.push_back(2.0 + 6.0 * double(k));
    DistanceClassifier dist{small_net(std::max<std::size_t>(n_d, 2), w, seed), d};
    if (n_d == 1) dist.net = Net({2, w}, {LayerSpec::flatten(), LayerSpec::dense(1)}, seed);
    std::vector<DeviceClassifier> dev;
    for (std::size_t k = 0; k < n_d; ++k) dev.push_back({small_net(n_m, w, seed + 1 + k), d[k], names(n_m)});
    return assemble_ensemble(std::move(dist), std::move(dev));
}

}  // namespace

TEST(Architectures, ResnetTopology) {
    auto s = resnet_specs(16);
    std::vector<LayerKind> kinds;
    for (const auto& l : s) kinds.push_back(l.kind);
    std::vector<LayerKind> want = {LayerKind::conv1d,     LayerKind::max_pool1d, LayerKind::residual_block,
                                   LayerKind::max_pool1d, LayerKind::residual_block, LayerKind::max_pool1d,
                                   LayerKind::batch_norm, LayerKind::flatten,    LayerKind::dense,
                                   LayerKind::relu,       LayerKind::dropout,    LayerKind::dense,
                                   LayerKind::relu,       LayerKind::dropout,    LayerKind::dense};
    EXPECT_EQ(kinds, want);
    EXPECT_EQ(s[0].filters, 64u);
    EXPECT_EQ(s[0].kernel, 5u);
    EXPECT_EQ(s[2].filters, 128u);
    EXPECT_EQ(s[4].filters, 256u);
    EXPECT_EQ(s[8].units, 256u);
    EXPECT_EQ(s[11].units, 64u);
    EXPECT_EQ(s[14].units, 16u);
    EXPECT_DOUBLE_EQ(s[10].rate, 0.2);
    EXPECT_DOUBLE_EQ(s[13].rate, 0.2);
}

TEST(Architectures, ForwardShapes) {
    auto x = random_windows(3, 256, 1);
    EXPECT_EQ(build_resnet(16, 256, 1).predict(x).shape(), (nn::Shape{3, 16}));
    EXPECT_EQ(build_resnet(11, 256, 1).predict(x).shape(), (nn::Shape{3, 11}));
    auto x128 = random_windows(2, 128, 2);
    EXPECT_EQ(build_baseline(16, 128, 1).predict(x128).shape(), (nn::Shape{2, 16}));
}

TEST(Architectures, InvalidConfigurations) {
    EXPECT_THROW(build_resnet(16, 7, 1), ConfigError);
    EXPECT_NO_THROW(build_resnet(16, 8, 1));
    EXPECT_THROW(build_resnet(1, 256, 1), ConfigError);
    EXPECT_THROW(build_baseline(1, 128, 1), ConfigError);
    EXPECT_THROW(parse_architecture("vgg"), ConfigError);
    EXPECT_EQ(parse_architecture("baseline"), Architecture::baseline);
}

TEST(Architectures, BaselineIsSmallerAtItsNativeFraming) {
    auto base = build_baseline(16, 128, 1).parameter_count();
    EXPECT_LT(base, build_resnet(16, 128, 1).parameter_count());
    EXPECT_LT(base, build_resnet(16, 256, 1).parameter_count());
}

TEST(Predict, UniformLogitsPickClassZero) {
    auto net = small_net(5, 16, 3);
    auto state = net.state();
    for (auto& t : state) std::fill(t.begin(), t.end(), 0.0f);
    net.load_state(state);
    auto p = predict(net, random_windows(4, 16, 4));
    for (const auto& r : p) {
        EXPECT_EQ(r.index, 0u);
        for (float v : r.probabilities) EXPECT_FLOAT_EQ(v, 0.2f);
    }
}

TEST(Predict, ProbabilitiesSumToOneAndMatchArgmax) {
    auto net = small_net(7, 32, 5);
    auto p = predict(net, random_windows(50, 32, 6));
    for (const auto& r : p) {
        double s = std::accumulate(r.probabilities.begin(), r.probabilities.end(), 0.0);
        EXPECT_NEAR(s, 1.0, 1e-6);
        auto best = std::max_element(r.probabilities.begin(), r.probabilities.end()) - r.probabilities.begin();
        EXPECT_FLOAT_EQ(r.probabilities[r.index], r.probabilities[std::size_t(best)]);
    }
}

TEST(Predict, NormalizationCheck) {
    auto x = random_windows(3, 32, 7);
    EXPECT_NO_THROW(check_normalized(x));
    x[40] *= 3.0f;
    EXPECT_THROW(check_normalized(x), DataError);
}

TEST(Predict, ScaledRawWindowsGiveSamePrediction) {
    auto net = small_net(6, 32, 8);
    auto x = random_windows(20, 32, 9);
    auto direct = predict_classes(net, x);
    for (float alpha : {0.01f, 3.0f, 250.0f}) {
        std::vector<std::complex<float>> iq(32);
        Tensor<float> renorm({20, 2, 32});
        for (std::size_t b = 0; b < 20; ++b) {
            data::Window w;
            for (std::size_t i = 0; i < 32; ++i) {
                w.iq.emplace_back(alpha * x[b * 64 + i], alpha * x[b * 64 + 32 + i]);
            }
            data::write_planar(data::normalize_window(w), renorm.raw() + b * 64);
        }
        EXPECT_EQ(predict_classes(net, renorm), direct) << "alpha " << alpha;
    }
}

TEST(Predict, DatasetHelperMatchesBatchedPrediction) {
    data::LabeledDataset ds;
    ds.window_length = 16;
    ds.label_names = names(3);
    auto x = random_windows(37, 16, 10);
    ds.data = x.values();
    ds.labels.assign(37, 0);
    ds.sources.resize(37);
    auto net = small_net(3, 16, 11);
    EXPECT_EQ(predict_dataset(net, ds, 8), predict_classes(net, x));
}

TEST(Ensemble, FullSizeCardinalities) {
    auto e = small_ensemble(11, 16, 16, 20);
    auto out = ensemble_predict(e, random_windows(64, 16, 21));
    for (const auto& o : out) {
        ASSERT_EQ(o.masked.size(), 176u);
        EXPECT_EQ(std::count(o.masked.begin(), o.masked.end(), 1.0f), 1);
        EXPECT_EQ(std::count(o.masked.begin(), o.masked.end(), 0.0f), 175);
        EXPECT_EQ(o.masked[o.distance_index * 16 + o.device], 1.0f);
        EXPECT_DOUBLE_EQ(o.distance_ft, 2.0 + 6.0 * double(o.distance_index));
    }
}

TEST(Ensemble, RoutingEquivalence) {
    for (std::size_t n_d : {1u, 3u, 11u}) {
        auto e = small_ensemble(n_d, 4, 16, 30 + n_d);
        auto x = random_windows(1000, 16, 40 + n_d);
        auto out = ensemble_predict(e, x);
        auto soft = ensemble_predict(e, x, true);
        auto route = predict_distance(e.distance_model, x);
        std::set<std::size_t> routes;
        for (std::size_t b = 0; b < out.size(); ++b) {
            ASSERT_EQ(out[b].distance_index, route[b].index);
            routes.insert(route[b].index);
            const auto& m = e.device_models[route[b].index];
            Tensor<float> one({1, 2, 16}, {x.raw() + b * 32, x.raw() + (b + 1) * 32});
            auto direct = predict_device(m, one)[0].index;
            EXPECT_EQ(out[b].device, direct);
            EXPECT_EQ(soft[b].device, direct);
            for (std::size_t i = 0; i < soft[b].masked.size(); ++i) {
                if (i / 4 != out[b].distance_index) {
                    EXPECT_EQ(soft[b].masked[i], 0.0f);
                }
            }
        }
        if (n_d > 1) {
            EXPECT_GT(routes.size(), 1u) << "router never switched segments";
        }
    }
}

TEST(Ensemble, SingleDistanceIsTheDeviceModel) {
    auto e = small_ensemble(1, 5, 16, 50);
    auto x = random_windows(200, 16, 51);
    auto out = ensemble_predict(e, x);
    auto direct = predict_classes(e.device_models[0].net, x);
    for (std::size_t b = 0; b < out.size(); ++b) EXPECT_EQ(out[b].device, direct[b]);
}

TEST(Ensemble, AssemblyOrdersAndValidatesSlots) {
    DistanceClassifier dist{small_net(3, 16, 1), {2, 14, 26}};
    std::vector<DeviceClassifier> dev;
    for (double d : {26.0, 2.0, 14.0}) dev.push_back({small_net(4, 16, std::uint64_t(d)), d, names(4)});
    auto e = assemble_ensemble(std::move(dist), std::move(dev));
    EXPECT_EQ(e.device_models[0].distance_ft, 2.0);
    EXPECT_EQ(e.device_models[2].distance_ft, 26.0);

    DistanceClassifier d2{small_net(3, 16, 1), {2, 14, 26}};
    std::vector<DeviceClassifier> missing;
    missing.push_back({small_net(4, 16, 2), 2.0, names(4)});
    missing.push_back({small_net(4, 16, 3), 14.0, names(4)});
    EXPECT_THROW(assemble_ensemble(std::move(d2), std::move(missing)), ConfigError);

    auto bad = small_ensemble(2, 4, 16, 60);
    bad.device_models[1].net = small_net(5, 16, 61);
    bad.device_models[1].device_names = names(5);
    EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(Ensemble, SaveLoadRoundTrip) {
    auto dir = fresh_dir("ens");
    auto e = small_ensemble(3, 4, 16, 70);
    save_ensemble(e, dir);
    auto x = random_windows(100, 16, 71);
    auto a = ensemble_predict(e, x);
    for (const auto& p : {dir, dir / "ensemble.json"}) {
        auto l = load_ensemble(p);
        EXPECT_EQ(l.distance_model.distances_ft, e.distance_model.distances_ft);
        auto b = ensemble_predict(l, x);
        for (std::size_t i = 0; i < a.size(); ++i) {
            EXPECT_EQ(a[i].masked, b[i].masked);
            EXPECT_EQ(a[i].device, b[i].device);
        }
    }
}

TEST(Ensemble, ResnetCheckpointFillsSixteenDeviceSlot) {
    auto dir = fresh_dir("slot");
    nn::save_checkpoint(build_resnet(16, 256, 3), dir / "r16.ckpt");
    nn::save_checkpoint(build_resnet(4, 256, 3), dir / "r4.ckpt");
    DistanceClassifier dist{build_resnet(2, 256, 4), {2, 14}};
    std::vector<DeviceClassifier> ok;
    ok.push_back({nn::load_checkpoint<float>(dir / "r16.ckpt"), 2, names(16)});
    ok.push_back({build_resnet(16, 256, 5), 14, names(16)});
    auto e = assemble_ensemble(std::move(dist), std::move(ok));
    EXPECT_EQ(e.n_devices(), 16u);

    DeviceClassifier wrong{nn::load_checkpoint<float>(dir / "r4.ckpt"), 2, names(16)};
    EXPECT_THROW(wrong.validate(), ConfigError);
}

TEST(Classifier, SidecarRoundTrip) {
    auto dir = fresh_dir("clf");
    DeviceClassifier d{small_net(4, 16, 80), 14.0, names(4)};
    save_classifier(d, dir / "dev.ckpt");
    auto l = load_device_classifier(dir / "dev.ckpt");
    EXPECT_EQ(l.distance_ft, 14.0);
    EXPECT_EQ(l.device_names, names(4));
    EXPECT_EQ(l.net.state(), d.net.state());
    EXPECT_THROW(load_distance_classifier(dir / "dev.ckpt"), ConfigError);

    DistanceClassifier s{small_net(2, 16, 81), {2, 26}};
    save_classifier(s, dir / "dist.ckpt");
    EXPECT_EQ(load_distance_classifier(dir / "dist.ckpt").distances_ft, (std::vector<double>{2, 26}));
    EXPECT_THROW(load_device_classifier(dir / "missing.ckpt"), IoError);
}
