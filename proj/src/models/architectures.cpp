#include "rfp/models/architectures.hpp"

#include <string>

#include "rfp/errors.hpp"

namespace rfp::models {

using nn::LayerSpec;

std::string_view to_string(Architecture a) { return a == Architecture::resnet ? "resnet" : "baseline"; }

Architecture parse_architecture(std::string_view name) {
    if (name == "resnet") return Architecture::resnet;
    if (name == "baseline") return Architecture::baseline;
    throw ConfigError("unknown architecture '" + std::string(name) + "' (expected resnet or baseline)");
}

std::vector<LayerSpec> resnet_specs(std::size_t n) {
    return {LayerSpec::conv1d(64, 5),
            LayerSpec::max_pool1d(2),
            LayerSpec::residual_block(128, 5),
            LayerSpec::max_pool1d(2),
            LayerSpec::residual_block(256, 5),
            LayerSpec::max_pool1d(2),
            LayerSpec::batch_norm(),
            LayerSpec::flatten(),
            LayerSpec::dense(256),
            LayerSpec::relu(),
            LayerSpec::dropout(0.2),
            LayerSpec::dense(64),
            LayerSpec::relu(),
            LayerSpec::dropout(0.2),
            LayerSpec::dense(n)};
}

std::vector<LayerSpec> baseline_specs(std::size_t n) {
    return {LayerSpec::conv1d(50, 7), LayerSpec::relu(),       LayerSpec::conv1d(50, 7), LayerSpec::relu(),
            LayerSpec::flatten(),     LayerSpec::dense(256),   LayerSpec::relu(),        LayerSpec::dropout(0.5),
            LayerSpec::dense(80),     LayerSpec::relu(),       LayerSpec::dropout(0.5),  LayerSpec::dense(n)};
}

namespace {

void check(std::size_t n_classes, std::size_t w, std::size_t min_w, std::string_view who) {
    if (n_classes < 2) throw ConfigError(std::string(who) + ": need at least 2 classes");
    if (w < min_w) {
        throw ConfigError(std::string(who) + ": window length " + std::to_string(w) + " is below the minimum " +
                          std::to_string(min_w));
    }
}

}  // namespace

Net build_resnet(std::size_t n_classes, std::size_t w, std::uint64_t seed) {
    check(n_classes, w, 8, "resnet");
    return Net({2, w}, resnet_specs(n_classes), seed);
}

Net build_baseline(std::size_t n_classes, std::size_t w, std::uint64_t seed) {
    check(n_classes, w, 1, "baseline");
    return Net({2, w}, baseline_specs(n_classes), seed);
}

Net build_network(Architecture a, std::size_t n_classes, std::size_t w, std::uint64_t seed) {
    return a == Architecture::resnet ? build_resnet(n_classes, w, seed) : build_baseline(n_classes, w, seed);
}

}  // namespace rfp::models
