#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "rfp/nn/network.hpp"

namespace rfp::models {

using Net = nn::Network<float>;

enum class Architecture { resnet, baseline };

std::string_view to_string(Architecture a);
/// "resnet" or "baseline"; throws ConfigError otherwise.
Architecture parse_architecture(std::string_view name);

/// conv1d(64,5) pool res(128) pool res(256) pool bn flatten
/// dense(256) relu dropout(0.2) dense(64) relu dropout(0.2) dense(n)
std::vector<nn::LayerSpec> resnet_specs(std::size_t n_classes);

/// Two-conv, two-dense comparison CNN:
/// conv1d(50,7) relu conv1d(50,7) relu flatten dense(256) relu dropout(0.5)
/// dense(80) relu dropout(0.5) dense(n)
std::vector<nn::LayerSpec> baseline_specs(std::size_t n_classes);

/// Input [2, W]. Throw ConfigError for n_classes < 2 or a window too short
/// for the pooling stages (W < 8 for the ResNet).
Net build_resnet(std::size_t n_classes, std::size_t window_length, std::uint64_t seed);
Net build_baseline(std::size_t n_classes, std::size_t window_length, std::uint64_t seed);
Net build_network(Architecture a, std::size_t n_classes, std::size_t window_length, std::uint64_t seed);

}  // namespace rfp::models
