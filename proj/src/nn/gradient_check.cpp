#include "rfp/nn/gradient_check.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace rfp::nn {

GradientCheckResult gradient_check(const LayerSpec& spec, const Tensor<double>& probe,
                                   const GradientCheckOptions& options) {
    if (probe.rank() < 2) throw ConfigError("gradient_check: probe must be a batch [B, ...]");
    const Shape sample(probe.shape().begin() + 1, probe.shape().end());
    auto layer = make_layer<double>(spec, sample);

    std::mt19937_64 rng(options.seed);
    layer->initialize(rng);
    if (options.perturb_parameters) {
        std::uniform_real_distribution<double> noise(-0.5, 0.5);
        for (auto* p : layer->parameters()) {
            for (auto& v : p->values()) v += noise(rng);
        }
    }
    const std::uint64_t mask_seed = rng();

    Tensor<double> input = probe;
    Tensor<double> weights;
    {
        layer->reseed(mask_seed);
        const Tensor<double> y = layer->forward(input, options.mode);
        weights = Tensor<double>(y.shape());
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (auto& v : weights.values()) v = u(rng);
    }

    auto probe_loss = [&]() {
        layer->reseed(mask_seed);
        const Tensor<double> y = layer->forward(input, options.mode);
        double s = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) s += weights[i] * y[i];
        return s;
    };

    // Analytic pass.
    for (auto* p : layer->parameters()) p->zero_grad();
    probe_loss();
    const Tensor<double> input_grad = layer->backward(weights);
    std::vector<std::vector<double>> param_grads;
    for (auto* p : layer->parameters()) param_grads.emplace_back(p->grad().begin(), p->grad().end());

    GradientCheckResult result;
    const double eps = options.epsilon;
    const double centre = probe_loss();
    // Central difference plus the gap between the one-sided slopes. For a smooth
    // function the gap shrinks linearly with the step; a kink inside the stencil
    // breaks that scaling.
    struct Probe {
        double central, gap;
    };
    auto measure = [&](double& value, double saved, double step) {
        value = saved + step;
        const double plus = probe_loss();
        value = saved - step;
        const double minus = probe_loss();
        value = saved;
        return Probe{(plus - minus) / (2 * step), ((plus - centre) - (centre - minus)) / step};
    };
    const double roundoff = 1e-14 * std::max(1.0, std::abs(centre));

    auto compare = [&](double analytic, double& value) {
        const double saved = value;
        auto scales = [&](const Probe& coarse, const Probe& fine, double step) {
            const double slack = options.kink_tolerance * std::abs(coarse.gap) + 100 * roundoff / step;
            return std::abs(coarse.gap - 10 * fine.gap) <= slack;
        };
        // Two consecutive ratios must hold: a kink at about a tenth of the step can
        // fake a single one.
        std::vector<Probe> ladder;  // ladder[k] uses step eps / 10^k
        ladder.reserve(16);
        auto step_at = [&](std::size_t k) { return eps / std::pow(10.0, static_cast<double>(k)); };
        auto rung = [&](std::size_t k) -> const Probe& {
            while (ladder.size() <= k) ladder.push_back(measure(value, saved, step_at(ladder.size())));
            return ladder[k];
        };
        std::size_t k = 0;
        while (step_at(k + 2) >= options.min_epsilon) {
            if (scales(rung(k), rung(k + 1), step_at(k)) && scales(rung(k + 1), rung(k + 2), step_at(k + 1))) break;
            ++k;
        }
        if (k > 0) ++result.refined;
        const Probe& coarse = rung(k);
        const double numeric = coarse.central;
        const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
        result.max_relative_error = std::max(result.max_relative_error, std::abs(analytic - numeric) / denom);
        ++result.checked;
    };

    auto params = layer->parameters();
    for (std::size_t t = 0; t < params.size(); ++t) {
        auto& values = params[t]->values();
        for (std::size_t i = 0; i < values.size(); ++i) compare(param_grads[t][i], values[i]);
    }
    for (std::size_t i = 0; i < input.size(); ++i) compare(input_grad[i], input.values()[i]);
    return result;
}

}  // namespace rfp::nn
