#include "rfp/sim/channel.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "rfp/errors.hpp"
#include "rfp/seed.hpp"

namespace rfp::sim {

namespace {

enum Stream : std::uint64_t { taps_stream = 1, phase_stream = 2, noise_stream = 3 };

std::mt19937_64 stream_rng(std::uint64_t seed, int run, Stream stream) {
    return std::mt19937_64(derive_seed(seed, {static_cast<std::uint64_t>(run), stream}));
}

void normalize_energy(std::vector<cdouble>& taps) {
    double e = 0.0;
    for (auto t : taps) e += std::norm(t);
    if (!(e > 0.0)) throw ConfigError("channel: taps have zero energy");
    if (e == 1.0) return;
    const double s = 1.0 / std::sqrt(e);
    for (auto& t : taps) t *= s;
}

}  // namespace

std::vector<cdouble> run_taps(const ChannelProfile& profile, int run, std::uint64_t seed) {
    if (profile.taps.empty()) throw ConfigError("channel: at least one tap is required");
    std::vector<cdouble> taps = profile.taps;
    normalize_energy(taps);
    if (profile.run_jitter > 0.0) {
        auto rng = stream_rng(seed, run, taps_stream);
        std::normal_distribution<double> n(0.0, std::sqrt(0.5));
        for (auto& t : taps) t += profile.run_jitter * cdouble{n(rng), n(rng)};
        normalize_energy(taps);
    }
    return taps;
}

Signal apply_channel(const Signal& signal, const ChannelProfile& profile, int run, std::uint64_t seed,
                     Signal* noise_free) {
    const auto taps = run_taps(profile, run, seed);
    Signal y(signal.size());
    for (std::size_t n = 0; n < signal.size(); ++n) {
        cdouble acc{};
        const std::size_t kmax = std::min(taps.size(), n + 1);
        for (std::size_t k = 0; k < kmax; ++k) acc += taps[k] * signal[n - k];
        y[n] = acc * profile.path_loss;
    }

    auto phase_rng = stream_rng(seed, run, phase_stream);
    std::normal_distribution<double> unit(0.0, 1.0);
    double theta = profile.run_jitter > 0.0 ? std::numbers::pi * profile.run_jitter * unit(phase_rng) : 0.0;
    if (profile.phase_noise_std > 0.0 || theta != 0.0) {
        for (auto& v : y) {
            v *= std::polar(1.0, theta);
            if (profile.phase_noise_std > 0.0) theta += profile.phase_noise_std * unit(phase_rng);
        }
    }

    if (noise_free) *noise_free = y;
    if (std::isfinite(profile.snr_db) && !y.empty()) {
        double power = 0.0;
        for (auto v : y) power += std::norm(v);
        power /= static_cast<double>(y.size());
        const double sigma = std::sqrt(power / std::pow(10.0, profile.snr_db / 10.0) / 2.0);
        auto noise_rng = stream_rng(seed, run, noise_stream);
        std::normal_distribution<double> n(0.0, sigma);
        for (auto& v : y) v += cdouble{n(noise_rng), n(noise_rng)};
    }
    return y;
}

}  // namespace rfp::sim
