#include "rfp/sim/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "rfp/errors.hpp"
#include "rfp/seed.hpp"

namespace rfp::sim {

namespace {

constexpr std::uint64_t kDeviceKey = 0x6465766963650000ULL;
constexpr std::uint64_t kChannelKey = 0x6368616e6e656c00ULL;

// n evenly spaced levels in (-1, 1), shuffled.
std::vector<double> stratified_levels(std::size_t n, std::mt19937_64& rng) {
    std::vector<double> levels(n);
    for (std::size_t i = 0; i < n; ++i) {
        levels[i] = -1.0 + (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(n);
    }
    std::shuffle(levels.begin(), levels.end(), rng);
    return levels;
}

std::uint64_t distance_key(double d) { return static_cast<std::uint64_t>(std::llround(d * 1000.0)); }

}  // namespace

std::size_t SimPreset::samples_per_capture() const {
    return static_cast<std::size_t>(std::llround(capture_seconds * sample_rate));
}

SimPreset preset(std::string_view name) {
    SimPreset p;
    p.name = std::string(name);
    if (name == "tiny") {
        p.n_devices = 3;
        p.distances_ft = {2, 14};
        p.capture_seconds = 0.005;
        p.impairments = {3.0, 15.0, 0.5, 3000.0, 0.05, 0.35};
        p.channel.snr_ref_db = 30.0;
        p.channel.run_jitter = 0.05;
    } else if (name == "easy") {
        p.n_devices = 4;
        p.distances_ft = {2, 14, 26};
        p.capture_seconds = 0.32;
        p.impairments = {3.0, 15.0, 0.5, 3000.0, 0.05, 0.35};
        p.channel.snr_ref_db = 35.0;
        p.channel.run_jitter = 0.05;
    } else if (name == "hard") {
        p.n_devices = 4;
        p.distances_ft = {2, 14, 26};
        p.capture_seconds = 0.05;
        p.impairments = {0.5, 3.0, 0.05, 500.0, 0.02, 0.08};
        p.channel.snr_ref_db = 25.0;
        p.channel.run_jitter = 0.5;
    } else if (name == "full") {
        p.n_devices = 16;
        p.distances_ft = {2, 8, 14, 20, 26, 32, 38, 44, 50, 56, 62};
        p.capture_seconds = 0.4;
    } else {
        throw ConfigError("unknown simulator preset '" + std::string(name) + "' (expected tiny, easy, hard or full)");
    }
    return p;
}

std::vector<std::string> preset_names() { return {"tiny", "easy", "hard", "full"}; }

std::vector<DeviceProfile> make_device_profiles(std::size_t n_devices, const ImpairmentBounds& b,
                                                std::uint64_t seed) {
    if (n_devices == 0) throw ConfigError("device profiles: need at least one device");
    if (b.pa_a3_min > b.pa_a3_max) throw ConfigError("device profiles: pa_a3_min exceeds pa_a3_max");
    std::mt19937_64 rng(derive_seed(seed, {kDeviceKey}));
    const auto gain = stratified_levels(n_devices, rng);
    const auto phase = stratified_levels(n_devices, rng);
    const auto dc_mag = stratified_levels(n_devices, rng);
    const auto dc_phase = stratified_levels(n_devices, rng);
    const auto cfo = stratified_levels(n_devices, rng);
    const auto pa = stratified_levels(n_devices, rng);

    std::vector<DeviceProfile> out(n_devices);
    for (std::size_t i = 0; i < n_devices; ++i) {
        auto& d = out[i];
        d.device_id = static_cast<int>(i);
        d.iq_gain_imbalance_db = gain[i] * b.iq_gain_db;
        d.iq_phase_skew_deg = phase[i] * b.iq_phase_deg;
        // CFO rotates the offset, so devices are told apart by its magnitude.
        d.dc_offset = std::polar(b.dc_offset * 0.5 * (dc_mag[i] + 1.0), std::numbers::pi * dc_phase[i]);
        d.cfo_hz = cfo[i] * b.cfo_hz;
        const double a3 = b.pa_a3_min + (b.pa_a3_max - b.pa_a3_min) * 0.5 * (pa[i] + 1.0);
        d.pa_coeffs = {1.0, -a3};
    }
    return out;
}

std::vector<ChannelProfile> make_channel_profiles(const std::vector<double>& distances_ft, const ChannelModel& m,
                                                  std::uint64_t seed) {
    if (distances_ft.empty()) throw ConfigError("channel profiles: need at least one distance");
    if (m.n_taps == 0) throw ConfigError("channel profiles: need at least one tap");
    std::vector<ChannelProfile> out;
    for (double d : distances_ft) {
        if (!(d > 0)) throw ConfigError("channel profiles: distances must be positive");
        std::mt19937_64 rng(derive_seed(seed, {kChannelKey, distance_key(d)}));
        std::normal_distribution<double> n(0.0, std::sqrt(0.5));
        std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);

        const double rel = d / m.reference_ft;
        const double spread = m.delay_spread_base + m.delay_spread_per_ft * d;
        const double k = m.los_k_factor_base / rel;

        ChannelProfile c;
        c.distance_ft = d;
        c.taps.assign(m.n_taps, {});
        for (std::size_t t = 0; t < m.n_taps; ++t) {
            const double p = std::exp(-static_cast<double>(t) / spread);
            c.taps[t] = std::sqrt(p) * cdouble{n(rng), n(rng)};
        }
        // Rician first tap: a fixed-phase line-of-sight component plus the scattered part.
        c.taps[0] = std::sqrt(k / (k + 1)) * std::polar(1.0, u(rng)) + std::sqrt(1 / (k + 1)) * c.taps[0];
        double e = 0.0;
        for (auto t : c.taps) e += std::norm(t);
        for (auto& t : c.taps) t /= std::sqrt(e);

        c.path_loss = std::pow(rel, -m.path_loss_exponent / 2.0);
        c.snr_db = m.snr_ref_db - m.snr_db_per_decade * std::log10(rel);
        c.phase_noise_std = m.phase_noise_std;
        c.run_jitter = m.run_jitter;
        out.push_back(std::move(c));
    }
    return out;
}

bool within_bounds(const DeviceProfile& p, const ImpairmentBounds& b) {
    if (std::abs(p.iq_gain_imbalance_db) > b.iq_gain_db) return false;
    if (std::abs(p.iq_phase_skew_deg) > b.iq_phase_deg) return false;
    if (std::abs(p.dc_offset) > b.dc_offset) return false;
    if (std::abs(p.cfo_hz) > b.cfo_hz) return false;
    if (p.pa_coeffs.size() != 2 || p.pa_coeffs[0] != 1.0) return false;
    const double a3 = -p.pa_coeffs[1];
    return a3 >= b.pa_a3_min - 1e-12 && a3 <= b.pa_a3_max + 1e-12;
}

}  // namespace rfp::sim
