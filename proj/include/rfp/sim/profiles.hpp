#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "rfp/sim/channel.hpp"
#include "rfp/sim/impairments.hpp"

namespace rfp::sim {

/// Per-field limits for generated device profiles. Each device draws one level
/// per field from a stratified grid over [-bound, bound], so any two devices
/// differ in every field. The DC offset takes its magnitude from a grid over
/// (0, bound) and its phase from a separate grid.
struct ImpairmentBounds {
    double iq_gain_db = 0.5;
    double iq_phase_deg = 3.0;
    double dc_offset = 0.05;  // magnitude, relative to unit signal power
    double cfo_hz = 500.0;
    double pa_a3_min = 0.02;  // third-order compression a3 lies in [-pa_a3_max, -pa_a3_min]
    double pa_a3_max = 0.08;

    bool operator==(const ImpairmentBounds&) const = default;
};

/// Distance-dependent propagation model used to derive one ChannelProfile per distance.
struct ChannelModel {
    std::size_t n_taps = 6;
    double delay_spread_base = 0.5;     // samples, exponential power-delay profile
    double delay_spread_per_ft = 0.03;
    double los_k_factor_base = 8.0;     // Rician K at the reference distance, decays ~1/d
    double reference_ft = 2.0;
    double path_loss_exponent = 2.0;
    double snr_ref_db = 30.0;           // SNR at the reference distance
    double snr_db_per_decade = 10.0;
    double phase_noise_std = 1e-3;
    double run_jitter = 0.05;

    bool operator==(const ChannelModel&) const = default;
};

struct SimPreset {
    std::string name;
    std::size_t n_devices = 4;
    std::vector<double> distances_ft;
    double capture_seconds = 0.01;
    double sample_rate = 5e6;
    OfdmConfig ofdm;
    ImpairmentBounds impairments;
    ChannelModel channel;

    std::size_t samples_per_capture() const;
};

/// tiny, easy, hard, full. Throws ConfigError for unknown names.
SimPreset preset(std::string_view name);
std::vector<std::string> preset_names();

std::vector<DeviceProfile> make_device_profiles(std::size_t n_devices, const ImpairmentBounds& bounds,
                                                std::uint64_t seed);

std::vector<ChannelProfile> make_channel_profiles(const std::vector<double>& distances_ft,
                                                  const ChannelModel& model, std::uint64_t seed);

/// True when every impairment of `p` lies within `bounds`.
bool within_bounds(const DeviceProfile& p, const ImpairmentBounds& bounds);

}  // namespace rfp::sim
