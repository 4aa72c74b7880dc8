#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "rfp/sim/ofdm.hpp"

namespace rfp::sim {

/// Propagation between one transmitter placement and the receiver.
struct ChannelProfile {
    double distance_ft = 0.0;
    double path_loss = 1.0;           // linear amplitude gain
    std::vector<cdouble> taps{1.0};   // causal FIR, normalized to unit energy on use
    double phase_noise_std = 0.0;     // rad per sample, random-walk increment
    double snr_db = std::numeric_limits<double>::infinity();
    double run_jitter = 0.0;          // per-run perturbation scale for taps and phase

    bool operator==(const ChannelProfile&) const = default;
};

/// Taps for one run: taps + run_jitter * CN(0, 1) draws seeded by (seed, run),
/// renormalized to unit energy.
std::vector<cdouble> run_taps(const ChannelProfile& profile, int run, std::uint64_t seed);

/// FIR convolution with run_taps(), path loss, a phase-noise random walk whose
/// starting phase is also jittered per run, then AWGN at snr_db relative to the
/// measured power of the noise-free output. The noise-free output is stored in
/// `noise_free` when given.
Signal apply_channel(const Signal& signal, const ChannelProfile& profile, int run, std::uint64_t seed,
                     Signal* noise_free = nullptr);

}  // namespace rfp::sim
