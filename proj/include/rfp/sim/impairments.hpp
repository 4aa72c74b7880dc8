#pragma once

#include <vector>

#include "rfp/sim/ofdm.hpp"

namespace rfp::sim {

/// Transmitter hardware imperfections of one device.
struct DeviceProfile {
    int device_id = 0;
    double iq_gain_imbalance_db = 0.0;
    double iq_phase_skew_deg = 0.0;
    cdouble dc_offset{};
    double cfo_hz = 0.0;
    /// y = sum_i pa_coeffs[i] * x * |x|^(2i), i.e. orders 1, 3, 5, ...
    std::vector<double> pa_coeffs{1.0};

    bool operator==(const DeviceProfile&) const = default;
};

/// Memoryless odd-order power-amplifier polynomial.
cdouble pa_response(cdouble x, const std::vector<double>& coeffs);

/// Applies, in this order:
///   1. IQ imbalance  I' = I,  Q' = g (Q cos(phi) - I sin(phi)),  g = 10^(dB/20)
///   2. DC offset     z += dc
///   3. PA polynomial
///   4. CFO rotation  z[n] *= exp(j 2 pi cfo n / fs)
Signal apply_device_impairments(Signal signal, const DeviceProfile& profile, double sample_rate);

}  // namespace rfp::sim
