#include "rfp/sim/impairments.hpp"

#include <cmath>
#include <numbers>

#include "rfp/errors.hpp"

namespace rfp::sim {

cdouble pa_response(cdouble x, const std::vector<double>& coeffs) {
    const double p = std::norm(x);
    double gain = 0.0, power = 1.0;
    for (double a : coeffs) {
        gain += a * power;
        power *= p;
    }
    return x * gain;
}

Signal apply_device_impairments(Signal signal, const DeviceProfile& profile, double sample_rate) {
    if (!(sample_rate > 0)) throw ConfigError("device impairments: sample rate must be positive");
    const double g = std::pow(10.0, profile.iq_gain_imbalance_db / 20.0);
    const double phi = profile.iq_phase_skew_deg * std::numbers::pi / 180.0;
    const double c = std::cos(phi), s = std::sin(phi);
    const double w = 2.0 * std::numbers::pi * profile.cfo_hz / sample_rate;
    const bool unit_pa = profile.pa_coeffs == std::vector<double>{1.0};

    for (std::size_t n = 0; n < signal.size(); ++n) {
        cdouble z = signal[n];
        z = {z.real(), g * (z.imag() * c - z.real() * s)};
        z += profile.dc_offset;
        if (!unit_pa) z = pa_response(z, profile.pa_coeffs);
        // The phase is recomputed from n rather than accumulated so long captures do not drift.
        if (profile.cfo_hz != 0.0) z *= std::polar(1.0, w * static_cast<double>(n));
        signal[n] = z;
    }
    return signal;
}

}  // namespace rfp::sim
