#include "json_io.hpp"

#include <cmath>
#include <limits>

namespace rfp::sim::detail {

json complex_json(cdouble z) { return json::array({z.real(), z.imag()}); }

cdouble complex_from(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

json to_json(const DeviceProfile& p) {
    return {{"device_id", p.device_id},
            {"iq_gain_imbalance_db", p.iq_gain_imbalance_db},
            {"iq_phase_skew_deg", p.iq_phase_skew_deg},
            {"dc_offset", complex_json(p.dc_offset)},
            {"cfo_hz", p.cfo_hz},
            {"pa_coeffs", p.pa_coeffs}};
}

DeviceProfile device_from(const json& j) {
    DeviceProfile p;
    p.device_id = j.at("device_id").get<int>();
    p.iq_gain_imbalance_db = j.at("iq_gain_imbalance_db").get<double>();
    p.iq_phase_skew_deg = j.at("iq_phase_skew_deg").get<double>();
    p.dc_offset = complex_from(j.at("dc_offset"));
    p.cfo_hz = j.at("cfo_hz").get<double>();
    p.pa_coeffs = j.at("pa_coeffs").get<std::vector<double>>();
    return p;
}

json to_json(const ChannelProfile& p) {
    json taps = json::array();
    for (auto t : p.taps) taps.push_back(complex_json(t));
    // JSON has no infinity; a noiseless channel is written as null.
    json snr = std::isfinite(p.snr_db) ? json(p.snr_db) : json(nullptr);
    return {{"distance_ft", p.distance_ft}, {"path_loss", p.path_loss},     {"taps", taps},
            {"phase_noise_std", p.phase_noise_std}, {"snr_db", snr}, {"run_jitter", p.run_jitter}};
}

ChannelProfile channel_from(const json& j) {
    ChannelProfile p;
    p.distance_ft = j.at("distance_ft").get<double>();
    p.path_loss = j.at("path_loss").get<double>();
    p.taps.clear();
    for (const auto& t : j.at("taps")) p.taps.push_back(complex_from(t));
    p.phase_noise_std = j.at("phase_noise_std").get<double>();
    const auto& snr = j.at("snr_db");
    p.snr_db = snr.is_null() ? std::numeric_limits<double>::infinity() : snr.get<double>();
    p.run_jitter = j.at("run_jitter").get<double>();
    return p;
}

json to_json(const OfdmConfig& c) {
    return {{"fft_size", c.fft_size}, {"cyclic_prefix", c.cyclic_prefix}, {"active_subcarriers", c.active_subcarriers}};
}

OfdmConfig ofdm_from(const json& j) {
    OfdmConfig c;
    c.fft_size = j.at("fft_size").get<std::size_t>();
    c.cyclic_prefix = j.at("cyclic_prefix").get<std::size_t>();
    c.active_subcarriers = j.at("active_subcarriers").get<std::size_t>();
    return c;
}

}  // namespace rfp::sim::detail
