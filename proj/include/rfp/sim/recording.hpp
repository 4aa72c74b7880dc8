#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rfp/sim/channel.hpp"
#include "rfp/sim/impairments.hpp"

namespace rfp::sim {

using IQSamples = std::vector<std::complex<float>>;

struct IQRecording {
    IQSamples samples;
    int device_id = 0;
    double distance_ft = 0.0;
    int run = 0;
    double sample_rate = 5e6;
    std::uint64_t seed = 0;
    DeviceProfile device;
    ChannelProfile channel;
    OfdmConfig ofdm;

    bool operator==(const IQRecording& o) const;
};

/// Raw IQ: little-endian float32 pairs, I then Q, no header.
void write_cf32(const std::filesystem::path& path, const IQSamples& samples);
IQSamples read_cf32(const std::filesystem::path& path);

/// "capture.cf32" -> "capture.json"
std::filesystem::path sidecar_path(const std::filesystem::path& iq_path);

/// Metadata of `rec` (everything but the samples) as a JSON document.
std::string sidecar_json(const IQRecording& rec);
/// Parses a sidecar; the returned recording has no samples.
IQRecording parse_sidecar(const std::string& json);

/// Writes the IQ file and its sidecar. Throws IoError if either cannot be written.
void save_recording(const IQRecording& rec, const std::filesystem::path& iq_path);
IQRecording load_recording(const std::filesystem::path& iq_path);

}  // namespace rfp::sim
