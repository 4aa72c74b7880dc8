#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rfp/sim/profiles.hpp"
#include "rfp/sim/recording.hpp"

namespace rfp::sim {

struct CaptureSpec {
    std::string preset = "custom";
    std::vector<DeviceProfile> devices;
    std::vector<ChannelProfile> channels;
    int runs = 2;
    std::size_t samples_per_capture = 0;
    double sample_rate = 5e6;
    OfdmConfig ofdm;
    std::uint64_t master_seed = 0;
};

/// Device and channel profiles derived from the preset and master seed.
CaptureSpec capture_spec(const SimPreset& preset, std::uint64_t master_seed);

/// Seed of one capture: a pure function of its coordinates.
std::uint64_t capture_seed(std::uint64_t master_seed, int device_id, double distance_ft, int run);

/// One recording: OFDM payload -> device impairments -> channel.
IQRecording simulate_capture(const CaptureSpec& spec, const DeviceProfile& device, const ChannelProfile& channel,
                             int run);

struct ManifestEntry {
    std::string iq_file;  // relative to the manifest directory
    int device_id = 0;
    double distance_ft = 0.0;
    int run = 0;
    std::size_t n_samples = 0;
    std::uint64_t seed = 0;

    bool operator==(const ManifestEntry&) const = default;
};

struct Manifest {
    std::filesystem::path root;  // directory holding manifest.json; not serialized
    std::string preset;
    std::uint64_t master_seed = 0;
    double sample_rate = 0.0;
    std::size_t samples_per_capture = 0;
    std::vector<ManifestEntry> recordings;

    std::vector<int> device_ids() const;      // sorted, unique
    std::vector<double> distances() const;    // sorted, unique
    std::filesystem::path iq_path(const ManifestEntry& e) const { return root / e.iq_file; }
};

/// Writes |devices| x |channels| x runs recordings plus manifest.json into
/// out_dir (created if missing). Throws IoError if anything cannot be written.
Manifest capture_dataset(const CaptureSpec& spec, const std::filesystem::path& out_dir);

void write_manifest(const Manifest& manifest);
/// Accepts the manifest file itself or the directory containing manifest.json.
Manifest read_manifest(const std::filesystem::path& path);

std::string recording_file_name(int device_id, double distance_ft, int run);

}  // namespace rfp::sim
