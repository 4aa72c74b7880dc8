#include "rfp/sim/capture.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json_io.hpp"
#include "rfp/errors.hpp"
#include "rfp/seed.hpp"
#include "rfp/sim/channel.hpp"
#include "rfp/sim/impairments.hpp"

namespace rfp::sim {

namespace fs = std::filesystem;
using detail::json;

namespace {

constexpr int kManifestVersion = 1;
constexpr std::uint64_t kPayloadKey = 0x7061796c6f616400ULL;

std::string format_distance(double d) {
    std::ostringstream os;
    os << d;
    return os.str();
}

}  // namespace

CaptureSpec capture_spec(const SimPreset& preset, std::uint64_t master_seed) {
    CaptureSpec spec;
    spec.preset = preset.name;
    spec.devices = make_device_profiles(preset.n_devices, preset.impairments, master_seed);
    spec.channels = make_channel_profiles(preset.distances_ft, preset.channel, master_seed);
    spec.samples_per_capture = preset.samples_per_capture();
    spec.sample_rate = preset.sample_rate;
    spec.ofdm = preset.ofdm;
    spec.master_seed = master_seed;
    return spec;
}

std::uint64_t capture_seed(std::uint64_t master_seed, int device_id, double distance_ft, int run) {
    return derive_seed(master_seed, {static_cast<std::uint64_t>(device_id),
                                     static_cast<std::uint64_t>(std::llround(distance_ft * 1000.0)),
                                     static_cast<std::uint64_t>(run)});
}

IQRecording simulate_capture(const CaptureSpec& spec, const DeviceProfile& device, const ChannelProfile& channel,
                             int run) {
    IQRecording rec;
    rec.device_id = device.device_id;
    rec.distance_ft = channel.distance_ft;
    rec.run = run;
    rec.sample_rate = spec.sample_rate;
    rec.seed = capture_seed(spec.master_seed, device.device_id, channel.distance_ft, run);
    rec.device = device;
    rec.channel = channel;
    rec.ofdm = spec.ofdm;

    Signal s = generate_ofdm_baseband(derive_seed(rec.seed, {kPayloadKey}), spec.samples_per_capture, spec.ofdm);
    s.resize(spec.samples_per_capture);
    s = apply_device_impairments(std::move(s), device, spec.sample_rate);
    s = apply_channel(s, channel, run, rec.seed);
    rec.samples.resize(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        rec.samples[i] = {static_cast<float>(s[i].real()), static_cast<float>(s[i].imag())};
    }
    return rec;
}

std::vector<int> Manifest::device_ids() const {
    std::set<int> ids;
    for (const auto& r : recordings) ids.insert(r.device_id);
    return {ids.begin(), ids.end()};
}

std::vector<double> Manifest::distances() const {
    std::set<double> d;
    for (const auto& r : recordings) d.insert(r.distance_ft);
    return {d.begin(), d.end()};
}

std::string recording_file_name(int device_id, double distance_ft, int run) {
    char dev[16];
    std::snprintf(dev, sizeof dev, "%02d", device_id);
    return "dev" + std::string(dev) + "_" + format_distance(distance_ft) + "ft_run" + std::to_string(run) + ".cf32";
}

Manifest capture_dataset(const CaptureSpec& spec, const fs::path& out_dir) {
    if (spec.devices.empty() || spec.channels.empty()) {
        throw ConfigError("capture: need at least one device and one channel profile");
    }
    if (spec.runs < 1) throw ConfigError("capture: need at least one run");
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

    Manifest m;
    m.root = out_dir;
    m.preset = spec.preset;
    m.master_seed = spec.master_seed;
    m.sample_rate = spec.sample_rate;
    m.samples_per_capture = spec.samples_per_capture;
    for (const auto& dev : spec.devices) {
        for (const auto& ch : spec.channels) {
            for (int run = 0; run < spec.runs; ++run) {
                const IQRecording rec = simulate_capture(spec, dev, ch, run);
                ManifestEntry e;
                e.iq_file = recording_file_name(dev.device_id, ch.distance_ft, run);
                e.device_id = dev.device_id;
                e.distance_ft = ch.distance_ft;
                e.run = run;
                e.n_samples = rec.samples.size();
                e.seed = rec.seed;
                save_recording(rec, out_dir / e.iq_file);
                m.recordings.push_back(std::move(e));
            }
        }
    }
    write_manifest(m);
    return m;
}

void write_manifest(const Manifest& m) {
    json recs = json::array();
    for (const auto& r : m.recordings) {
        recs.push_back({{"iq_file", r.iq_file},
                        {"sidecar", sidecar_path(r.iq_file).string()},
                        {"device_id", r.device_id},
                        {"distance_ft", r.distance_ft},
                        {"run", r.run},
                        {"n_samples", r.n_samples},
                        {"seed", r.seed}});
    }
    json j = {{"format", "rfp-manifest"},         {"version", kManifestVersion},
              {"preset", m.preset},               {"master_seed", m.master_seed},
              {"sample_rate", m.sample_rate},     {"samples_per_capture", m.samples_per_capture},
              {"recordings", recs}};
    const auto path = m.root / "manifest.json";
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << j.dump(2) << "\n";
    if (!out) throw IoError("write failed: " + path.string());
}

Manifest read_manifest(const fs::path& path) {
    const fs::path file = fs::is_directory(path) ? path / "manifest.json" : path;
    std::ifstream in(file);
    if (!in) throw IoError("cannot open manifest " + file.string());
    try {
        const json j = json::parse(in);
        if (j.at("format") != "rfp-manifest") throw IoError(file.string() + " is not a recording manifest");
        if (j.at("version").get<int>() != kManifestVersion) {
            throw IoError("unsupported manifest version " + j.at("version").dump());
        }
        Manifest m;
        m.root = file.parent_path();
        m.preset = j.at("preset").get<std::string>();
        m.master_seed = j.at("master_seed").get<std::uint64_t>();
        m.sample_rate = j.at("sample_rate").get<double>();
        m.samples_per_capture = j.at("samples_per_capture").get<std::size_t>();
        for (const auto& r : j.at("recordings")) {
            ManifestEntry e;
            e.iq_file = r.at("iq_file").get<std::string>();
            e.device_id = r.at("device_id").get<int>();
            e.distance_ft = r.at("distance_ft").get<double>();
            e.run = r.at("run").get<int>();
            e.n_samples = r.at("n_samples").get<std::size_t>();
            e.seed = r.at("seed").get<std::uint64_t>();
            m.recordings.push_back(std::move(e));
        }
        return m;
    } catch (const json::exception& e) {
        throw IoError("malformed manifest " + file.string() + ": " + e.what());
    }
}

}  // namespace rfp::sim
