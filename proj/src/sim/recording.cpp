#include "rfp/sim/recording.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json_io.hpp"
#include "rfp/errors.hpp"

namespace rfp::sim {

namespace fs = std::filesystem;
using detail::json;

namespace {

constexpr int kSidecarVersion = 1;

std::uint32_t to_le(std::uint32_t v) {
    if constexpr (std::endian::native == std::endian::big) return __builtin_bswap32(v);
    return v;
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

bool IQRecording::operator==(const IQRecording& o) const {
    return samples == o.samples && device_id == o.device_id && distance_ft == o.distance_ft && run == o.run &&
           sample_rate == o.sample_rate && seed == o.seed && device == o.device && channel == o.channel &&
           ofdm.fft_size == o.ofdm.fft_size && ofdm.cyclic_prefix == o.ofdm.cyclic_prefix &&
           ofdm.active_subcarriers == o.ofdm.active_subcarriers;
}

void write_cf32(const fs::path& path, const IQSamples& samples) {
    std::vector<std::uint32_t> words(samples.size() * 2);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        words[2 * i] = to_le(std::bit_cast<std::uint32_t>(samples[i].real()));
        words[2 * i + 1] = to_le(std::bit_cast<std::uint32_t>(samples[i].imag()));
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(words.data()), static_cast<std::streamsize>(words.size() * 4));
    if (!out) throw IoError("write failed: " + path.string());
}

IQSamples read_cf32(const fs::path& path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw IoError("cannot open " + path.string());
    const auto bytes = static_cast<std::size_t>(in.tellg());
    if (bytes % 8 != 0) throw IoError(path.string() + ": size " + std::to_string(bytes) + " is not a whole number of cf32 samples");
    in.seekg(0);
    std::vector<std::uint32_t> words(bytes / 4);
    in.read(reinterpret_cast<char*>(words.data()), static_cast<std::streamsize>(bytes));
    if (!in) throw IoError("read failed: " + path.string());
    IQSamples out(bytes / 8);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = {std::bit_cast<float>(to_le(words[2 * i])), std::bit_cast<float>(to_le(words[2 * i + 1]))};
    }
    return out;
}

fs::path sidecar_path(const fs::path& iq_path) {
    fs::path p = iq_path;
    return p.replace_extension(".json");
}

std::string sidecar_json(const IQRecording& rec) {
    json j = {{"format", "rfp-iq-sidecar"},
              {"version", kSidecarVersion},
              {"datatype", "cf32_le"},
              {"n_samples", rec.samples.size()},
              {"device_id", rec.device_id},
              {"distance_ft", rec.distance_ft},
              {"run", rec.run},
              {"sample_rate", rec.sample_rate},
              {"seed", rec.seed},
              {"device", detail::to_json(rec.device)},
              {"channel", detail::to_json(rec.channel)},
              {"ofdm", detail::to_json(rec.ofdm)}};
    return j.dump(2) + "\n";
}

namespace {

IQRecording parse_sidecar(const std::string& text, std::size_t* n_samples) {
    try {
        const json j = json::parse(text);
        if (j.at("format") != "rfp-iq-sidecar") throw IoError("not an IQ sidecar");
        if (j.at("version").get<int>() != kSidecarVersion) {
            throw IoError("unsupported sidecar version " + j.at("version").dump());
        }
        IQRecording rec;
        rec.device_id = j.at("device_id").get<int>();
        rec.distance_ft = j.at("distance_ft").get<double>();
        rec.run = j.at("run").get<int>();
        rec.sample_rate = j.at("sample_rate").get<double>();
        rec.seed = j.at("seed").get<std::uint64_t>();
        rec.device = detail::device_from(j.at("device"));
        rec.channel = detail::channel_from(j.at("channel"));
        rec.ofdm = detail::ofdm_from(j.at("ofdm"));
        if (n_samples) *n_samples = j.at("n_samples").get<std::size_t>();
        return rec;
    } catch (const json::exception& e) {
        throw IoError(std::string("malformed sidecar: ") + e.what());
    }
}

}  // namespace

IQRecording parse_sidecar(const std::string& json) { return parse_sidecar(json, nullptr); }

void save_recording(const IQRecording& rec, const fs::path& iq_path) {
    write_cf32(iq_path, rec.samples);
    const auto meta = sidecar_path(iq_path);
    std::ofstream out(meta, std::ios::trunc);
    if (!out) throw IoError("cannot write " + meta.string());
    out << sidecar_json(rec);
    if (!out) throw IoError("write failed: " + meta.string());
}

IQRecording load_recording(const fs::path& iq_path) {
    const auto meta = sidecar_path(iq_path);
    std::size_t expected = 0;
    IQRecording rec = parse_sidecar(read_text(meta), &expected);
    rec.samples = read_cf32(iq_path);
    if (expected != rec.samples.size()) {
        throw IoError(iq_path.string() + ": sample count disagrees with sidecar");
    }
    return rec;
}

}  // namespace rfp::sim
