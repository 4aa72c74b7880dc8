#include "rfp/data/cache.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>

#include "rfp/errors.hpp"

namespace rfp::data {

namespace {

constexpr std::array<char, 8> kMagic = {'R', 'F', 'P', 'D', 'S', 'E', 'T', '\0'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little, "dataset cache assumes a little-endian host");

class Writer {
public:
    explicit Writer(const std::filesystem::path& p) : out_(p, std::ios::binary | std::ios::trunc), path_(p) {
        if (!out_) throw IoError("cannot write " + p.string());
    }
    template <typename T>
    void put(T v) {
        out_.write(reinterpret_cast<const char*>(&v), sizeof v);
    }
    void bytes(const void* p, std::size_t n) { out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n)); }
    void finish() {
        out_.flush();
        if (!out_) throw IoError("write failed: " + path_.string());
    }

private:
    std::ofstream out_;
    std::filesystem::path path_;
};

class Reader {
public:
    explicit Reader(const std::filesystem::path& p) : in_(p, std::ios::binary), path_(p) {
        if (!in_) throw IoError("cannot open " + p.string());
    }
    template <typename T>
    T get() {
        T v;
        bytes(&v, sizeof v);
        return v;
    }
    void bytes(void* p, std::size_t n) {
        in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
        if (!in_) throw IoError(path_.string() + ": truncated dataset cache");
    }
    bool at_end() { return in_.peek() == std::char_traits<char>::eof(); }

private:
    std::ifstream in_;
    std::filesystem::path path_;
};

}  // namespace

void write_cache(const LabeledDataset& ds, const std::filesystem::path& path) {
    Writer w(path);
    w.bytes(kMagic.data(), kMagic.size());
    w.put<std::uint32_t>(kVersion);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(ds.task.kind));
    w.put<double>(ds.task.distance_ft);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(ds.split));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(ds.window_length));
    w.put<std::uint64_t>(ds.size());
    w.put<std::uint32_t>(static_cast<std::uint32_t>(ds.n_classes()));
    for (const auto& name : ds.label_names) {
        w.put<std::uint32_t>(static_cast<std::uint32_t>(name.size()));
        w.bytes(name.data(), name.size());
    }
    for (int l : ds.labels) w.put<std::int32_t>(l);
    for (const auto& s : ds.sources) {
        w.put<std::int32_t>(s.device_id);
        w.put<double>(s.distance_ft);
        w.put<std::int32_t>(s.run);
        w.put<std::uint64_t>(s.window_index);
    }
    w.bytes(ds.data.data(), ds.data.size() * sizeof(float));
    w.finish();
}

LabeledDataset read_cache(const std::filesystem::path& path) {
    Reader r(path);
    std::array<char, 8> magic{};
    r.bytes(magic.data(), magic.size());
    if (magic != kMagic) throw IoError(path.string() + " is not a dataset cache");
    if (const auto v = r.get<std::uint32_t>(); v != kVersion) {
        throw IoError(path.string() + ": unsupported dataset cache version " + std::to_string(v));
    }
    LabeledDataset ds;
    const auto kind = r.get<std::uint32_t>();
    if (kind > 2) throw IoError(path.string() + ": unknown task kind " + std::to_string(kind));
    ds.task.kind = static_cast<TaskKind>(kind);
    ds.task.distance_ft = r.get<double>();
    const auto split = r.get<std::uint32_t>();
    if (split > 2) throw IoError(path.string() + ": unknown split " + std::to_string(split));
    ds.split = static_cast<Split>(split);
    ds.window_length = r.get<std::uint32_t>();
    const auto n = r.get<std::uint64_t>();
    const auto n_classes = r.get<std::uint32_t>();
    // Reject impossible counts before allocating.
    const std::uint64_t per_window = 4 + 24 + 8 * static_cast<std::uint64_t>(ds.window_length);
    if (n > std::filesystem::file_size(path) / per_window) throw IoError(path.string() + ": truncated dataset cache");
    for (std::uint32_t c = 0; c < n_classes; ++c) {
        const auto len = r.get<std::uint32_t>();
        if (len > 4096) throw IoError(path.string() + ": implausible label name length");
        std::string name(len, '\0');
        r.bytes(name.data(), name.size());
        ds.label_names.push_back(std::move(name));
    }
    ds.labels.resize(n);
    for (auto& l : ds.labels) {
        l = r.get<std::int32_t>();
        if (l < 0 || static_cast<std::uint32_t>(l) >= n_classes) throw IoError(path.string() + ": label out of range");
    }
    ds.sources.resize(n);
    for (auto& s : ds.sources) {
        s.device_id = r.get<std::int32_t>();
        s.distance_ft = r.get<double>();
        s.run = r.get<std::int32_t>();
        s.window_index = r.get<std::uint64_t>();
    }
    ds.data.resize(n * ds.sample_floats());
    r.bytes(ds.data.data(), ds.data.size() * sizeof(float));
    if (!r.at_end()) throw IoError(path.string() + ": trailing bytes after dataset cache");
    return ds;
}

}  // namespace rfp::data
