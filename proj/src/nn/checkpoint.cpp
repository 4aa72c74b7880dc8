#include "rfp/nn/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <optional>
#include <string>

namespace rfp::nn {
namespace {

constexpr std::array<char, 8> kMagic{'R', 'F', 'P', 'C', 'K', 'P', 'T', '\0'};

class Writer {
public:
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    template <typename T>
    void scalars(const std::vector<T>& values) {
        for (T v : values) {
            if constexpr (sizeof(T) == 4) {
                u32(std::bit_cast<std::uint32_t>(v));
            } else {
                u64(std::bit_cast<std::uint64_t>(v));
            }
        }
    }
    void raw(const char* p, std::size_t n) { bytes_.insert(bytes_.end(), p, p + n); }
    const std::vector<char>& bytes() const { return bytes_; }

private:
    std::vector<char> bytes_;
};

class Reader {
public:
    explicit Reader(std::vector<char> bytes) : bytes_(std::move(bytes)) {}

    void need(std::size_t n, const char* what) const {
        if (pos_ + n > bytes_.size()) {
            throw CheckpointTruncatedError(std::string("checkpoint truncated while reading ") + what);
        }
    }
    std::uint32_t u32(const char* what) {
        need(4, what);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
        pos_ += 4;
        return v;
    }
    std::uint64_t u64(const char* what) {
        need(8, what);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
        pos_ += 8;
        return v;
    }
    double f64(const char* what) { return std::bit_cast<double>(u64(what)); }
    bool has(std::size_t n) const { return pos_ + n <= bytes_.size(); }
    const char* at() const { return bytes_.data() + pos_; }
    void skip(std::size_t n) { pos_ += n; }
    std::size_t remaining() const { return bytes_.size() - pos_; }

private:
    std::vector<char> bytes_;
    std::size_t pos_ = 0;
};

template <typename T>
std::vector<const Tensor<T>*> checkpoint_tensors(const Network<T>& net) {
    auto out = net.parameters();
    auto bufs = net.buffers();
    out.insert(out.end(), bufs.begin(), bufs.end());
    return out;
}

}  // namespace

template <typename T>
void save_checkpoint(const Network<T>& net, const std::filesystem::path& path) {
    Writer w;
    w.raw(kMagic.data(), kMagic.size());
    w.u32(kCheckpointVersion);
    w.u32(sizeof(T));
    w.u64(net.seed());
    w.u32(static_cast<std::uint32_t>(net.input_shape().size()));
    for (auto d : net.input_shape()) w.u32(static_cast<std::uint32_t>(d));
    w.u32(static_cast<std::uint32_t>(net.specs().size()));
    for (const auto& s : net.specs()) {
        w.u32(static_cast<std::uint32_t>(s.kind));
        w.u32(static_cast<std::uint32_t>(s.filters));
        w.u32(static_cast<std::uint32_t>(s.kernel));
        w.u32(static_cast<std::uint32_t>(s.pool));
        w.u32(static_cast<std::uint32_t>(s.units));
        w.u32(s.use_batch_norm ? 1u : 0u);
        w.f64(s.rate);
    }
    const auto tensors = checkpoint_tensors(net);
    w.u32(static_cast<std::uint32_t>(tensors.size()));
    for (const auto* t : tensors) {
        w.u32(static_cast<std::uint32_t>(t->rank()));
        for (auto d : t->shape()) w.u32(static_cast<std::uint32_t>(d));
    }
    for (const auto* t : tensors) w.scalars(t->values());

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open checkpoint for writing: " + path.string());
    out.write(w.bytes().data(), static_cast<std::streamsize>(w.bytes().size()));
    if (!out) throw IoError("failed writing checkpoint: " + path.string());
}

template <typename T>
Network<T> load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint: " + path.string());
    Reader r(std::vector<char>(std::istreambuf_iterator<char>(in), {}));

    if (!r.has(kMagic.size()) || std::memcmp(r.at(), kMagic.data(), kMagic.size()) != 0) {
        throw CheckpointVersionError("not a network checkpoint (bad magic): " + path.string());
    }
    r.skip(kMagic.size());
    const auto version = r.u32("format version");
    if (version != kCheckpointVersion) {
        throw CheckpointVersionError("unsupported checkpoint version " + std::to_string(version) + " (expected " +
                                     std::to_string(kCheckpointVersion) + ")");
    }
    const auto width = r.u32("float width");
    if (width != 4 && width != 8) {
        throw CheckpointVersionError("unsupported checkpoint float width " + std::to_string(width));
    }
    const auto seed = r.u64("seed");
    const auto in_rank = r.u32("input rank");
    if (in_rank == 0 || in_rank > 8) throw CheckpointShapeError("implausible input rank " + std::to_string(in_rank));
    Shape input_shape;
    for (std::uint32_t i = 0; i < in_rank; ++i) input_shape.push_back(r.u32("input shape"));
    const auto n_layers = r.u32("layer count");
    if (static_cast<std::size_t>(n_layers) * 32 > r.remaining()) {
        throw CheckpointTruncatedError("checkpoint truncated in layer table");
    }
    std::vector<LayerSpec> specs;
    for (std::uint32_t i = 0; i < n_layers; ++i) {
        LayerSpec s;
        s.kind = static_cast<LayerKind>(r.u32("layer kind"));
        s.filters = r.u32("layer filters");
        s.kernel = r.u32("layer kernel");
        s.pool = r.u32("layer pool");
        s.units = r.u32("layer units");
        s.use_batch_norm = r.u32("layer flags") != 0;
        s.rate = r.f64("layer rate");
        specs.push_back(s);
    }

    std::optional<Network<T>> net;
    try {
        net.emplace(input_shape, specs, seed);
    } catch (const ConfigError& e) {
        throw CheckpointShapeError(std::string("checkpoint architecture is invalid: ") + e.what());
    }
    auto params = net->parameters();
    auto bufs = net->buffers();
    params.insert(params.end(), bufs.begin(), bufs.end());

    const auto n_tensors = r.u32("tensor count");
    if (n_tensors != params.size()) {
        throw CheckpointShapeError("checkpoint stores " + std::to_string(n_tensors) + " tensors, architecture has " +
                                   std::to_string(params.size()));
    }
    for (std::uint32_t i = 0; i < n_tensors; ++i) {
        const auto rank = r.u32("tensor rank");
        if (rank > 8) throw CheckpointShapeError("implausible tensor rank " + std::to_string(rank));
        Shape shape;
        for (std::uint32_t d = 0; d < rank; ++d) shape.push_back(r.u32("tensor shape"));
        if (shape != params[i]->shape()) {
            throw CheckpointShapeError("tensor " + std::to_string(i) + " has shape " + to_string(shape) +
                                       ", architecture expects " + to_string(params[i]->shape()));
        }
    }
    std::size_t total = 0;
    for (const auto* p : params) total += p->size();
    if (!r.has(total * width)) throw CheckpointTruncatedError("checkpoint truncated in parameter data");
    if (r.remaining() != total * width) {
        throw CheckpointShapeError("checkpoint has " + std::to_string(r.remaining() - total * width) +
                                   " unexpected trailing bytes");
    }
    for (auto* p : params) {
        for (auto& v : p->values()) {
            if (width == 4) {
                v = static_cast<T>(std::bit_cast<float>(r.u32("parameter")));
            } else {
                v = static_cast<T>(std::bit_cast<double>(r.u64("parameter")));
            }
        }
    }
    net->set_mode(Mode::eval);
    return std::move(*net);
}

template void save_checkpoint<float>(const Network<float>&, const std::filesystem::path&);
template void save_checkpoint<double>(const Network<double>&, const std::filesystem::path&);
template Network<float> load_checkpoint<float>(const std::filesystem::path&);
template Network<double> load_checkpoint<double>(const std::filesystem::path&);

}  // namespace rfp::nn
