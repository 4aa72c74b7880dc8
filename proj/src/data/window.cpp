#include "rfp/data/window.hpp"

#include <cmath>
#include <string>

#include "rfp/errors.hpp"

namespace rfp::data {

std::vector<Window> partition_windows(const sim::IQRecording& rec, std::size_t window_length) {
    if (window_length == 0) throw ConfigError("window length must be at least 1");
    const std::size_t n = rec.samples.size() / window_length;
    std::vector<Window> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto first = rec.samples.begin() + static_cast<std::ptrdiff_t>(i * window_length);
        out[i].iq.assign(first, first + static_cast<std::ptrdiff_t>(window_length));
        out[i].source = {rec.device_id, rec.distance_ft, rec.run, i};
    }
    return out;
}

double rms(const Window& w) {
    if (w.iq.empty()) return 0.0;
    double p = 0.0;
    for (auto z : w.iq) p += std::norm(std::complex<double>(z));
    return std::sqrt(p / static_cast<double>(w.iq.size()));
}

Window normalize_window(Window w) {
    const double r = rms(w);
    if (!(r > 0.0) || !std::isfinite(r)) {
        throw DataError("cannot normalize window " + std::to_string(w.source.window_index) + ": rms is " +
                        std::to_string(r));
    }
    const double inv = 1.0 / r;
    for (auto& z : w.iq) {
        z = {static_cast<float>(z.real() * inv), static_cast<float>(z.imag() * inv)};
    }
    w.normalized = true;
    return w;
}

void write_planar(const Window& w, float* dst) {
    const std::size_t n = w.iq.size();
    for (std::size_t i = 0; i < n; ++i) {
        dst[i] = w.iq[i].real();
        dst[n + i] = w.iq[i].imag();
    }
}

nn::Tensor<float> to_tensor(const Window& w) {
    if (w.iq.empty()) throw DataError("cannot encode an empty window");
    nn::Tensor<float> t({2, w.iq.size()});
    write_planar(w, t.raw());
    return t;
}

Window from_tensor(const nn::Tensor<float>& t) {
    if (t.rank() != 2 || t.dim(0) != 2) throw DataError("window tensor must be [2, W], got " + nn::to_string(t.shape()));
    const std::size_t n = t.dim(1);
    Window w;
    w.iq.resize(n);
    for (std::size_t i = 0; i < n; ++i) w.iq[i] = {t[i], t[n + i]};
    return w;
}

}  // namespace rfp::data
