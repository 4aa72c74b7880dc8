#pragma once

#include <complex>
#include <compare>
#include <cstddef>
#include <vector>

#include "rfp/nn/tensor.hpp"
#include "rfp/sim/recording.hpp"

namespace rfp::data {

struct WindowSource {
    int device_id = 0;
    double distance_ft = 0.0;
    int run = 0;
    std::size_t window_index = 0;

    auto operator<=>(const WindowSource&) const = default;
};

struct Window {
    std::vector<std::complex<float>> iq;
    bool normalized = false;
    WindowSource source;

    std::size_t length() const { return iq.size(); }
};

/// floor(len / W) consecutive non-overlapping windows; the remainder is dropped.
std::vector<Window> partition_windows(const sim::IQRecording& recording, std::size_t window_length);

/// sqrt(mean |z|^2), accumulated in double.
double rms(const Window& w);

/// Divides every sample by rms(w). Throws DataError for an all-zero window.
Window normalize_window(Window w);

/// [2, W]: row 0 holds the real parts, row 1 the imaginary parts.
nn::Tensor<float> to_tensor(const Window& w);
Window from_tensor(const nn::Tensor<float>& t);

/// Writes the to_tensor() layout into dst[0, 2W).
void write_planar(const Window& w, float* dst);

}  // namespace rfp::data
