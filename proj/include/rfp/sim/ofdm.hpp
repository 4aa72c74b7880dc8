#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace rfp::sim {

using cdouble = std::complex<double>;
using Signal = std::vector<cdouble>;

struct OfdmConfig {
    std::size_t fft_size = 64;
    std::size_t cyclic_prefix = 16;
    std::size_t active_subcarriers = 52;  // split around DC, DC itself unused

    std::size_t symbol_length() const { return fft_size + cyclic_prefix; }
    void validate() const;
};

/// FFT bin indices carrying data: 1..ceil(n/2) and fft_size-floor(n/2)..fft_size-1.
std::vector<std::size_t> active_bins(const OfdmConfig& cfg);

/// Random QPSK on the active subcarriers, one inverse FFT per symbol, cyclic
/// prefix prepended, scaled to unit average power. Produces whole symbols, so
/// the result has ceil(n_samples / symbol_length) * symbol_length samples.
/// Throws ConfigError if n_samples is shorter than one symbol.
Signal generate_ofdm_baseband(std::uint64_t seed, std::size_t n_samples, const OfdmConfig& cfg = {});

}  // namespace rfp::sim
