#include "rfp/sim/ofdm.hpp"

#include <fftw3.h>

#include <cmath>
#include <random>
#include <string>

#include "rfp/errors.hpp"

namespace rfp::sim {

void OfdmConfig::validate() const {
    if (fft_size < 2) throw ConfigError("ofdm: fft_size must be at least 2");
    if (cyclic_prefix > fft_size) throw ConfigError("ofdm: cyclic prefix longer than the FFT");
    if (active_subcarriers == 0 || active_subcarriers >= fft_size) {
        throw ConfigError("ofdm: active subcarriers must lie in [1, fft_size), got " +
                          std::to_string(active_subcarriers));
    }
}

std::vector<std::size_t> active_bins(const OfdmConfig& cfg) {
    cfg.validate();
    const std::size_t upper = (cfg.active_subcarriers + 1) / 2;
    const std::size_t lower = cfg.active_subcarriers / 2;
    std::vector<std::size_t> bins;
    for (std::size_t k = 1; k <= upper; ++k) bins.push_back(k);
    for (std::size_t k = cfg.fft_size - lower; k < cfg.fft_size; ++k) bins.push_back(k);
    return bins;
}

namespace {

// RAII wrapper so an exception between plan and destroy cannot leak.
class InversePlan {
public:
    explicit InversePlan(std::size_t n)
        : n_(n),
          in_(fftw_alloc_complex(n)),
          out_(fftw_alloc_complex(n)),
          plan_(fftw_plan_dft_1d(static_cast<int>(n), in_, out_, FFTW_BACKWARD, FFTW_ESTIMATE)) {}
    ~InversePlan() {
        fftw_destroy_plan(plan_);
        fftw_free(in_);
        fftw_free(out_);
    }
    InversePlan(const InversePlan&) = delete;
    InversePlan& operator=(const InversePlan&) = delete;

    cdouble* input() { return reinterpret_cast<cdouble*>(in_); }
    const cdouble* output() const { return reinterpret_cast<const cdouble*>(out_); }
    void execute() { fftw_execute(plan_); }
    std::size_t size() const { return n_; }

private:
    std::size_t n_;
    fftw_complex* in_;
    fftw_complex* out_;
    fftw_plan plan_;
};

}  // namespace

Signal generate_ofdm_baseband(std::uint64_t seed, std::size_t n_samples, const OfdmConfig& cfg) {
    cfg.validate();
    const std::size_t sym_len = cfg.symbol_length();
    if (n_samples < sym_len) {
        throw ConfigError("ofdm: need at least one symbol (" + std::to_string(sym_len) + " samples), got " +
                          std::to_string(n_samples));
    }
    const std::size_t n_symbols = (n_samples + sym_len - 1) / sym_len;
    const auto bins = active_bins(cfg);
    // Unnormalized inverse FFT of unit-power symbols has power |bins| per sample.
    const double scale = 1.0 / std::sqrt(static_cast<double>(bins.size()));
    const double a = 1.0 / std::sqrt(2.0);

    std::mt19937_64 rng(seed);
    InversePlan plan(cfg.fft_size);
    Signal out;
    out.reserve(n_symbols * sym_len);
    std::uint64_t bits = 0;
    int bits_left = 0;
    for (std::size_t s = 0; s < n_symbols; ++s) {
        cdouble* freq = plan.input();
        std::fill(freq, freq + cfg.fft_size, cdouble{});
        for (auto k : bins) {
            if (bits_left < 2) {
                bits = rng();
                bits_left = 64;
            }
            const double re = (bits & 1) ? -a : a;
            const double im = (bits & 2) ? -a : a;
            bits >>= 2;
            bits_left -= 2;
            freq[k] = {re, im};
        }
        plan.execute();
        const cdouble* time = plan.output();
        for (std::size_t n = cfg.fft_size - cfg.cyclic_prefix; n < cfg.fft_size; ++n) out.push_back(time[n] * scale);
        for (std::size_t n = 0; n < cfg.fft_size; ++n) out.push_back(time[n] * scale);
    }
    return out;
}

}  // namespace rfp::sim
