#include "rfp/nn/layers.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

namespace rfp::nn {
namespace {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MatMap = Eigen::Map<RowMat<T>>;
template <typename T>
using ConstMatMap = Eigen::Map<const RowMat<T>>;

Shape batched(std::size_t batch, const Shape& sample) {
    Shape s{batch};
    s.insert(s.end(), sample.begin(), sample.end());
    return s;
}

// cols is (C*K) x (B*L): cols[c*K + k, b*L + l] = x[b, c, l + k - K/2], zero outside.
template <typename T>
void im2col(const T* x, std::size_t batch, std::size_t channels, std::size_t length, std::size_t kernel,
            T* cols) {
    const auto pad = static_cast<std::ptrdiff_t>(kernel / 2);
    const auto len = static_cast<std::ptrdiff_t>(length);
    const std::size_t row_stride = batch * length;
    for (std::size_t c = 0; c < channels; ++c) {
        for (std::size_t k = 0; k < kernel; ++k) {
            T* row = cols + (c * kernel + k) * row_stride;
            const std::ptrdiff_t shift = static_cast<std::ptrdiff_t>(k) - pad;
            // valid output positions l satisfy 0 <= l + shift < len
            const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, -shift);
            const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(len, len - shift);
            for (std::size_t b = 0; b < batch; ++b) {
                const T* src = x + (b * channels + c) * length;
                T* dst = row + b * length;
                if (hi <= lo) {
                    std::fill(dst, dst + length, T{0});
                    continue;
                }
                std::fill(dst, dst + lo, T{0});
                std::memcpy(dst + lo, src + lo + shift, static_cast<std::size_t>(hi - lo) * sizeof(T));
                std::fill(dst + hi, dst + len, T{0});
            }
        }
    }
}

template <typename T>
void col2im_add(const T* cols, std::size_t batch, std::size_t channels, std::size_t length,
                std::size_t kernel, T* x) {
    const auto pad = static_cast<std::ptrdiff_t>(kernel / 2);
    const auto len = static_cast<std::ptrdiff_t>(length);
    const std::size_t row_stride = batch * length;
    for (std::size_t c = 0; c < channels; ++c) {
        for (std::size_t k = 0; k < kernel; ++k) {
            const T* row = cols + (c * kernel + k) * row_stride;
            const std::ptrdiff_t shift = static_cast<std::ptrdiff_t>(k) - pad;
            const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, -shift);
            const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(len, len - shift);
            for (std::size_t b = 0; b < batch; ++b) {
                const T* src = row + b * length;
                T* dst = x + (b * channels + c) * length;
                for (std::ptrdiff_t l = lo; l < hi; ++l) dst[l + shift] += src[l];
            }
        }
    }
}

template <typename T>
void he_uniform(Tensor<T>& w, std::size_t fan_in, std::mt19937_64& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (auto& v : w.values()) v = static_cast<T>(dist(rng));
}

template <typename T>
Tensor<T> with_grad(Shape shape, T fill = T{0}) {
    Tensor<T> t(std::move(shape), fill);
    t.enable_grad();
    return t;
}

void require_cache(bool present, std::string_view who) {
    if (!present) throw UsageError(std::string(who) + ": backward called without a recorded forward pass");
}

}  // namespace

std::size_t batch_size_of(const Shape& x, const Shape& sample_shape, std::string_view who) {
    bool ok = x.size() == sample_shape.size() + 1;
    for (std::size_t i = 0; ok && i < sample_shape.size(); ++i) ok = x[i + 1] == sample_shape[i];
    if (!ok) {
        throw ConfigError(std::string(who) + ": expected batch of " + to_string(sample_shape) + ", got " +
                          to_string(x));
    }
    return x[0];
}

// ---------------------------------------------------------------- Conv1d

template <typename T>
Conv1d<T>::Conv1d(const LayerSpec& spec, const Shape& input_shape, bool use_bias)
    : spec_(spec), in_shape_(input_shape), use_bias_(use_bias) {
    spec_.validate();
    if (in_shape_.size() != 2) {
        throw ConfigError("conv1d expects [channels, length] input, got " + to_string(in_shape_));
    }
    out_shape_ = {spec_.filters, in_shape_[1]};
    weights_ = with_grad<T>({spec_.filters, in_shape_[0], spec_.kernel});
    bias_ = use_bias_ ? with_grad<T>({spec_.filters}) : Tensor<T>({spec_.filters});
}

template <typename T>
std::vector<Tensor<T>*> Conv1d<T>::parameters() {
    if (use_bias_) return {&weights_, &bias_};
    return {&weights_};
}

template <typename T>
void Conv1d<T>::initialize(std::mt19937_64& rng) {
    he_uniform(weights_, in_shape_[0] * spec_.kernel, rng);
    bias_.fill(T{0});
}

template <typename T>
Tensor<T> Conv1d<T>::infer(const Tensor<T>& x) const {
    const std::size_t batch = batch_size_of(x.shape(), in_shape_, "conv1d");
    const std::size_t c_in = in_shape_[0], len = in_shape_[1], k = spec_.kernel, c_out = spec_.filters;
    const std::size_t cols_n = batch * len;

    std::vector<T> cols(c_in * k * cols_n);
    im2col(x.raw(), batch, c_in, len, k, cols.data());

    RowMat<T> y = ConstMatMap<T>(weights_.raw(), c_out, c_in * k) * ConstMatMap<T>(cols.data(), c_in * k, cols_n);

    Tensor<T> out(batched(batch, out_shape_));
    T* o = out.raw();
    for (std::size_t b = 0; b < batch; ++b) {
        for (std::size_t f = 0; f < c_out; ++f) {
            const T* src = y.data() + f * cols_n + b * len;
            T* dst = o + (b * c_out + f) * len;
            const T bias = bias_[f];
            for (std::size_t l = 0; l < len; ++l) dst[l] = src[l] + bias;
        }
    }
    return out;
}

template <typename T>
Tensor<T> Conv1d<T>::forward(const Tensor<T>& x, Mode) {
    Tensor<T> out = infer(x);
    cached_input_ = x;
    return out;
}

template <typename T>
Tensor<T> Conv1d<T>::backward(const Tensor<T>& grad_out) {
    require_cache(!cached_input_.empty(), "conv1d");
    const std::size_t batch = batch_size_of(grad_out.shape(), out_shape_, "conv1d backward");
    const std::size_t c_in = in_shape_[0], len = in_shape_[1], k = spec_.kernel, c_out = spec_.filters;
    const std::size_t cols_n = batch * len;

    RowMat<T> dy(c_out, cols_n);
    for (std::size_t b = 0; b < batch; ++b) {
        for (std::size_t f = 0; f < c_out; ++f) {
            std::memcpy(dy.data() + f * cols_n + b * len, grad_out.raw() + (b * c_out + f) * len, len * sizeof(T));
        }
    }

    std::vector<T> cols(c_in * k * cols_n);
    im2col(cached_input_.raw(), batch, c_in, len, k, cols.data());
    ConstMatMap<T> cols_m(cols.data(), c_in * k, cols_n);

    MatMap<T>(weights_.grad().data(), c_out, c_in * k).noalias() += dy * cols_m.transpose();
    if (use_bias_) {
        auto db = bias_.grad();
        // Eigen's vectorized reductions peel by pointer alignment, which makes
        // the summation order (and so the result) allocation dependent.
        for (std::size_t f = 0; f < c_out; ++f) {
            const T* row = dy.data() + f * cols_n;
            T acc{0};
            for (std::size_t i = 0; i < cols_n; ++i) acc += row[i];
            db[f] += acc;
        }
    }

    RowMat<T> dcols = ConstMatMap<T>(weights_.raw(), c_out, c_in * k).transpose() * dy;
    Tensor<T> dx(batched(batch, in_shape_));
    col2im_add(dcols.data(), batch, c_in, len, k, dx.raw());
    return dx;
}

// ---------------------------------------------------------------- BatchNorm

template <typename T>
BatchNorm<T>::BatchNorm(const LayerSpec& spec, const Shape& input_shape) : spec_(spec), in_shape_(input_shape) {
    if (in_shape_.empty() || in_shape_.size() > 2) {
        throw ConfigError("batch_norm expects [features] or [channels, length], got " + to_string(in_shape_));
    }
    features_ = in_shape_[0];
    inner_ = in_shape_.size() == 2 ? in_shape_[1] : 1;
    gamma_ = with_grad<T>({features_}, T{1});
    beta_ = with_grad<T>({features_});
    running_mean_ = Tensor<T>({features_});
    running_var_ = Tensor<T>({features_}, T{1});
}

template <typename T>
Tensor<T> BatchNorm<T>::normalize_with(const Tensor<T>& x, const std::vector<double>& mean,
                                       const std::vector<double>& inv_std) const {
    const std::size_t batch = x.dim(0);
    Tensor<T> xhat(x.shape());
    for (std::size_t b = 0; b < batch; ++b) {
        for (std::size_t c = 0; c < features_; ++c) {
            const T* src = x.raw() + (b * features_ + c) * inner_;
            T* dst = xhat.raw() + (b * features_ + c) * inner_;
            const double m = mean[c], s = inv_std[c];
            for (std::size_t i = 0; i < inner_; ++i) dst[i] = static_cast<T>((src[i] - m) * s);
        }
    }
    return xhat;
}

template <typename T>
Tensor<T> BatchNorm<T>::infer(const Tensor<T>& x) const {
    batch_size_of(x.shape(), in_shape_, "batch_norm");
    std::vector<double> mean(features_), inv_std(features_);
    for (std::size_t c = 0; c < features_; ++c) {
        mean[c] = running_mean_[c];
        inv_std[c] = 1.0 / std::sqrt(static_cast<double>(running_var_[c]) + kEpsilon);
    }
    Tensor<T> y = normalize_with(x, mean, inv_std);
    const std::size_t batch = x.dim(0);
    for (std::size_t b = 0; b < batch; ++b) {
        for (std::size_t c = 0; c < features_; ++c) {
            T* p = y.raw() + (b * features_ + c) * inner_;
            for (std::size_t i = 0; i < inner_; ++i) p[i] = gamma_[c] * p[i] + beta_[c];
        }
    }
    return y;
}

template <typename T>
Tensor<T> BatchNorm<T>::forward(const Tensor<T>& x, Mode mode) {
    const std::size_t batch = batch_size_of(x.shape(), in_shape_, "batch_norm");
    std::vector<double> mean(features_), inv_std(features_);
    if (mode == Mode::train) {
        const double n = static_cast<double>(batch * inner_);
        for (std::size_t c = 0; c < features_; ++c) {
            double sum = 0.0;
            for (std::size_t b = 0; b < batch; ++b) {
                const T* p = x.raw() + (b * features_ + c) * inner_;
                for (std::size_t i = 0; i < inner_; ++i) sum += p[i];
            }
            const double m = sum / n;
            double sq = 0.0;
            for (std::size_t b = 0; b < batch; ++b) {
                const T* p = x.raw() + (b * features_ + c) * inner_;
                for (std::size_t i = 0; i < inner_; ++i) {
                    const double d = p[i] - m;
                    sq += d * d;
                }
            }
            const double var = sq / n;
            mean[c] = m;
            inv_std[c] = 1.0 / std::sqrt(var + kEpsilon);
            const double unbiased = n > 1 ? var * n / (n - 1) : var;
            running_mean_[c] = static_cast<T>((1 - kMomentum) * running_mean_[c] + kMomentum * m);
            running_var_[c] = static_cast<T>((1 - kMomentum) * running_var_[c] + kMomentum * unbiased);
        }
    } else {
        for (std::size_t c = 0; c < features_; ++c) {
            mean[c] = running_mean_[c];
            inv_std[c] = 1.0 / std::sqrt(static_cast<double>(running_var_[c]) + kEpsilon);
        }
    }
    cached_xhat_ = normalize_with(x, mean, inv_std);
    cached_inv_std_ = std::move(inv_std);
    cached_mode_ = mode;

    Tensor<T> y(x.shape());
    for (std::size_t b = 0; b < batch; ++b) {
        for (std::size_t c = 0; c < features_; ++c) {
            const T* h = cached_xhat_.raw() + (b * features_ + c) * inner_;
            T* p = y.raw() + (b * features_ + c) * inner_;
            for (std::size_t i = 0; i < inner_; ++i) p[i] = gamma_[c] * h[i] + beta_[c];
        }
    }
    return y;
}

template <typename T>
Tensor<T> BatchNorm<T>::backward(const Tensor<T>& grad_out) {
    require_cache(!cached_xhat_.empty(), "batch_norm");
    if (grad_out.shape() != cached_xhat_.shape()) {
        throw ConfigError("batch_norm backward: gradient shape " + to_string(grad_out.shape()) +
                          " does not match forward " + to_string(cached_xhat_.shape()));
    }
    const std::size_t batch = grad_out.dim(0);
    const double n = static_cast<double>(batch * inner_);
    Tensor<T> dx(grad_out.shape());
    auto dgamma = gamma_.grad();
    auto dbeta = beta_.grad();
    for (std::size_t c = 0; c < features_; ++c) {
        double sum_g = 0.0, sum_gx = 0.0;
        for (std::size_t b = 0; b < batch; ++b) {
            const std::size_t off = (b * features_ + c) * inner_;
            for (std::size_t i = 0; i < inner_; ++i) {
                sum_g += grad_out[off + i];
                sum_gx += static_cast<double>(grad_out[off + i]) * cached_xhat_[off + i];
            }
        }
        dgamma[c] += static_cast<T>(sum_gx);
        dbeta[c] += static_cast<T>(sum_g);
        const double scale = gamma_[c] * cached_inv_std_[c];
        for (std::size_t b = 0; b < batch; ++b) {
            const std::size_t off = (b * features_ + c) * inner_;
            for (std::size_t i = 0; i < inner_; ++i) {
                if (cached_mode_ == Mode::train) {
                    dx[off + i] = static_cast<T>(scale / n *
                                                 (n * grad_out[off + i] - sum_g - cached_xhat_[off + i] * sum_gx));
                } else {
                    dx[off + i] = static_cast<T>(scale * grad_out[off + i]);
                }
            }
        }
    }
    return dx;
}

// ---------------------------------------------------------------- MaxPool1d

template <typename T>
MaxPool1d<T>::MaxPool1d(const LayerSpec& spec, const Shape& input_shape) : spec_(spec), in_shape_(input_shape) {
    spec_.validate();
    if (in_shape_.size() != 2) {
        throw ConfigError("max_pool1d expects [channels, length] input, got " + to_string(in_shape_));
    }
    if (in_shape_[1] < spec_.pool) {
        throw ConfigError("max_pool1d: length " + std::to_string(in_shape_[1]) + " shorter than pool width " +
                          std::to_string(spec_.pool));
    }
    out_shape_ = {in_shape_[0], in_shape_[1] / spec_.pool};
}

template <typename T>
Tensor<T> MaxPool1d<T>::pool(const Tensor<T>& x, std::vector<std::size_t>* argmax) const {
    const std::size_t batch = batch_size_of(x.shape(), in_shape_, "max_pool1d");
    const std::size_t channels = in_shape_[0], len = in_shape_[1], out_len = out_shape_[1], p = spec_.pool;
    Tensor<T> out(batched(batch, out_shape_));
    if (argmax) argmax->resize(out.size());
    for (std::size_t bc = 0; bc < batch * channels; ++bc) {
        const T* src = x.raw() + bc * len;
        for (std::size_t o = 0; o < out_len; ++o) {
            std::size_t best = o * p;
            for (std::size_t j = o * p + 1; j < o * p + p; ++j) {
                if (src[j] > src[best]) best = j;
            }
            out[bc * out_len + o] = src[best];
            if (argmax) (*argmax)[bc * out_len + o] = bc * len + best;
        }
    }
    return out;
}

template <typename T>
Tensor<T> MaxPool1d<T>::infer(const Tensor<T>& x) const {
    return pool(x, nullptr);
}

template <typename T>
Tensor<T> MaxPool1d<T>::forward(const Tensor<T>& x, Mode) {
    Tensor<T> out = pool(x, &argmax_);
    cached_batch_ = x.dim(0);
    return out;
}

template <typename T>
Tensor<T> MaxPool1d<T>::backward(const Tensor<T>& grad_out) {
    require_cache(cached_batch_ > 0, "max_pool1d");
    const std::size_t batch = batch_size_of(grad_out.shape(), out_shape_, "max_pool1d backward");
    Tensor<T> dx(batched(batch, in_shape_));
    for (std::size_t i = 0; i < grad_out.size(); ++i) dx[argmax_[i]] += grad_out[i];
    return dx;
}

// ---------------------------------------------------------------- Dense

template <typename T>
Dense<T>::Dense(const LayerSpec& spec, const Shape& input_shape) : spec_(spec), in_shape_(input_shape) {
    spec_.validate();
    if (in_shape_.size() != 1) {
        throw ConfigError("dense expects flattened [features] input, got " + to_string(in_shape_));
    }
    out_shape_ = {spec_.units};
    weights_ = with_grad<T>({spec_.units, in_shape_[0]});
    bias_ = with_grad<T>({spec_.units});
}

template <typename T>
void Dense<T>::initialize(std::mt19937_64& rng) {
    he_uniform(weights_, in_shape_[0], rng);
    bias_.fill(T{0});
}

template <typename T>
Tensor<T> Dense<T>::infer(const Tensor<T>& x) const {
    const std::size_t batch = batch_size_of(x.shape(), in_shape_, "dense");
    const auto n_in = static_cast<Eigen::Index>(in_shape_[0]);
    const auto n_out = static_cast<Eigen::Index>(spec_.units);
    Tensor<T> out(batched(batch, out_shape_));
    MatMap<T> y(out.raw(), static_cast<Eigen::Index>(batch), n_out);
    y.noalias() = ConstMatMap<T>(x.raw(), static_cast<Eigen::Index>(batch), n_in) *
                  ConstMatMap<T>(weights_.raw(), n_out, n_in).transpose();
    y.rowwise() += Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>>(bias_.raw(), n_out);
    return out;
}

template <typename T>
Tensor<T> Dense<T>::forward(const Tensor<T>& x, Mode) {
    Tensor<T> out = infer(x);
    cached_input_ = x;
    return out;
}

template <typename T>
Tensor<T> Dense<T>::backward(const Tensor<T>& grad_out) {
    require_cache(!cached_input_.empty(), "dense");
    const std::size_t batch = batch_size_of(grad_out.shape(), out_shape_, "dense backward");
    const auto b = static_cast<Eigen::Index>(batch);
    const auto n_in = static_cast<Eigen::Index>(in_shape_[0]);
    const auto n_out = static_cast<Eigen::Index>(spec_.units);
    ConstMatMap<T> dy(grad_out.raw(), b, n_out);
    ConstMatMap<T> x(cached_input_.raw(), b, n_in);
    MatMap<T>(weights_.grad().data(), n_out, n_in).noalias() += dy.transpose() * x;
    auto db = bias_.grad();
    for (Eigen::Index r = 0; r < b; ++r) {
        for (Eigen::Index c = 0; c < n_out; ++c) db[std::size_t(c)] += dy(r, c);
    }
    Tensor<T> dx(batched(batch, in_shape_));
    MatMap<T>(dx.raw(), b, n_in).noalias() = dy * ConstMatMap<T>(weights_.raw(), n_out, n_in);
    return dx;
}

// ---------------------------------------------------------------- Relu

template <typename T>
Tensor<T> Relu<T>::infer(const Tensor<T>& x) const {
    batch_size_of(x.shape(), shape_, "relu");
    Tensor<T> y(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] > T{0} ? x[i] : T{0};
    return y;
}

template <typename T>
Tensor<T> Relu<T>::forward(const Tensor<T>& x, Mode) {
    Tensor<T> y = infer(x);
    active_.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) active_[i] = x[i] > T{0};
    return y;
}

template <typename T>
Tensor<T> Relu<T>::backward(const Tensor<T>& grad_out) {
    require_cache(!active_.empty(), "relu");
    if (grad_out.size() != active_.size()) throw ConfigError("relu backward: gradient size mismatch");
    Tensor<T> dx(grad_out.shape());
    for (std::size_t i = 0; i < dx.size(); ++i) dx[i] = active_[i] ? grad_out[i] : T{0};
    return dx;
}

// ---------------------------------------------------------------- Dropout

template <typename T>
Dropout<T>::Dropout(const LayerSpec& spec, const Shape& input_shape) : spec_(spec), shape_(input_shape) {
    spec_.validate();
}

template <typename T>
Tensor<T> Dropout<T>::infer(const Tensor<T>& x) const {
    batch_size_of(x.shape(), shape_, "dropout");
    return x;
}

template <typename T>
Tensor<T> Dropout<T>::forward(const Tensor<T>& x, Mode mode) {
    batch_size_of(x.shape(), shape_, "dropout");
    if (mode == Mode::eval || spec_.rate == 0.0) {
        scale_.assign(x.size(), T{1});
        return x;
    }
    const T keep_scale = static_cast<T>(1.0 / (1.0 - spec_.rate));
    std::bernoulli_distribution keep(1.0 - spec_.rate);
    scale_.resize(x.size());
    Tensor<T> y(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) {
        scale_[i] = keep(rng_) ? keep_scale : T{0};
        y[i] = x[i] * scale_[i];
    }
    return y;
}

template <typename T>
Tensor<T> Dropout<T>::backward(const Tensor<T>& grad_out) {
    require_cache(!scale_.empty(), "dropout");
    if (grad_out.size() != scale_.size()) throw ConfigError("dropout backward: gradient size mismatch");
    Tensor<T> dx(grad_out.shape());
    for (std::size_t i = 0; i < dx.size(); ++i) dx[i] = grad_out[i] * scale_[i];
    return dx;
}

// ---------------------------------------------------------------- Flatten

template <typename T>
Flatten<T>::Flatten(const LayerSpec& spec, const Shape& input_shape)
    : spec_(spec), in_shape_(input_shape), out_shape_{element_count(input_shape)} {}

template <typename T>
Tensor<T> Flatten<T>::infer(const Tensor<T>& x) const {
    const std::size_t batch = batch_size_of(x.shape(), in_shape_, "flatten");
    Tensor<T> y = x;
    y.reshape(batched(batch, out_shape_));
    return y;
}

template <typename T>
Tensor<T> Flatten<T>::forward(const Tensor<T>& x, Mode) {
    cached_batch_ = x.empty() ? 0 : x.dim(0);
    return infer(x);
}

template <typename T>
Tensor<T> Flatten<T>::backward(const Tensor<T>& grad_out) {
    require_cache(cached_batch_ > 0, "flatten");
    const std::size_t batch = batch_size_of(grad_out.shape(), out_shape_, "flatten backward");
    Tensor<T> dx = grad_out;
    dx.reshape(batched(batch, in_shape_));
    return dx;
}

// ---------------------------------------------------------------- Softmax

template <typename T>
Softmax<T>::Softmax(const LayerSpec& spec, const Shape& input_shape) : spec_(spec), shape_(input_shape) {
    if (shape_.size() != 1) throw ConfigError("softmax expects [classes] input, got " + to_string(shape_));
}

template <typename T>
Tensor<T> Softmax<T>::infer(const Tensor<T>& x) const {
    const std::size_t batch = batch_size_of(x.shape(), shape_, "softmax");
    const std::size_t n = shape_[0];
    Tensor<T> y(x.shape());
    for (std::size_t b = 0; b < batch; ++b) {
        const T* row = x.raw() + b * n;
        const T mx = *std::max_element(row, row + n);
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) sum += std::exp(static_cast<double>(row[i] - mx));
        for (std::size_t i = 0; i < n; ++i) y[b * n + i] = static_cast<T>(std::exp(static_cast<double>(row[i] - mx)) / sum);
    }
    return y;
}

template <typename T>
Tensor<T> Softmax<T>::forward(const Tensor<T>& x, Mode) {
    cached_output_ = infer(x);
    return cached_output_;
}

template <typename T>
Tensor<T> Softmax<T>::backward(const Tensor<T>& grad_out) {
    require_cache(!cached_output_.empty(), "softmax");
    const std::size_t batch = batch_size_of(grad_out.shape(), shape_, "softmax backward");
    const std::size_t n = shape_[0];
    Tensor<T> dx(grad_out.shape());
    for (std::size_t b = 0; b < batch; ++b) {
        double dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) dot += static_cast<double>(grad_out[b * n + i]) * cached_output_[b * n + i];
        for (std::size_t i = 0; i < n; ++i) {
            dx[b * n + i] = static_cast<T>(cached_output_[b * n + i] * (grad_out[b * n + i] - dot));
        }
    }
    return dx;
}

// ---------------------------------------------------------------- ResidualBlock

template <typename T>
ResidualBlock<T>::ResidualBlock(const LayerSpec& spec, const Shape& input_shape)
    : spec_(spec),
      in_shape_(input_shape),
      conv_a_(LayerSpec::conv1d(spec.filters, spec.kernel), input_shape, !spec.use_batch_norm),
      relu_a_(LayerSpec::relu(), conv_a_.output_shape()),
      conv_b_(LayerSpec::conv1d(spec.filters, spec.kernel), conv_a_.output_shape(), !spec.use_batch_norm),
      relu_out_(LayerSpec::relu(), conv_a_.output_shape()) {
    spec_.validate();
    out_shape_ = conv_a_.output_shape();
    if (spec_.use_batch_norm) {
        bn_a_ = std::make_unique<BatchNorm<T>>(LayerSpec::batch_norm(), out_shape_);
        bn_b_ = std::make_unique<BatchNorm<T>>(LayerSpec::batch_norm(), out_shape_);
    }
    if (in_shape_[0] != spec_.filters) {
        projection_ = std::make_unique<Conv1d<T>>(LayerSpec::conv1d(spec_.filters, 1), in_shape_);
    }
}

template <typename T>
std::vector<Tensor<T>*> ResidualBlock<T>::parameters() {
    std::vector<Tensor<T>*> out;
    auto append = [&out](Layer<T>& l) {
        auto p = l.parameters();
        out.insert(out.end(), p.begin(), p.end());
    };
    append(conv_a_);
    if (bn_a_) append(*bn_a_);
    append(conv_b_);
    if (bn_b_) append(*bn_b_);
    if (projection_) append(*projection_);
    return out;
}

template <typename T>
std::vector<Tensor<T>*> ResidualBlock<T>::buffers() {
    std::vector<Tensor<T>*> out;
    for (auto* bn : {bn_a_.get(), bn_b_.get()}) {
        if (!bn) continue;
        auto b = bn->buffers();
        out.insert(out.end(), b.begin(), b.end());
    }
    return out;
}

template <typename T>
void ResidualBlock<T>::initialize(std::mt19937_64& rng) {
    conv_a_.initialize(rng);
    conv_b_.initialize(rng);
    if (projection_) projection_->initialize(rng);
}

template <typename T>
Tensor<T> ResidualBlock<T>::infer(const Tensor<T>& x) const {
    Tensor<T> h = conv_a_.infer(x);
    if (bn_a_) h = bn_a_->infer(h);
    h = relu_a_.infer(h);
    h = conv_b_.infer(h);
    if (bn_b_) h = bn_b_->infer(h);
    if (projection_) {
        const Tensor<T> s = projection_->infer(x);
        for (std::size_t i = 0; i < h.size(); ++i) h[i] += s[i];
    } else {
        for (std::size_t i = 0; i < h.size(); ++i) h[i] += x[i];
    }
    return relu_out_.infer(h);
}

template <typename T>
Tensor<T> ResidualBlock<T>::forward(const Tensor<T>& x, Mode mode) {
    Tensor<T> h = conv_a_.forward(x, mode);
    if (bn_a_) h = bn_a_->forward(h, mode);
    h = relu_a_.forward(h, mode);
    h = conv_b_.forward(h, mode);
    if (bn_b_) h = bn_b_->forward(h, mode);
    if (projection_) {
        const Tensor<T> s = projection_->forward(x, mode);
        for (std::size_t i = 0; i < h.size(); ++i) h[i] += s[i];
    } else {
        for (std::size_t i = 0; i < h.size(); ++i) h[i] += x[i];
    }
    return relu_out_.forward(h, mode);
}

template <typename T>
Tensor<T> ResidualBlock<T>::backward(const Tensor<T>& grad_out) {
    const Tensor<T> g = relu_out_.backward(grad_out);
    Tensor<T> shortcut = projection_ ? projection_->backward(g) : g;
    Tensor<T> h = bn_b_ ? bn_b_->backward(g) : g;
    h = conv_b_.backward(h);
    h = relu_a_.backward(h);
    if (bn_a_) h = bn_a_->backward(h);
    Tensor<T> dx = conv_a_.backward(h);
    for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += shortcut[i];
    return dx;
}

// ---------------------------------------------------------------- factory

template <typename T>
std::unique_ptr<Layer<T>> make_layer(const LayerSpec& spec, const Shape& input_shape) {
    spec.validate();
    switch (spec.kind) {
        case LayerKind::conv1d: return std::make_unique<Conv1d<T>>(spec, input_shape);
        case LayerKind::residual_block: return std::make_unique<ResidualBlock<T>>(spec, input_shape);
        case LayerKind::max_pool1d: return std::make_unique<MaxPool1d<T>>(spec, input_shape);
        case LayerKind::batch_norm: return std::make_unique<BatchNorm<T>>(spec, input_shape);
        case LayerKind::dense: return std::make_unique<Dense<T>>(spec, input_shape);
        case LayerKind::relu: return std::make_unique<Relu<T>>(spec, input_shape);
        case LayerKind::dropout: return std::make_unique<Dropout<T>>(spec, input_shape);
        case LayerKind::flatten: return std::make_unique<Flatten<T>>(spec, input_shape);
        case LayerKind::softmax: return std::make_unique<Softmax<T>>(spec, input_shape);
    }
    throw ConfigError("unknown layer kind");
}

#define RFP_INSTANTIATE(T)                                                                  \
    template class Conv1d<T>;                                                               \
    template class BatchNorm<T>;                                                            \
    template class MaxPool1d<T>;                                                            \
    template class Dense<T>;                                                                \
    template class Relu<T>;                                                                 \
    template class Dropout<T>;                                                              \
    template class Flatten<T>;                                                              \
    template class Softmax<T>;                                                              \
    template class ResidualBlock<T>;                                                        \
    template std::unique_ptr<Layer<T>> make_layer<T>(const LayerSpec&, const Shape&);

RFP_INSTANTIATE(float)
RFP_INSTANTIATE(double)

#undef RFP_INSTANTIATE

}  // namespace rfp::nn
