#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "rfp/nn/layer_spec.hpp"
#include "rfp/nn/tensor.hpp"

namespace rfp::nn {

enum class Mode { train, eval };

/// A differentiable layer operating on batches shaped [B, ...input_shape()].
///
/// forward() records whatever backward() needs and may update internal state
/// (batch-norm running statistics, dropout RNG). infer() is the eval-mode path:
/// it never mutates the layer, so one instance can serve concurrent readers.
/// backward() accumulates into parameter gradients and returns the gradient
/// with respect to the layer input.
template <typename T>
class Layer {
public:
    virtual ~Layer() = default;

    virtual const LayerSpec& spec() const = 0;
    virtual const Shape& input_shape() const = 0;
    virtual const Shape& output_shape() const = 0;

    virtual Tensor<T> forward(const Tensor<T>& x, Mode mode) = 0;
    virtual Tensor<T> infer(const Tensor<T>& x) const = 0;
    virtual Tensor<T> backward(const Tensor<T>& grad_out) = 0;

    /// Trainable tensors in declaration order; each carries a gradient buffer.
    virtual std::vector<Tensor<T>*> parameters() { return {}; }
    /// Non-trainable state that still belongs in a checkpoint.
    virtual std::vector<Tensor<T>*> buffers() { return {}; }

    virtual void initialize(std::mt19937_64& /*rng*/) {}
    virtual void reseed(std::uint64_t /*seed*/) {}
};

template <typename T>
std::unique_ptr<Layer<T>> make_layer(const LayerSpec& spec, const Shape& input_shape);

/// Checks that `x` is a batch of `sample_shape` and returns the batch size.
std::size_t batch_size_of(const Shape& x, const Shape& sample_shape, std::string_view who);

/// Same-padded 1-D cross-correlation: y[o,l] = b[o] + sum_{c,k} w[o,c,k] x[c, l+k-K/2].
template <typename T>
class Conv1d final : public Layer<T> {
public:
    /// `use_bias == false` drops the bias term (used ahead of batch norm, which
    /// cancels any per-channel constant).
    Conv1d(const LayerSpec& spec, const Shape& input_shape, bool use_bias = true);

    const LayerSpec& spec() const override { return spec_; }
    const Shape& input_shape() const override { return in_shape_; }
    const Shape& output_shape() const override { return out_shape_; }

    Tensor<T> forward(const Tensor<T>& x, Mode mode) override;
    Tensor<T> infer(const Tensor<T>& x) const override;
    Tensor<T> backward(const Tensor<T>& grad_out) override;
    std::vector<Tensor<T>*> parameters() override;
    void initialize(std::mt19937_64& rng) override;

    bool has_bias() const { return use_bias_; }
    Tensor<T>& weights() { return weights_; }
    /// All zeros and not trainable when has_bias() is false.
    Tensor<T>& bias() { return bias_; }

private:
    LayerSpec spec_;
    Shape in_shape_, out_shape_;
    bool use_bias_ = true;
    Tensor<T> weights_;  // [C_out, C_in, K]
    Tensor<T> bias_;     // [C_out]
    Tensor<T> cached_input_;
};

/// Per-feature batch normalization. For [C, L] inputs statistics are taken over
/// batch and length; for [N] inputs over the batch only.
template <typename T>
class BatchNorm final : public Layer<T> {
public:
    static constexpr double kEpsilon = 1e-5;
    static constexpr double kMomentum = 0.1;

    BatchNorm(const LayerSpec& spec, const Shape& input_shape);

    const LayerSpec& spec() const override { return spec_; }
    const Shape& input_shape() const override { return in_shape_; }
    const Shape& output_shape() const override { return in_shape_; }

    Tensor<T> forward(const Tensor<T>& x, Mode mode) override;
    Tensor<T> infer(const Tensor<T>& x) const override;
    Tensor<T> backward(const Tensor<T>& grad_out) override;
    std::vector<Tensor<T>*> parameters() override { return {&gamma_, &beta_}; }
    std::vector<Tensor<T>*> buffers() override { return {&running_mean_, &running_var_}; }

    Tensor<T>& gamma() { return gamma_; }
    Tensor<T>& beta() { return beta_; }
    Tensor<T>& running_mean() { return running_mean_; }
    Tensor<T>& running_var() { return running_var_; }

private:
    Tensor<T> normalize_with(const Tensor<T>& x, const std::vector<double>& mean,
                             const std::vector<double>& inv_std) const;

    LayerSpec spec_;
    Shape in_shape_;
    std::size_t features_ = 0;
    std::size_t inner_ = 1;
    Tensor<T> gamma_, beta_, running_mean_, running_var_;
    // Cached for backward.
    Tensor<T> cached_xhat_;
    std::vector<double> cached_inv_std_;
    Mode cached_mode_ = Mode::eval;
};

/// Non-overlapping max pooling (width == stride). Ties resolve to the first element.
template <typename T>
class MaxPool1d final : public Layer<T> {
public:
    MaxPool1d(const LayerSpec& spec, const Shape& input_shape);

    const LayerSpec& spec() const override { return spec_; }
    const Shape& input_shape() const override { return in_shape_; }
    const Shape& output_shape() const override { return out_shape_; }

    Tensor<T> forward(const Tensor<T>& x, Mode mode) override;
    Tensor<T> infer(const Tensor<T>& x) const override;
    Tensor<T> backward(const Tensor<T>& grad_out) override;

private:
    Tensor<T> pool(const Tensor<T>& x, std::vector<std::size_t>* argmax) const;

    LayerSpec spec_;
    Shape in_shape_, out_shape_;
    std::vector<std::size_t> argmax_;
    std::size_t cached_batch_ = 0;
};

/// y = x W^T + b over [N] inputs.
template <typename T>
class Dense final : public Layer<T> {
public:
    Dense(const LayerSpec& spec, const Shape& input_shape);

    const LayerSpec& spec() const override { return spec_; }
    const Shape& input_shape() const override { return in_shape_; }
    const Shape& output_shape() const override { return out_shape_; }

    Tensor<T> forward(const Tensor<T>& x, Mode mode) override;
    Tensor<T> infer(const Tensor<T>& x) const override;
    Tensor<T> backward(const Tensor<T>& grad_out) override;
    std::vector<Tensor<T>*> parameters() override { return {&weights_, &bias_}; }
    void initialize(std::mt19937_64& rng) override;

    Tensor<T>& weights() { return weights_; }
    Tensor<T>& bias() { return bias_; }

private:
    LayerSpec spec_;
    Shape in_shape_, out_shape_;
    Tensor<T> weights_;  // [units, in_features]
    Tensor<T> bias_;
    Tensor<T> cached_input_;
};

template <typename T>
class Relu final : public Layer<T> {
public:
    Relu(const LayerSpec& spec, const Shape& input_shape) : spec_(spec), shape_(input_shape) {}

    const LayerSpec& spec() const override { return spec_; }
    const Shape& input_shape() const override { return shape_; }
    const Shape& output_shape() const override { return shape_; }

    Tensor<T> forward(const Tensor<T>& x, Mode mode) override;
    Tensor<T> infer(const Tensor<T>& x) const override;
    Tensor<T> backward(const Tensor<T>& grad_out) override;

private:
    LayerSpec spec_;
    Shape shape_;
    std::vector<unsigned char> active_;
};

/// Inverted dropout: retained units are scaled by 1/(1-rate) in train mode.
template <typename T>
class Dropout final : public Layer<T> {
public:
    Dropout(const LayerSpec& spec, const Shape& input_shape);

    const LayerSpec& spec() const override { return spec_; }
    const Shape& input_shape() const override { return shape_; }
    const Shape& output_shape() const override { return shape_; }

    Tensor<T> forward(const Tensor<T>& x, Mode mode) override;
    Tensor<T> infer(const Tensor<T>& x) const override;
    Tensor<T> backward(const Tensor<T>& grad_out) override;
    void reseed(std::uint64_t seed) override { rng_.seed(seed); }

private:
    LayerSpec spec_;
    Shape shape_;
    std::mt19937_64 rng_{0};
    std::vector<T> scale_;  // 0 or 1/(1-rate) per element; empty when identity
};

template <typename T>
class Flatten final : public Layer<T> {
public:
    Flatten(const LayerSpec& spec, const Shape& input_shape);

    const LayerSpec& spec() const override { return spec_; }
    const Shape& input_shape() const override { return in_shape_; }
    const Shape& output_shape() const override { return out_shape_; }

    Tensor<T> forward(const Tensor<T>& x, Mode mode) override;
    Tensor<T> infer(const Tensor<T>& x) const override;
    Tensor<T> backward(const Tensor<T>& grad_out) override;

private:
    LayerSpec spec_;
    Shape in_shape_, out_shape_;
    std::size_t cached_batch_ = 0;
};

/// Softmax over [N] inputs. Networks end in logits; this layer exists for
/// inference graphs that want probabilities.
template <typename T>
class Softmax final : public Layer<T> {
public:
    Softmax(const LayerSpec& spec, const Shape& input_shape);

    const LayerSpec& spec() const override { return spec_; }
    const Shape& input_shape() const override { return shape_; }
    const Shape& output_shape() const override { return shape_; }

    Tensor<T> forward(const Tensor<T>& x, Mode mode) override;
    Tensor<T> infer(const Tensor<T>& x) const override;
    Tensor<T> backward(const Tensor<T>& grad_out) override;

private:
    LayerSpec spec_;
    Shape shape_;
    Tensor<T> cached_output_;
};

/// conv -> bn -> relu -> conv -> bn, plus shortcut, then relu. The shortcut is the
/// identity when channel counts match and a kernel-size-1 convolution otherwise.
/// With use_batch_norm == false both batch-norm stages are omitted and the two
/// convolutions carry biases; with batch norm they do not.
template <typename T>
class ResidualBlock final : public Layer<T> {
public:
    ResidualBlock(const LayerSpec& spec, const Shape& input_shape);

    const LayerSpec& spec() const override { return spec_; }
    const Shape& input_shape() const override { return in_shape_; }
    const Shape& output_shape() const override { return out_shape_; }

    Tensor<T> forward(const Tensor<T>& x, Mode mode) override;
    Tensor<T> infer(const Tensor<T>& x) const override;
    Tensor<T> backward(const Tensor<T>& grad_out) override;
    std::vector<Tensor<T>*> parameters() override;
    std::vector<Tensor<T>*> buffers() override;
    void initialize(std::mt19937_64& rng) override;

    Conv1d<T>& conv_a() { return conv_a_; }
    Conv1d<T>& conv_b() { return conv_b_; }
    BatchNorm<T>* bn_a() { return bn_a_.get(); }
    BatchNorm<T>* bn_b() { return bn_b_.get(); }
    Conv1d<T>* projection() { return projection_.get(); }

private:
    LayerSpec spec_;
    Shape in_shape_, out_shape_;
    Conv1d<T> conv_a_;
    std::unique_ptr<BatchNorm<T>> bn_a_;
    Relu<T> relu_a_;
    Conv1d<T> conv_b_;
    std::unique_ptr<BatchNorm<T>> bn_b_;
    std::unique_ptr<Conv1d<T>> projection_;
    Relu<T> relu_out_;
};

}  // namespace rfp::nn
