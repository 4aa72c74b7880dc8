#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "rfp/nn/layers.hpp"

namespace rfp::nn {

/// An ordered stack of layers with materialized parameters.
///
/// A Network is single-writer: forward()/backward() mutate per-layer caches and
/// must be driven by one trainer. predict() is const and side-effect free, so a
/// network that is no longer being trained can be shared by concurrent readers.
template <typename T>
class Network {
public:
    /// `input_shape` excludes the batch dimension, e.g. {2, 256}. Parameters are
    /// initialized deterministically from `seed`.
    Network(Shape input_shape, std::vector<LayerSpec> specs, std::uint64_t seed);

    Network(Network&&) noexcept = default;
    Network& operator=(Network&&) noexcept = default;

    const Shape& input_shape() const { return input_shape_; }
    const Shape& output_shape() const;
    std::size_t output_size() const { return element_count(output_shape()); }
    const std::vector<LayerSpec>& specs() const { return specs_; }
    std::uint64_t seed() const { return seed_; }
    std::size_t layer_count() const { return layers_.size(); }
    Layer<T>& layer(std::size_t i) { return *layers_.at(i); }
    const Layer<T>& layer(std::size_t i) const { return *layers_.at(i); }

    Mode mode() const { return mode_; }
    void set_mode(Mode mode) { mode_ = mode; }

    /// Runs the batch through every layer in the current mode and records the
    /// pass for backward().
    Tensor<T> forward(const Tensor<T>& batch);

    /// Eval-mode forward that touches no layer state.
    Tensor<T> predict(const Tensor<T>& batch) const;

    /// Backpropagates `grad_output` (same shape as the last forward output),
    /// accumulating into every parameter's gradient. Consumes the recorded pass.
    void backward(const Tensor<T>& grad_output);

    void zero_grad();

    std::vector<Tensor<T>*> parameters();
    std::vector<const Tensor<T>*> parameters() const;
    std::vector<Tensor<T>*> buffers();
    std::vector<const Tensor<T>*> buffers() const;
    std::size_t parameter_count() const;

    /// Parameters followed by buffers, flattened per tensor.
    std::vector<std::vector<T>> state() const;
    void load_state(const std::vector<std::vector<T>>& state);

private:
    Shape input_shape_;
    std::vector<LayerSpec> specs_;
    std::uint64_t seed_ = 0;
    std::vector<std::unique_ptr<Layer<T>>> layers_;
    Mode mode_ = Mode::train;
    bool pass_recorded_ = false;
};

extern template class Network<float>;
extern template class Network<double>;

}  // namespace rfp::nn
