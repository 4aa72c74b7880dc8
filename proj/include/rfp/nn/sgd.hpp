#pragma once

#include <vector>

#include "rfp/nn/network.hpp"

namespace rfp::nn {

struct SgdConfig {
    double learning_rate = 0.01;
    double momentum = 0.9;
};

/// Momentum SGD: v <- momentum * v + g, theta <- theta - lr * v.
/// Velocity buffers persist across step() calls and are keyed by parameter order.
template <typename T>
class Sgd {
public:
    explicit Sgd(SgdConfig config = {});

    double learning_rate() const { return config_.learning_rate; }
    void set_learning_rate(double lr);
    double momentum() const { return config_.momentum; }

    /// Applies one update from the gradients currently stored on `params`.
    /// Throws TrainingError (before touching any parameter) if a gradient is non-finite.
    void step(const std::vector<Tensor<T>*>& params);
    void step(Network<T>& net) { step(net.parameters()); }

    void reset() { velocity_.clear(); }

private:
    SgdConfig config_;
    std::vector<std::vector<T>> velocity_;
};

extern template class Sgd<float>;
extern template class Sgd<double>;

}  // namespace rfp::nn
