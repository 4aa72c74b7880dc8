#include "rfp/nn/sgd.hpp"

#include <cmath>
#include <string>

namespace rfp::nn {

template <typename T>
Sgd<T>::Sgd(SgdConfig config) : config_(config) {
    set_learning_rate(config.learning_rate);
    if (!(config_.momentum >= 0.0 && config_.momentum < 1.0)) {
        throw ConfigError("sgd: momentum must lie in [0, 1), got " + std::to_string(config_.momentum));
    }
}

template <typename T>
void Sgd<T>::set_learning_rate(double lr) {
    if (!(lr >= 0.0) || !std::isfinite(lr)) throw ConfigError("sgd: learning rate must be finite and >= 0");
    config_.learning_rate = lr;
}

template <typename T>
void Sgd<T>::step(const std::vector<Tensor<T>*>& params) {
    if (velocity_.empty()) {
        for (auto* p : params) velocity_.emplace_back(p->size(), T{0});
    }
    if (velocity_.size() != params.size()) throw UsageError("sgd: parameter list changed between steps");
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (!params[i]->has_grad()) throw UsageError("sgd: parameter " + std::to_string(i) + " has no gradient");
        for (T g : params[i]->grad()) {
            if (!std::isfinite(static_cast<double>(g))) {
                throw TrainingError("sgd: non-finite gradient in parameter tensor " + std::to_string(i) + " " +
                                    to_string(params[i]->shape()));
            }
        }
    }
    const T lr = static_cast<T>(config_.learning_rate);
    const T mu = static_cast<T>(config_.momentum);
    for (std::size_t i = 0; i < params.size(); ++i) {
        auto& v = velocity_[i];
        if (v.size() != params[i]->size()) throw UsageError("sgd: parameter shape changed between steps");
        auto g = params[i]->grad();
        auto& theta = params[i]->values();
        for (std::size_t j = 0; j < v.size(); ++j) {
            v[j] = mu * v[j] + g[j];
            theta[j] -= lr * v[j];
        }
    }
}

template class Sgd<float>;
template class Sgd<double>;

}  // namespace rfp::nn
