#include "rfp/nn/network.hpp"

#include "rfp/seed.hpp"

namespace rfp::nn {

template <typename T>
Network<T>::Network(Shape input_shape, std::vector<LayerSpec> specs, std::uint64_t seed)
    : input_shape_(std::move(input_shape)), specs_(std::move(specs)), seed_(seed) {
    if (specs_.empty()) throw ConfigError("network needs at least one layer");
    for (auto d : input_shape_) {
        if (d == 0) throw ConfigError("network input shape must be positive: " + to_string(input_shape_));
    }
    std::mt19937_64 rng(seed_);
    Shape shape = input_shape_;
    for (std::size_t i = 0; i < specs_.size(); ++i) {
        try {
            layers_.push_back(make_layer<T>(specs_[i], shape));
        } catch (const ConfigError& e) {
            throw ConfigError("layer " + std::to_string(i) + " (" + describe(specs_[i]) + "): " + e.what());
        }
        layers_.back()->initialize(rng);
        layers_.back()->reseed(mix64(seed_ ^ mix64(i)));
        shape = layers_.back()->output_shape();
    }
}

template <typename T>
const Shape& Network<T>::output_shape() const {
    return layers_.back()->output_shape();
}

template <typename T>
Tensor<T> Network<T>::forward(const Tensor<T>& batch) {
    batch_size_of(batch.shape(), input_shape_, "network input");
    Tensor<T> x = layers_.front()->forward(batch, mode_);
    for (std::size_t i = 1; i < layers_.size(); ++i) x = layers_[i]->forward(x, mode_);
    pass_recorded_ = true;
    return x;
}

template <typename T>
Tensor<T> Network<T>::predict(const Tensor<T>& batch) const {
    batch_size_of(batch.shape(), input_shape_, "network input");
    Tensor<T> x = layers_.front()->infer(batch);
    for (std::size_t i = 1; i < layers_.size(); ++i) x = layers_[i]->infer(x);
    return x;
}

template <typename T>
void Network<T>::backward(const Tensor<T>& grad_output) {
    if (!pass_recorded_) throw UsageError("backward() called without a preceding forward()");
    Tensor<T> g = grad_output;
    for (std::size_t i = layers_.size(); i-- > 0;) g = layers_[i]->backward(g);
    pass_recorded_ = false;
}

template <typename T>
void Network<T>::zero_grad() {
    for (auto* p : parameters()) p->zero_grad();
}

template <typename T>
std::vector<Tensor<T>*> Network<T>::parameters() {
    std::vector<Tensor<T>*> out;
    for (auto& l : layers_) {
        auto p = l->parameters();
        out.insert(out.end(), p.begin(), p.end());
    }
    return out;
}

template <typename T>
std::vector<const Tensor<T>*> Network<T>::parameters() const {
    auto p = const_cast<Network*>(this)->parameters();
    return {p.begin(), p.end()};
}

template <typename T>
std::vector<Tensor<T>*> Network<T>::buffers() {
    std::vector<Tensor<T>*> out;
    for (auto& l : layers_) {
        auto b = l->buffers();
        out.insert(out.end(), b.begin(), b.end());
    }
    return out;
}

template <typename T>
std::vector<const Tensor<T>*> Network<T>::buffers() const {
    auto b = const_cast<Network*>(this)->buffers();
    return {b.begin(), b.end()};
}

template <typename T>
std::size_t Network<T>::parameter_count() const {
    std::size_t n = 0;
    for (const auto* p : parameters()) n += p->size();
    return n;
}

template <typename T>
std::vector<std::vector<T>> Network<T>::state() const {
    std::vector<std::vector<T>> out;
    for (const auto* p : parameters()) out.push_back(p->values());
    for (const auto* b : buffers()) out.push_back(b->values());
    return out;
}

template <typename T>
void Network<T>::load_state(const std::vector<std::vector<T>>& state) {
    auto params = parameters();
    auto bufs = buffers();
    if (state.size() != params.size() + bufs.size()) {
        throw ConfigError("network state has " + std::to_string(state.size()) + " tensors, expected " +
                          std::to_string(params.size() + bufs.size()));
    }
    std::size_t i = 0;
    for (auto* t : params) {
        if (state[i].size() != t->size()) throw ConfigError("network state tensor size mismatch");
        std::copy(state[i].begin(), state[i].end(), t->values().begin());
        ++i;
    }
    for (auto* t : bufs) {
        if (state[i].size() != t->size()) throw ConfigError("network state tensor size mismatch");
        std::copy(state[i].begin(), state[i].end(), t->values().begin());
        ++i;
    }
}

template class Network<float>;
template class Network<double>;

}  // namespace rfp::nn
