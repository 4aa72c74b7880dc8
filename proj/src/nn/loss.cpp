#include "rfp/nn/loss.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rfp::nn {

template <typename T>
LossResult<T> cross_entropy_loss(const Tensor<T>& logits, std::span<const int> labels) {
    if (logits.rank() != 2) throw ConfigError("cross_entropy_loss expects [B, n] logits, got " + to_string(logits.shape()));
    const std::size_t batch = logits.dim(0), n = logits.dim(1);
    if (labels.size() != batch) {
        throw DataError("cross_entropy_loss: " + std::to_string(labels.size()) + " labels for batch of " +
                        std::to_string(batch));
    }
    LossResult<T> out{0.0, Tensor<T>(logits.shape())};
    double total = 0.0;
    for (std::size_t b = 0; b < batch; ++b) {
        const int label = labels[b];
        if (label < 0 || static_cast<std::size_t>(label) >= n) {
            throw DataError("cross_entropy_loss: label " + std::to_string(label) + " outside [0, " +
                            std::to_string(n) + ")");
        }
        const T* row = logits.raw() + b * n;
        const double mx = *std::max_element(row, row + n);
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) sum += std::exp(row[i] - mx);
        const double log_sum = std::log(sum);
        total += log_sum - (row[label] - mx);
        for (std::size_t i = 0; i < n; ++i) {
            const double p = std::exp(row[i] - mx - log_sum);
            out.grad[b * n + i] = static_cast<T>((p - (static_cast<std::size_t>(label) == i ? 1.0 : 0.0)) / batch);
        }
    }
    out.loss = total / static_cast<double>(batch);
    return out;
}

template <typename T>
Tensor<T> softmax_rows(const Tensor<T>& logits) {
    if (logits.rank() != 2) throw ConfigError("softmax_rows expects [B, n] logits");
    const std::size_t batch = logits.dim(0), n = logits.dim(1);
    Tensor<T> p(logits.shape());
    for (std::size_t b = 0; b < batch; ++b) {
        const T* row = logits.raw() + b * n;
        const double mx = *std::max_element(row, row + n);
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) sum += std::exp(row[i] - mx);
        for (std::size_t i = 0; i < n; ++i) p[b * n + i] = static_cast<T>(std::exp(row[i] - mx) / sum);
    }
    return p;
}

template <typename T>
std::size_t argmax(std::span<const T> values) {
    if (values.empty()) throw DataError("argmax of an empty vector");
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] > values[best]) best = i;
    }
    return best;
}

template LossResult<float> cross_entropy_loss<float>(const Tensor<float>&, std::span<const int>);
template LossResult<double> cross_entropy_loss<double>(const Tensor<double>&, std::span<const int>);
template Tensor<float> softmax_rows<float>(const Tensor<float>&);
template Tensor<double> softmax_rows<double>(const Tensor<double>&);
template std::size_t argmax<float>(std::span<const float>);
template std::size_t argmax<double>(std::span<const double>);

}  // namespace rfp::nn
