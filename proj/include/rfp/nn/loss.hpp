#pragma once

#include <span>

#include "rfp/nn/tensor.hpp"

namespace rfp::nn {

template <typename T>
struct LossResult {
    double loss = 0.0;
    Tensor<T> grad;  // d(loss)/d(logits), already divided by the batch size
};

/// Mean over the batch of -log softmax(logits)[label], computed with max-subtraction.
/// Throws DataError for labels outside [0, n).
template <typename T>
LossResult<T> cross_entropy_loss(const Tensor<T>& logits, std::span<const int> labels);

/// Row-wise softmax of [B, n] logits.
template <typename T>
Tensor<T> softmax_rows(const Tensor<T>& logits);

/// Index of the largest entry; ties go to the lowest index.
template <typename T>
std::size_t argmax(std::span<const T> values);

}  // namespace rfp::nn
