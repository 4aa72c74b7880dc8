#pragma once

#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rfp/errors.hpp"

namespace rfp::nn {

using Shape = std::vector<std::size_t>;

inline std::size_t element_count(const Shape& shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string to_string(const Shape& shape);

/// Dense row-major array with an optional gradient buffer of the same shape.
template <typename T>
class Tensor {
public:
    using value_type = T;

    Tensor() = default;

    explicit Tensor(Shape shape, T fill = T{0})
        : shape_(std::move(shape)), data_(element_count(shape_), fill) {
        check_shape();
    }

    Tensor(Shape shape, std::vector<T> data) : shape_(std::move(shape)), data_(std::move(data)) {
        check_shape();
        if (data_.size() != element_count(shape_)) {
            throw ConfigError("tensor data length " + std::to_string(data_.size()) +
                              " does not match shape " + to_string(shape_));
        }
    }

    const Shape& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    std::span<T> data() { return data_; }
    std::span<const T> data() const { return data_; }
    T* raw() { return data_.data(); }
    const T* raw() const { return data_.data(); }
    std::vector<T>& values() { return data_; }
    const std::vector<T>& values() const { return data_; }

    T& operator[](std::size_t i) { return data_[i]; }
    const T& operator[](std::size_t i) const { return data_[i]; }

    bool has_grad() const { return !grad_.empty(); }
    void enable_grad() { grad_.assign(data_.size(), T{0}); }
    void zero_grad() { std::fill(grad_.begin(), grad_.end(), T{0}); }
    std::span<T> grad() { return grad_; }
    std::span<const T> grad() const { return grad_; }

    /// Reinterprets the buffer under a new shape with the same element count.
    void reshape(Shape shape) {
        if (element_count(shape) != data_.size()) {
            throw ConfigError("cannot reshape " + to_string(shape_) + " to " + to_string(shape));
        }
        shape_ = std::move(shape);
    }

    void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

    bool operator==(const Tensor& other) const {
        return shape_ == other.shape_ && data_ == other.data_;
    }

private:
    void check_shape() const {
        for (auto d : shape_) {
            if (d == 0) throw ConfigError("tensor dimensions must be positive: " + to_string(shape_));
        }
    }

    Shape shape_;
    std::vector<T> data_;
    std::vector<T> grad_;
};

/// Copies a tensor into another scalar type.
template <typename To, typename From>
Tensor<To> tensor_cast(const Tensor<From>& t) {
    std::vector<To> out(t.values().begin(), t.values().end());
    return Tensor<To>(t.shape(), std::move(out));
}

}  // namespace rfp::nn
