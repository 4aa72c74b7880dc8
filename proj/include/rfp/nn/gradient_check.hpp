#pragma once

#include <cstdint>

#include "rfp/nn/layers.hpp"

namespace rfp::nn {

struct GradientCheckOptions {
    double epsilon = 1e-3;
    std::uint64_t seed = 1;
    Mode mode = Mode::train;
    /// Adds U(-0.5, 0.5) noise to freshly initialized parameters so that
    /// batch-norm scale/shift and biases are not at their trivial values.
    bool perturb_parameters = true;
    /// The gap between the one-sided slopes at step e is compared with ten times
    /// the gap at e/10. If they disagree by more than this fraction the stencil
    /// straddles a kink (relu at 0, a pooling tie) and the element is re-measured
    /// with e/10, down to min_epsilon.
    double kink_tolerance = 0.1;
    double min_epsilon = 1e-7;
};

struct GradientCheckResult {
    double max_relative_error = 0.0;
    std::size_t checked = 0;  // parameter + input elements compared
    std::size_t refined = 0;  // elements that needed a step smaller than epsilon
};

/// Compares analytic gradients of a single layer against central finite
/// differences of the scalar probe loss sum_i r_i * y_i (r fixed, random).
/// Relative error per element is |a - n| / max(|a|, |n|, 1e-8); the maximum over
/// all parameters and input elements is returned. Dropout masks are held fixed
/// across evaluations by reseeding before every forward pass. Elements at
/// non-differentiable points are re-measured with a smaller step.
GradientCheckResult gradient_check(const LayerSpec& spec, const Tensor<double>& probe,
                                   const GradientCheckOptions& options = {});

}  // namespace rfp::nn
