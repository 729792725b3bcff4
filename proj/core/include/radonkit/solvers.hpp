#pragma once

#include <cstdint>
#include <functional>

#include "radonkit/linop.hpp"
#include "radonkit/tensor.hpp"

namespace radonkit {

// Power iteration on A'A from a seeded uniform start, returning the
// Landweber stability bound 2 / sigma_max^2. Callers wanting the usual
// safety margin multiply by 0.95 themselves. Runs in double internally.
double estimate_alpha(const LinearOperator& op, int iterations = 20, uint64_t seed = 0);

// x <- x - alpha * A'(Ax - y), run for a fixed iteration count. State is
// kept in the compute precision (single for half storage) and narrowed back
// at the end. A non-finite iterate raises DivergenceError naming the
// iteration.
Tensor landweber(const LinearOperator& op, const Tensor& y, const Tensor& guess, double alpha, int iterations);

// Conjugate gradients for SPD apply. Per-batch-element scalars accumulate
// in double; an element whose residual reaches tolerance * ||b|| is frozen
// (its slice is never touched again), so batched runs match single-element
// runs bitwise. A non-positive curvature p'Ap on an active element raises
// NotPositiveDefiniteError naming the iteration.
Tensor cg(const std::function<Tensor(const Tensor&)>& apply, const Tensor& guess, const Tensor& b, int max_iter,
          double tolerance = 0.0);

// CG on the normal equations A'A x = A'y.
Tensor cgne(const LinearOperator& op, const Tensor& guess, const Tensor& y, int max_iter, double tolerance = 0.0);

}  // namespace radonkit
