#pragma once

#include <cstdint>
#include <functional>

#include "radonkit/geometry.hpp"
#include "radonkit/projector.hpp"
#include "radonkit/tensor.hpp"

namespace radonkit {

// A batched linear map. Shapes are per batch element (no leading batch
// dim); apply and adjoint accept any batch size.
struct LinearOperator {
  Shape domain_shape;
  Shape range_shape;
  std::function<Tensor(const Tensor&)> apply;
  std::function<Tensor(const Tensor&)> adjoint;
};

LinearOperator projector_operator(const Geometry& g, const ProjectorOptions& opts = {});
LinearOperator identity_operator(Shape shape);
// (a o b): apply = a.apply(b.apply(x)), adjoint = b.adjoint(a.adjoint(y)).
LinearOperator compose(const LinearOperator& a, const LinearOperator& b);

// Max over trials of |<Ax, y> - <x, A'y>| / (||Ax|| * ||y|| + 1e-30) with
// x, y drawn uniformly from [-1, 1) at the given seed, batch 1, single
// precision, inner products in double.
double adjoint_check(const LinearOperator& op, int trials = 8, uint64_t seed = 0);

// Central-difference check of the gradient of L(x) = 0.5*||Ax - y0||^2 at
// the point x: the analytic gradient A'(Ax - y0) is compared against
// (L(x + h e_i) - L(x - h e_i)) / (2h) on up to n_coords sampled
// coordinates; returns the max deviation normalized by ||grad||. y0 and the
// coordinate sample are drawn from the seed. Raises when the gradient norm
// vanishes (the check would be meaningless at a stationary point).
double gradient_check(const LinearOperator& op, const Tensor& x, double step, int n_coords = 32, uint64_t seed = 0);

}  // namespace radonkit
