#pragma once

#include <cstdint>
#include <functional>

#include "radonkit/linop.hpp"
#include "radonkit/shearlet.hpp"
#include "radonkit/tensor.hpp"

namespace radonkit {

struct AdmmParams {
  double p0 = 0.02;
  double p1 = 0.1;
  // soft-threshold weights, one per shearlet coefficient, broadcast over
  // batch and space as 1 x n_coeff x 1 x 1; undefined means 3^scale / 400
  Tensor weights;
  int64_t outer_iterations = 50;
  int64_t inner_cg_iterations = 50;
};

// f: current reconstruction; z1/u1: shearlet split variable and scaled
// dual; z2/u2: positivity split variable and scaled dual. z2 >= 0 holds
// after every update.
struct AdmmState {
  Tensor f;
  Tensor z1, u1;
  Tensor z2, u2;
};

// invoked after each completed outer iteration (0-based)
using AdmmObserver = std::function<void(int64_t iteration, const AdmmState& state)>;

// 3^scale / 400 per coefficient, shape 1 x n_coeff x 1 x 1
Tensor default_weights(const ShearletPlan& plan);

// Elementwise soft-thresholding sign(a) * max(|a| - b, 0). The threshold
// must be nonnegative and is broadcast to a (dims of size 1 repeat).
Tensor shrink(const Tensor& a, const Tensor& b);
Tensor shrink(const Tensor& a, double b);

// Solves argmin_{f >= 0} ||SH(f)||_{1,w} + 0.5 * ||A f - y||^2 by ADMM
// with a shearlet split z1 and a positivity split z2: each outer iteration
// builds cg_y = p0*bp + p1*SH'(z1 - u1) + (z2 - u2), warm-starts CG from
// the previous f on (p0*A'A + (1 + p1)*I) f = cg_y, then updates
// z1 = shrink(SH(f) + u1, (p0/p1)*w), z2 = max(f + u2, 0) and the duals.
// Batched over sinogram's leading dim; non-finite state raises
// DivergenceError naming the outer iteration.
Tensor admm_reconstruct(const LinearOperator& radon_op, const ShearletPlan& plan, const Tensor& sinogram,
                        const AdmmParams& params = {}, const AdmmObserver& observer = {});

// sum |w * SH(f)| + 0.5 * ||A f - y||^2, accumulated in double. weights
// undefined means the same 3^scale / 400 default the solver uses.
double admm_objective(const LinearOperator& radon_op, const ShearletPlan& plan, const Tensor& f, const Tensor& y,
                      const Tensor& weights = {});

}  // namespace radonkit
