#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "radonkit/linop.hpp"
#include "radonkit/tensor.hpp"

namespace radonkit {

// Cone-adapted real-valued alpha-shearlet system as full-grid Fourier
// multipliers, jointly normalized to a Parseval frame. Coefficient k of an
// image x is Re(ifft2(fft2(x) * multiplier_k)); synthesis applies the same
// multipliers and sums, which is the exact adjoint and, by Parseval, the
// exact inverse up to FFT roundoff.
struct ShearletPlan {
  int64_t height = 0;
  int64_t width = 0;
  std::vector<double> alphas;  // one scaling exponent per scale
  int64_t n_coeff = 0;
  // scale label per coefficient: 0 for the low-pass, j = 1..n_scales for
  // the shearlets of scale j (consumed by ADMM weights 3^scales / 400)
  std::vector<double> scales;
  std::vector<double> multipliers;  // n_coeff x height x width, full grid

  // half-spectrum copies (height x (width/2+1)) for the rfft2 apply path
  std::vector<double> spec_d;
  std::vector<float> spec_f;
};

// n_coeff = 1 + sum_j 2*(2*ceil(2^(j*(1-alpha_j))) + 1) with j counted from
// 0; (512, 512, [0.5]*5) gives 59.
ShearletPlan make_plan(int64_t height, int64_t width, const std::vector<double>& alphas);

// Loads the multipliers from cache_dir when a file for (height, width,
// alphas, version) exists, else builds and stores them. cache_dir "" means
// the RADONKIT_CACHE_DIR environment variable; if that is unset too, no
// caching happens.
ShearletPlan make_plan_cached(int64_t height, int64_t width, const std::vector<double>& alphas,
                              const std::string& cache_dir = "");

// Analysis: batch x H x W -> batch x n_coeff x H x W.
Tensor forward(const ShearletPlan& plan, const Tensor& image);
// Synthesis (exact adjoint): batch x n_coeff x H x W -> batch x H x W.
Tensor backward(const ShearletPlan& plan, const Tensor& coeff);

LinearOperator shearlet_operator(const ShearletPlan& plan);

}  // namespace radonkit
