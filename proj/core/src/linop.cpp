#include "radonkit/linop.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "radonkit/errors.hpp"
#include "radonkit/rng.hpp"

namespace radonkit {

namespace {

Shape with_batch(int64_t b, const Shape& per_element) {
  Shape s{b};
  s.insert(s.end(), per_element.begin(), per_element.end());
  return s;
}

void check_batched(const Tensor& t, const Shape& per_element, const char* what) {
  if (t.ndim() != int(per_element.size()) + 1)
    throw ValidationError(std::string(what) + ": expected batch + " + shape_str(per_element) + ", got " +
                          shape_str(t.shape()));
  for (size_t i = 0; i < per_element.size(); ++i) {
    if (t.dim(int(i) + 1) != per_element[i])
      throw ValidationError(std::string(what) + ": expected batch + " + shape_str(per_element) + ", got " +
                            shape_str(t.shape()));
  }
}

}  // namespace

LinearOperator projector_operator(const Geometry& g, const ProjectorOptions& opts) {
  int64_t s = geometry_image_size(g);
  LinearOperator op;
  op.domain_shape = {s, s};
  op.range_shape = {geometry_n_angles(g), geometry_det_count(g)};
  op.apply = [g, opts](const Tensor& x) { return forward(g, x, opts); };
  op.adjoint = [g, opts](const Tensor& y) { return backprojection(g, y, opts); };
  return op;
}

LinearOperator identity_operator(Shape shape) {
  LinearOperator op;
  op.domain_shape = shape;
  op.range_shape = std::move(shape);
  op.apply = [](const Tensor& x) { return x; };
  op.adjoint = [](const Tensor& y) { return y; };
  return op;
}

LinearOperator compose(const LinearOperator& a, const LinearOperator& b) {
  if (!same_shape(a.domain_shape, b.range_shape))
    throw ValidationError("compose: inner shapes do not match, " + shape_str(a.domain_shape) + " vs " +
                          shape_str(b.range_shape));
  LinearOperator op;
  op.domain_shape = b.domain_shape;
  op.range_shape = a.range_shape;
  auto fa = a.apply, fb = b.apply, ga = a.adjoint, gb = b.adjoint;
  op.apply = [fa, fb](const Tensor& x) { return fa(fb(x)); };
  op.adjoint = [ga, gb](const Tensor& y) { return gb(ga(y)); };
  return op;
}

double adjoint_check(const LinearOperator& op, int trials, uint64_t seed) {
  if (trials < 1) throw ValidationError("adjoint_check needs at least one trial");
  Rng rng(seed);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    Tensor x = rng.uniform_pm1_tensor(with_batch(1, op.domain_shape));
    Tensor y = rng.uniform_pm1_tensor(with_batch(1, op.range_shape));
    Tensor ax = op.apply(x);
    Tensor aty = op.adjoint(y);
    double lhs = dot(ax, y);
    double rhs = dot(x, aty);
    double defect = std::abs(lhs - rhs) / (norm2(ax) * norm2(y) + 1e-30);
    worst = std::max(worst, defect);
  }
  return worst;
}

double gradient_check(const LinearOperator& op, const Tensor& x, double step, int n_coords, uint64_t seed) {
  check_batched(x, op.domain_shape, "gradient_check point");
  if (!(step > 0.0)) throw ValidationError("gradient_check step must be positive");
  if (n_coords < 1) throw ValidationError("gradient_check needs at least one coordinate");
  Rng rng(seed);
  Tensor xd = convert(x, Precision::Double);
  Tensor y0 = rng.uniform_pm1_tensor(with_batch(x.batch(), op.range_shape), Precision::Double);

  Tensor grad = op.adjoint(sub(op.apply(xd), y0));
  double gnorm = norm2(grad);
  if (gnorm == 0.0)
    throw ValidationError("gradient_check: gradient vanishes at this point, the check is degenerate");

  auto loss = [&](const Tensor& p) {
    Tensor r = sub(op.apply(p), y0);
    return 0.5 * dot(r, r);
  };

  int64_t n = xd.size();
  int64_t samples = std::min<int64_t>(n_coords, n);
  double worst = 0.0;
  for (int64_t k = 0; k < samples; ++k) {
    // deterministic stratified coordinate sample
    int64_t idx = (samples == n) ? k : int64_t(double(rng.uniform()) * double(n));
    idx = std::min(idx, n - 1);
    Tensor plus = xd;
    plus.set(idx, xd.at(idx) + step);
    Tensor minus = xd;
    minus.set(idx, xd.at(idx) - step);
    double fd = (loss(plus) - loss(minus)) / (2.0 * step);
    worst = std::max(worst, std::abs(fd - grad.at(idx)));
  }
  return worst / gnorm;
}

}  // namespace radonkit
