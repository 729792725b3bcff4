#include "radonkit/admm.hpp"

#include <cmath>
#include <vector>

#include "radonkit/errors.hpp"
#include "radonkit/solvers.hpp"

namespace radonkit {

Tensor default_weights(const ShearletPlan& plan) {
  std::vector<double> w(plan.scales.size());
  for (size_t k = 0; k < w.size(); ++k) w[k] = std::pow(3.0, plan.scales[k]) / 400.0;
  return Tensor::from_vec({1, plan.n_coeff, 1, 1}, std::move(w));
}

namespace {

// flat-index strides into b for broadcasting against a (0 where b repeats)
std::vector<int64_t> broadcast_strides(const Shape& a, const Shape& b) {
  if (a.size() != b.size())
    throw ValidationError("shrink threshold rank " + std::to_string(b.size()) + " does not match input rank " +
                          std::to_string(a.size()));
  std::vector<int64_t> strides(b.size());
  int64_t s = 1;
  for (int d = int(b.size()) - 1; d >= 0; --d) {
    if (b[size_t(d)] == a[size_t(d)]) {
      strides[size_t(d)] = s;
    } else if (b[size_t(d)] == 1) {
      strides[size_t(d)] = 0;
    } else {
      throw ValidationError("shrink threshold shape " + shape_str(b) + " does not broadcast to " + shape_str(a));
    }
    s *= b[size_t(d)];
  }
  return strides;
}

void check_nonnegative(const std::vector<double>& b) {
  for (size_t i = 0; i < b.size(); ++i)
    if (!(b[i] >= 0.0))
      throw ValidationError("shrink threshold must be nonnegative, got " + std::to_string(b[i]) + " at index " +
                            std::to_string(i));
}

template <class T>
inline T soft(T a, T b) {
  T m = std::abs(a) - b;
  if (m < T(0)) m = T(0);
  return a < T(0) ? -m : (a > T(0) ? m : T(0));
}

Tensor shrink_impl(const Tensor& a, const std::vector<double>& bvals, const std::vector<int64_t>& bstrides,
                   const Shape& ashape) {
  // walk a's flat order while tracking the broadcast flat index into b
  int nd = int(ashape.size());
  std::vector<int64_t> idx(size_t(nd), 0);
  int64_t n = shape_numel(ashape);
  auto advance = [&](int64_t& bflat) {
    for (int d = nd - 1; d >= 0; --d) {
      idx[size_t(d)]++;
      bflat += bstrides[size_t(d)];
      if (idx[size_t(d)] < ashape[size_t(d)]) return;
      bflat -= bstrides[size_t(d)] * ashape[size_t(d)];
      idx[size_t(d)] = 0;
    }
  };
  if (a.precision() == Precision::Double) {
    std::vector<double> out(static_cast<size_t>(n));
    const double* src = a.double_data().data();
    int64_t bflat = 0;
    for (int64_t i = 0; i < n; ++i, advance(bflat)) out[size_t(i)] = soft(src[i], bvals[size_t(bflat)]);
    return Tensor::from_vec(ashape, std::move(out));
  }
  std::vector<float> in = a.to_float_vec();
  std::vector<float> out(static_cast<size_t>(n));
  int64_t bflat = 0;
  for (int64_t i = 0; i < n; ++i, advance(bflat)) out[size_t(i)] = soft(in[size_t(i)], float(bvals[size_t(bflat)]));
  return Tensor::from_float_as(ashape, out, a.precision());
}

}  // namespace

Tensor shrink(const Tensor& a, const Tensor& b) {
  if (!a.defined() || !b.defined()) throw ValidationError("shrink requires defined tensors");
  std::vector<int64_t> bstrides = broadcast_strides(a.shape(), b.shape());
  std::vector<double> bvals = b.to_double_vec();
  check_nonnegative(bvals);
  return shrink_impl(a, bvals, bstrides, a.shape());
}

Tensor shrink(const Tensor& a, double b) {
  if (!a.defined()) throw ValidationError("shrink requires a defined tensor");
  if (!(b >= 0.0)) throw ValidationError("shrink threshold must be nonnegative, got " + std::to_string(b));
  std::vector<int64_t> bstrides(size_t(a.ndim()), 0);
  return shrink_impl(a, {b}, bstrides, a.shape());
}

namespace {

Tensor checked_weights(const ShearletPlan& plan, const Tensor& weights) {
  if (!weights.defined()) return default_weights(plan);
  if (weights.size() != plan.n_coeff)
    throw ValidationError("weights hold " + std::to_string(weights.size()) + " values, plan has " +
                          std::to_string(plan.n_coeff) + " coefficients");
  return weights;
}

}  // namespace

Tensor admm_reconstruct(const LinearOperator& radon_op, const ShearletPlan& plan, const Tensor& sinogram,
                        const AdmmParams& params, const AdmmObserver& observer) {
  if (!(params.p0 > 0.0) || !(params.p1 > 0.0))
    throw ValidationError("admm penalties must be positive, got p0 = " + std::to_string(params.p0) + ", p1 = " +
                          std::to_string(params.p1));
  if (params.outer_iterations < 0) throw ValidationError("admm outer_iterations must be nonnegative");
  if (params.inner_cg_iterations < 1) throw ValidationError("admm inner_cg_iterations must be at least 1");
  if (radon_op.domain_shape != Shape{plan.height, plan.width})
    throw ValidationError("operator domain " + shape_str(radon_op.domain_shape) + " does not match plan grid " +
                          std::to_string(plan.height) + "x" + std::to_string(plan.width));
  if (sinogram.ndim() != int(radon_op.range_shape.size()) + 1)
    throw ValidationError("sinogram shape " + shape_str(sinogram.shape()) + " is not batched operator range " +
                          shape_str(radon_op.range_shape));
  for (size_t d = 0; d < radon_op.range_shape.size(); ++d)
    if (sinogram.dim(int(d) + 1) != radon_op.range_shape[d])
      throw ValidationError("sinogram shape " + shape_str(sinogram.shape()) + " does not match operator range " +
                            shape_str(radon_op.range_shape));

  Tensor w = checked_weights(plan, params.weights);
  Tensor thresh = scale(w, params.p0 / params.p1);

  Precision store = sinogram.precision();
  Tensor y = store == Precision::Half ? convert(sinogram, Precision::Single) : sinogram;
  Precision cp = y.precision();
  double p0 = params.p0, p1 = params.p1;

  Tensor bp = radon_op.adjoint(y);
  Shape image_shape = bp.shape();
  Shape coeff_shape{image_shape[0], plan.n_coeff, plan.height, plan.width};

  AdmmState st;
  st.f = Tensor::zeros(image_shape, cp);
  st.z2 = Tensor::zeros(image_shape, cp);
  st.u2 = Tensor::zeros(image_shape, cp);
  st.z1 = Tensor::zeros(coeff_shape, cp);
  st.u1 = Tensor::zeros(coeff_shape, cp);

  auto system = [&](const Tensor& x) { return axpy(p0, radon_op.adjoint(radon_op.apply(x)), scale(x, 1.0 + p1)); };

  for (int64_t it = 0; it < params.outer_iterations; ++it) {
    Tensor cg_y = axpy(p0, bp, axpy(p1, backward(plan, sub(st.z1, st.u1)), sub(st.z2, st.u2)));
    st.f = cg(system, st.f, cg_y, int(params.inner_cg_iterations));
    Tensor sh_f = forward(plan, st.f);
    st.z1 = shrink(add(sh_f, st.u1), thresh);
    st.z2 = clamp_min(add(st.f, st.u2), 0.0);
    st.u1 = add(st.u1, sub(sh_f, st.z1));
    st.u2 = add(st.u2, sub(st.f, st.z2));
    if (!all_finite(st.f) || !all_finite(st.u1) || !all_finite(st.u2))
      throw DivergenceError("admm state became non-finite", it);
    if (observer) observer(it, st);
  }
  return store == Precision::Half ? convert(st.f, Precision::Half) : st.f;
}

double admm_objective(const LinearOperator& radon_op, const ShearletPlan& plan, const Tensor& f, const Tensor& y,
                      const Tensor& weights) {
  Tensor w = checked_weights(plan, weights);
  std::vector<double> wv = w.to_double_vec();
  Tensor sh = forward(plan, f);
  std::vector<double> shv = sh.to_double_vec();
  int64_t per = plan.height * plan.width;
  double l1 = 0.0;
  for (int64_t b = 0; b < sh.batch(); ++b)
    for (int64_t k = 0; k < plan.n_coeff; ++k) {
      const double* block = shv.data() + (b * plan.n_coeff + k) * per;
      double wk = wv[size_t(k)];
      for (int64_t i = 0; i < per; ++i) l1 += std::abs(wk * block[i]);
    }
  Tensor r = radon_op.apply(f);
  if (!same_shape(r.shape(), y.shape()))
    throw ValidationError("sinogram shape " + shape_str(y.shape()) + " does not match projected shape " +
                          shape_str(r.shape()));
  return l1 + 0.5 * mse(r, y) * double(r.size());
}

}  // namespace radonkit
