#include "radonkit/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <string>
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

Precision compute_precision(Precision storage) {
  return storage == Precision::Double ? Precision::Double : Precision::Single;
}

template <class T>
const T* data_ptr(const Tensor& t);
template <>
const float* data_ptr<float>(const Tensor& t) {
  return t.float_data().data();
}
template <>
const double* data_ptr<double>(const Tensor& t) {
  return t.double_data().data();
}

template <class T>
T* data_ptr(Tensor& t);
template <>
float* data_ptr<float>(Tensor& t) {
  return t.float_data().data();
}
template <>
double* data_ptr<double>(Tensor& t) {
  return t.double_data().data();
}

template <class T>
Tensor cg_impl(const std::function<Tensor(const Tensor&)>& apply, const Tensor& guess0, const Tensor& b0,
               int max_iter, double tolerance) {
  Tensor x = guess0;
  Tensor r = sub(b0, apply(x));
  Tensor p = r;
  int64_t nb = x.batch();
  int64_t per = x.size() / nb;

  std::vector<double> rs = batch_dot(r, r);
  std::vector<double> normb = batch_norm2(b0);
  std::vector<char> done(static_cast<size_t>(nb));
  auto reached = [&](int64_t e, double rs_e) { return std::sqrt(rs_e) <= tolerance * normb[size_t(e)]; };
  bool all_done = true;
  for (int64_t e = 0; e < nb; ++e) {
    done[size_t(e)] = reached(e, rs[size_t(e)]) ? 1 : 0;
    all_done = all_done && done[size_t(e)];
  }

  for (int it = 0; it < max_iter && !all_done; ++it) {
    Tensor ap = apply(p);
    std::vector<double> pap = batch_dot(p, ap);
    for (int64_t e = 0; e < nb; ++e) {
      if (!done[size_t(e)] && pap[size_t(e)] <= 0.0)
        throw NotPositiveDefiniteError("cg: curvature p'Ap = " + std::to_string(pap[size_t(e)]) +
                                           " is not positive for batch element " + std::to_string(e) +
                                           " at iteration " + std::to_string(it),
                                       it);
    }
    T* xd = data_ptr<T>(x);
    T* rd = data_ptr<T>(r);
    T* pd = data_ptr<T>(p);
    const T* apd = data_ptr<T>(ap);
    for (int64_t e = 0; e < nb; ++e) {
      if (done[size_t(e)]) continue;
      T alpha = T(rs[size_t(e)] / pap[size_t(e)]);
      int64_t base = e * per;
      for (int64_t i = base; i < base + per; ++i) {
        xd[i] += alpha * pd[i];
        rd[i] -= alpha * apd[i];
      }
    }
    all_done = true;
    for (int64_t e = 0; e < nb; ++e) {
      if (done[size_t(e)]) continue;
      double rsn = 0.0;
      int64_t base = e * per;
      for (int64_t i = base; i < base + per; ++i) rsn += double(rd[i]) * double(rd[i]);
      if (reached(e, rsn)) {
        done[size_t(e)] = 1;
        rs[size_t(e)] = rsn;
        continue;
      }
      T beta = T(rsn / rs[size_t(e)]);
      for (int64_t i = base; i < base + per; ++i) pd[i] = rd[i] + beta * pd[i];
      rs[size_t(e)] = rsn;
      all_done = false;
    }
  }
  return x;
}

}  // namespace

double estimate_alpha(const LinearOperator& op, int iterations, uint64_t seed) {
  if (iterations < 1) throw ValidationError("estimate_alpha needs at least one iteration");
  Rng rng(seed);
  Tensor x = rng.uniform_tensor(with_batch(1, op.domain_shape), Precision::Double);
  double nx = norm2(x);
  if (nx == 0.0) throw NumericalError("estimate_alpha: start vector is zero");
  x = scale(x, 1.0 / nx);
  double sigma2 = 0.0;
  for (int it = 0; it < iterations; ++it) {
    Tensor z = op.adjoint(op.apply(x));
    double nz = norm2(z);
    if (!(nz > 0.0) || !std::isfinite(nz))
      throw NumericalError("estimate_alpha: power iteration collapsed at iteration " + std::to_string(it));
    sigma2 = nz;
    x = scale(z, 1.0 / nz);
  }
  return 2.0 / sigma2;
}

Tensor landweber(const LinearOperator& op, const Tensor& y, const Tensor& guess, double alpha, int iterations) {
  if (iterations < 0) throw ValidationError("landweber iteration count must be >= 0");
  if (y.batch() != guess.batch())
    throw ValidationError("landweber: y batch " + std::to_string(y.batch()) + " does not match guess batch " +
                          std::to_string(guess.batch()));
  Precision cp = compute_precision(guess.precision());
  Tensor x = convert(guess, cp);
  Tensor yb = convert(y, cp);
  for (int it = 0; it < iterations; ++it) {
    Tensor grad = op.adjoint(sub(op.apply(x), yb));
    x = axpy(-alpha, grad, x);
    if (!all_finite(x))
      throw DivergenceError("landweber produced a non-finite iterate at iteration " + std::to_string(it), it);
  }
  return convert(x, guess.precision());
}

Tensor cg(const std::function<Tensor(const Tensor&)>& apply, const Tensor& guess, const Tensor& b, int max_iter,
          double tolerance) {
  if (max_iter < 0) throw ValidationError("cg max_iter must be >= 0");
  if (tolerance < 0.0) throw ValidationError("cg tolerance must be >= 0");
  if (!same_shape(guess.shape(), b.shape()))
    throw ValidationError("cg: guess shape " + shape_str(guess.shape()) + " does not match b " +
                          shape_str(b.shape()));
  Precision cp = compute_precision(guess.precision());
  Tensor x0 = convert(guess, cp);
  Tensor b0 = convert(b, cp);
  Tensor x = (cp == Precision::Double) ? cg_impl<double>(apply, x0, b0, max_iter, tolerance)
                                       : cg_impl<float>(apply, x0, b0, max_iter, tolerance);
  return convert(x, guess.precision());
}

Tensor cgne(const LinearOperator& op, const Tensor& guess, const Tensor& y, int max_iter, double tolerance) {
  Tensor b = op.adjoint(y);
  auto normal = [&op](const Tensor& x) { return op.adjoint(op.apply(x)); };
  return cg(normal, guess, b, max_iter, tolerance);
}

}  // namespace radonkit
