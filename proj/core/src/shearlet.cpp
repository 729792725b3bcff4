#include "radonkit/shearlet.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <memory>

#include "radonkit/errors.hpp"
#include "radonkit/fft.hpp"
#include "radonkit/npy.hpp"
#include "radonkit/threading.hpp"

namespace radonkit {

namespace {

// Meyer auxiliary polynomial: v(t) + v(1-t) = 1, C^3 at the endpoints.
inline double meyer_v(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * t * t * (35.0 - 84.0 * t + (70.0 - 20.0 * t) * t * t);
}

inline double rise(double t) { return std::sin(0.5 * M_PI * meyer_v(t)); }
inline double fall(double t) { return std::cos(0.5 * M_PI * meyer_v(t)); }

// directional bump with sum-of-squares partition: g(t)^2 + g(t-1)^2 = 1 on
// [0, 1] because v(t) + v(1-t) = 1
inline double bump(double t) {
  double a = std::abs(t);
  if (a >= 1.0) return 0.0;
  return std::cos(0.5 * M_PI * meyer_v(a));
}

inline double lowpass(double r, double c0) {
  if (r <= c0) return 1.0;
  if (r >= 2.0 * c0) return 0.0;
  return fall(r / c0 - 1.0);
}

// radial band rising on [c, 2c], falling on [2c, 4c]; the top scale stays 1
// past its peak so the corners of the grid are covered
inline double band(double r, double c, bool top) {
  if (r <= c) return 0.0;
  if (r < 2.0 * c) return rise(r / c - 1.0);
  if (top) return 1.0;
  if (r < 4.0 * c) return fall(r / (2.0 * c) - 1.0);
  return 0.0;
}

std::vector<int64_t> shear_counts(const std::vector<double>& alphas) {
  std::vector<int64_t> k(alphas.size());
  for (size_t j = 0; j < alphas.size(); ++j)
    k[j] = int64_t(std::ceil(std::exp2(double(j) * (1.0 - alphas[j]))));
  return k;
}

int64_t coeff_count(const std::vector<int64_t>& k) {
  int64_t n = 1;
  for (int64_t kj : k) n += 2 * (2 * kj + 1);
  return n;
}

void validate_plan_config(int64_t height, int64_t width, const std::vector<double>& alphas) {
  if (height != width)
    throw ValidationError("shearlet plan requires a square grid, got " + std::to_string(height) + "x" +
                          std::to_string(width));
  if (height < 2) throw ValidationError("shearlet plan grid must be at least 2x2");
  if (alphas.empty() || alphas.size() > 8)
    throw ValidationError("shearlet plan needs between 1 and 8 scales, got " + std::to_string(alphas.size()));
  for (double a : alphas)
    if (!(a >= 0.0 && a <= 1.0))
      throw ValidationError("shearlet alpha " + std::to_string(a) + " is outside [0, 1]");
}

void fill_derived(ShearletPlan& plan) {
  const std::vector<int64_t> K = shear_counts(plan.alphas);
  plan.n_coeff = coeff_count(K);
  plan.scales.clear();
  plan.scales.reserve(size_t(plan.n_coeff));
  plan.scales.push_back(0.0);
  for (size_t j = 0; j < K.size(); ++j)
    for (int64_t i = 0; i < 2 * (2 * K[j] + 1); ++i) plan.scales.push_back(double(j + 1));
}

void fill_spectra(ShearletPlan& plan) {
  int64_t h = plan.height, w = plan.width, wc = w / 2 + 1;
  plan.spec_d.resize(size_t(plan.n_coeff) * size_t(h) * size_t(wc));
  plan.spec_f.resize(plan.spec_d.size());
  for (int64_t k = 0; k < plan.n_coeff; ++k)
    for (int64_t i = 0; i < h; ++i)
      for (int64_t j = 0; j < wc; ++j) {
        double v = plan.multipliers[size_t((k * h + i) * w + j)];
        plan.spec_d[size_t((k * h + i) * wc + j)] = v;
        plan.spec_f[size_t((k * h + i) * wc + j)] = float(v);
      }
}

}  // namespace

ShearletPlan make_plan(int64_t height, int64_t width, const std::vector<double>& alphas) {
  validate_plan_config(height, width, alphas);
  ShearletPlan plan;
  plan.height = height;
  plan.width = width;
  plan.alphas = alphas;
  fill_derived(plan);

  const int64_t h = height, w = width, J = int64_t(alphas.size());
  const std::vector<int64_t> K = shear_counts(alphas);
  const double R = double(h) / 2.0;
  std::vector<double> c(static_cast<size_t>(J));
  for (int64_t j = 0; j < J; ++j) c[size_t(j)] = R * std::exp2(double(j - J));

  std::vector<double> fy(static_cast<size_t>(h)), fx(static_cast<size_t>(w));
  for (int64_t i = 0; i < h; ++i) fy[size_t(i)] = double(i < (h + 1) / 2 ? i : i - h);
  for (int64_t j = 0; j < w; ++j) fx[size_t(j)] = double(j < (w + 1) / 2 ? j : j - w);

  const int64_t bins = h * w;
  plan.multipliers.assign(size_t(plan.n_coeff) * size_t(bins), 0.0);

  // coefficient layout: low-pass, then per scale j the horizontal-cone
  // shears l = -K..K followed by the vertical-cone shears
  struct Window {
    int64_t scale;  // -1 for the low-pass
    bool horizontal;
    int64_t shear;
  };
  std::vector<Window> layout;
  layout.push_back({-1, false, 0});
  for (int64_t j = 0; j < J; ++j) {
    for (int64_t l = -K[size_t(j)]; l <= K[size_t(j)]; ++l) layout.push_back({j, true, l});
    for (int64_t l = -K[size_t(j)]; l <= K[size_t(j)]; ++l) layout.push_back({j, false, l});
  }

  parallel_for(0, plan.n_coeff, [&](int64_t lo, int64_t hi) {
    for (int64_t k = lo; k < hi; ++k) {
      const Window& win = layout[size_t(k)];
      double* dst = plan.multipliers.data() + k * bins;
      for (int64_t i = 0; i < h; ++i) {
        for (int64_t j = 0; j < w; ++j) {
          double r = std::hypot(fx[size_t(j)], fy[size_t(i)]);
          double v;
          if (win.scale < 0) {
            v = lowpass(r, c[0]);
          } else {
            double radial = band(r, c[size_t(win.scale)], win.scale == J - 1);
            double ang = 0.0;
            if (radial != 0.0) {
              double kr = double(K[size_t(win.scale)]);
              if (win.horizontal) {
                if (fx[size_t(j)] != 0.0) ang = bump(kr * (fy[size_t(i)] / fx[size_t(j)]) - double(win.shear));
              } else {
                if (fy[size_t(i)] != 0.0) ang = bump(kr * (fx[size_t(j)] / fy[size_t(i)]) - double(win.shear));
              }
            }
            v = radial * ang;
          }
          dst[i * w + j] = v;
        }
      }
      // exact evenness under frequency negation (self-aliased Nyquist bins
      // would otherwise break the real-multiplier property)
      for (int64_t i = 0; i < h; ++i) {
        int64_t i2 = (h - i) % h;
        for (int64_t j = 0; j < w; ++j) {
          int64_t j2 = (w - j) % w;
          if (i2 * w + j2 <= i * w + j) continue;
          double m = 0.5 * (dst[i * w + j] + dst[i2 * w + j2]);
          dst[i * w + j] = m;
          dst[i2 * w + j2] = m;
        }
      }
    }
  });

  // joint Parseval normalization: divide every window by the pointwise
  // root sum of squares
  std::vector<double> ssum(size_t(bins), 0.0);
  for (int64_t k = 0; k < plan.n_coeff; ++k) {
    const double* src = plan.multipliers.data() + k * bins;
    for (int64_t b = 0; b < bins; ++b) ssum[size_t(b)] += src[b] * src[b];
  }
  for (int64_t b = 0; b < bins; ++b) {
    if (!(ssum[size_t(b)] > 1e-8))
      throw NumericalError("shearlet construction left frequency bin " + std::to_string(b) + " uncovered");
    ssum[size_t(b)] = 1.0 / std::sqrt(ssum[size_t(b)]);
  }
  parallel_for(0, plan.n_coeff, [&](int64_t lo, int64_t hi) {
    for (int64_t k = lo; k < hi; ++k) {
      double* dst = plan.multipliers.data() + k * bins;
      for (int64_t b = 0; b < bins; ++b) dst[b] *= ssum[size_t(b)];
    }
  });

  fill_spectra(plan);
  return plan;
}

ShearletPlan make_plan_cached(int64_t height, int64_t width, const std::vector<double>& alphas,
                              const std::string& cache_dir) {
  validate_plan_config(height, width, alphas);
  std::string dir = cache_dir;
  if (dir.empty()) {
    const char* env = std::getenv("RADONKIT_CACHE_DIR");
    if (env) dir = env;
  }
  if (dir.empty()) return make_plan(height, width, alphas);

  std::string name = "shearlet_" + std::to_string(height) + "x" + std::to_string(width) + "_a";
  for (size_t i = 0; i < alphas.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", alphas[i]);
    if (i) name += "_";
    name += buf;
  }
  name += "_v1.npy";
  std::filesystem::path file = std::filesystem::path(dir) / name;

  std::vector<int64_t> K = shear_counts(alphas);
  int64_t n_coeff = coeff_count(K);

  if (std::filesystem::exists(file)) {
    try {
      Tensor stored = read_array(file.string());
      if (stored.precision() == Precision::Double && stored.ndim() == 3 &&
          stored.dim(0) == n_coeff && stored.dim(1) == height && stored.dim(2) == width) {
        ShearletPlan plan;
        plan.height = height;
        plan.width = width;
        plan.alphas = alphas;
        fill_derived(plan);
        plan.multipliers = stored.double_data();
        fill_spectra(plan);
        return plan;
      }
    } catch (const ValidationError&) {
      // corrupt entry: fall through and rebuild
    }
    // stale or foreign file: fall through and rebuild
  }

  ShearletPlan plan = make_plan(height, width, alphas);
  std::error_code ec;
  std::filesystem::create_directories(file.parent_path(), ec);
  write_array(file.string(), Tensor::from_vec({plan.n_coeff, height, width}, plan.multipliers));
  return plan;
}

namespace {

template <class T>
void shearlet_forward_t(const ShearletPlan& plan, const T* in, int64_t nb, T* out, const T* spec) {
  int64_t h = plan.height, w = plan.width, wc = w / 2 + 1, nk = plan.n_coeff;
  for (int64_t b = 0; b < nb; ++b) {
    std::vector<std::complex<T>> base(size_t(h) * size_t(wc));
    fft::rfft2(int(h), int(w), in + b * h * w, base.data());
    parallel_for(0, nk, [&](int64_t lo, int64_t hi) {
      std::vector<std::complex<T>> work(base.size());
      for (int64_t k = lo; k < hi; ++k) {
        const T* m = spec + k * h * wc;
        for (size_t i = 0; i < base.size(); ++i) work[i] = base[i] * m[i];
        fft::irfft2(int(h), int(w), work.data(), out + (b * nk + k) * h * w);
      }
    });
  }
}

template <class T>
void shearlet_backward_t(const ShearletPlan& plan, const T* in, int64_t nb, T* out, const T* spec) {
  int64_t h = plan.height, w = plan.width, wc = w / 2 + 1, nk = plan.n_coeff;
  std::vector<std::complex<T>> spectra(size_t(nk) * size_t(h) * size_t(wc));
  for (int64_t b = 0; b < nb; ++b) {
    parallel_for(0, nk, [&](int64_t lo, int64_t hi) {
      for (int64_t k = lo; k < hi; ++k) {
        std::complex<T>* dst = spectra.data() + k * h * wc;
        fft::rfft2(int(h), int(w), in + (b * nk + k) * h * w, dst);
        const T* m = spec + k * h * wc;
        for (int64_t i = 0; i < h * wc; ++i) dst[size_t(i)] *= m[size_t(i)];
      }
    });
    // fixed k-ascending reduction keeps results thread-count independent
    std::complex<T>* acc = spectra.data();
    for (int64_t k = 1; k < nk; ++k) {
      const std::complex<T>* src = spectra.data() + k * h * wc;
      for (int64_t i = 0; i < h * wc; ++i) acc[size_t(i)] += src[size_t(i)];
    }
    fft::irfft2(int(h), int(w), acc, out + b * h * w);
  }
}

}  // namespace

Tensor forward(const ShearletPlan& plan, const Tensor& image) {
  if (image.ndim() != 3 || image.dim(1) != plan.height || image.dim(2) != plan.width)
    throw ValidationError("shearlet forward: image shape " + shape_str(image.shape()) + " does not match plan " +
                          std::to_string(plan.height) + "x" + std::to_string(plan.width));
  int64_t nb = image.batch();
  Shape out_shape{nb, plan.n_coeff, plan.height, plan.width};
  if (image.precision() == Precision::Double) {
    std::vector<double> out(size_t(shape_numel(out_shape)));
    shearlet_forward_t<double>(plan, image.double_data().data(), nb, out.data(), plan.spec_d.data());
    return Tensor::from_vec(std::move(out_shape), std::move(out));
  }
  std::vector<float> in = image.to_float_vec();
  std::vector<float> out(size_t(shape_numel(out_shape)));
  shearlet_forward_t<float>(plan, in.data(), nb, out.data(), plan.spec_f.data());
  return Tensor::from_float_as(std::move(out_shape), out, image.precision());
}

Tensor backward(const ShearletPlan& plan, const Tensor& coeff) {
  if (coeff.ndim() != 4 || coeff.dim(1) != plan.n_coeff || coeff.dim(2) != plan.height ||
      coeff.dim(3) != plan.width)
    throw ValidationError("shearlet backward: coefficient shape " + shape_str(coeff.shape()) +
                          " does not match plan (" + std::to_string(plan.n_coeff) + " coefficients, " +
                          std::to_string(plan.height) + "x" + std::to_string(plan.width) + ")");
  int64_t nb = coeff.batch();
  Shape out_shape{nb, plan.height, plan.width};
  if (coeff.precision() == Precision::Double) {
    std::vector<double> out(size_t(shape_numel(out_shape)));
    shearlet_backward_t<double>(plan, coeff.double_data().data(), nb, out.data(), plan.spec_d.data());
    return Tensor::from_vec(std::move(out_shape), std::move(out));
  }
  std::vector<float> in = coeff.to_float_vec();
  std::vector<float> out(size_t(shape_numel(out_shape)));
  shearlet_backward_t<float>(plan, in.data(), nb, out.data(), plan.spec_f.data());
  return Tensor::from_float_as(std::move(out_shape), out, coeff.precision());
}

LinearOperator shearlet_operator(const ShearletPlan& plan) {
  auto shared = std::make_shared<const ShearletPlan>(plan);
  LinearOperator op;
  op.domain_shape = {plan.height, plan.width};
  op.range_shape = {plan.n_coeff, plan.height, plan.width};
  op.apply = [shared](const Tensor& x) { return forward(*shared, x); };
  op.adjoint = [shared](const Tensor& c) { return backward(*shared, c); };
  return op;
}

}  // namespace radonkit
