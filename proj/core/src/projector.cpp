#include "radonkit/projector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "radonkit/errors.hpp"
#include "radonkit/threading.hpp"

namespace radonkit {

namespace {

void check_image(const Tensor& image, int64_t size) {
  if (image.ndim() != 3)
    throw ValidationError("image must be 3-dimensional (batch, h, w), got " + shape_str(image.shape()));
  if (image.dim(1) != size || image.dim(2) != size)
    throw ValidationError("image shape " + shape_str(image.shape()) + " does not match geometry image_size " +
                          std::to_string(size));
}

void check_sino(const Tensor& sino, int64_t n_angles, int64_t det_count) {
  if (sino.ndim() != 3)
    throw ValidationError("sinogram must be 3-dimensional (batch, angles, det), got " + shape_str(sino.shape()));
  if (sino.dim(1) != n_angles || sino.dim(2) != det_count)
    throw ValidationError("sinogram shape " + shape_str(sino.shape()) + " does not match geometry (" +
                          std::to_string(n_angles) + " angles, " + std::to_string(det_count) + " cells)");
}

void check_opts(const ProjectorOptions& opts) {
  if (!(opts.step > 0.0)) throw ValidationError("projector step must be positive");
}

// Intersect p(t) = o + t*d with the slab lo <= o + t*d <= hi. Returns false
// when the ray is parallel to the slab and outside it.
inline bool clip_slab(double o, double d, double lo, double hi, double& t0, double& t1) {
  if (d == 0.0) return o >= lo && o <= hi;
  double a = (lo - o) / d;
  double b = (hi - o) / d;
  if (a > b) std::swap(a, b);
  t0 = std::max(t0, a);
  t1 = std::min(t1, b);
  return true;
}

template <class TIn>
inline double bilinear(const TIn* img, int64_t s, double x, double y) {
  double px = x + 0.5 * double(s) - 0.5;  // continuous column
  double py = 0.5 * double(s) - y - 0.5;  // continuous row
  double fj = std::floor(px);
  double fi = std::floor(py);
  int64_t j0 = int64_t(fj);
  int64_t i0 = int64_t(fi);
  double fx = px - fj;
  double fy = py - fi;
  auto val = [&](int64_t i, int64_t j) -> double {
    if (i < 0 || i >= s || j < 0 || j >= s) return 0.0;
    return double(img[i * s + j]);
  };
  double top = (1.0 - fx) * val(i0, j0) + fx * val(i0, j0 + 1);
  double bot = (1.0 - fx) * val(i0 + 1, j0) + fx * val(i0 + 1, j0 + 1);
  return (1.0 - fy) * top + fy * bot;
}

template <class TIn>
inline double integrate_ray(const TIn* img, int64_t s, double ox, double oy, double dx, double dy, double tmin,
                            double tmax, double step) {
  double half = 0.5 * double(s);
  double t0 = tmin, t1 = tmax;
  if (!clip_slab(ox, dx, -half, half, t0, t1)) return 0.0;
  if (!clip_slab(oy, dy, -half, half, t0, t1)) return 0.0;
  if (!(t1 > t0)) return 0.0;
  double len = t1 - t0;
  int64_t n = std::max<int64_t>(1, int64_t(std::ceil(len / step)));
  double h = len / double(n);
  double acc = 0.0;
  for (int64_t m = 0; m < n; ++m) {
    double t = t0 + (double(m) + 0.5) * h;
    acc += bilinear(img, s, ox + t * dx, oy + t * dy);
  }
  return h * acc;
}

struct Trig {
  double c, s;
};

std::vector<Trig> angle_trig(const std::vector<double>& angles) {
  std::vector<Trig> out(angles.size());
  for (size_t a = 0; a < angles.size(); ++a) out[a] = {std::cos(angles[a]), std::sin(angles[a])};
  return out;
}

template <class TIn>
void forward_parallel_t(const ParallelGeometry& g, const TIn* img, int64_t nb, double step, double* out) {
  int64_t s = g.image_size, na = int64_t(g.angles.size()), nd = g.det_count;
  std::vector<Trig> trig = angle_trig(g.angles);
  double inf = std::numeric_limits<double>::infinity();
  parallel_for(0, nb * na, [&](int64_t lo, int64_t hi) {
    for (int64_t ba = lo; ba < hi; ++ba) {
      int64_t b = ba / na, a = ba % na;
      const TIn* im = img + b * s * s;
      double c = trig[size_t(a)].c, sn = trig[size_t(a)].s;
      double* row = out + ba * nd;
      for (int64_t k = 0; k < nd; ++k) {
        double u = (double(k) - 0.5 * double(nd) + 0.5) * g.det_spacing;
        // detector axis e_u = (cos, sin), ray direction (-sin, cos)
        row[k] = integrate_ray(im, s, u * c, u * sn, -sn, c, -inf, inf, step);
      }
    }
  });
}

template <class TIn>
void forward_fanbeam_t(const FanbeamGeometry& g, const TIn* img, int64_t nb, double step, double* out) {
  int64_t s = g.image_size, na = int64_t(g.angles.size()), nd = g.det_count;
  std::vector<Trig> trig = angle_trig(g.angles);
  parallel_for(0, nb * na, [&](int64_t lo, int64_t hi) {
    for (int64_t ba = lo; ba < hi; ++ba) {
      int64_t b = ba / na, a = ba % na;
      const TIn* im = img + b * s * s;
      double c = trig[size_t(a)].c, sn = trig[size_t(a)].s;
      // source at R(theta) * (0, -source_distance)
      double sx = g.source_distance * sn;
      double sy = -g.source_distance * c;
      double* row = out + ba * nd;
      for (int64_t k = 0; k < nd; ++k) {
        double u = (double(k) - 0.5 * double(nd) + 0.5) * g.det_spacing;
        // detector cell at R(theta) * (u, det_distance)
        double px = u * c - g.det_distance * sn;
        double py = u * sn + g.det_distance * c;
        double dx = px - sx, dy = py - sy;
        double len = std::sqrt(dx * dx + dy * dy);
        row[k] = integrate_ray(im, s, sx, sy, dx / len, dy / len, 0.0, len, step);
      }
    }
  });
}

template <class TIn>
void backprojection_parallel_t(const ParallelGeometry& g, const TIn* sino, int64_t nb, double* out) {
  int64_t s = g.image_size, na = int64_t(g.angles.size()), nd = g.det_count;
  std::vector<Trig> trig = angle_trig(g.angles);
  parallel_for(0, nb * s, [&](int64_t lo, int64_t hi) {
    for (int64_t bi = lo; bi < hi; ++bi) {
      int64_t b = bi / s, i = bi % s;
      const TIn* sg = sino + b * na * nd;
      double y = 0.5 * double(s) - double(i) - 0.5;
      double* row = out + bi * s;
      for (int64_t j = 0; j < s; ++j) {
        double x = double(j) - 0.5 * double(s) + 0.5;
        double acc = 0.0;
        for (int64_t a = 0; a < na; ++a) {
          double u = x * trig[size_t(a)].c + y * trig[size_t(a)].s;
          double kf = u / g.det_spacing + 0.5 * double(nd) - 0.5;
          double fk = std::floor(kf);
          int64_t k0 = int64_t(fk);
          double w = kf - fk;
          const TIn* srow = sg + a * nd;
          if (k0 >= 0 && k0 < nd) acc += (1.0 - w) * double(srow[k0]);
          if (k0 + 1 >= 0 && k0 + 1 < nd) acc += w * double(srow[k0 + 1]);
        }
        row[j] = acc;
      }
    }
  });
}

template <class TIn>
void backprojection_fanbeam_t(const FanbeamGeometry& g, const TIn* sino, int64_t nb, double* out) {
  int64_t s = g.image_size, na = int64_t(g.angles.size()), nd = g.det_count;
  std::vector<Trig> trig = angle_trig(g.angles);
  double span = g.source_distance + g.det_distance;
  parallel_for(0, nb * s, [&](int64_t lo, int64_t hi) {
    for (int64_t bi = lo; bi < hi; ++bi) {
      int64_t b = bi / s, i = bi % s;
      const TIn* sg = sino + b * na * nd;
      double y = 0.5 * double(s) - double(i) - 0.5;
      double* row = out + bi * s;
      for (int64_t j = 0; j < s; ++j) {
        double x = double(j) - 0.5 * double(s) + 0.5;
        double acc = 0.0;
        for (int64_t a = 0; a < na; ++a) {
          double c = trig[size_t(a)].c, sn = trig[size_t(a)].s;
          // rotate the pixel into the frame where the source sits at
          // (0, -source_distance): q = R(-theta) p
          double qx = x * c + y * sn;
          double qy = -x * sn + y * c;
          double u = qx * span / (qy + g.source_distance);
          double kf = u / g.det_spacing + 0.5 * double(nd) - 0.5;
          double fk = std::floor(kf);
          int64_t k0 = int64_t(fk);
          double w = kf - fk;
          const TIn* srow = sg + a * nd;
          if (k0 >= 0 && k0 < nd) acc += (1.0 - w) * double(srow[k0]);
          if (k0 + 1 >= 0 && k0 + 1 < nd) acc += w * double(srow[k0 + 1]);
        }
        row[j] = acc;
      }
    }
  });
}

// Dispatches on storage precision: half and single are read as float and
// accumulated in double, double stays double throughout.
template <class Kernel>
Tensor run_projector(const Tensor& in, Shape out_shape, Kernel&& kernel) {
  std::vector<double> out(size_t(shape_numel(out_shape)));
  if (in.precision() == Precision::Double) {
    kernel(in.double_data().data(), out.data());
  } else {
    std::vector<float> widened;
    const float* ptr;
    if (in.precision() == Precision::Single) {
      ptr = in.float_data().data();
    } else {
      widened = in.to_float_vec();
      ptr = widened.data();
    }
    kernel(ptr, out.data());
  }
  return Tensor::from_double_as(std::move(out_shape), out, in.precision());
}

}  // namespace

Tensor forward(const ParallelGeometry& g, const Tensor& image, const ProjectorOptions& opts) {
  check_image(image, g.image_size);
  check_opts(opts);
  int64_t nb = image.batch();
  Shape out_shape{nb, int64_t(g.angles.size()), g.det_count};
  return run_projector(image, std::move(out_shape), [&](const auto* in, double* out) {
    forward_parallel_t(g, in, nb, opts.step, out);
  });
}

Tensor forward(const FanbeamGeometry& g, const Tensor& image, const ProjectorOptions& opts) {
  check_image(image, g.image_size);
  check_opts(opts);
  int64_t nb = image.batch();
  Shape out_shape{nb, int64_t(g.angles.size()), g.det_count};
  return run_projector(image, std::move(out_shape), [&](const auto* in, double* out) {
    forward_fanbeam_t(g, in, nb, opts.step, out);
  });
}

Tensor forward(const Geometry& g, const Tensor& image, const ProjectorOptions& opts) {
  return std::visit([&](const auto& gg) { return forward(gg, image, opts); }, g);
}

Tensor backprojection(const ParallelGeometry& g, const Tensor& sino, const ProjectorOptions& opts) {
  check_sino(sino, int64_t(g.angles.size()), g.det_count);
  check_opts(opts);
  int64_t nb = sino.batch();
  Shape out_shape{nb, g.image_size, g.image_size};
  return run_projector(sino, std::move(out_shape), [&](const auto* in, double* out) {
    backprojection_parallel_t(g, in, nb, out);
  });
}

Tensor backprojection(const FanbeamGeometry& g, const Tensor& sino, const ProjectorOptions& opts) {
  check_sino(sino, int64_t(g.angles.size()), g.det_count);
  check_opts(opts);
  int64_t nb = sino.batch();
  Shape out_shape{nb, g.image_size, g.image_size};
  return run_projector(sino, std::move(out_shape), [&](const auto* in, double* out) {
    backprojection_fanbeam_t(g, in, nb, out);
  });
}

Tensor backprojection(const Geometry& g, const Tensor& sino, const ProjectorOptions& opts) {
  return std::visit([&](const auto& gg) { return backprojection(gg, sino, opts); }, g);
}

Tensor materialize_matrix(const Geometry& g, const ProjectorOptions& opts) {
  int64_t s = geometry_image_size(g);
  if (s > 64)
    throw ValidationError("materialize_matrix refuses image_size " + std::to_string(s) +
                          " (> 64); the dense matrix would be too large");
  check_opts(opts);
  int64_t rows = geometry_n_angles(g) * geometry_det_count(g);
  int64_t cols = s * s;
  std::vector<double> mat(size_t(rows) * size_t(cols), 0.0);
  Tensor unit = Tensor::zeros({1, s, s}, Precision::Double);
  for (int64_t c = 0; c < cols; ++c) {
    if (c > 0) unit.double_data()[size_t(c - 1)] = 0.0;
    unit.double_data()[size_t(c)] = 1.0;
    Tensor col = forward(g, unit, opts);
    const std::vector<double>& v = col.double_data();
    for (int64_t r = 0; r < rows; ++r) mat[size_t(r) * size_t(cols) + size_t(c)] = v[size_t(r)];
  }
  return Tensor::from_vec({rows, cols}, std::move(mat));
}

}  // namespace radonkit
