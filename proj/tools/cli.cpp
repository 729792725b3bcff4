#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "radonkit/admm.hpp"
#include "radonkit/errors.hpp"
#include "radonkit/geometry.hpp"
#include "radonkit/linop.hpp"
#include "radonkit/npy.hpp"
#include "radonkit/phantom.hpp"
#include "radonkit/png_io.hpp"
#include "radonkit/projector.hpp"
#include "radonkit/shearlet.hpp"
#include "radonkit/sino_filter.hpp"
#include "radonkit/solvers.hpp"
#include "radonkit/tensor.hpp"
#include "radonkit/threading.hpp"
#include "radonkit/version.hpp"

namespace radonkit::cli {
namespace {

using nlohmann::json;

constexpr double kUnsetAngle = std::numeric_limits<double>::quiet_NaN();

struct GeoFlags {
  std::string kind = "parallel";
  int64_t angles = 0;           // 0: derived from the input file or image size
  double angle_start = kUnsetAngle;
  double angle_range = kUnsetAngle;
  int64_t det_count = 0;        // 0: geometry default
  double det_spacing = 0.0;     // 0: geometry default
  double source_distance = 0.0; // 0: image size
  double det_distance = 0.0;    // 0: source distance
  double step = 1.0;
};

// admm_names swaps in the --n-angles / --angles-range spellings.
void add_geo_options(CLI::App* cmd, GeoFlags& g, bool admm_names = false) {
  cmd->add_option("--geometry", g.kind, "projection geometry")
      ->check(CLI::IsMember(std::vector<std::string>{"parallel", "fanbeam"}))
      ->capture_default_str();
  cmd->add_option(admm_names ? "--n-angles" : "--angles", g.angles,
                  "projection angle count (default: from input shape or image size)");
  cmd->add_option("--angle-start", g.angle_start,
                  admm_names ? "first angle in degrees (default: -range/2)"
                             : "first angle in degrees (default: 0)");
  cmd->add_option(admm_names ? "--angles-range" : "--angle-range", g.angle_range,
                  "angular span in degrees (default: 180 parallel, 360 fanbeam)");
  cmd->add_option("--det-count", g.det_count, "detector cell count (default: geometry default)");
  cmd->add_option("--det-spacing", g.det_spacing, "detector cell spacing (default: geometry default)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--source-distance", g.source_distance,
                  "fanbeam source to isocenter distance (default: image size)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--det-distance", g.det_distance,
                  "fanbeam isocenter to detector distance (default: source distance)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--step", g.step, "ray sampling step in pixel units")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

std::vector<double> build_angle_list(const GeoFlags& g, int64_t n, bool centered) {
  double range = std::isnan(g.angle_range) ? (g.kind == "fanbeam" ? 360.0 : 180.0) : g.angle_range;
  double start = std::isnan(g.angle_start) ? (centered ? -range / 2.0 : 0.0) : g.angle_start;
  std::vector<double> deg = angles_linspace(start, start + range, n);
  constexpr double kDegToRad = M_PI / 180.0;
  for (double& a : deg) a *= kDegToRad;
  return deg;
}

Geometry build_geometry(const GeoFlags& g, int64_t image_size, int64_t n_angles, bool centered = false) {
  if (n_angles < 1)
    throw ValidationError("angle count must be >= 1, got " + std::to_string(n_angles));
  std::vector<double> ang = build_angle_list(g, n_angles, centered);
  std::optional<int64_t> dc = g.det_count > 0 ? std::optional<int64_t>(g.det_count) : std::nullopt;
  std::optional<double> ds = g.det_spacing > 0 ? std::optional<double>(g.det_spacing) : std::nullopt;
  if (g.kind == "fanbeam") {
    double src = g.source_distance > 0 ? g.source_distance : double(image_size);
    std::optional<double> dd = g.det_distance > 0 ? std::optional<double>(g.det_distance) : std::nullopt;
    return make_fanbeam(image_size, std::move(ang), src, dd, dc, ds);
  }
  return make_parallel(image_size, std::move(ang), dc, ds);
}

Tensor with_shape(const Tensor& t, Shape shape) {
  switch (t.precision()) {
    case Precision::Half: return Tensor::from_half_bits(std::move(shape), t.half_bits());
    case Precision::Single: return Tensor::from_vec(std::move(shape), t.float_data());
    default: return Tensor::from_vec(std::move(shape), t.double_data());
  }
}

// Files hold the natural rank (2-d image, 3-d coefficient stack); the
// library is batch-first. lift adds a batch dim of one, squeeze drops it.
Tensor lift_batch(const Tensor& t, int want) {
  if (t.ndim() == want) return t;
  if (t.ndim() == want - 1) {
    Shape s;
    s.reserve(size_t(want));
    s.push_back(1);
    for (int64_t d : t.shape()) s.push_back(d);
    return with_shape(t, std::move(s));
  }
  throw ValidationError("expected a " + std::to_string(want - 1) + "-d or batched " +
                        std::to_string(want) + "-d array, got shape " + shape_str(t.shape()));
}

Tensor squeeze_batch(const Tensor& t) {
  if (t.ndim() >= 2 && t.batch() == 1) {
    Shape s(t.shape().begin() + 1, t.shape().end());
    return with_shape(t, std::move(s));
  }
  return t;
}

// "" keeps the storage precision from the file; half narrowing is checked.
Tensor apply_precision(const Tensor& t, const std::string& name) {
  if (name.empty()) return t;
  Precision p = precision_from_name(name);
  if (p == t.precision()) return t;
  if (p == Precision::Half) return to_half_storage(t);
  return convert(t, p);
}

void add_precision_option(CLI::App* cmd, std::string& var) {
  cmd->add_option("--precision", var, "convert the input to this storage precision")
      ->check(CLI::IsMember(std::vector<std::string>{"half", "single", "double"}));
}

json geometry_json(const Geometry& g) {
  json j;
  if (const auto* p = std::get_if<ParallelGeometry>(&g)) {
    j["kind"] = "parallel";
    j["image_size"] = p->image_size;
    j["n_angles"] = int64_t(p->angles.size());
    j["det_count"] = p->det_count;
    j["det_spacing"] = p->det_spacing;
  } else {
    const auto& f = std::get<FanbeamGeometry>(g);
    j["kind"] = "fanbeam";
    j["image_size"] = f.image_size;
    j["n_angles"] = int64_t(f.angles.size());
    j["source_distance"] = f.source_distance;
    j["det_distance"] = f.det_distance;
    j["det_count"] = f.det_count;
    j["det_spacing"] = f.det_spacing;
  }
  return j;
}

std::string geometry_line(const Geometry& g) {
  char buf[256];
  if (const auto* p = std::get_if<ParallelGeometry>(&g)) {
    std::snprintf(buf, sizeof(buf), "parallel size=%lld angles=%lld det_count=%lld det_spacing=%g",
                  (long long)p->image_size, (long long)p->angles.size(), (long long)p->det_count,
                  p->det_spacing);
  } else {
    const auto& f = std::get<FanbeamGeometry>(g);
    std::snprintf(buf, sizeof(buf),
                  "fanbeam size=%lld angles=%lld source=%g det_distance=%g det_count=%lld det_spacing=%g",
                  (long long)f.image_size, (long long)f.angles.size(), f.source_distance,
                  f.det_distance, (long long)f.det_count, f.det_spacing);
  }
  return std::string(buf);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// MSE of a result file against a reference array, lifting either side's
// missing batch dim.
double mse_vs_reference(const Tensor& result, const std::string& ref_path) {
  Tensor ref = read_array(ref_path);
  Tensor a = result;
  if (ref.ndim() == a.ndim() + 1) a = lift_batch(a, ref.ndim());
  if (a.ndim() == ref.ndim() + 1) ref = lift_batch(ref, a.ndim());
  return mse(a, ref);
}

struct BenchResult {
  double median_ms = 0.0;
  double images_per_s = 0.0;
  std::vector<double> runs_ms;
};

BenchResult time_op(const std::function<void()>& op, int warmup, int runs, int64_t batch) {
  for (int i = 0; i < warmup; ++i) op();
  BenchResult r;
  r.runs_ms.reserve(size_t(runs));
  for (int i = 0; i < runs; ++i) {
    auto t0 = std::chrono::steady_clock::now();
    op();
    r.runs_ms.push_back(seconds_since(t0) * 1000.0);
  }
  std::vector<double> sorted = r.runs_ms;
  std::sort(sorted.begin(), sorted.end());
  size_t n = sorted.size();
  r.median_ms = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  r.images_per_s = double(batch) / (r.median_ms / 1000.0);
  return r;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"radonkit: tomographic projection, reconstruction, and shearlet toolkit"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  int threads = 0;
  bool as_json = false;
  app.add_option("--threads", threads, "cap worker threads (0: hardware default)")
      ->check(CLI::NonNegativeNumber);
  app.add_flag("--json", as_json, "emit reports as JSON on stdout");

  std::function<int()> action;

  // phantom
  struct {
    int64_t size = 512;
    std::string out;
    std::string precision = "single";
  } ph;
  auto* c_phantom = app.add_subcommand("phantom", "write a Shepp-Logan head phantom");
  c_phantom->fallthrough();
  c_phantom->add_option("--size", ph.size, "image size in pixels")->capture_default_str();
  c_phantom->add_option("-o,--out", ph.out, "output .npy path")->required();
  c_phantom->add_option("--precision", ph.precision, "storage precision")
      ->check(CLI::IsMember(std::vector<std::string>{"half", "single", "double"}))
      ->capture_default_str();
  c_phantom->callback([&] {
    action = [&]() -> int {
      write_array(ph.out, squeeze_batch(shepp_logan(ph.size, precision_from_name(ph.precision))));
      return 0;
    };
  });

  // project
  struct {
    GeoFlags geo;
    std::string in, out, precision;
  } pr;
  auto* c_project = app.add_subcommand("project", "forward-project an image to a sinogram");
  c_project->fallthrough();
  add_geo_options(c_project, pr.geo);
  c_project->add_option("--in", pr.in, "input image .npy")->required();
  c_project->add_option("-o,--out", pr.out, "output sinogram .npy")->required();
  add_precision_option(c_project, pr.precision);
  c_project->callback([&] {
    action = [&]() -> int {
      Tensor img = apply_precision(lift_batch(read_array(pr.in), 3), pr.precision);
      int64_t n = pr.geo.angles > 0 ? pr.geo.angles : img.dim(1);
      Geometry g = build_geometry(pr.geo, img.dim(1), n);
      write_array(pr.out, squeeze_batch(forward(g, img, {pr.geo.step})));
      return 0;
    };
  });

  // backproject
  struct {
    GeoFlags geo;
    int64_t size = 0;
    std::string in, out, precision;
  } bp;
  auto* c_backproject = app.add_subcommand("backproject", "backproject a sinogram to an image");
  c_backproject->fallthrough();
  add_geo_options(c_backproject, bp.geo);
  c_backproject->add_option("--size", bp.size, "output image size")->required();
  c_backproject->add_option("--in", bp.in, "input sinogram .npy")->required();
  c_backproject->add_option("-o,--out", bp.out, "output image .npy")->required();
  add_precision_option(c_backproject, bp.precision);
  c_backproject->callback([&] {
    action = [&]() -> int {
      Tensor sino = apply_precision(lift_batch(read_array(bp.in), 3), bp.precision);
      GeoFlags geo = bp.geo;
      if (geo.det_count == 0) geo.det_count = sino.dim(2);
      int64_t n = geo.angles > 0 ? geo.angles : sino.dim(1);
      Geometry g = build_geometry(geo, bp.size, n);
      write_array(bp.out, squeeze_batch(backprojection(g, sino, {geo.step})));
      return 0;
    };
  });

  // filter
  struct {
    std::string in, out;
    std::string filter = "ram-lak";
  } fl;
  auto* c_filter = app.add_subcommand("filter", "apply a reconstruction filter to a sinogram");
  c_filter->fallthrough();
  c_filter->add_option("--in", fl.in, "input sinogram .npy")->required();
  c_filter->add_option("-o,--out", fl.out, "output sinogram .npy")->required();
  c_filter->add_option("--filter", fl.filter, "filter window")
      ->check(CLI::IsMember(std::vector<std::string>{"ram-lak", "shepp-logan", "cosine", "hamming", "hann"}))
      ->capture_default_str();
  c_filter->callback([&] {
    action = [&]() -> int {
      Tensor sino = lift_batch(read_array(fl.in), 3);
      FilterSpec spec = make_filter(fl.filter, sino.dim(2));
      write_array(fl.out, squeeze_batch(filter_sinogram(sino, spec)));
      return 0;
    };
  });

  // fbp
  struct {
    GeoFlags geo;
    int64_t size = 0;
    std::string in, out, precision, reference;
    std::string filter = "ram-lak";
  } fb;
  auto* c_fbp = app.add_subcommand("fbp", "filtered backprojection reconstruction");
  c_fbp->fallthrough();
  add_geo_options(c_fbp, fb.geo);
  c_fbp->add_option("--size", fb.size, "output image size")->required();
  c_fbp->add_option("--in", fb.in, "input sinogram .npy")->required();
  c_fbp->add_option("-o,--out", fb.out, "output image .npy")->required();
  c_fbp->add_option("--filter", fb.filter, "filter window")
      ->check(CLI::IsMember(std::vector<std::string>{"ram-lak", "shepp-logan", "cosine", "hamming", "hann"}))
      ->capture_default_str();
  c_fbp->add_option("--reference", fb.reference, "report MSE against this .npy array");
  add_precision_option(c_fbp, fb.precision);
  c_fbp->callback([&] {
    action = [&]() -> int {
      Tensor sino = apply_precision(lift_batch(read_array(fb.in), 3), fb.precision);
      GeoFlags geo = fb.geo;
      if (geo.det_count == 0) geo.det_count = sino.dim(2);
      int64_t n = geo.angles > 0 ? geo.angles : sino.dim(1);
      Geometry g = build_geometry(geo, fb.size, n);
      auto t0 = std::chrono::steady_clock::now();
      Tensor rec = fbp(g, sino, filter_kind_from_name(fb.filter));
      double secs = seconds_since(t0);
      write_array(fb.out, squeeze_batch(rec));
      if (as_json) {
        json j{{"command", "fbp"}, {"filter", fb.filter}, {"seconds", secs},
               {"geometry", geometry_json(g)}, {"output", fb.out}};
        if (!fb.reference.empty()) j["mse_vs_reference"] = mse_vs_reference(rec, fb.reference);
        std::cout << j.dump(2) << "\n";
      } else if (!fb.reference.empty()) {
        std::printf("mse vs reference: %.6e\n", mse_vs_reference(rec, fb.reference));
      }
      return 0;
    };
  });

  // solve
  struct {
    GeoFlags geo;
    int64_t size = 0;
    std::string method;
    int iterations = 100;
    double alpha = 0.0;  // 0: 0.95 * estimate_alpha
    int alpha_iterations = 20;
    uint64_t seed = 0;
    double tolerance = 0.0;
    std::string in, out, precision, reference;
  } sv;
  auto* c_solve = app.add_subcommand("solve", "iterative reconstruction from a sinogram");
  c_solve->fallthrough();
  add_geo_options(c_solve, sv.geo);
  c_solve->add_option("--method", sv.method, "solver")
      ->check(CLI::IsMember(std::vector<std::string>{"landweber", "cg", "cgne"}))
      ->required();
  c_solve->add_option("--iterations", sv.iterations, "iteration count")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  c_solve->add_option("--alpha", sv.alpha,
                      "landweber step size (default: 0.95 * power-iteration estimate)")
      ->check(CLI::PositiveNumber);
  c_solve->add_option("--alpha-iterations", sv.alpha_iterations, "power iteration count")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  c_solve->add_option("--seed", sv.seed, "power iteration seed")->capture_default_str();
  c_solve->add_option("--tolerance", sv.tolerance, "cg/cgne early-stop residual fraction (0: run all iterations)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  c_solve->add_option("--size", sv.size, "output image size")->required();
  c_solve->add_option("--in", sv.in, "input sinogram .npy")->required();
  c_solve->add_option("-o,--out", sv.out, "output image .npy")->required();
  c_solve->add_option("--reference", sv.reference, "report MSE against this .npy array");
  add_precision_option(c_solve, sv.precision);
  c_solve->callback([&] {
    action = [&]() -> int {
      Tensor sino = apply_precision(lift_batch(read_array(sv.in), 3), sv.precision);
      GeoFlags geo = sv.geo;
      if (geo.det_count == 0) geo.det_count = sino.dim(2);
      int64_t n = geo.angles > 0 ? geo.angles : sino.dim(1);
      Geometry g = build_geometry(geo, sv.size, n);
      LinearOperator op = projector_operator(g, {geo.step});
      Tensor guess = Tensor::zeros({sino.dim(0), sv.size, sv.size}, sino.precision());
      auto t0 = std::chrono::steady_clock::now();
      double alpha_used = 0.0;
      Tensor x;
      if (sv.method == "landweber") {
        alpha_used = sv.alpha > 0 ? sv.alpha
                                  : 0.95 * estimate_alpha(op, sv.alpha_iterations, sv.seed);
        x = landweber(op, sino, guess, alpha_used, sv.iterations);
      } else if (sv.method == "cgne") {
        x = cgne(op, guess, sino, sv.iterations, sv.tolerance);
      } else {
        Tensor b = op.adjoint(sino);
        auto normal = [&op](const Tensor& v) { return op.adjoint(op.apply(v)); };
        x = cg(normal, guess, b, sv.iterations, sv.tolerance);
      }
      double secs = seconds_since(t0);
      write_array(sv.out, squeeze_batch(x));
      if (as_json) {
        json j{{"command", "solve"}, {"method", sv.method}, {"iterations", sv.iterations},
               {"seconds", secs}, {"geometry", geometry_json(g)}, {"output", sv.out}};
        if (sv.method == "landweber") j["alpha"] = alpha_used;
        if (!sv.reference.empty()) j["mse_vs_reference"] = mse_vs_reference(x, sv.reference);
        std::cout << j.dump(2) << "\n";
      } else {
        if (sv.method == "landweber")
          std::printf("landweber: %d iterations, alpha=%.6e, %.3f s\n", sv.iterations, alpha_used, secs);
        else
          std::printf("%s: %d iterations, %.3f s\n", sv.method.c_str(), sv.iterations, secs);
        if (!sv.reference.empty())
          std::printf("mse vs reference: %.6e\n", mse_vs_reference(x, sv.reference));
      }
      return 0;
    };
  });

  // shearlet
  struct {
    std::string in, out, cache_dir;
    int scales = 5;
    double alpha = 0.5;
    bool inverse = false;
  } sh;
  auto* c_shearlet = app.add_subcommand("shearlet", "alpha-shearlet analysis or synthesis");
  c_shearlet->fallthrough();
  c_shearlet->add_option("--in", sh.in, "input .npy (image, or coefficients with --inverse)")->required();
  c_shearlet->add_option("-o,--out", sh.out, "output .npy")->required();
  c_shearlet->add_option("--scales", sh.scales, "number of scales")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  c_shearlet->add_option("--alpha", sh.alpha, "scaling exponent per scale")->capture_default_str();
  c_shearlet->add_flag("--inverse", sh.inverse, "synthesize an image from coefficients");
  c_shearlet->add_option("--cache-dir", sh.cache_dir,
                         "plan cache directory (default: RADONKIT_CACHE_DIR)");
  c_shearlet->callback([&] {
    action = [&]() -> int {
      std::vector<double> alphas(size_t(sh.scales), sh.alpha);
      Tensor x = read_array(sh.in);
      if (sh.inverse) {
        Tensor co = lift_batch(x, 4);
        ShearletPlan plan = make_plan_cached(co.dim(2), co.dim(3), alphas, sh.cache_dir);
        if (plan.n_coeff != co.dim(1))
          throw ValidationError("coefficient count " + std::to_string(co.dim(1)) +
                                " does not match the plan's " + std::to_string(plan.n_coeff));
        write_array(sh.out, squeeze_batch(backward(plan, co)));
      } else {
        Tensor img = lift_batch(x, 3);
        ShearletPlan plan = make_plan_cached(img.dim(1), img.dim(2), alphas, sh.cache_dir);
        write_array(sh.out, squeeze_batch(forward(plan, img)));
      }
      return 0;
    };
  });

  // admm
  struct {
    GeoFlags geo;
    int64_t size = 0;
    int scales = 5;
    double alpha = 0.5;
    double p0 = 0.02;
    double p1 = 0.1;
    int64_t outer = 50;
    int64_t inner = 50;
    bool progress = false;
    std::string in, out, cache_dir, reference;
  } ad;
  auto* c_admm = app.add_subcommand("admm", "l1-shearlet regularized reconstruction");
  c_admm->fallthrough();
  add_geo_options(c_admm, ad.geo, /*admm_names=*/true);
  c_admm->add_option("--size", ad.size, "output image size")->required();
  c_admm->add_option("--in", ad.in, "input sinogram .npy")->required();
  c_admm->add_option("-o,--out", ad.out, "output image .npy")->required();
  c_admm->add_option("--scales", ad.scales, "shearlet scales")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  c_admm->add_option("--alpha", ad.alpha, "shearlet scaling exponent")->capture_default_str();
  c_admm->add_option("--p0", ad.p0, "data-term penalty")->check(CLI::PositiveNumber)->capture_default_str();
  c_admm->add_option("--p1", ad.p1, "shearlet split penalty")->check(CLI::PositiveNumber)->capture_default_str();
  c_admm->add_option("--outer", ad.outer, "outer ADMM iterations")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  c_admm->add_option("--inner", ad.inner, "inner CG iterations")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  c_admm->add_flag("--progress", ad.progress, "print the objective each outer iteration to stderr");
  c_admm->add_option("--cache-dir", ad.cache_dir, "plan cache directory (default: RADONKIT_CACHE_DIR)");
  c_admm->add_option("--reference", ad.reference, "report MSE against this .npy array");
  c_admm->callback([&] {
    action = [&]() -> int {
      Tensor sino = lift_batch(read_array(ad.in), 3);
      GeoFlags geo = ad.geo;
      if (geo.det_count == 0) geo.det_count = sino.dim(2);
      int64_t n = geo.angles > 0 ? geo.angles : sino.dim(1);
      Geometry g = build_geometry(geo, ad.size, n, /*centered=*/true);
      LinearOperator op = projector_operator(g, {geo.step});
      std::vector<double> alphas(size_t(ad.scales), ad.alpha);
      ShearletPlan plan = make_plan_cached(ad.size, ad.size, alphas, ad.cache_dir);
      AdmmParams params;
      params.p0 = ad.p0;
      params.p1 = ad.p1;
      params.outer_iterations = ad.outer;
      params.inner_cg_iterations = ad.inner;
      AdmmObserver observer;
      if (ad.progress) {
        observer = [&](int64_t it, const AdmmState& st) {
          std::fprintf(stderr, "iter %lld objective %.6e\n", (long long)it,
                       admm_objective(op, plan, st.f, sino));
        };
      }
      auto t0 = std::chrono::steady_clock::now();
      Tensor x = admm_reconstruct(op, plan, sino, params, observer);
      double secs = seconds_since(t0);
      write_array(ad.out, squeeze_batch(x));
      double objective = admm_objective(op, plan, x, sino);
      if (as_json) {
        json j{{"command", "admm"}, {"outer", ad.outer}, {"inner", ad.inner},
               {"p0", ad.p0}, {"p1", ad.p1}, {"scales", ad.scales}, {"alpha", ad.alpha},
               {"seconds", secs}, {"objective", objective},
               {"geometry", geometry_json(g)}, {"output", ad.out}};
        if (!ad.reference.empty()) j["mse_vs_reference"] = mse_vs_reference(x, ad.reference);
        std::cout << j.dump(2) << "\n";
      } else {
        std::printf("admm: %lld outer x %lld inner iterations, objective %.6e, %.3f s\n",
                    (long long)ad.outer, (long long)ad.inner, objective, secs);
        if (!ad.reference.empty())
          std::printf("mse vs reference: %.6e\n", mse_vs_reference(x, ad.reference));
      }
      return 0;
    };
  });

  // check-adjoint
  struct {
    GeoFlags geo;
    std::string op_name = "projector";
    int64_t size = 64;
    int scales = 5;
    double alpha = 0.5;
    int trials = 10;
    uint64_t seed = 0;
    double tolerance = 0.0;  // 0: report only
  } ca;
  auto* c_check = app.add_subcommand("check-adjoint", "measure the adjoint defect of an operator");
  c_check->fallthrough();
  add_geo_options(c_check, ca.geo);
  c_check->add_option("--operator", ca.op_name, "operator to check")
      ->check(CLI::IsMember(std::vector<std::string>{"projector", "shearlet"}))
      ->capture_default_str();
  c_check->add_option("--size", ca.size, "image size")->capture_default_str();
  c_check->add_option("--scales", ca.scales, "shearlet scales")->capture_default_str();
  c_check->add_option("--alpha", ca.alpha, "shearlet scaling exponent")->capture_default_str();
  c_check->add_option("--trials", ca.trials, "random probe pairs")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  c_check->add_option("--seed", ca.seed, "rng seed")->capture_default_str();
  c_check->add_option("--tolerance", ca.tolerance, "fail (exit 2) when the defect exceeds this");
  c_check->callback([&] {
    action = [&]() -> int {
      LinearOperator op;
      json detail;
      std::string detail_line;
      if (ca.op_name == "shearlet") {
        std::vector<double> alphas(size_t(ca.scales), ca.alpha);
        ShearletPlan plan = make_plan(ca.size, ca.size, alphas);
        op = shearlet_operator(plan);
        detail = json{{"size", ca.size}, {"scales", ca.scales}, {"alpha", ca.alpha},
                      {"n_coeff", plan.n_coeff}};
        detail_line = "size=" + std::to_string(ca.size) + " scales=" + std::to_string(ca.scales);
      } else {
        int64_t n = ca.geo.angles > 0 ? ca.geo.angles : ca.size;
        Geometry g = build_geometry(ca.geo, ca.size, n);
        op = projector_operator(g, {ca.geo.step});
        detail = geometry_json(g);
        detail_line = geometry_line(g);
      }
      double defect = adjoint_check(op, ca.trials, ca.seed);
      if (as_json) {
        json j{{"command", "check-adjoint"}, {"operator", ca.op_name}, {"defect", defect},
               {"trials", ca.trials}, {"seed", ca.seed}, {"detail", detail}};
        if (ca.tolerance > 0) j["tolerance"] = ca.tolerance;
        std::cout << j.dump(2) << "\n";
      } else {
        std::printf("adjoint defect: %.6e (%s %s trials=%d seed=%llu)\n", defect,
                    ca.op_name.c_str(), detail_line.c_str(), ca.trials,
                    (unsigned long long)ca.seed);
      }
      if (ca.tolerance > 0 && !(defect <= ca.tolerance)) {
        std::fprintf(stderr, "adjoint defect %.6e exceeds tolerance %.6e\n", defect, ca.tolerance);
        return 2;
      }
      return 0;
    };
  });

  // bench
  struct {
    GeoFlags geo;
    int64_t size = 512;
    int64_t batch = 1;
    std::string precision = "single";
    int warmup = 1;
    int runs = 5;
  } be;
  auto* c_bench = app.add_subcommand("bench", "time forward and backprojection throughput");
  c_bench->fallthrough();
  add_geo_options(c_bench, be.geo);
  c_bench->add_option("--size", be.size, "image size")->capture_default_str();
  c_bench->add_option("--batch", be.batch, "batch size")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  c_bench->add_option("--precision", be.precision, "storage precision")
      ->check(CLI::IsMember(std::vector<std::string>{"half", "single", "double"}))
      ->capture_default_str();
  c_bench->add_option("--warmup", be.warmup, "untimed warmup calls")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  c_bench->add_option("--runs", be.runs, "timed calls (median reported)")
      ->check(CLI::Range(5, 1000000))
      ->capture_default_str();
  c_bench->callback([&] {
    action = [&]() -> int {
      int64_t n = be.geo.angles > 0 ? be.geo.angles : be.size;
      Geometry g = build_geometry(be.geo, be.size, n);
      Precision prec = precision_from_name(be.precision);
      Tensor one = shepp_logan(be.size);
      std::vector<float> tiled;
      tiled.reserve(size_t(be.batch) * size_t(one.size()));
      for (int64_t b = 0; b < be.batch; ++b)
        tiled.insert(tiled.end(), one.float_data().begin(), one.float_data().end());
      Tensor image = Tensor::from_float_as({be.batch, be.size, be.size}, tiled, prec);
      Tensor sino = forward(g, image, {be.geo.step});

      BenchResult fwd = time_op([&] { Tensor t = forward(g, image, {be.geo.step}); }, be.warmup,
                                be.runs, be.batch);
      BenchResult bwd = time_op([&] { Tensor t = backprojection(g, sino, {be.geo.step}); },
                                be.warmup, be.runs, be.batch);

      if (as_json) {
        json j{{"version", kVersion},
               {"geometry", geometry_json(g)},
               {"batch", be.batch},
               {"precision", be.precision},
               {"warmup", be.warmup},
               {"runs", be.runs},
               {"threads", num_threads()},
               {"forward", json{{"median_ms", fwd.median_ms},
                                {"images_per_s", fwd.images_per_s},
                                {"runs_ms", fwd.runs_ms}}},
               {"backprojection", json{{"median_ms", bwd.median_ms},
                                       {"images_per_s", bwd.images_per_s},
                                       {"runs_ms", bwd.runs_ms}}}};
        std::cout << j.dump(2) << "\n";
      } else {
        std::printf("radonkit %s\n", kVersion);
        std::printf("geometry: %s\n", geometry_line(g).c_str());
        std::printf("batch=%lld precision=%s warmup=%d runs=%d threads=%d\n",
                    (long long)be.batch, be.precision.c_str(), be.warmup, be.runs, num_threads());
        std::printf("forward: %.3f ms/call median, %.2f images/s\n", fwd.median_ms,
                    fwd.images_per_s);
        std::printf("backprojection: %.3f ms/call median, %.2f images/s\n", bwd.median_ms,
                    bwd.images_per_s);
      }
      return 0;
    };
  });

  // png-export
  struct {
    std::string in, out;
    double lo = 0.0;
    double hi = 1.0;
  } px;
  auto* c_png = app.add_subcommand("png-export", "render an array to a 16-bit grayscale PNG");
  c_png->fallthrough();
  c_png->add_option("--in", px.in, "input image .npy")->required();
  c_png->add_option("-o,--out", px.out, "output .png path")->required();
  c_png->add_option("--lo", px.lo, "window low (maps to black)")->capture_default_str();
  c_png->add_option("--hi", px.hi, "window high (maps to white)")->capture_default_str();
  c_png->callback([&] {
    action = [&]() -> int {
      png_export(read_array(px.in), px.out, px.lo, px.hi);
      return 0;
    };
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (threads > 0) set_num_threads(threads);
    return action ? action() : 1;
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  args.reserve(size_t(argc > 0 ? argc - 1 : 0));
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace radonkit::cli
