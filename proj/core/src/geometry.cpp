#include "radonkit/geometry.hpp"

#include <cmath>
#include <string>

#include "radonkit/errors.hpp"

namespace radonkit {

namespace {

void check_common(int64_t image_size, const std::vector<double>& angles) {
  if (image_size < 1) throw ValidationError("image_size must be >= 1, got " + std::to_string(image_size));
  if (angles.empty()) throw ValidationError("angle list must not be empty");
  for (double a : angles) {
    if (!std::isfinite(a)) throw ValidationError("angles must be finite");
  }
}

}  // namespace

ParallelGeometry make_parallel(int64_t image_size, std::vector<double> angles, std::optional<int64_t> det_count,
                               std::optional<double> det_spacing) {
  check_common(image_size, angles);
  ParallelGeometry g;
  g.image_size = image_size;
  g.angles = std::move(angles);
  g.det_count = det_count.value_or(image_size);
  g.det_spacing = det_spacing.value_or(1.0);
  if (g.det_count < 1) throw ValidationError("det_count must be >= 1, got " + std::to_string(g.det_count));
  if (!(g.det_spacing > 0.0)) throw ValidationError("det_spacing must be positive");
  return g;
}

FanbeamGeometry make_fanbeam(int64_t image_size, std::vector<double> angles, double source_distance,
                             std::optional<double> det_distance, std::optional<int64_t> det_count,
                             std::optional<double> det_spacing) {
  check_common(image_size, angles);
  if (!(source_distance > double(image_size) * std::sqrt(2.0) / 2.0))
    throw ValidationError("source_distance " + std::to_string(source_distance) +
                          " must exceed image_size/sqrt(2) = " +
                          std::to_string(double(image_size) * std::sqrt(2.0) / 2.0) +
                          " so the source stays outside the image");
  FanbeamGeometry g;
  g.image_size = image_size;
  g.angles = std::move(angles);
  g.source_distance = source_distance;
  g.det_distance = det_distance.value_or(source_distance);
  if (!(g.det_distance > 0.0)) throw ValidationError("det_distance must be positive");
  g.det_count = det_count.value_or(image_size);
  if (g.det_count < 1) throw ValidationError("det_count must be >= 1, got " + std::to_string(g.det_count));
  g.det_spacing = det_spacing.value_or(g.magnification() * double(image_size) / double(g.det_count));
  if (!(g.det_spacing > 0.0)) throw ValidationError("det_spacing must be positive");
  return g;
}

int64_t geometry_image_size(const Geometry& g) {
  return std::visit([](const auto& gg) { return gg.image_size; }, g);
}
int64_t geometry_det_count(const Geometry& g) {
  return std::visit([](const auto& gg) { return gg.det_count; }, g);
}
int64_t geometry_n_angles(const Geometry& g) {
  return std::visit([](const auto& gg) { return int64_t(gg.angles.size()); }, g);
}

std::vector<double> angles_linspace(double start, double stop, int64_t n) {
  if (n < 1) throw ValidationError("angle count must be >= 1, got " + std::to_string(n));
  std::vector<double> out(static_cast<size_t>(n));
  double step = (stop - start) / double(n);
  for (int64_t i = 0; i < n; ++i) out[size_t(i)] = start + double(i) * step;
  return out;
}

}  // namespace radonkit
