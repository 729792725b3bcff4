#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

namespace radonkit {

// Shared coordinate convention. The image of size s covers [-s/2, s/2]^2;
// pixel (row i, col j) has center (j - s/2 + 0.5, s/2 - i - 0.5), so row 0
// sits at the top (largest y). Detector cell k lies at signed offset
// u_k = (k - det_count/2 + 0.5) * det_spacing along the detector axis.
// Angles are radians and rotate the source/detector assembly
// counterclockwise; at angle 0 parallel rays travel along +y and the
// detector axis is horizontal.

struct ParallelGeometry {
  int64_t image_size = 0;
  std::vector<double> angles;
  int64_t det_count = 0;
  double det_spacing = 1.0;
};

struct FanbeamGeometry {
  int64_t image_size = 0;
  std::vector<double> angles;
  double source_distance = 0.0;
  double det_distance = 0.0;
  int64_t det_count = 0;
  double det_spacing = 1.0;
  double magnification() const { return (source_distance + det_distance) / source_distance; }
};

using Geometry = std::variant<ParallelGeometry, FanbeamGeometry>;

// Defaults: det_count = image_size, det_spacing = 1.0.
ParallelGeometry make_parallel(int64_t image_size, std::vector<double> angles,
                               std::optional<int64_t> det_count = std::nullopt,
                               std::optional<double> det_spacing = std::nullopt);

// Defaults: det_distance = source_distance, det_count = image_size,
// det_spacing = magnification * image_size / det_count. The source must lie
// outside the image's bounding circle: source_distance > image_size/sqrt(2).
FanbeamGeometry make_fanbeam(int64_t image_size, std::vector<double> angles, double source_distance,
                             std::optional<double> det_distance = std::nullopt,
                             std::optional<int64_t> det_count = std::nullopt,
                             std::optional<double> det_spacing = std::nullopt);

int64_t geometry_image_size(const Geometry& g);
int64_t geometry_det_count(const Geometry& g);
int64_t geometry_n_angles(const Geometry& g);

// n evenly spaced angles on [start, stop), matching numpy.linspace with
// endpoint=False.
std::vector<double> angles_linspace(double start, double stop, int64_t n);

}  // namespace radonkit
