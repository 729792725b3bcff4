#pragma once

#include "radonkit/geometry.hpp"
#include "radonkit/tensor.hpp"

namespace radonkit {

struct ProjectorOptions {
  // Ray quadrature step in pixel units (midpoint rule along the clipped ray).
  double step = 1.0;
};

// Ray-driven forward projection with bilinear image interpolation. The ray
// is clipped to the image bounding box, sampled at n = ceil(len/step)
// midpoints, and the sum is scaled by the actual spacing len/n. Per-element
// accumulation runs in double for every storage precision; results are
// narrowed to the input's precision at the final store. Image must be
// B x size x size; output is B x n_angles x det_count.
Tensor forward(const ParallelGeometry& g, const Tensor& image, const ProjectorOptions& opts = {});
Tensor forward(const FanbeamGeometry& g, const Tensor& image, const ProjectorOptions& opts = {});
Tensor forward(const Geometry& g, const Tensor& image, const ProjectorOptions& opts = {});

// Pixel-driven backprojection with linear interpolation between detector
// cells, the (approximate) adjoint of forward. No distance weighting is
// applied in the fan-beam case. Sinogram must be B x n_angles x det_count;
// output is B x size x size.
Tensor backprojection(const ParallelGeometry& g, const Tensor& sino, const ProjectorOptions& opts = {});
Tensor backprojection(const FanbeamGeometry& g, const Tensor& sino, const ProjectorOptions& opts = {});
Tensor backprojection(const Geometry& g, const Tensor& sino, const ProjectorOptions& opts = {});

// Dense operator matrix of shape (n_angles*det_count) x (size*size) in
// double precision, column c equal to forward of the c-th unit image.
// Refuses image_size > 64 (the matrix grows with the fourth power of size).
Tensor materialize_matrix(const Geometry& g, const ProjectorOptions& opts = {});

}  // namespace radonkit
