#pragma once

#include <string>

#include "radonkit/tensor.hpp"

namespace radonkit {

// 16-bit grayscale PNG with window mapping
// pixel = round(clamp((v - lo)/(hi - lo), 0, 1) * 65535).
// Accepts an H x W tensor or a batch of one. Written atomically.
void png_export(const Tensor& image, const std::string& path, double lo, double hi);

}  // namespace radonkit
