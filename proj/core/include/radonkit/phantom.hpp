#pragma once

#include <cstdint>

#include "radonkit/tensor.hpp"

namespace radonkit {

// Modified Shepp-Logan head phantom sampled at pixel centers on
// [-1, 1]^2, batch shape 1 x size x size. Values are the standard
// low-contrast variant (background ellipse 1.0, skull 0.2 steps).
Tensor shepp_logan(int64_t size, Precision p = Precision::Single);

}  // namespace radonkit
