#pragma once

#include <string>

#include "radonkit/tensor.hpp"

namespace radonkit {

// NPY v1.0 files, bit-for-bit interoperable: little-endian '<f2'/'<f4'/'<f8'
// payloads in C order, mapping to half/single/double storage. Reads reject
// fortran_order, 0-d shapes, and non-float dtypes; truncation errors name
// the byte offset.
Tensor read_array(const std::string& path);

// Writes atomically (temp file in the same directory, then rename).
void write_array(const std::string& path, const Tensor& t);

}  // namespace radonkit
