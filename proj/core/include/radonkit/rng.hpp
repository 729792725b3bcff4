#pragma once

#include <cstdint>
#include <random>

#include "radonkit/tensor.hpp"

namespace radonkit {

// Deterministic, platform-independent generator: raw mt19937 words mapped to
// [0,1) with a fixed 24-bit mantissa scheme, never std::uniform_*
// distributions (their output is implementation-defined).
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(uint32_t(seed ^ (seed >> 32))) {}

  float uniform() {  // [0, 1)
    return float(eng_() >> 8) * 0x1.0p-24f;
  }

  float uniform_pm1() {  // [-1, 1)
    return 2.0f * uniform() - 1.0f;
  }

  Tensor uniform_tensor(Shape shape, Precision p = Precision::Single) {
    Tensor t = Tensor::zeros(std::move(shape), p);
    for (int64_t i = 0; i < t.size(); ++i) t.set(i, double(uniform()));
    return t;
  }

  Tensor uniform_pm1_tensor(Shape shape, Precision p = Precision::Single) {
    Tensor t = Tensor::zeros(std::move(shape), p);
    for (int64_t i = 0; i < t.size(); ++i) t.set(i, double(uniform_pm1()));
    return t;
  }

 private:
  std::mt19937 eng_;
};

}  // namespace radonkit
