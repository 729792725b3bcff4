#pragma once

#include <bit>
#include <cstdint>

namespace radonkit {

// IEEE 754 binary16 <-> binary32 conversion. Round to nearest, ties to even.
// Finite values above the half range round to infinity; callers that must
// reject overflow check half_overflows() first.

inline float half_to_float(uint16_t h) {
  uint32_t sign = uint32_t(h & 0x8000u) << 16;
  uint32_t exp = (h >> 10) & 0x1Fu;
  uint32_t mant = h & 0x3FFu;
  uint32_t bits;
  if (exp == 0) {
    if (mant == 0) {
      bits = sign;
    } else {
      // subnormal: renormalize
      int shift = 0;
      while (!(mant & 0x400u)) {
        mant <<= 1;
        ++shift;
      }
      mant &= 0x3FFu;
      bits = sign | uint32_t(113 - shift) << 23 | mant << 13;
    }
  } else if (exp == 31) {
    bits = sign | 0x7F800000u | mant << 13;
  } else {
    bits = sign | (exp + 112) << 23 | mant << 13;
  }
  return std::bit_cast<float>(bits);
}

inline uint16_t float_to_half(float f) {
  uint32_t x = std::bit_cast<uint32_t>(f);
  uint16_t sign = uint16_t((x >> 16) & 0x8000u);
  uint32_t fexp = (x >> 23) & 0xFFu;
  uint32_t mant = x & 0x7FFFFFu;
  if (fexp == 0xFF) {  // inf or nan
    uint16_t payload = mant ? uint16_t(0x200u | (mant >> 13)) : 0;
    return uint16_t(sign | 0x7C00u | payload);
  }
  int exp = int(fexp) - 127 + 15;
  if (exp >= 31) return uint16_t(sign | 0x7C00u);  // overflow to inf
  if (exp <= 0) {
    if (exp < -10) return sign;  // below half of the smallest subnormal
    mant |= 0x800000u;
    uint32_t shift = uint32_t(14 - exp);
    uint32_t q = mant >> shift;
    uint32_t rem = mant & ((1u << shift) - 1);
    uint32_t halfway = 1u << (shift - 1);
    if (rem > halfway || (rem == halfway && (q & 1))) ++q;
    return uint16_t(sign | q);  // carry into exponent 1 is the min normal
  }
  uint16_t h = uint16_t(sign | uint32_t(exp) << 10 | (mant >> 13));
  uint32_t rem = mant & 0x1FFFu;
  if (rem > 0x1000u || (rem == 0x1000u && (h & 1))) ++h;  // carry may round to inf
  return h;
}

// True when a finite float is too large in magnitude to represent as a
// finite half after round-to-nearest-even (i.e. conversion would give inf).
inline bool half_overflows(float f) {
  uint32_t absbits = std::bit_cast<uint32_t>(f) & 0x7FFFFFFFu;
  if (absbits >= 0x7F800000u) return false;  // inf/nan pass through
  return (float_to_half(f) & 0x7FFFu) == 0x7C00u;
}

}  // namespace radonkit
