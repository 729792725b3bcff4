#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "radonkit/geometry.hpp"
#include "radonkit/tensor.hpp"

namespace radonkit {

enum class FilterKind { RamLak, SheppLogan, Cosine, Hamming, Hann };

// Exact CLI spellings: ram-lak, shepp-logan, cosine, hamming, hann.
FilterKind filter_kind_from_name(const std::string& name);
const char* filter_kind_name(FilterKind kind);

struct FilterSpec {
  FilterKind kind = FilterKind::RamLak;
  int64_t det_count = 0;
  int64_t padded_size = 0;                  // next power of two >= 2*det_count
  std::vector<double> frequency_response;   // padded_size/2 + 1 bins
  std::vector<float> frequency_response_f;  // same, for the single-precision apply
};

// Ramp filter frequency response built from the band-limited spatial kernel
// (0.25 at the center tap, -1/(n pi)^2 at odd taps), so the DC bin is small
// and positive instead of zero. Window functions attenuate the ramp as a
// function of normalized frequency f/f_max in [0, 1].
FilterSpec make_filter(FilterKind kind, int64_t det_count);
FilterSpec make_filter(const std::string& kind, int64_t det_count);

// Filters each detector row: zero-pad to padded_size, real FFT, multiply by
// the response, inverse FFT, crop, then scale by pi / (2 * n_angles).
// Filtration arithmetic is always single precision, whatever the storage
// precision of the input; the result keeps the input's storage precision.
Tensor filter_sinogram(const Tensor& sino, const FilterSpec& filter);

// backprojection(filter_sinogram(sino)) with the given window.
Tensor fbp(const ParallelGeometry& g, const Tensor& sino, FilterKind kind = FilterKind::RamLak);
Tensor fbp(const FanbeamGeometry& g, const Tensor& sino, FilterKind kind = FilterKind::RamLak);
Tensor fbp(const Geometry& g, const Tensor& sino, FilterKind kind = FilterKind::RamLak);

}  // namespace radonkit
