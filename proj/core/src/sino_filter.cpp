#include "radonkit/sino_filter.hpp"

#include <cmath>
#include <complex>
#include <vector>

#include "radonkit/errors.hpp"
#include "radonkit/fft.hpp"
#include "radonkit/projector.hpp"
#include "radonkit/threading.hpp"

namespace radonkit {

FilterKind filter_kind_from_name(const std::string& name) {
  if (name == "ram-lak") return FilterKind::RamLak;
  if (name == "shepp-logan") return FilterKind::SheppLogan;
  if (name == "cosine") return FilterKind::Cosine;
  if (name == "hamming") return FilterKind::Hamming;
  if (name == "hann") return FilterKind::Hann;
  throw ValidationError("unknown filter '" + name +
                        "' (expected ram-lak, shepp-logan, cosine, hamming, or hann)");
}

const char* filter_kind_name(FilterKind kind) {
  switch (kind) {
    case FilterKind::RamLak: return "ram-lak";
    case FilterKind::SheppLogan: return "shepp-logan";
    case FilterKind::Cosine: return "cosine";
    case FilterKind::Hamming: return "hamming";
    case FilterKind::Hann: return "hann";
  }
  return "?";
}

namespace {

int64_t next_pow2(int64_t n) {
  int64_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

double window_gain(FilterKind kind, double nu) {  // nu = f/f_max in [0, 1]
  switch (kind) {
    case FilterKind::RamLak:
      return 1.0;
    case FilterKind::SheppLogan: {
      if (nu == 0.0) return 1.0;
      double t = 0.5 * M_PI * nu;
      return std::sin(t) / t;
    }
    case FilterKind::Cosine:
      return std::cos(0.5 * M_PI * nu);
    case FilterKind::Hamming:
      return 0.54 + 0.46 * std::cos(M_PI * nu);
    case FilterKind::Hann:
      return 0.5 + 0.5 * std::cos(M_PI * nu);
  }
  return 1.0;
}

}  // namespace

FilterSpec make_filter(FilterKind kind, int64_t det_count) {
  if (det_count < 2) throw ValidationError("det_count must be >= 2, got " + std::to_string(det_count));
  FilterSpec spec;
  spec.kind = kind;
  spec.det_count = det_count;
  spec.padded_size = std::max<int64_t>(next_pow2(2 * det_count), 2);
  int64_t n = spec.padded_size;

  // band-limited ramp: spatial kernel 1/4 at the center, -1/(m pi)^2 at odd
  // offsets m, laid out circularly, then doubled in the frequency domain
  std::vector<double> kernel(size_t(n), 0.0);
  kernel[0] = 0.25;
  for (int64_t p = 1; p < n; ++p) {
    int64_t m = std::min(p, n - p);
    if (m % 2 == 1) kernel[size_t(p)] = -1.0 / (double(m) * double(m) * M_PI * M_PI);
  }
  std::vector<std::complex<double>> bins(size_t(n / 2 + 1));
  fft::rfft(int(n), kernel.data(), bins.data());

  spec.frequency_response.resize(size_t(n / 2 + 1));
  spec.frequency_response_f.resize(size_t(n / 2 + 1));
  for (int64_t q = 0; q <= n / 2; ++q) {
    double nu = double(q) / double(n / 2);
    double v = 2.0 * bins[size_t(q)].real() * window_gain(kind, nu);
    spec.frequency_response[size_t(q)] = v;
    spec.frequency_response_f[size_t(q)] = float(v);
  }
  return spec;
}

FilterSpec make_filter(const std::string& kind, int64_t det_count) {
  return make_filter(filter_kind_from_name(kind), det_count);
}

Tensor filter_sinogram(const Tensor& sino, const FilterSpec& filter) {
  if (sino.ndim() != 3)
    throw ValidationError("sinogram must be 3-dimensional (batch, angles, det), got " + shape_str(sino.shape()));
  if (sino.dim(2) != filter.det_count)
    throw ValidationError("sinogram det_count " + std::to_string(sino.dim(2)) + " does not match filter " +
                          std::to_string(filter.det_count));
  int64_t nb = sino.batch(), na = sino.dim(1), nd = sino.dim(2);
  int64_t pad = filter.padded_size;
  std::vector<float> in = sino.to_float_vec();
  std::vector<float> out(in.size());
  float scale = float(M_PI / (2.0 * double(na)));
  parallel_for(0, nb * na, [&](int64_t lo, int64_t hi) {
    std::vector<float> row(static_cast<size_t>(pad));
    std::vector<std::complex<float>> spec(size_t(pad / 2 + 1));
    for (int64_t r = lo; r < hi; ++r) {
      const float* src = in.data() + r * nd;
      std::fill(row.begin(), row.end(), 0.0f);
      std::copy(src, src + nd, row.begin());
      fft::rfft(int(pad), row.data(), spec.data());
      for (int64_t q = 0; q <= pad / 2; ++q) spec[size_t(q)] *= filter.frequency_response_f[size_t(q)];
      fft::irfft(int(pad), spec.data(), row.data());
      float* dst = out.data() + r * nd;
      for (int64_t k = 0; k < nd; ++k) dst[k] = row[size_t(k)] * scale;
    }
  });
  return Tensor::from_float_as(sino.shape(), out, sino.precision());
}

Tensor fbp(const ParallelGeometry& g, const Tensor& sino, FilterKind kind) {
  return backprojection(g, filter_sinogram(sino, make_filter(kind, g.det_count)));
}

Tensor fbp(const FanbeamGeometry& g, const Tensor& sino, FilterKind kind) {
  return backprojection(g, filter_sinogram(sino, make_filter(kind, g.det_count)));
}

Tensor fbp(const Geometry& g, const Tensor& sino, FilterKind kind) {
  return std::visit([&](const auto& gg) { return fbp(gg, sino, kind); }, g);
}

}  // namespace radonkit
