#include "radonkit/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>
#include <vector>

namespace radonkit::fft {

namespace {

// FFTW plan creation is not thread-safe; new-array execution is. Plans are
// made with FFTW_UNALIGNED so they can run on any caller buffer.
constexpr unsigned kFlags = FFTW_ESTIMATE | FFTW_UNALIGNED;

enum Kind { kR2C1, kC2R1, kR2C2, kC2R2 };
using Key = std::tuple<int, int, int>;

std::mutex g_mutex;
std::map<Key, fftw_plan>& plans_d() {
  static std::map<Key, fftw_plan> m;
  return m;
}
std::map<Key, fftwf_plan>& plans_f() {
  static std::map<Key, fftwf_plan> m;
  return m;
}

fftw_plan plan_d(Kind kind, int h, int w) {
  std::lock_guard<std::mutex> lock(g_mutex);
  Key key{int(kind), h, w};
  auto it = plans_d().find(key);
  if (it != plans_d().end()) return it->second;
  fftw_plan p = nullptr;
  switch (kind) {
    case kR2C1: {
      std::vector<double> in(static_cast<size_t>(w));
      std::vector<fftw_complex> out(size_t(w / 2 + 1));
      p = fftw_plan_dft_r2c_1d(w, in.data(), out.data(), kFlags);
      break;
    }
    case kC2R1: {
      std::vector<fftw_complex> in(size_t(w / 2 + 1));
      std::vector<double> out(static_cast<size_t>(w));
      p = fftw_plan_dft_c2r_1d(w, in.data(), out.data(), kFlags);
      break;
    }
    case kR2C2: {
      std::vector<double> in(size_t(h) * size_t(w));
      std::vector<fftw_complex> out(size_t(h) * size_t(w / 2 + 1));
      p = fftw_plan_dft_r2c_2d(h, w, in.data(), out.data(), kFlags);
      break;
    }
    case kC2R2: {
      std::vector<fftw_complex> in(size_t(h) * size_t(w / 2 + 1));
      std::vector<double> out(size_t(h) * size_t(w));
      p = fftw_plan_dft_c2r_2d(h, w, in.data(), out.data(), kFlags);
      break;
    }
  }
  plans_d()[key] = p;
  return p;
}

fftwf_plan plan_f(Kind kind, int h, int w) {
  std::lock_guard<std::mutex> lock(g_mutex);
  Key key{int(kind), h, w};
  auto it = plans_f().find(key);
  if (it != plans_f().end()) return it->second;
  fftwf_plan p = nullptr;
  switch (kind) {
    case kR2C1: {
      std::vector<float> in(static_cast<size_t>(w));
      std::vector<fftwf_complex> out(size_t(w / 2 + 1));
      p = fftwf_plan_dft_r2c_1d(w, in.data(), out.data(), kFlags);
      break;
    }
    case kC2R1: {
      std::vector<fftwf_complex> in(size_t(w / 2 + 1));
      std::vector<float> out(static_cast<size_t>(w));
      p = fftwf_plan_dft_c2r_1d(w, in.data(), out.data(), kFlags);
      break;
    }
    case kR2C2: {
      std::vector<float> in(size_t(h) * size_t(w));
      std::vector<fftwf_complex> out(size_t(h) * size_t(w / 2 + 1));
      p = fftwf_plan_dft_r2c_2d(h, w, in.data(), out.data(), kFlags);
      break;
    }
    case kC2R2: {
      std::vector<fftwf_complex> in(size_t(h) * size_t(w / 2 + 1));
      std::vector<float> out(size_t(h) * size_t(w));
      p = fftwf_plan_dft_c2r_2d(h, w, in.data(), out.data(), kFlags);
      break;
    }
  }
  plans_f()[key] = p;
  return p;
}

}  // namespace

void rfft(int n, const float* in, std::complex<float>* out) {
  fftwf_execute_dft_r2c(plan_f(kR2C1, 1, n), const_cast<float*>(in), reinterpret_cast<fftwf_complex*>(out));
}

void rfft(int n, const double* in, std::complex<double>* out) {
  fftw_execute_dft_r2c(plan_d(kR2C1, 1, n), const_cast<double*>(in), reinterpret_cast<fftw_complex*>(out));
}

void irfft(int n, const std::complex<float>* in, float* out) {
  // c2r destroys its input, so run on a scratch copy
  std::vector<std::complex<float>> tmp(in, in + (n / 2 + 1));
  fftwf_execute_dft_c2r(plan_f(kC2R1, 1, n), reinterpret_cast<fftwf_complex*>(tmp.data()), out);
  float inv = 1.0f / float(n);
  for (int i = 0; i < n; ++i) out[i] *= inv;
}

void irfft(int n, const std::complex<double>* in, double* out) {
  std::vector<std::complex<double>> tmp(in, in + (n / 2 + 1));
  fftw_execute_dft_c2r(plan_d(kC2R1, 1, n), reinterpret_cast<fftw_complex*>(tmp.data()), out);
  double inv = 1.0 / double(n);
  for (int i = 0; i < n; ++i) out[i] *= inv;
}

void rfft2(int h, int w, const float* in, std::complex<float>* out) {
  fftwf_execute_dft_r2c(plan_f(kR2C2, h, w), const_cast<float*>(in), reinterpret_cast<fftwf_complex*>(out));
}

void rfft2(int h, int w, const double* in, std::complex<double>* out) {
  fftw_execute_dft_r2c(plan_d(kR2C2, h, w), const_cast<double*>(in), reinterpret_cast<fftw_complex*>(out));
}

void irfft2(int h, int w, const std::complex<float>* in, float* out) {
  std::vector<std::complex<float>> tmp(in, in + size_t(h) * size_t(w / 2 + 1));
  fftwf_execute_dft_c2r(plan_f(kC2R2, h, w), reinterpret_cast<fftwf_complex*>(tmp.data()), out);
  float inv = 1.0f / (float(h) * float(w));
  int64_t n = int64_t(h) * w;
  for (int64_t i = 0; i < n; ++i) out[i] *= inv;
}

void irfft2(int h, int w, const std::complex<double>* in, double* out) {
  std::vector<std::complex<double>> tmp(in, in + size_t(h) * size_t(w / 2 + 1));
  fftw_execute_dft_c2r(plan_d(kC2R2, h, w), reinterpret_cast<fftw_complex*>(tmp.data()), out);
  double inv = 1.0 / (double(h) * double(w));
  int64_t n = int64_t(h) * w;
  for (int64_t i = 0; i < n; ++i) out[i] *= inv;
}

}  // namespace radonkit::fft
