#pragma once

#include <complex>
#include <cstdint>

namespace radonkit::fft {

// Real-to-complex transforms backed by FFTW. Plans are created with
// FFTW_ESTIMATE and cached, so repeated transforms of the same size are
// cheap and results do not depend on buffer alignment or measurement runs.
// All functions are safe to call from parallel_for workers.
//
// Spectra use the usual half layout: n/2+1 bins for 1D, h x (w/2+1) for 2D.
// Inverse transforms include the 1/n (or 1/(h*w)) normalization.

void rfft(int n, const float* in, std::complex<float>* out);
void irfft(int n, const std::complex<float>* in, float* out);
void rfft(int n, const double* in, std::complex<double>* out);
void irfft(int n, const std::complex<double>* in, double* out);

void rfft2(int h, int w, const float* in, std::complex<float>* out);
void irfft2(int h, int w, const std::complex<float>* in, float* out);
void rfft2(int h, int w, const double* in, std::complex<double>* out);
void irfft2(int h, int w, const std::complex<double>* in, double* out);

}  // namespace radonkit::fft
