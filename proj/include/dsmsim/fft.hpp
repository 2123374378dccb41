#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace dsmsim {

using cdouble = std::complex<double>;

// Unnormalized in-place DFT of arbitrary length, backed by FFTW.
// forward:  X[k] = sum_n x[n] exp(-i 2 pi k n / N)
// inverse:  x[n] = sum_k X[k] exp(+i 2 pi k n / N)   (no 1/N)
// Plans are cached per thread; planning itself is serialized because the
// FFTW planner is not reentrant.
void fft_forward(std::span<cdouble> data);
void fft_inverse(std::span<cdouble> data);

// Smallest 2^a 3^b 5^c >= n; FFTW is fastest on these sizes.
std::size_t good_fft_size(std::size_t n);

// Linear convolution y = x * h (length x.size() + h.size() - 1) via FFT.
std::vector<cdouble> fft_convolve(std::span<const cdouble> x, std::span<const cdouble> h);
std::vector<cdouble> fft_convolve(std::span<const cdouble> x, std::span<const double> h);

}  // namespace dsmsim
