#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

// Thin wrapper over FFTW's complex transforms. Forward transforms are
// unnormalized (e^{-i...}); inverse transforms are unnormalized (e^{+i...}).
namespace pba::detail {

using cvec = std::vector<std::complex<double>>;

cvec fft(std::span<const std::complex<double>> in, bool inverse = false);
cvec fft_real(std::span<const double> in);

/// Row-major transform over `dims` (2 or 3 dimensions).
cvec fftn(std::span<const std::complex<double>> in, std::span<const int> dims, bool inverse = false);

}  // namespace pba::detail
