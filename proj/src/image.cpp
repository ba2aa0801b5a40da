#include "pba/image.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace pba {

Image::Image(std::size_t n, double value) : n_(n), pixels_(n * n, value) {}

double Image::sum() const noexcept {
    return std::accumulate(pixels_.begin(), pixels_.end(), 0.0);
}

double Image::norm() const noexcept { return norm2(pixels_); }

Volume::Volume(std::size_t nx, std::size_t ny, std::size_t nz, double value)
    : nx_(nx), ny_(ny), nz_(nz), voxels_(nx * ny * nz, value) {}

Image Volume::slice(std::size_t x) const {
    if (ny_ != nz_)
        throw std::invalid_argument("Volume::slice: slices must be square (ny == nz)");
    if (x >= nx_)
        throw std::out_of_range("Volume::slice: x out of range");
    Image out(ny_);
    const auto plane = voxels_.begin() + static_cast<std::ptrdiff_t>(x * ny_ * nz_);
    std::copy(plane, plane + static_cast<std::ptrdiff_t>(ny_ * nz_), out.pixels().begin());
    return out;
}

void Volume::set_slice(std::size_t x, const Image& image) {
    if (ny_ != nz_ || image.size() != ny_)
        throw std::invalid_argument("Volume::set_slice: slice dimensions do not match volume");
    if (x >= nx_)
        throw std::out_of_range("Volume::set_slice: x out of range");
    std::copy(image.pixels().begin(), image.pixels().end(),
              voxels_.begin() + static_cast<std::ptrdiff_t>(x * ny_ * nz_));
}

double Volume::sum() const noexcept {
    return std::accumulate(voxels_.begin(), voxels_.end(), 0.0);
}

double Volume::norm() const noexcept { return norm2(voxels_); }

double dot(std::span<const double> a, std::span<const double> b) noexcept {
    double acc = 0.0;
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i)
        acc += a[i] * b[i];
    return acc;
}

double norm2(std::span<const double> a) noexcept { return std::sqrt(dot(a, a)); }

}  // namespace pba
