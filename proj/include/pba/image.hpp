#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pba {

/// Square n x n grid of real intensities, stored row-major.
/// Row index runs along y, column index along x.
class Image {
public:
    Image() = default;
    explicit Image(std::size_t n, double value = 0.0);

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    [[nodiscard]] std::size_t count() const noexcept { return pixels_.size(); }

    double& operator()(std::size_t row, std::size_t col) noexcept { return pixels_[row * n_ + col]; }
    double operator()(std::size_t row, std::size_t col) const noexcept { return pixels_[row * n_ + col]; }

    [[nodiscard]] std::span<double> pixels() noexcept { return pixels_; }
    [[nodiscard]] std::span<const double> pixels() const noexcept { return pixels_; }

    [[nodiscard]] double sum() const noexcept;
    [[nodiscard]] double norm() const noexcept;

    friend bool operator==(const Image&, const Image&) = default;

private:
    std::size_t n_{0};
    std::vector<double> pixels_;
};

/// nx slices perpendicular to the rotation (x) axis, each an ny x nz plane.
/// Within a slice, the image column is y and the image row is z.
class Volume {
public:
    Volume() = default;
    Volume(std::size_t nx, std::size_t ny, std::size_t nz, double value = 0.0);

    [[nodiscard]] std::size_t nx() const noexcept { return nx_; }
    [[nodiscard]] std::size_t ny() const noexcept { return ny_; }
    [[nodiscard]] std::size_t nz() const noexcept { return nz_; }

    double& at(std::size_t x, std::size_t y, std::size_t z) noexcept { return voxels_[(x * nz_ + z) * ny_ + y]; }
    double at(std::size_t x, std::size_t y, std::size_t z) const noexcept { return voxels_[(x * nz_ + z) * ny_ + y]; }

    /// Copy of the (y, z) plane at x. Requires ny == nz.
    [[nodiscard]] Image slice(std::size_t x) const;
    void set_slice(std::size_t x, const Image& image);

    [[nodiscard]] std::span<double> voxels() noexcept { return voxels_; }
    [[nodiscard]] std::span<const double> voxels() const noexcept { return voxels_; }

    [[nodiscard]] double sum() const noexcept;
    [[nodiscard]] double norm() const noexcept;

    friend bool operator==(const Volume&, const Volume&) = default;

private:
    std::size_t nx_{0}, ny_{0}, nz_{0};
    std::vector<double> voxels_;
};

double dot(std::span<const double> a, std::span<const double> b) noexcept;
double norm2(std::span<const double> a) noexcept;

}  // namespace pba
