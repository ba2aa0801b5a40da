#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pba/image.hpp"

namespace pba {

/// Parallel-beam acquisition geometry: `n_det` unit-spaced detector bins
/// centered on the grid and a strictly increasing list of angles in degrees.
struct Geometry {
    std::size_t n_det{0};
    std::vector<double> angles_deg;

    /// Angles start, start+step, ..., stop (inclusive). `step` must divide the range.
    static Geometry uniform(std::size_t n_det, double start_deg, double stop_deg, double step_deg);

    [[nodiscard]] std::size_t num_angles() const noexcept { return angles_deg.size(); }
    [[nodiscard]] std::vector<double> angles_rad() const;

    /// Throws std::invalid_argument unless n_det >= 1, at least one angle, angles
    /// strictly increasing, inside [-90, 180) and spanning less than 180 degrees.
    void validate() const;

    friend bool operator==(const Geometry&, const Geometry&) = default;
};

/// n_det x M matrix of line integrals; column m is the projection at angle m
/// and is stored contiguously.
class Sinogram {
public:
    Sinogram() = default;
    explicit Sinogram(Geometry geometry);

    [[nodiscard]] const Geometry& geometry() const noexcept { return geometry_; }
    [[nodiscard]] std::size_t n_det() const noexcept { return geometry_.n_det; }
    [[nodiscard]] std::size_t num_angles() const noexcept { return geometry_.num_angles(); }

    double& operator()(std::size_t det, std::size_t angle) noexcept { return data_[angle * n_det() + det]; }
    double operator()(std::size_t det, std::size_t angle) const noexcept { return data_[angle * n_det() + det]; }

    [[nodiscard]] std::span<double> column(std::size_t m) noexcept { return {data_.data() + m * n_det(), n_det()}; }
    [[nodiscard]] std::span<const double> column(std::size_t m) const noexcept { return {data_.data() + m * n_det(), n_det()}; }

    [[nodiscard]] std::span<double> data() noexcept { return data_; }
    [[nodiscard]] std::span<const double> data() const noexcept { return data_; }

    [[nodiscard]] double norm() const noexcept { return norm2(data_); }

    friend bool operator==(const Sinogram&, const Sinogram&) = default;

private:
    Geometry geometry_;
    std::vector<double> data_;
};

/// Projection images for every angle of a rotation about the x-axis:
/// nx x n_det x M. Each x-row across all angles forms an ordinary sinogram.
class ProjectionStack {
public:
    ProjectionStack() = default;
    ProjectionStack(Geometry geometry, std::size_t nx);

    [[nodiscard]] const Geometry& geometry() const noexcept { return geometry_; }
    [[nodiscard]] std::size_t nx() const noexcept { return nx_; }
    [[nodiscard]] std::size_t n_det() const noexcept { return geometry_.n_det; }
    [[nodiscard]] std::size_t num_angles() const noexcept { return geometry_.num_angles(); }

    double& at(std::size_t x, std::size_t det, std::size_t angle) noexcept {
        return data_[(x * num_angles() + angle) * n_det() + det];
    }
    double at(std::size_t x, std::size_t det, std::size_t angle) const noexcept {
        return data_[(x * num_angles() + angle) * n_det() + det];
    }

    [[nodiscard]] Sinogram sinogram(std::size_t x) const;
    void set_sinogram(std::size_t x, const Sinogram& s);

    [[nodiscard]] std::span<double> data() noexcept { return data_; }
    [[nodiscard]] std::span<const double> data() const noexcept { return data_; }

    friend bool operator==(const ProjectionStack&, const ProjectionStack&) = default;

private:
    Geometry geometry_;
    std::size_t nx_{0};
    std::vector<double> data_;
};

/// Ray-driven projector: each detector ray is sampled at unit steps and the
/// image is read by bilinear interpolation. At 0 degrees the ray through bin d
/// runs down image column d.
Sinogram forward(const Image& image, const Geometry& geometry);

/// Exact transpose of `forward`, accumulated from the same interpolation weights.
Image adjoint(const Sinogram& sinogram);

ProjectionStack forward3d(const Volume& volume, const Geometry& geometry);

}  // namespace pba
