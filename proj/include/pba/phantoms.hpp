#pragma once

#include <cstdint>

#include "pba/image.hpp"

namespace pba {

/// Standard ten-ellipse Shepp-Logan head phantom, sampled at pixel centers and
/// rescaled to [0, 1].
Image shepp_logan(std::size_t n);

/// Geometric test images built from disjoint disks, annuli and rectangles.
/// `variant` selects one of four layouts in 1..4; `seed` jitters positions and
/// sizes.
Image shapes_phantom(std::size_t n, int variant, std::uint64_t seed);

/// Analytic mass (sum of intensity times area, in pixel units) of the shapes
/// that `shapes_phantom` would render for the same arguments.
double shapes_phantom_analytic_mass(std::size_t n, int variant, std::uint64_t seed);

/// Disjoint ellipsoids with spherical voids, supported inside the cylinder
/// about the x-axis and away from the x faces.
Volume blob_volume(std::size_t nx, std::size_t ny, std::size_t nz, std::uint64_t seed);

double blob_volume_analytic_mass(std::size_t nx, std::size_t ny, std::size_t nz, std::uint64_t seed);

}  // namespace pba
