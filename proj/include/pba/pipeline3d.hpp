#pragma once

#include <cstddef>
#include <vector>

#include "pba/align.hpp"
#include "pba/image.hpp"
#include "pba/misalign.hpp"
#include "pba/projector.hpp"
#include "pba/recon.hpp"

namespace pba {

/// Translational misalignment of a projection stack: per angle, an offset
/// along the rotation axis (x) and one across it (y).
struct ShiftSet3D {
    ShiftSet x_shifts;
    ShiftSet y_shifts;
};

/// data_m(x, y) = ideal_m(x - x_m, y - y_m), applied with Fourier shifts
/// (exact index rotation for integer values).
ProjectionStack apply_shifts(const ProjectionStack& stack, const ShiftSet3D& shifts);

struct MassAlignResult {
    ProjectionStack stack;
    ShiftSet x_shifts;  // estimated x_m, integer-valued
};

/// Aligns projections along x using the fact that the mass profile
/// P_m(x) = sum_y data_m(x, y) does not depend on the angle. The reference
/// profile is the per-x median across angles; each projection is rotated by
/// the integer lag maximizing its cross-correlation with the reference, and
/// the reference is rebuilt until the lags stop changing. The x_m are only
/// defined up to a common offset.
/// Throws std::domain_error for an all-zero stack.
MassAlignResult mass_align_x(const ProjectionStack& stack);

/// `count` slice indices evenly spaced through the central half of [0, nx).
std::vector<std::size_t> default_slice_subset(std::size_t nx, std::size_t count = 8);

struct Pba3dResult {
    ShiftHistory history;
    Volume volume;
    ProjectionStack realigned;
};

/// Phase-based y-alignment driven by a subset of x-slices: each update
/// reconstructs every subset slice independently for J iterations, estimates
/// per-angle shifts per slice, and averages them across slices. After L
/// updates the accumulated shifts are applied to the whole stack and every
/// slice is reconstructed with L*J iterations.
Pba3dResult pba3d(const ProjectionStack& stack, const std::vector<std::size_t>& slice_subset,
                  const ReconConfig& recon_cfg, const AlignConfig& align_cfg);

/// Gaussian noise with sigma = mean(|stack|) / snr over all entries.
ProjectionStack add_noise(const ProjectionStack& stack, const NoiseSpec& spec);

/// ||A f - s|| / ||s|| over all slices jointly.
double residual(const Volume& volume, const ProjectionStack& stack);

/// Slice-by-slice reconstruction from f = 0.
Volume reconstruct_volume(const ProjectionStack& stack, const ReconConfig& recon_cfg, int iters);

}  // namespace pba
