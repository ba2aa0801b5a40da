#pragma once

#include <span>
#include <utility>
#include <vector>

#include "pba/align.hpp"
#include "pba/image.hpp"
#include "pba/misalign.hpp"

namespace pba {

/// Relative L2 error after removing the best circular translation.
/// `alpha` moves along columns (x), `beta` along rows (y); recon is
/// approximately truth translated by (alpha, beta).
struct RegisteredError {
    double error{0.0};
    double alpha{0.0};
    double beta{0.0};
};

enum class Registration {
    integer,   // cross-correlation peak only
    subpixel,  // peak, then a local Fourier-shift refinement within half a pixel
};

/// out(row, col) = in(row - beta, col - alpha), circular.
Image translate(const Image& image, int alpha, int beta);
Volume translate(const Volume& volume, int dx, int dy, int dz);

double relative_error(std::span<const double> recon, std::span<const double> truth);

/// Translation maximizing circular cross-correlation (evaluated with a 2D FFT
/// product), then ||recon shifted back - truth|| / ||truth||. In subpixel mode
/// the integer peak is refined by minimizing the distance over Fourier
/// translations within half a pixel of it; the result never exceeds the
/// integer-registered or the unregistered error.
/// Throws std::domain_error when truth is identically zero.
RegisteredError registered_error(const Image& recon, const Image& truth,
                                 Registration mode = Registration::subpixel);

/// 3D analogue over circular translations in x, y and z.
double registered_error(const Volume& recon, const Volume& truth, Registration mode = Registration::subpixel);

/// Circular Fourier translation along each axis (index rotation for integer
/// amounts), same convention as `translate`.
Image translate_fourier(const Image& image, double alpha, double beta);

/// Column shifts alpha cos(theta_m) + beta sin(theta_m) induced in the
/// sinogram by translating the image by (alpha, beta).
std::vector<double> sinogram_shift_of_translation(double alpha, double beta, std::span<const double> angles_deg);

/// sum_m |eps_m(l)| for each update. Throws std::invalid_argument on an empty history.
std::vector<double> shift_totals(const ShiftHistory& history);

/// Least-squares (alpha, beta) explaining `shifts` as an image translation.
std::pair<double, double> fit_translation_gauge(const ShiftSet& shifts, std::span<const double> angles_deg);

/// `shifts` with its best-fit translation pattern removed.
ShiftSet remove_translation_gauge(const ShiftSet& shifts, std::span<const double> angles_deg);

}  // namespace pba
