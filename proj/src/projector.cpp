#include "pba/projector.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace pba {

Geometry Geometry::uniform(std::size_t n_det, double start_deg, double stop_deg, double step_deg) {
    if (!(step_deg > 0.0))
        throw std::invalid_argument("Geometry::uniform: step must be positive");
    const double span = (stop_deg - start_deg) / step_deg;
    const double count = std::round(span);
    if (span < 0.0 || std::abs(span - count) > 1e-9)
        throw std::invalid_argument("Geometry::uniform: step does not divide [start, stop]");
    Geometry g;
    g.n_det = n_det;
    for (long i = 0; i <= static_cast<long>(count); ++i)
        g.angles_deg.push_back(start_deg + static_cast<double>(i) * step_deg);
    g.validate();
    return g;
}

std::vector<double> Geometry::angles_rad() const {
    std::vector<double> out(angles_deg.size());
    std::transform(angles_deg.begin(), angles_deg.end(), out.begin(),
                   [](double a) { return a * std::numbers::pi / 180.0; });
    return out;
}

void Geometry::validate() const {
    if (n_det == 0)
        throw std::invalid_argument("Geometry: n_det must be positive");
    if (angles_deg.empty())
        throw std::invalid_argument("Geometry: at least one angle is required");
    for (std::size_t m = 0; m < angles_deg.size(); ++m) {
        const double a = angles_deg[m];
        if (!std::isfinite(a) || a < -90.0 || a >= 180.0)
            throw std::invalid_argument("Geometry: angle " + std::to_string(a) + " outside [-90, 180)");
        if (m > 0 && !(a > angles_deg[m - 1]))
            throw std::invalid_argument("Geometry: angles must be strictly increasing");
    }
    if (angles_deg.back() - angles_deg.front() >= 180.0)
        throw std::invalid_argument("Geometry: angular span must be below 180 degrees");
}

Sinogram::Sinogram(Geometry geometry)
    : geometry_(std::move(geometry)), data_(geometry_.n_det * geometry_.num_angles(), 0.0) {}

ProjectionStack::ProjectionStack(Geometry geometry, std::size_t nx)
    : geometry_(std::move(geometry)), nx_(nx), data_(nx_ * geometry_.n_det * geometry_.num_angles(), 0.0) {}

Sinogram ProjectionStack::sinogram(std::size_t x) const {
    Sinogram s(geometry_);
    const std::size_t block = n_det() * num_angles();
    std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(x * block), block, s.data().begin());
    return s;
}

void ProjectionStack::set_sinogram(std::size_t x, const Sinogram& s) {
    if (s.geometry() != geometry_)
        throw std::invalid_argument("ProjectionStack::set_sinogram: geometry mismatch");
    const std::size_t block = n_det() * num_angles();
    std::copy_n(s.data().begin(), block, data_.begin() + static_cast<std::ptrdiff_t>(x * block));
}

namespace {

// Visits every (pixel index, weight) pair contributing to detector bin `det`
// at the angle with direction (cos_t, sin_t). Shared by forward and adjoint so
// the two are transposes of each other by construction.
template <typename Visit>
void trace_ray(std::size_t n, double cos_t, double sin_t, std::size_t det, Visit&& visit) {
    const double c = (static_cast<double>(n) - 1.0) / 2.0;
    const double t = static_cast<double>(det) - c;
    const double hi_edge = static_cast<double>(n);
    constexpr double eps = 1e-12;

    // col(s) = c + t cos - s sin, row(s) = c + t sin + s cos; keep both in (-1, n).
    double s_lo = -1e300, s_hi = 1e300;
    const auto clip = [&](double base, double slope) {
        // base + slope * s in [-1 - c, n - c]
        if (std::abs(slope) < eps) {
            if (base < -1.0 - c || base > hi_edge - c) {
                s_lo = 1.0;
                s_hi = -1.0;
            }
            return;
        }
        double a = (-1.0 - c - base) / slope;
        double b = (hi_edge - c - base) / slope;
        if (a > b) std::swap(a, b);
        s_lo = std::max(s_lo, a);
        s_hi = std::min(s_hi, b);
    };
    clip(t * cos_t, -sin_t);
    clip(t * sin_t, cos_t);
    if (s_lo > s_hi) return;

    const long j_lo = static_cast<long>(std::ceil(s_lo + c));
    const long j_hi = static_cast<long>(std::floor(s_hi + c));
    const long ni = static_cast<long>(n);
    const double col_base = c + t * cos_t, row_base = c + t * sin_t;
    for (long j = j_lo; j <= j_hi; ++j) {
        const double s = static_cast<double>(j) - c;
        const double col = col_base - s * sin_t;
        const double row = row_base + s * cos_t;
        // col, row > -1 after clipping, so truncation of x + 1 is floor(x) + 1
        const long c0 = static_cast<long>(col + 1.0) - 1, r0 = static_cast<long>(row + 1.0) - 1;
        const double fc = col - static_cast<double>(c0), fr = row - static_cast<double>(r0);
        if (c0 >= 0 && r0 >= 0 && c0 + 1 < ni && r0 + 1 < ni) {
            const std::size_t base = static_cast<std::size_t>(r0 * ni + c0);
            visit(base, (1.0 - fr) * (1.0 - fc));
            visit(base + 1, (1.0 - fr) * fc);
            visit(base + n, fr * (1.0 - fc));
            visit(base + n + 1, fr * fc);
            continue;
        }
        const double w[4] = {(1.0 - fr) * (1.0 - fc), (1.0 - fr) * fc, fr * (1.0 - fc), fr * fc};
        const long rr[4] = {r0, r0, r0 + 1, r0 + 1};
        const long cc[4] = {c0, c0 + 1, c0, c0 + 1};
        for (int q = 0; q < 4; ++q) {
            if (rr[q] < 0 || rr[q] >= ni || cc[q] < 0 || cc[q] >= ni || w[q] == 0.0) continue;
            visit(static_cast<std::size_t>(rr[q] * ni + cc[q]), w[q]);
        }
    }
}

}  // namespace

Sinogram forward(const Image& image, const Geometry& geometry) {
    geometry.validate();
    if (image.size() != geometry.n_det)
        throw std::invalid_argument("forward: image side " + std::to_string(image.size()) +
                                    " does not match detector count " + std::to_string(geometry.n_det));
    Sinogram out(geometry);
    const auto px = image.pixels();
    const auto angles = geometry.angles_rad();
    const std::size_t n = image.size();
    for (std::size_t m = 0; m < angles.size(); ++m) {
        const double ct = std::cos(angles[m]), st = std::sin(angles[m]);
        auto col = out.column(m);
        for (std::size_t d = 0; d < n; ++d) {
            double acc = 0.0;
            trace_ray(n, ct, st, d, [&](std::size_t idx, double w) { acc += w * px[idx]; });
            col[d] = acc;
        }
    }
    return out;
}

Image adjoint(const Sinogram& sinogram) {
    const Geometry& geometry = sinogram.geometry();
    geometry.validate();
    const std::size_t n = geometry.n_det;
    Image out(n);
    auto px = out.pixels();
    const auto angles = geometry.angles_rad();
    for (std::size_t m = 0; m < angles.size(); ++m) {
        const double ct = std::cos(angles[m]), st = std::sin(angles[m]);
        const auto col = sinogram.column(m);
        for (std::size_t d = 0; d < n; ++d) {
            const double v = col[d];
            if (v == 0.0) continue;
            trace_ray(n, ct, st, d, [&](std::size_t idx, double w) { px[idx] += w * v; });
        }
    }
    return out;
}

ProjectionStack forward3d(const Volume& volume, const Geometry& geometry) {
    geometry.validate();
    if (volume.ny() != geometry.n_det || volume.nz() != geometry.n_det)
        throw std::invalid_argument("forward3d: volume (ny, nz) must both equal the detector count");
    ProjectionStack out(geometry, volume.nx());
    for (std::size_t x = 0; x < volume.nx(); ++x)
        out.set_sinogram(x, forward(volume.slice(x), geometry));
    return out;
}

}  // namespace pba
