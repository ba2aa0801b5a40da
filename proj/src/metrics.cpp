#include "pba/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "fft.hpp"

namespace pba {
namespace {

long wrap(long i, long n) { return ((i % n) + n) % n; }

// Signed lag for FFT index i of a length-n axis.
long signed_lag(long i, long n) { return i <= n / 2 ? i : i - n; }

// Index of the circular cross-correlation maximum of a and b over `dims`,
// where corr[shift] = sum_x a[x + shift] b[x]. Ties go to the smallest lag norm.
std::vector<long> best_translation(std::span<const double> a, std::span<const double> b, const std::vector<int>& dims) {
    const detail::cvec ca(a.begin(), a.end()), cb(b.begin(), b.end());
    auto fa = detail::fftn(ca, dims);
    const auto fb = detail::fftn(cb, dims);
    for (std::size_t i = 0; i < fa.size(); ++i)
        fa[i] *= std::conj(fb[i]);
    const auto corr = detail::fftn(fa, dims, true);

    std::size_t best = 0;
    double best_score = corr[0].real();
    long best_norm = 0;
    std::vector<long> lag(dims.size());
    for (std::size_t i = 0; i < corr.size(); ++i) {
        std::size_t rem = i;
        long norm = 0;
        for (std::size_t d = dims.size(); d-- > 0;) {
            const long n = dims[d];
            lag[d] = signed_lag(static_cast<long>(rem % static_cast<std::size_t>(n)), n);
            rem /= static_cast<std::size_t>(n);
            norm += lag[d] * lag[d];
        }
        const double score = corr[i].real();
        if (score > best_score || (score == best_score && norm < best_norm)) {
            best = i;
            best_score = score;
            best_norm = norm;
        }
    }
    std::vector<long> out(dims.size());
    std::size_t rem = best;
    for (std::size_t d = dims.size(); d-- > 0;) {
        const long n = dims[d];
        out[d] = signed_lag(static_cast<long>(rem % static_cast<std::size_t>(n)), n);
        rem /= static_cast<std::size_t>(n);
    }
    return out;
}

// Per-axis Fourier multipliers for moved[x] = in[x + tau] on a length-n axis.
// The Nyquist bin of an even axis takes cos(pi tau) so real input stays real.
std::vector<std::complex<double>> axis_multipliers(int n, double tau) {
    std::vector<std::complex<double>> out(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        if (n % 2 == 0 && j == n / 2) {
            out[static_cast<std::size_t>(j)] = std::cos(std::numbers::pi * tau);
            continue;
        }
        const double f = static_cast<double>(signed_lag(j, n));
        out[static_cast<std::size_t>(j)] = std::polar(1.0, 2.0 * std::numbers::pi * f * tau / n);
    }
    return out;
}

// Spectrum of `in` moved by tau; multiplied in place.
void move_spectrum(detail::cvec& spec, const std::vector<int>& dims, const std::vector<double>& tau) {
    std::vector<std::vector<std::complex<double>>> mult;
    for (std::size_t d = 0; d < dims.size(); ++d)
        mult.push_back(axis_multipliers(dims[d], tau[d]));
    std::vector<std::size_t> idx(dims.size(), 0);
    for (auto& v : spec) {
        std::complex<double> m = 1.0;
        for (std::size_t d = 0; d < dims.size(); ++d)
            m *= mult[d][idx[d]];
        v *= m;
        for (std::size_t d = dims.size(); d-- > 0;) {
            if (++idx[d] < static_cast<std::size_t>(dims[d])) break;
            idx[d] = 0;
        }
    }
}

// Squared distance between recon moved by tau and truth, from their spectra (Parseval).
double moved_distance2(const detail::cvec& rspec, const detail::cvec& tspec, const std::vector<int>& dims,
                       const std::vector<double>& tau) {
    detail::cvec moved = rspec;
    move_spectrum(moved, dims, tau);
    double acc = 0.0;
    for (std::size_t i = 0; i < moved.size(); ++i)
        acc += std::norm(moved[i] - tspec[i]);
    return acc / static_cast<double>(moved.size());
}

struct Refined {
    std::vector<double> tau;
    double distance2;
};

// Coordinate-wise golden-section search for the translation within half a
// pixel of `start` that minimizes the distance; never worse than `start`.
Refined refine_translation(std::span<const double> recon, std::span<const double> truth, const std::vector<int>& dims,
                           const std::vector<long>& start) {
    const detail::cvec rspec = detail::fftn(detail::cvec(recon.begin(), recon.end()), dims);
    const detail::cvec tspec = detail::fftn(detail::cvec(truth.begin(), truth.end()), dims);
    Refined best{std::vector<double>(start.begin(), start.end()), 0.0};
    best.distance2 = moved_distance2(rspec, tspec, dims, best.tau);
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int sweep = 0; sweep < 3; ++sweep) {
        for (std::size_t d = 0; d < dims.size(); ++d) {
            auto tau = best.tau;
            auto eval = [&](double t) {
                tau[d] = t;
                return moved_distance2(rspec, tspec, dims, tau);
            };
            double a = static_cast<double>(start[d]) - 0.5, b = static_cast<double>(start[d]) + 0.5;
            double x1 = b - g * (b - a), x2 = a + g * (b - a);
            double f1 = eval(x1), f2 = eval(x2);
            while (b - a > 1e-4) {
                if (f1 < f2) {
                    b = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = b - g * (b - a);
                    f1 = eval(x1);
                } else {
                    a = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = a + g * (b - a);
                    f2 = eval(x2);
                }
            }
            const double t = f1 < f2 ? x1 : x2;
            const double f = std::min(f1, f2);
            if (f < best.distance2) {
                best.tau[d] = t;
                best.distance2 = f;
            }
        }
    }
    return best;
}

}  // namespace

Image translate_fourier(const Image& image, double alpha, double beta) {
    const int n = static_cast<int>(image.size());
    const std::vector<int> dims{n, n};
    auto spec = detail::fftn(detail::cvec(image.pixels().begin(), image.pixels().end()), dims);
    move_spectrum(spec, dims, {-beta, -alpha});
    const auto back = detail::fftn(spec, dims, true);
    Image out(image.size());
    const double scale = 1.0 / static_cast<double>(back.size());
    for (std::size_t i = 0; i < back.size(); ++i)
        out.pixels()[i] = back[i].real() * scale;
    return out;
}

Image translate(const Image& image, int alpha, int beta) {
    const long n = static_cast<long>(image.size());
    Image out(image.size());
    for (long r = 0; r < n; ++r)
        for (long c = 0; c < n; ++c)
            out(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) =
                image(static_cast<std::size_t>(wrap(r - beta, n)), static_cast<std::size_t>(wrap(c - alpha, n)));
    return out;
}

Volume translate(const Volume& volume, int dx, int dy, int dz) {
    const long nx = static_cast<long>(volume.nx()), ny = static_cast<long>(volume.ny()), nz = static_cast<long>(volume.nz());
    Volume out(volume.nx(), volume.ny(), volume.nz());
    for (long x = 0; x < nx; ++x)
        for (long y = 0; y < ny; ++y)
            for (long z = 0; z < nz; ++z)
                out.at(static_cast<std::size_t>(x), static_cast<std::size_t>(y), static_cast<std::size_t>(z)) =
                    volume.at(static_cast<std::size_t>(wrap(x - dx, nx)), static_cast<std::size_t>(wrap(y - dy, ny)),
                              static_cast<std::size_t>(wrap(z - dz, nz)));
    return out;
}

double relative_error(std::span<const double> recon, std::span<const double> truth) {
    if (recon.size() != truth.size())
        throw std::invalid_argument("relative_error: size mismatch");
    const double tn = norm2(truth);
    if (tn == 0.0)
        throw std::domain_error("relative_error: reference is identically zero");
    double acc = 0.0;
    for (std::size_t i = 0; i < recon.size(); ++i) {
        const double d = recon[i] - truth[i];
        acc += d * d;
    }
    return std::sqrt(acc) / tn;
}

RegisteredError registered_error(const Image& recon, const Image& truth, Registration mode) {
    if (recon.size() != truth.size())
        throw std::invalid_argument("registered_error: image sizes differ");
    if (truth.norm() == 0.0)
        throw std::domain_error("registered_error: truth is identically zero");
    const int n = static_cast<int>(truth.size());
    // dims in row-major order: rows (beta), then columns (alpha)
    const std::vector<int> dims{n, n};
    const auto lag = best_translation(recon.pixels(), truth.pixels(), dims);
    RegisteredError out;
    out.beta = static_cast<double>(lag[0]);
    out.alpha = static_cast<double>(lag[1]);
    out.error = relative_error(translate(recon, static_cast<int>(-lag[1]), static_cast<int>(-lag[0])).pixels(),
                               truth.pixels());
    if (mode == Registration::subpixel) {
        const auto r = refine_translation(recon.pixels(), truth.pixels(), dims, lag);
        const double e = std::sqrt(r.distance2) / truth.norm();
        if (e < out.error) {
            out.error = e;
            out.beta = r.tau[0];
            out.alpha = r.tau[1];
        }
    }
    const double plain = relative_error(recon.pixels(), truth.pixels());
    if (plain <= out.error) {
        out.error = plain;
        out.alpha = 0;
        out.beta = 0;
    }
    return out;
}

double registered_error(const Volume& recon, const Volume& truth, Registration mode) {
    if (recon.nx() != truth.nx() || recon.ny() != truth.ny() || recon.nz() != truth.nz())
        throw std::invalid_argument("registered_error: volume sizes differ");
    if (truth.norm() == 0.0)
        throw std::domain_error("registered_error: truth is identically zero");
    // storage order is x, z, y
    const std::vector<int> dims{static_cast<int>(truth.nx()), static_cast<int>(truth.nz()), static_cast<int>(truth.ny())};
    const auto lag = best_translation(recon.voxels(), truth.voxels(), dims);
    const Volume moved = translate(recon, static_cast<int>(-lag[0]), static_cast<int>(-lag[2]), static_cast<int>(-lag[1]));
    double err = std::min(relative_error(moved.voxels(), truth.voxels()), relative_error(recon.voxels(), truth.voxels()));
    if (mode == Registration::subpixel) {
        const auto r = refine_translation(recon.voxels(), truth.voxels(), dims, lag);
        err = std::min(err, std::sqrt(r.distance2) / truth.norm());
    }
    return err;
}

std::vector<double> sinogram_shift_of_translation(double alpha, double beta, std::span<const double> angles_deg) {
    std::vector<double> out;
    out.reserve(angles_deg.size());
    for (double a : angles_deg) {
        const double t = a * std::numbers::pi / 180.0;
        out.push_back(alpha * std::cos(t) + beta * std::sin(t));
    }
    return out;
}

std::vector<double> shift_totals(const ShiftHistory& history) {
    if (history.empty())
        throw std::invalid_argument("shift_totals: empty history");
    return history.totals();
}

std::pair<double, double> fit_translation_gauge(const ShiftSet& shifts, std::span<const double> angles_deg) {
    if (shifts.size() != angles_deg.size())
        throw std::invalid_argument("fit_translation_gauge: size mismatch");
    double scc = 0, sss = 0, scs = 0, sec = 0, ses = 0;
    for (std::size_t m = 0; m < shifts.size(); ++m) {
        const double t = angles_deg[m] * std::numbers::pi / 180.0;
        const double c = std::cos(t), s = std::sin(t), e = shifts.eps[m];
        scc += c * c;
        sss += s * s;
        scs += c * s;
        sec += e * c;
        ses += e * s;
    }
    const double det = scc * sss - scs * scs;
    if (std::abs(det) < 1e-12) {
        // Single angle (or collinear set): only the component along one direction is defined.
        const double denom = scc + sss;
        return denom > 0 ? std::pair{sec / denom, ses / denom} : std::pair{0.0, 0.0};
    }
    return {(sec * sss - ses * scs) / det, (ses * scc - sec * scs) / det};
}

ShiftSet remove_translation_gauge(const ShiftSet& shifts, std::span<const double> angles_deg) {
    const auto [a, b] = fit_translation_gauge(shifts, angles_deg);
    const auto pattern = sinogram_shift_of_translation(a, b, angles_deg);
    ShiftSet out = shifts;
    for (std::size_t m = 0; m < out.size(); ++m)
        out.eps[m] -= pattern[m];
    return out;
}

}  // namespace pba
