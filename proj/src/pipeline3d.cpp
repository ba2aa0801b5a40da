#include "pba/pipeline3d.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "pba/fourier.hpp"

namespace pba {
namespace {

std::vector<double> x_line(const ProjectionStack& s, std::size_t det, std::size_t m) {
    std::vector<double> out(s.nx());
    for (std::size_t x = 0; x < s.nx(); ++x)
        out[x] = s.at(x, det, m);
    return out;
}

void set_x_line(ProjectionStack& s, std::size_t det, std::size_t m, std::span<const double> line) {
    for (std::size_t x = 0; x < s.nx(); ++x)
        s.at(x, det, m) = line[x];
}

std::vector<double> mass_profile(const ProjectionStack& s, std::size_t m) {
    std::vector<double> out(s.nx(), 0.0);
    for (std::size_t x = 0; x < s.nx(); ++x)
        for (std::size_t d = 0; d < s.n_det(); ++d)
            out[x] += s.at(x, d, m);
    return out;
}

// Rotates projection m along x so that out(x) = in(x + lag).
void roll_projection_x(ProjectionStack& s, std::size_t m, long lag) {
    for (std::size_t d = 0; d < s.n_det(); ++d) {
        const auto line = x_line(s, d, m);
        set_x_line(s, d, m, rotate(line, -lag));
    }
}

}  // namespace

ProjectionStack apply_shifts(const ProjectionStack& stack, const ShiftSet3D& shifts) {
    const std::size_t M = stack.num_angles();
    if (shifts.x_shifts.size() != M || shifts.y_shifts.size() != M)
        throw std::invalid_argument("apply_shifts: shift count does not match the number of angles");
    ProjectionStack out = stack;
    for (std::size_t m = 0; m < M; ++m) {
        const double xm = shifts.x_shifts.eps[m];
        if (xm == 0.0) continue;
        for (std::size_t d = 0; d < stack.n_det(); ++d) {
            const auto line = x_line(out, d, m);
            const bool integral = std::floor(xm) == xm;
            set_x_line(out, d, m, integral ? rotate(line, static_cast<long>(xm)) : fractional_shift(line, -xm));
        }
    }
    for (std::size_t x = 0; x < out.nx(); ++x)
        out.set_sinogram(x, apply_shifts(out.sinogram(x), shifts.y_shifts));
    return out;
}

MassAlignResult mass_align_x(const ProjectionStack& stack) {
    const std::size_t M = stack.num_angles(), nx = stack.nx();
    if (M == 0 || nx == 0)
        throw std::invalid_argument("mass_align_x: empty stack");
    if (std::ranges::all_of(stack.data(), [](double v) { return v == 0.0; }))
        throw std::domain_error("mass_align_x: stack is identically zero");

    std::vector<std::vector<double>> profiles(M);
    for (std::size_t m = 0; m < M; ++m)
        profiles[m] = mass_profile(stack, m);

    const int max_lag = static_cast<int>((nx - 1) / 2);
    std::vector<long> lags(M, 0);
    std::vector<double> column(M);
    for (int pass = 0; pass < 10; ++pass) {
        std::vector<double> reference(nx);
        for (std::size_t x = 0; x < nx; ++x) {
            for (std::size_t m = 0; m < M; ++m)
                column[m] = rotate(profiles[m], -lags[m])[x];
            std::ranges::nth_element(column, column.begin() + static_cast<std::ptrdiff_t>(M / 2));
            double med = column[M / 2];
            if (M % 2 == 0) {
                const double lower = *std::max_element(column.begin(), column.begin() + static_cast<std::ptrdiff_t>(M / 2));
                med = 0.5 * (med + lower);
            }
            reference[x] = med;
        }
        bool changed = false;
        for (std::size_t m = 0; m < M; ++m) {
            const long lag = best_circular_lag(profiles[m], reference, max_lag);
            changed = changed || lag != lags[m];
            lags[m] = lag;
        }
        if (!changed) break;
    }

    MassAlignResult out{stack, ShiftSet{std::vector<double>(M, 0.0)}};
    for (std::size_t m = 0; m < M; ++m) {
        out.x_shifts.eps[m] = static_cast<double>(lags[m]);
        if (lags[m] != 0) roll_projection_x(out.stack, m, lags[m]);
    }
    return out;
}

std::vector<std::size_t> default_slice_subset(std::size_t nx, std::size_t count) {
    if (nx == 0 || count == 0)
        throw std::invalid_argument("default_slice_subset: nx and count must be positive");
    count = std::min(count, nx);
    const double lo = static_cast<double>(nx) / 4.0;
    const double width = static_cast<double>(nx) / 2.0;
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < count; ++i) {
        const auto idx = static_cast<std::size_t>(std::floor(lo + (static_cast<double>(i) + 0.5) * width / static_cast<double>(count)));
        if (out.empty() || out.back() != idx) out.push_back(std::min(idx, nx - 1));
    }
    return out;
}

ProjectionStack add_noise(const ProjectionStack& stack, const NoiseSpec& spec) {
    const double sigma = noise_sigma(stack.data(), spec.snr);
    ProjectionStack out = stack;
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    for (double& v : out.data())
        v += sigma * dist(rng);
    return out;
}

double residual(const Volume& volume, const ProjectionStack& stack) {
    if (volume.nx() != stack.nx() || volume.ny() != stack.n_det())
        throw std::invalid_argument("residual: volume does not match the projection stack");
    double num = 0.0, den = 0.0;
    for (std::size_t x = 0; x < stack.nx(); ++x) {
        const Sinogram s = stack.sinogram(x);
        const Sinogram af = forward(volume.slice(x), stack.geometry());
        for (std::size_t i = 0; i < s.data().size(); ++i) {
            const double d = af.data()[i] - s.data()[i];
            num += d * d;
            den += s.data()[i] * s.data()[i];
        }
    }
    if (den == 0.0)
        throw std::domain_error("residual: projection stack is identically zero");
    return std::sqrt(num / den);
}

Volume reconstruct_volume(const ProjectionStack& stack, const ReconConfig& recon_cfg, int iters) {
    const std::size_t n = stack.n_det();
    Volume vol(stack.nx(), n, n);
    const Reconstructor prototype(stack.geometry(), recon_cfg);
    for (std::size_t x = 0; x < stack.nx(); ++x) {
        Reconstructor solver = prototype;
        Image f(n);
        const Sinogram s = stack.sinogram(x);
        if (s.norm() > 0.0) solver.iterate(f, s, iters);
        vol.set_slice(x, f);
    }
    return vol;
}

Pba3dResult pba3d(const ProjectionStack& stack, const std::vector<std::size_t>& slice_subset,
                  const ReconConfig& recon_cfg, const AlignConfig& align_cfg) {
    if (slice_subset.empty())
        throw std::invalid_argument("pba3d: slice subset is empty");
    for (std::size_t x : slice_subset)
        if (x >= stack.nx())
            throw std::invalid_argument("pba3d: slice index " + std::to_string(x) + " out of range");
    const Geometry& geo = stack.geometry();
    align_cfg.validate(geo.n_det);

    const Reconstructor prototype(geo, recon_cfg);
    std::vector<Sinogram> raw, current;
    std::vector<Reconstructor> solvers;
    std::vector<Image> images;
    for (std::size_t x : slice_subset) {
        raw.push_back(stack.sinogram(x));
        current.push_back(raw.back());
        solvers.push_back(prototype);
        images.emplace_back(geo.n_det);
    }

    const std::size_t M = geo.num_angles();
    Pba3dResult result;
    ShiftSet total{std::vector<double>(M, 0.0)};
    for (int l = 0; l < align_cfg.outer_updates; ++l) {
        ShiftSet mean{std::vector<double>(M, 0.0)};
        for (std::size_t i = 0; i < raw.size(); ++i) {
            solvers[i].iterate(images[i], current[i], align_cfg.inner_iters);
            const ShiftSet est = pba_estimate(current[i], forward(images[i], geo), align_cfg.freq_grid);
            mean = mean + est;
        }
        for (double& e : mean.eps)
            e /= static_cast<double>(raw.size());
        total = total + mean;
        result.history.updates.push_back(mean);
        for (std::size_t i = 0; i < raw.size(); ++i)
            current[i] = apply_shifts(raw[i], total.negated());
    }

    result.realigned = apply_shifts(stack, ShiftSet3D{ShiftSet{std::vector<double>(M, 0.0)}, total.negated()});
    result.volume = reconstruct_volume(result.realigned, recon_cfg, align_cfg.outer_updates * align_cfg.inner_iters);
    return result;
}

}  // namespace pba
