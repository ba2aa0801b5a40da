#pragma once

#include <cstddef>

#include "pba/image.hpp"
#include "pba/projector.hpp"

namespace pba {

enum class Solver { sirt, tv };

struct ReconConfig {
    Solver solver{Solver::sirt};
    int inner_iters{10};
    bool nonneg{true};
    double tv_weight{0.0};       // lambda
    double admm_penalty{1.0};    // mu
    double sirt_relaxation{1.0};
    int cg_steps{5};

    void validate() const;
};

/// Diagonal SIRT normalizations: reciprocal row sums (per ray) and reciprocal
/// column sums (per pixel) of the projector, with zero sums mapped to zero.
struct SirtWeights {
    Sinogram inv_row;
    Image inv_col;

    static SirtWeights compute(const Geometry& geometry);
};

/// One projected SIRT update  f <- f + w C A^T R (s - A f), clamped to f >= 0
/// when `cfg.nonneg`.
Image sirt_step(const Image& f, const Sinogram& s, const ReconConfig& cfg);
void sirt_step(Image& f, const Sinogram& s, const ReconConfig& cfg, const SirtWeights& weights);

/// ADMM state for  min ||A f - s||^2 + lambda * TV_iso(f)  s.t. f >= 0, with the
/// splitting d = grad f (periodic forward differences) and scaled dual b.
class TvAdmm {
public:
    explicit TvAdmm(std::size_t n);

    /// One outer iteration: CG on the quadratic f-subproblem (warm-started at f)
    /// followed by the nonnegativity clamp, isotropic shrinkage for d, dual ascent.
    void step(Image& f, const Sinogram& s, const ReconConfig& cfg);

private:
    std::size_t n_;
    std::vector<double> dx_, dy_, bx_, by_;
};

Image tv_solve(const Image& f0, const Sinogram& s, const ReconConfig& cfg, int iters);

/// ||A f - s|| / ||s|| over all columns. Throws std::domain_error for s == 0.
double residual(const Image& f, const Sinogram& s);

/// Isotropic total variation with periodic forward differences.
double tv_iso(const Image& f);

/// ||A f - s||^2 + lambda * TV_iso(f)
double tv_objective(const Image& f, const Sinogram& s, double lambda);

/// Periodic forward-difference gradient and its exact adjoint (negative divergence).
void gradient(const Image& f, std::vector<double>& gx, std::vector<double>& gy);
Image gradient_adjoint(std::span<const double> px, std::span<const double> py, std::size_t n);

/// Runs the configured solver for a geometry, keeping SIRT weights and ADMM
/// state alive between calls so that outer alignment loops warm-start.
class Reconstructor {
public:
    Reconstructor(const Geometry& geometry, ReconConfig cfg);

    void iterate(Image& f, const Sinogram& s, int iters);
    [[nodiscard]] const ReconConfig& config() const noexcept { return cfg_; }

private:
    ReconConfig cfg_;
    SirtWeights weights_;
    TvAdmm tv_;
};

}  // namespace pba
