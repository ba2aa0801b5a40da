#include "pba/recon.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pba {
namespace {

void require_match(const Image& f, const Sinogram& s, const char* what) {
    if (f.size() != s.n_det())
        throw std::invalid_argument(std::string(what) + ": image side does not match detector count");
}

void clamp_nonneg(Image& f) {
    for (double& v : f.pixels())
        v = std::max(v, 0.0);
}

}  // namespace

void ReconConfig::validate() const {
    if (inner_iters <= 0)
        throw std::invalid_argument("ReconConfig: inner_iters must be positive");
    if (!(sirt_relaxation > 0.0 && sirt_relaxation < 2.0))
        throw std::invalid_argument("ReconConfig: sirt_relaxation must lie in (0, 2)");
    if (tv_weight < 0.0)
        throw std::invalid_argument("ReconConfig: tv_weight must be nonnegative");
    if (solver == Solver::tv && !(tv_weight > 0.0))
        throw std::invalid_argument("ReconConfig: TV solver requires tv_weight > 0");
    if (!(admm_penalty > 0.0))
        throw std::invalid_argument("ReconConfig: admm_penalty must be positive");
    if (cg_steps <= 0)
        throw std::invalid_argument("ReconConfig: cg_steps must be positive");
}

SirtWeights SirtWeights::compute(const Geometry& geometry) {
    SirtWeights w;
    w.inv_row = forward(Image(geometry.n_det, 1.0), geometry);
    for (double& v : w.inv_row.data())
        v = v > 0.0 ? 1.0 / v : 0.0;
    Sinogram ones(geometry);
    std::ranges::fill(ones.data(), 1.0);
    w.inv_col = adjoint(ones);
    for (double& v : w.inv_col.pixels())
        v = v > 0.0 ? 1.0 / v : 0.0;
    return w;
}

void sirt_step(Image& f, const Sinogram& s, const ReconConfig& cfg, const SirtWeights& weights) {
    require_match(f, s, "sirt_step");
    Sinogram r = forward(f, s.geometry());
    auto rd = r.data();
    const auto sd = s.data();
    const auto wr = weights.inv_row.data();
    for (std::size_t i = 0; i < rd.size(); ++i)
        rd[i] = (sd[i] - rd[i]) * wr[i];
    const Image back = adjoint(r);
    auto fp = f.pixels();
    const auto bp = back.pixels();
    const auto wc = weights.inv_col.pixels();
    for (std::size_t i = 0; i < fp.size(); ++i)
        fp[i] += cfg.sirt_relaxation * wc[i] * bp[i];
    if (cfg.nonneg) clamp_nonneg(f);
}

Image sirt_step(const Image& f, const Sinogram& s, const ReconConfig& cfg) {
    Image out = f;
    sirt_step(out, s, cfg, SirtWeights::compute(s.geometry()));
    return out;
}

void gradient(const Image& f, std::vector<double>& gx, std::vector<double>& gy) {
    const std::size_t n = f.size();
    gx.assign(n * n, 0.0);
    gy.assign(n * n, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t rn = (r + 1) % n;
        for (std::size_t c = 0; c < n; ++c) {
            const std::size_t cn = (c + 1) % n;
            gx[r * n + c] = f(r, cn) - f(r, c);
            gy[r * n + c] = f(rn, c) - f(r, c);
        }
    }
}

Image gradient_adjoint(std::span<const double> px, std::span<const double> py, std::size_t n) {
    Image out(n);
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t rp = (r + n - 1) % n;
        for (std::size_t c = 0; c < n; ++c) {
            const std::size_t cp = (c + n - 1) % n;
            out(r, c) = px[r * n + cp] - px[r * n + c] + py[rp * n + c] - py[r * n + c];
        }
    }
    return out;
}

double tv_iso(const Image& f) {
    std::vector<double> gx, gy;
    gradient(f, gx, gy);
    double acc = 0.0;
    for (std::size_t i = 0; i < gx.size(); ++i)
        acc += std::hypot(gx[i], gy[i]);
    return acc;
}

double tv_objective(const Image& f, const Sinogram& s, double lambda) {
    require_match(f, s, "tv_objective");
    const Sinogram af = forward(f, s.geometry());
    double data = 0.0;
    for (std::size_t i = 0; i < af.data().size(); ++i) {
        const double d = af.data()[i] - s.data()[i];
        data += d * d;
    }
    return data + lambda * tv_iso(f);
}

TvAdmm::TvAdmm(std::size_t n)
    : n_(n), dx_(n * n, 0.0), dy_(n * n, 0.0), bx_(n * n, 0.0), by_(n * n, 0.0) {}

void TvAdmm::step(Image& f, const Sinogram& s, const ReconConfig& cfg) {
    require_match(f, s, "TvAdmm::step");
    if (f.size() != n_)
        throw std::invalid_argument("TvAdmm::step: image size changed between iterations");
    const Geometry& geo = s.geometry();
    const double mu = cfg.admm_penalty;
    const std::size_t count = n_ * n_;

    // H f = 2 A^T A f + mu grad^T grad f
    const auto apply_h = [&](const Image& x) {
        Image out = adjoint(forward(x, geo));
        std::vector<double> gx, gy;
        gradient(x, gx, gy);
        const Image gt = gradient_adjoint(gx, gy, n_);
        auto op = out.pixels();
        for (std::size_t i = 0; i < count; ++i)
            op[i] = 2.0 * op[i] + mu * gt.pixels()[i];
        return out;
    };

    // rhs = 2 A^T s + mu grad^T (d - b)
    Image rhs = adjoint(s);
    {
        std::vector<double> px(count), py(count);
        for (std::size_t i = 0; i < count; ++i) {
            px[i] = dx_[i] - bx_[i];
            py[i] = dy_[i] - by_[i];
        }
        const Image gt = gradient_adjoint(px, py, n_);
        for (std::size_t i = 0; i < count; ++i)
            rhs.pixels()[i] = 2.0 * rhs.pixels()[i] + mu * gt.pixels()[i];
    }

    // Conjugate gradients, warm-started at the current f.
    const Image hf = apply_h(f);
    std::vector<double> r(count), p(count);
    for (std::size_t i = 0; i < count; ++i)
        r[i] = rhs.pixels()[i] - hf.pixels()[i];
    p = r;
    double rr = dot(r, r);
    const double stop = 1e-28 * std::max(dot(rhs.pixels(), rhs.pixels()), 1e-300);
    Image pimg(n_);
    for (int it = 0; it < cfg.cg_steps && rr > stop; ++it) {
        std::ranges::copy(p, pimg.pixels().begin());
        const Image hp = apply_h(pimg);
        const double php = dot(p, hp.pixels());
        if (!(php > 0.0)) break;
        const double alpha = rr / php;
        auto fp = f.pixels();
        for (std::size_t i = 0; i < count; ++i) {
            fp[i] += alpha * p[i];
            r[i] -= alpha * hp.pixels()[i];
        }
        const double rr_new = dot(r, r);
        const double beta = rr_new / rr;
        rr = rr_new;
        for (std::size_t i = 0; i < count; ++i)
            p[i] = r[i] + beta * p[i];
    }
    if (cfg.nonneg) clamp_nonneg(f);

    // d <- shrink(grad f + b, lambda / mu), b <- b + grad f - d
    std::vector<double> gx, gy;
    gradient(f, gx, gy);
    const double thresh = cfg.tv_weight / mu;
    for (std::size_t i = 0; i < count; ++i) {
        const double vx = gx[i] + bx_[i], vy = gy[i] + by_[i];
        const double mag = std::hypot(vx, vy);
        const double scale = mag > thresh ? (mag - thresh) / mag : 0.0;
        dx_[i] = scale * vx;
        dy_[i] = scale * vy;
        bx_[i] += gx[i] - dx_[i];
        by_[i] += gy[i] - dy_[i];
    }
}

Image tv_solve(const Image& f0, const Sinogram& s, const ReconConfig& cfg, int iters) {
    if (!(cfg.tv_weight > 0.0) || !(cfg.admm_penalty > 0.0))
        throw std::invalid_argument("tv_solve: requires tv_weight > 0 and admm_penalty > 0");
    require_match(f0, s, "tv_solve");
    Image f = f0;
    TvAdmm admm(f.size());
    for (int i = 0; i < iters; ++i)
        admm.step(f, s, cfg);
    return f;
}

double residual(const Image& f, const Sinogram& s) {
    require_match(f, s, "residual");
    const double sn = s.norm();
    if (sn == 0.0)
        throw std::domain_error("residual: sinogram is identically zero");
    const Sinogram af = forward(f, s.geometry());
    double acc = 0.0;
    for (std::size_t i = 0; i < af.data().size(); ++i) {
        const double d = af.data()[i] - s.data()[i];
        acc += d * d;
    }
    return std::sqrt(acc) / sn;
}

Reconstructor::Reconstructor(const Geometry& geometry, ReconConfig cfg)
    : cfg_(cfg), weights_(cfg.solver == Solver::sirt ? SirtWeights::compute(geometry) : SirtWeights{}),
      tv_(geometry.n_det) {
    cfg_.validate();
}

void Reconstructor::iterate(Image& f, const Sinogram& s, int iters) {
    for (int i = 0; i < iters; ++i) {
        if (cfg_.solver == Solver::sirt)
            sirt_step(f, s, cfg_, weights_);
        else
            tv_.step(f, s, cfg_);
    }
}

}  // namespace pba
