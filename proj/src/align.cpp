#include "pba/align.hpp"

#include <stdexcept>
#include <string>

namespace pba {

std::string_view to_string(Method m) noexcept {
    switch (m) {
        case Method::pba: return "PBA";
        case Method::pm: return "PM";
        case Method::pm_lpf: return "PM_LPF";
        case Method::none: return "NONE";
    }
    return "?";
}

std::optional<Method> parse_method(std::string_view name) noexcept {
    if (name == "PBA") return Method::pba;
    if (name == "PM") return Method::pm;
    if (name == "PM_LPF") return Method::pm_lpf;
    if (name == "NONE") return Method::none;
    return std::nullopt;
}

void AlignConfig::validate(std::size_t n_det) const {
    if (outer_updates <= 0)
        throw std::invalid_argument("AlignConfig: outer_updates must be positive");
    if (inner_iters <= 0)
        throw std::invalid_argument("AlignConfig: inner_iters must be positive");
    freq_grid.validate(n_det);
    const bool matching = method == Method::pm || method == Method::pm_lpf;
    if (matching && (pm_max_lag < 0 || 2 * static_cast<std::size_t>(pm_max_lag) >= n_det))
        throw std::invalid_argument("AlignConfig: pm_max_lag must satisfy 0 <= lag < N/2");
    if (!(lpf_cutoff > 1.0))
        throw std::invalid_argument("AlignConfig: lpf_cutoff must exceed 1");
}

ShiftSet ShiftHistory::cumulative() const {
    if (updates.empty()) return {};
    ShiftSet acc{std::vector<double>(updates.front().size(), 0.0)};
    for (const auto& u : updates)
        acc = acc + u;
    return acc;
}

std::vector<double> ShiftHistory::totals() const {
    std::vector<double> out;
    out.reserve(updates.size());
    for (const auto& u : updates)
        out.push_back(u.abs_total());
    return out;
}

ShiftSet pba_estimate(const Sinogram& s_data, const Sinogram& s_reproj, const FreqGrid& grid) {
    if (s_data.n_det() != s_reproj.n_det() || s_data.num_angles() != s_reproj.num_angles())
        throw std::invalid_argument("pba_estimate: sinogram dimensions differ");
    grid.validate(s_data.n_det());
    ShiftSet out{std::vector<double>(s_data.num_angles(), 0.0)};
    for (std::size_t m = 0; m < s_data.num_angles(); ++m) {
        double acc = 0.0;
        int used = 0;
        for (double k : grid.values) {
            try {
                acc += phase_ratio_shift(s_data.column(m), s_reproj.column(m), k);
                ++used;
            } catch (const DegenerateFrequency&) {
            }
        }
        // phase_ratio_shift measures g_meas[n] = g_ref[n + e]; our misalignment
        // convention is data(x) = reproj(x - eps), hence the sign.
        out.eps[m] = used > 0 ? -acc / used : 0.0;
    }
    return out;
}

namespace {

template <typename Estimator>
AlignResult run_outer_loop(const Sinogram& s_tilde, const ReconConfig& recon_cfg, const AlignConfig& align_cfg,
                           Estimator&& estimate) {
    const Geometry& geo = s_tilde.geometry();
    align_cfg.validate(geo.n_det);
    Reconstructor solver(geo, recon_cfg);

    AlignResult result{Image(geo.n_det), s_tilde, {}, {}};
    ShiftSet total{std::vector<double>(geo.num_angles(), 0.0)};
    for (int l = 0; l < align_cfg.outer_updates; ++l) {
        solver.iterate(result.image, result.realigned, align_cfg.inner_iters);
        result.residuals.push_back(residual(result.image, result.realigned));
        const Sinogram reproj = forward(result.image, geo);
        ShiftSet eps = estimate(result.realigned, reproj);
        total = total + eps;
        result.history.updates.push_back(std::move(eps));
        // Re-derive from the raw data so corrections compose exactly.
        result.realigned = apply_shifts(s_tilde, total.negated());
    }
    return result;
}

}  // namespace

AlignResult pba_run(const Sinogram& s_tilde, const ReconConfig& recon_cfg, const AlignConfig& align_cfg) {
    return run_outer_loop(s_tilde, recon_cfg, align_cfg, [&](const Sinogram& data, const Sinogram& reproj) {
        return pba_estimate(data, reproj, align_cfg.freq_grid);
    });
}

int projection_match(std::span<const double> d, std::span<const double> p, int max_lag, std::optional<double> lpf_cutoff) {
    if (d.size() != p.size())
        throw std::invalid_argument("projection_match: length mismatch");
    if (lpf_cutoff) {
        const auto df = low_pass(d, *lpf_cutoff);
        const auto pf = low_pass(p, *lpf_cutoff);
        return best_circular_lag(df, pf, max_lag);
    }
    return best_circular_lag(d, p, max_lag);
}

AlignResult pm_run(const Sinogram& s_tilde, const ReconConfig& recon_cfg, const AlignConfig& align_cfg) {
    if (align_cfg.method != Method::pm && align_cfg.method != Method::pm_lpf)
        throw std::invalid_argument("pm_run: method must be PM or PM_LPF");
    const std::optional<double> lpf =
        align_cfg.method == Method::pm_lpf ? std::optional<double>(align_cfg.lpf_cutoff) : std::nullopt;
    return run_outer_loop(s_tilde, recon_cfg, align_cfg, [&](const Sinogram& data, const Sinogram& reproj) {
        ShiftSet eps{std::vector<double>(data.num_angles(), 0.0)};
        for (std::size_t m = 0; m < data.num_angles(); ++m)
            eps.eps[m] = projection_match(data.column(m), reproj.column(m), align_cfg.pm_max_lag, lpf);
        return eps;
    });
}

AlignResult align_and_reconstruct(const Sinogram& s_tilde, const ReconConfig& recon_cfg, const AlignConfig& align_cfg) {
    switch (align_cfg.method) {
        case Method::pba: return pba_run(s_tilde, recon_cfg, align_cfg);
        case Method::pm:
        case Method::pm_lpf: return pm_run(s_tilde, recon_cfg, align_cfg);
        case Method::none: {
            align_cfg.validate(s_tilde.n_det());
            Reconstructor solver(s_tilde.geometry(), recon_cfg);
            AlignResult result{Image(s_tilde.n_det()), s_tilde, {}, {}};
            for (int l = 0; l < align_cfg.outer_updates; ++l) {
                solver.iterate(result.image, s_tilde, align_cfg.inner_iters);
                result.residuals.push_back(residual(result.image, s_tilde));
            }
            return result;
        }
    }
    throw std::invalid_argument("align_and_reconstruct: unknown method");
}

}  // namespace pba
