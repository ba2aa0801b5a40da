#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pba/fourier.hpp"
#include "pba/image.hpp"
#include "pba/misalign.hpp"
#include "pba/projector.hpp"
#include "pba/recon.hpp"

namespace pba {

enum class Method { pba, pm, pm_lpf, none };

std::string_view to_string(Method m) noexcept;
std::optional<Method> parse_method(std::string_view name) noexcept;

struct AlignConfig {
    Method method{Method::pba};
    int outer_updates{15};  // L
    int inner_iters{10};    // J, solver iterations between shift updates
    FreqGrid freq_grid{FreqGrid::make()};
    int pm_max_lag{40};
    double lpf_cutoff{3.0};

    void validate(std::size_t n_det) const;
};

/// Per-update shift estimates. Entry l holds the misalignment estimated at
/// update l, relative to the data as already corrected by updates 0..l-1.
struct ShiftHistory {
    std::vector<ShiftSet> updates;

    [[nodiscard]] bool empty() const noexcept { return updates.empty(); }
    [[nodiscard]] std::size_t size() const noexcept { return updates.size(); }
    /// Sum over all updates: the total estimated misalignment.
    [[nodiscard]] ShiftSet cumulative() const;
    /// sum_m |eps_m(l)| for each update l.
    [[nodiscard]] std::vector<double> totals() const;
};

struct AlignResult {
    Image image;
    Sinogram realigned;
    ShiftHistory history;
    std::vector<double> residuals;  // data residual after each update's inner iterations
};

/// Per-angle misalignment of `s_data` relative to `s_reproj`, in the
/// apply_shifts convention: the mean over the grid of the log-ratio phase
/// shift, with degenerate frequencies skipped (all degenerate gives 0).
ShiftSet pba_estimate(const Sinogram& s_data, const Sinogram& s_reproj, const FreqGrid& grid);

/// Alternating reconstruction and phase-based realignment. Starts from f = 0;
/// each of the L updates runs J solver iterations on the current data,
/// reprojects, estimates the residual misalignment and realigns the data by
/// the accumulated estimate.
AlignResult pba_run(const Sinogram& s_tilde, const ReconConfig& recon_cfg, const AlignConfig& align_cfg);

/// Integer lag in [-max_lag, max_lag] by which `d` is displaced relative to
/// `p` (d(x) ~ p(x - lag)), found by maximizing circular cross-correlation.
/// With `lpf_cutoff`, both signals are low-pass filtered first.
int projection_match(std::span<const double> d, std::span<const double> p, int max_lag,
                     std::optional<double> lpf_cutoff = std::nullopt);

/// Same outer loop as pba_run with per-column projection matching (PM, or
/// PM_LPF when align_cfg.method says so) as the shift estimator.
AlignResult pm_run(const Sinogram& s_tilde, const ReconConfig& recon_cfg, const AlignConfig& align_cfg);

/// Dispatches on align_cfg.method. NONE runs L*J solver iterations with no
/// realignment and an empty history.
AlignResult align_and_reconstruct(const Sinogram& s_tilde, const ReconConfig& recon_cfg, const AlignConfig& align_cfg);

}  // namespace pba
