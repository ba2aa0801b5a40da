#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pba/config.hpp"
#include "pba/misalign.hpp"

namespace pba {

/// One (method, phantom, condition) cell of a report.
struct CellResult {
    std::string method;
    std::string phantom;
    std::string condition;
    std::optional<double> snr;
    std::optional<double> sweep_value;
    bool failed{false};
    std::string failure;
    double error{0.0};
    double final_residual{0.0};
    std::optional<int> updates_to_converge;  // first update whose total is < 10% of the first; -1 if never
    long wall_ms{0};
    ShiftSet recovered;             // cumulative correction (y for 3D)
    std::vector<double> totals;     // per-update shift totals
    ShiftSet recovered_x;           // 3D only: mass-alignment x correction
};

struct Report {
    std::vector<CellResult> rows;
    ShiftSet true_shifts;    // y (or in-plane) misalignment actually applied
    ShiftSet true_x_shifts;  // 3D only

    [[nodiscard]] bool any_failed() const noexcept;
    [[nodiscard]] const CellResult* find(std::string_view method) const noexcept;
};

/// Fixed report columns, preceded by the sweep axis when `axis` is given.
void write_report_csv(std::ostream& out, const Report& report, std::optional<std::string_view> axis = std::nullopt);

/// Runs phantom -> project -> noise -> misalign -> (align + reconstruct per
/// method) -> score. Writes report.csv, shifts_true.csv, shifts_<method>.csv
/// and, if enabled, images (8-bit PGM plus raw float32) into `out_dir`.
/// A method that throws is recorded as a failed row; the others still run.
Report run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

/// One run_experiment per value of `axis`, each in its own subdirectory,
/// aggregated into sweep_<axis>.csv with the axis as first column.
/// A value that yields an invalid config fails its rows without stopping the sweep.
Report sweep(const ExperimentConfig& cfg, std::string_view axis, const std::vector<double>& values,
             const std::filesystem::path& out_dir);

/// "%.9g", the number format used in every output file.
std::string format_number(double v);

}  // namespace pba
