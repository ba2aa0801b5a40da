#include "pba/experiment.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <ostream>
#include <stdexcept>

#include "pba/align.hpp"
#include "pba/metrics.hpp"
#include "pba/phantoms.hpp"
#include "pba/pipeline3d.hpp"
#include "pba/projector.hpp"
#include "pba/recon.hpp"

namespace pba {
namespace fs = std::filesystem;

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

namespace {

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::out) {
    std::ofstream out(path, mode);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

void write_pgm(const fs::path& path, std::span<const double> pixels, std::size_t rows, std::size_t cols) {
    auto out = open_out(path, std::ios::binary);
    out << "P5\n" << cols << ' ' << rows << "\n255\n";
    for (double v : pixels) {
        const double c = std::clamp(v, 0.0, 1.0);
        out.put(static_cast<char>(static_cast<unsigned char>(std::lround(c * 255.0))));
    }
}

// One-line text header with dims and dtype, then little-endian float32.
void write_f32(const fs::path& path, std::span<const double> values, const std::vector<std::size_t>& dims) {
    auto out = open_out(path, std::ios::binary);
    for (std::size_t d : dims)
        out << d << ' ';
    out << "float32 le\n";
    for (double v : values) {
        auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(v));
        if constexpr (std::endian::native == std::endian::big)
            bits = ((bits & 0xffu) << 24) | ((bits & 0xff00u) << 8) | ((bits >> 8) & 0xff00u) | (bits >> 24);
        out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
    }
}

void write_image(const fs::path& dir, const std::string& stem, const Image& img) {
    write_pgm(dir / (stem + ".pgm"), img.pixels(), img.size(), img.size());
    write_f32(dir / (stem + ".f32"), img.pixels(), {img.size(), img.size()});
}

// PGM of the central x-slice, f32 of the whole volume (dims nx ny nz, storage x, z, y).
void write_volume(const fs::path& dir, const std::string& stem, const Volume& vol) {
    const Image mid = vol.slice(vol.nx() / 2);
    write_pgm(dir / (stem + ".pgm"), mid.pixels(), mid.size(), mid.size());
    write_f32(dir / (stem + ".f32"), vol.voxels(), {vol.nx(), vol.ny(), vol.nz()});
}

void write_shift_history(const fs::path& path, const CellResult& row, const std::vector<double>& angles,
                         const std::vector<ShiftSet>& updates) {
    auto out = open_out(path);
    out << "update,angle_index,angle_deg,shift,cumulative\n";
    std::vector<double> cum(angles.size(), 0.0);
    for (std::size_t l = 0; l < updates.size(); ++l)
        for (std::size_t m = 0; m < angles.size(); ++m) {
            cum[m] += updates[l].eps[m];
            out << l + 1 << ',' << m << ',' << format_number(angles[m]) << ',' << format_number(updates[l].eps[m]) << ','
                << format_number(cum[m]) << '\n';
        }
    if (!row.recovered_x.eps.empty()) {
        auto xo = open_out(path.parent_path() / (path.stem().string() + "_x.csv"));
        xo << "angle_index,angle_deg,shift\n";
        for (std::size_t m = 0; m < angles.size(); ++m)
            xo << m << ',' << format_number(angles[m]) << ',' << format_number(row.recovered_x.eps[m]) << '\n';
    }
}

void write_true_shifts(const fs::path& path, const Report& report, const std::vector<double>& angles) {
    auto out = open_out(path);
    const bool three_d = !report.true_x_shifts.eps.empty();
    out << (three_d ? "angle_index,angle_deg,x_shift,y_shift\n" : "angle_index,angle_deg,shift\n");
    for (std::size_t m = 0; m < angles.size(); ++m) {
        out << m << ',' << format_number(angles[m]) << ',';
        if (three_d) out << format_number(report.true_x_shifts.eps[m]) << ',';
        out << format_number(report.true_shifts.eps[m]) << '\n';
    }
}

std::optional<int> updates_to_converge(const std::vector<double>& totals) {
    if (totals.empty()) return std::nullopt;
    const double threshold = 0.1 * totals.front();
    for (std::size_t l = 1; l < totals.size(); ++l)
        if (totals[l] < threshold) return static_cast<int>(l + 1);
    return totals.front() == 0.0 ? std::optional<int>(1) : std::optional<int>(-1);
}

std::string phantom_label(const PhantomSpec& p) {
    if (p.name == "shapes") return "shapes_v" + std::to_string(p.variant);
    return p.name;
}

AlignConfig align_for(const ExperimentConfig& cfg, const std::string& method) {
    AlignConfig a = cfg.align;
    a.method = method == "ALIGNED" ? Method::none : *parse_method(method);
    return a;
}

// Runs `body` for one method, filling timing and failure fields.
void run_cell(CellResult& row, const ExperimentConfig& cfg, const std::function<void(CellResult&)>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(row);
    } catch (const std::exception& e) {
        row.failed = true;
        row.failure = e.what();
    }
    const auto dt = std::chrono::steady_clock::now() - t0;
    row.wall_ms = cfg.output.timing ? static_cast<long>(std::chrono::duration_cast<std::chrono::milliseconds>(dt).count()) : 0;
}

Report run_2d(const ExperimentConfig& cfg, const fs::path& dir, const CellResult& proto) {
    const std::size_t n = cfg.phantom.n;
    const Image truth = cfg.phantom.name == "shapes" ? shapes_phantom(n, cfg.phantom.variant, cfg.phantom.seed)
                                                      : shepp_logan(n);
    const Geometry geo = cfg.geometry.make(n);
    const Sinogram ideal = forward(truth, geo);
    const Sinogram noisy = cfg.noise ? add_noise(ideal, *cfg.noise) : ideal;

    Report report;
    Sinogram data = noisy;
    switch (cfg.misalignment.kind) {
        case MisalignKind::random:
            report.true_shifts = random_shifts(geo.num_angles(), cfg.misalignment.lo, cfg.misalignment.hi, cfg.misalignment.seed);
            data = apply_shifts(noisy, report.true_shifts);
            break;
        case MisalignKind::cc: {
            auto [shifted, shifts] = cc_misalign(noisy, cfg.misalignment.max_lag);
            data = std::move(shifted);
            report.true_shifts = std::move(shifts);
            break;
        }
        default: report.true_shifts = ShiftSet{std::vector<double>(geo.num_angles(), 0.0)};
    }
    if (cfg.output.images) write_image(dir, "truth", truth);
    write_true_shifts(dir / "shifts_true.csv", report, geo.angles_deg);

    for (const auto& method : cfg.methods) {
        CellResult row = proto;
        row.method = method;
        run_cell(row, cfg, [&](CellResult& r) {
            const Sinogram& input = method == "ALIGNED" ? noisy : data;
            const AlignResult res = align_and_reconstruct(input, cfg.recon, align_for(cfg, method));
            r.error = registered_error(res.image, truth).error;
            r.final_residual = residual(res.image, res.realigned);
            r.totals = res.history.totals();
            r.recovered = res.history.empty() ? ShiftSet{std::vector<double>(geo.num_angles(), 0.0)} : res.history.cumulative();
            r.updates_to_converge = updates_to_converge(r.totals);
            if (!res.history.empty()) write_shift_history(dir / ("shifts_" + method + ".csv"), r, geo.angles_deg, res.history.updates);
            if (cfg.output.images) write_image(dir, method, res.image);
        });
        report.rows.push_back(std::move(row));
    }
    return report;
}

Report run_3d(const ExperimentConfig& cfg, const fs::path& dir, const CellResult& proto) {
    const std::size_t n = cfg.phantom.n;
    const Volume truth = blob_volume(n, n, n, cfg.phantom.seed);
    const Geometry geo = cfg.geometry.make(n);
    const ProjectionStack ideal = forward3d(truth, geo);
    const ProjectionStack noisy = cfg.noise ? add_noise(ideal, *cfg.noise) : ideal;
    const std::size_t M = geo.num_angles();

    Report report;
    ProjectionStack data = noisy;
    if (cfg.misalignment.kind == MisalignKind::random3d) {
        report.true_x_shifts = random_shifts(M, cfg.misalignment.x_lo, cfg.misalignment.x_hi, cfg.misalignment.seed);
        report.true_shifts = random_shifts(M, cfg.misalignment.lo, cfg.misalignment.hi, cfg.misalignment.seed + 1);
        data = apply_shifts(noisy, ShiftSet3D{report.true_x_shifts, report.true_shifts});
    } else {
        report.true_x_shifts = ShiftSet{std::vector<double>(M, 0.0)};
        report.true_shifts = report.true_x_shifts;
    }
    if (cfg.output.images) write_volume(dir, "truth", truth);
    write_true_shifts(dir / "shifts_true.csv", report, geo.angles_deg);

    const int total_iters = cfg.align.outer_updates * cfg.align.inner_iters;
    for (const auto& method : cfg.methods) {
        CellResult row = proto;
        row.method = method;
        run_cell(row, cfg, [&](CellResult& r) {
            Volume vol;
            const ProjectionStack* scored = &data;
            ProjectionStack realigned;
            if (method == "PBA") {
                const MassAlignResult xa = mass_align_x(data);
                const Pba3dResult res = pba3d(xa.stack, default_slice_subset(n, cfg.slices), cfg.recon, cfg.align);
                r.recovered_x = xa.x_shifts;
                r.recovered = res.history.cumulative();
                r.totals = res.history.totals();
                r.updates_to_converge = updates_to_converge(r.totals);
                vol = res.volume;
                realigned = res.realigned;
                scored = &realigned;
                write_shift_history(dir / "shifts_PBA.csv", r, geo.angles_deg, res.history.updates);
            } else {
                if (method == "ALIGNED") scored = &noisy;
                vol = reconstruct_volume(*scored, cfg.recon, total_iters);
                r.recovered = ShiftSet{std::vector<double>(M, 0.0)};
            }
            r.error = registered_error(vol, truth);
            r.final_residual = residual(vol, *scored);
            if (cfg.output.images) write_volume(dir, method, vol);
        });
        report.rows.push_back(std::move(row));
    }
    return report;
}

CellResult prototype_row(const ExperimentConfig& cfg) {
    CellResult row;
    row.phantom = phantom_label(cfg.phantom);
    row.condition = cfg.misalignment.condition();
    if (cfg.noise) row.snr = cfg.noise->snr;
    return row;
}

}  // namespace

bool Report::any_failed() const noexcept {
    return std::ranges::any_of(rows, [](const CellResult& r) { return r.failed; });
}

const CellResult* Report::find(std::string_view method) const noexcept {
    for (const auto& r : rows)
        if (r.method == method) return &r;
    return nullptr;
}

void write_report_csv(std::ostream& out, const Report& report, std::optional<std::string_view> axis) {
    if (axis) out << *axis << ',';
    out << "method,phantom,condition,snr,error,final_residual,updates_to_converge,wall_ms\n";
    for (const auto& r : report.rows) {
        if (axis) out << (r.sweep_value ? format_number(*r.sweep_value) : "") << ',';
        out << r.method << ',' << r.phantom << ',' << r.condition << ',' << (r.snr ? format_number(*r.snr) : "") << ',';
        if (r.failed)
            out << "failed,,,";
        else
            out << format_number(r.error) << ',' << format_number(r.final_residual) << ','
                << (r.updates_to_converge ? std::to_string(*r.updates_to_converge) : "") << ',';
        out << r.wall_ms << '\n';
    }
}

Report run_experiment(const ExperimentConfig& cfg, const fs::path& out_dir) {
    cfg.validate();
    fs::create_directories(out_dir);
    const CellResult proto = prototype_row(cfg);
    Report report;
    try {
        report = cfg.is_3d() ? run_3d(cfg, out_dir, proto) : run_2d(cfg, out_dir, proto);
    } catch (const std::exception& e) {
        // The shared data pipeline failed: every cell fails with the same cause.
        report.rows.clear();
        for (const auto& method : cfg.methods) {
            CellResult row = proto;
            row.method = method;
            row.failed = true;
            row.failure = e.what();
            report.rows.push_back(std::move(row));
        }
    }
    auto out = open_out(out_dir / "report.csv");
    write_report_csv(out, report);
    return report;
}

Report sweep(const ExperimentConfig& cfg, std::string_view axis, const std::vector<double>& values, const fs::path& out_dir) {
    if (std::ranges::find(sweep_axes(), axis) == sweep_axes().end())
        throw std::invalid_argument("unknown sweep axis '" + std::string(axis) + "' (snr, step, J, L, k_max)");
    fs::create_directories(out_dir);
    Report all;
    for (double v : values) {
        ExperimentConfig c = cfg;
        Report part;
        try {
            apply_override(c, axis, v);
            c.validate();
            part = run_experiment(c, out_dir / (std::string(axis) + "_" + format_number(v)));
        } catch (const std::exception& e) {
            for (const auto& method : cfg.methods) {
                CellResult row = prototype_row(c);
                row.method = method;
                row.failed = true;
                row.failure = e.what();
                part.rows.push_back(std::move(row));
            }
        }
        for (auto& row : part.rows) {
            row.sweep_value = v;
            all.rows.push_back(std::move(row));
        }
        if (all.true_shifts.eps.empty()) all.true_shifts = part.true_shifts;
    }
    auto out = open_out(out_dir / ("sweep_" + std::string(axis) + ".csv"));
    write_report_csv(out, all, axis);
    return all;
}

}  // namespace pba
