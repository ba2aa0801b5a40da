#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pba/align.hpp"
#include "pba/misalign.hpp"
#include "pba/projector.hpp"
#include "pba/recon.hpp"

namespace pba {

/// Parse or validation failure, located by source line and "section.key".
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& source, int line, std::string field, const std::string& message);

    [[nodiscard]] int line() const noexcept { return line_; }
    [[nodiscard]] const std::string& field() const noexcept { return field_; }

private:
    int line_;
    std::string field_;
};

struct PhantomSpec {
    std::string name{"shepp_logan"};  // shepp_logan | shapes | blob
    std::size_t n{128};
    int variant{1};
    std::uint64_t seed{0};
};

struct GeometrySpec {
    double start{0.0};
    std::optional<double> stop;  // inclusive; default: last angle of the half turn from start
    double step{2.0};

    [[nodiscard]] double last_angle() const;
    [[nodiscard]] Geometry make(std::size_t n_det) const { return Geometry::uniform(n_det, start, last_angle(), step); }
};

enum class MisalignKind { none, random, cc, random3d };

std::string_view to_string(MisalignKind kind) noexcept;

struct MisalignSpec {
    MisalignKind kind{MisalignKind::none};
    long lo{-10};
    long hi{10};
    std::uint64_t seed{1};
    int max_lag{40};
    long x_lo{-5};  // random3d only: shifts along the rotation axis
    long x_hi{5};
    std::string label;  // condition name in reports; defaults to the kind

    [[nodiscard]] std::string condition() const;
};

struct OutputSpec {
    std::filesystem::path dir{"out"};
    bool images{true};
    bool timing{true};  // false writes wall_ms = 0 so reports are byte-reproducible
};

/// Declarative description of one experiment: phantom, geometry, corruption,
/// solver and the list of alignment methods to compare. Besides the align
/// methods, "ALIGNED" reconstructs the uncorrupted (but noisy) data.
struct ExperimentConfig {
    std::string source{"<memory>"};
    PhantomSpec phantom;
    GeometrySpec geometry;
    MisalignSpec misalignment;
    std::optional<NoiseSpec> noise;
    ReconConfig recon;
    AlignConfig align;
    std::vector<std::string> methods{"PBA", "NONE"};
    std::size_t slices{8};  // 3D: size of the slice subset driving PBA
    OutputSpec output;
    std::map<std::string, int> lines;  // "section.key" -> source line

    [[nodiscard]] bool is_3d() const noexcept { return phantom.name == "blob"; }

    /// Throws ConfigError naming the offending field.
    void validate() const;

    static ExperimentConfig parse(std::istream& in, const std::string& source = "<memory>");
    static ExperimentConfig parse(std::string_view text, const std::string& source = "<memory>");
    /// Throws ConfigError (line 0) if the file cannot be read.
    static ExperimentConfig load(const std::filesystem::path& path);
};

/// Scalar parameters a sweep may vary.
const std::vector<std::string>& sweep_axes();

/// Sets `axis` (snr, step, J, L, k_max) to `value`. Throws std::invalid_argument for an unknown axis.
void apply_override(ExperimentConfig& cfg, std::string_view axis, double value);

}  // namespace pba
