#include "pba/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <sstream>

namespace pba {
namespace {

std::string trim(std::string_view s) {
    const auto ws = [](unsigned char c) { return std::isspace(c) != 0; };
    while (!s.empty() && ws(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && ws(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return std::string(s);
}

std::string lower(std::string s) {
    std::ranges::transform(s, s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ','))
        if (auto t = trim(item); !t.empty()) out.push_back(t);
    return out;
}

struct Entry {
    std::string value;
    int line;
};

class Reader {
public:
    Reader(const std::string& source, ExperimentConfig& cfg) : source_(source), cfg_(cfg) {}

    [[noreturn]] void fail(int line, const std::string& field, const std::string& msg) const {
        throw ConfigError(source_, line, field, msg);
    }

    template <typename T>
    T number(const std::string& field, const Entry& e) const {
        T out{};
        const char* first = e.value.data();
        const char* last = first + e.value.size();
        auto [ptr, ec] = std::from_chars(first, last, out);
        if (ec != std::errc{} || ptr != last)
            fail(e.line, field, "expected a number, got '" + e.value + "'");
        if constexpr (std::is_floating_point_v<T>)
            if (!std::isfinite(out)) fail(e.line, field, "value must be finite");
        return out;
    }

    bool boolean(const std::string& field, const Entry& e) const {
        const std::string v = lower(e.value);
        if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
        if (v == "false" || v == "no" || v == "off" || v == "0") return false;
        fail(e.line, field, "expected true or false, got '" + e.value + "'");
    }

    void apply(const std::string& section, const std::string& key, const Entry& e) {
        const std::string field = section + "." + key;
        cfg_.lines[field] = e.line;
        auto& c = cfg_;
        using Setter = std::function<void()>;
        const std::map<std::string, Setter> setters{
            {"phantom.name", [&] { c.phantom.name = lower(e.value); }},
            {"phantom.n", [&] { c.phantom.n = number<std::size_t>(field, e); }},
            {"phantom.variant", [&] { c.phantom.variant = number<int>(field, e); }},
            {"phantom.seed", [&] { c.phantom.seed = number<std::uint64_t>(field, e); }},
            {"geometry.start", [&] { c.geometry.start = number<double>(field, e); }},
            {"geometry.stop", [&] { c.geometry.stop = number<double>(field, e); }},
            {"geometry.step", [&] { c.geometry.step = number<double>(field, e); }},
            {"misalignment.type",
             [&] {
                 const std::string v = lower(e.value);
                 if (v == "none") c.misalignment.kind = MisalignKind::none;
                 else if (v == "random") c.misalignment.kind = MisalignKind::random;
                 else if (v == "cc") c.misalignment.kind = MisalignKind::cc;
                 else if (v == "random3d") c.misalignment.kind = MisalignKind::random3d;
                 else fail(e.line, field, "unknown misalignment type '" + e.value + "' (none, random, cc, random3d)");
             }},
            {"misalignment.lo", [&] { c.misalignment.lo = number<long>(field, e); }},
            {"misalignment.hi", [&] { c.misalignment.hi = number<long>(field, e); }},
            {"misalignment.seed", [&] { c.misalignment.seed = number<std::uint64_t>(field, e); }},
            {"misalignment.max_lag", [&] { c.misalignment.max_lag = number<int>(field, e); }},
            {"misalignment.x_lo", [&] { c.misalignment.x_lo = number<long>(field, e); }},
            {"misalignment.x_hi", [&] { c.misalignment.x_hi = number<long>(field, e); }},
            {"misalignment.label", [&] { c.misalignment.label = e.value; }},
            {"noise.snr", [&] { noise().snr = number<double>(field, e); }},
            {"noise.seed", [&] { noise().seed = number<std::uint64_t>(field, e); }},
            {"recon.solver",
             [&] {
                 const std::string v = lower(e.value);
                 if (v == "sirt") c.recon.solver = Solver::sirt;
                 else if (v == "tv") c.recon.solver = Solver::tv;
                 else fail(e.line, field, "unknown solver '" + e.value + "' (SIRT, TV)");
             }},
            {"recon.nonneg", [&] { c.recon.nonneg = boolean(field, e); }},
            {"recon.tv_weight", [&] { c.recon.tv_weight = number<double>(field, e); }},
            {"recon.admm_penalty", [&] { c.recon.admm_penalty = number<double>(field, e); }},
            {"recon.sirt_relaxation", [&] { c.recon.sirt_relaxation = number<double>(field, e); }},
            {"recon.cg_steps", [&] { c.recon.cg_steps = number<int>(field, e); }},
            {"align.methods",
             [&] {
                 c.methods.clear();
                 for (auto& m : split_list(e.value)) {
                     std::string up = m;
                     std::ranges::transform(up, up.begin(), [](unsigned char ch) { return static_cast<char>(std::toupper(ch)); });
                     if (up != "ALIGNED" && !parse_method(up))
                         fail(e.line, field, "unknown method '" + m + "' (PBA, PM_LPF, PM, NONE, ALIGNED)");
                     c.methods.push_back(up);
                 }
             }},
            {"align.updates", [&] { c.align.outer_updates = number<int>(field, e); }},
            {"align.inner_iters",
             [&] {
                 c.align.inner_iters = number<int>(field, e);
                 c.recon.inner_iters = c.align.inner_iters;
             }},
            {"align.k_max", [&] { k_max_ = number<double>(field, e); }},
            {"align.oversampling", [&] { oversampling_ = number<int>(field, e); }},
            {"align.pm_max_lag", [&] { c.align.pm_max_lag = number<int>(field, e); }},
            {"align.lpf_cutoff", [&] { c.align.lpf_cutoff = number<double>(field, e); }},
            {"align.slices", [&] { c.slices = number<std::size_t>(field, e); }},
            {"output.dir", [&] { c.output.dir = e.value; }},
            {"output.images", [&] { c.output.images = boolean(field, e); }},
            {"output.timing", [&] { c.output.timing = boolean(field, e); }},
        };
        const auto it = setters.find(field);
        if (it == setters.end()) fail(e.line, field, "unknown key");
        it->second();
    }

    void finish() {
        if (k_max_ || oversampling_) {
            const double k_max = k_max_.value_or(2.0);
            const int os = oversampling_.value_or(20);
            const auto field = k_max_ ? "align.k_max" : "align.oversampling";
            const int line = cfg_.lines[field];
            try {
                cfg_.align.freq_grid = FreqGrid::make(k_max, os);
            } catch (const std::invalid_argument& e) {
                fail(line, field, e.what());
            }
        }
    }

private:
    NoiseSpec& noise() {
        if (!cfg_.noise) cfg_.noise = NoiseSpec{};
        return *cfg_.noise;
    }

    const std::string& source_;
    ExperimentConfig& cfg_;
    std::optional<double> k_max_;
    std::optional<int> oversampling_;
};

std::string where(const std::string& source, int line) {
    return line > 0 ? source + ":" + std::to_string(line) : source;
}

}  // namespace

ConfigError::ConfigError(const std::string& source, int line, std::string field, const std::string& message)
    : std::runtime_error(where(source, line) + ": " + (field.empty() ? "" : "[" + field + "] ") + message),
      line_(line),
      field_(std::move(field)) {}

std::string_view to_string(MisalignKind kind) noexcept {
    switch (kind) {
        case MisalignKind::none: return "none";
        case MisalignKind::random: return "random";
        case MisalignKind::cc: return "cc";
        case MisalignKind::random3d: return "random3d";
    }
    return "?";
}

double GeometrySpec::last_angle() const {
    if (stop) return *stop;
    if (!(step > 0.0)) return start;
    return start + step * (std::ceil(180.0 / step - 1e-9) - 1.0);
}

std::string MisalignSpec::condition() const {
    if (!label.empty()) return label;
    switch (kind) {
        case MisalignKind::random:
        case MisalignKind::random3d:
            return std::string(to_string(kind)) + "[" + std::to_string(lo) + ":" + std::to_string(hi) + "]";
        default: return std::string(to_string(kind));
    }
}

ExperimentConfig ExperimentConfig::parse(std::istream& in, const std::string& source) {
    ExperimentConfig cfg;
    cfg.source = source;
    Reader reader(source, cfg);
    std::string raw, section;
    std::map<std::string, int> seen;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']') reader.fail(line_no, "", "malformed section header '" + line + "'");
            section = lower(trim(std::string_view(line).substr(1, line.size() - 2)));
            static const std::vector<std::string> known{"phantom", "geometry", "misalignment", "noise", "recon", "align", "output"};
            if (std::ranges::find(known, section) == known.end())
                reader.fail(line_no, section, "unknown section");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) reader.fail(line_no, "", "expected 'key = value', got '" + line + "'");
        if (section.empty()) reader.fail(line_no, "", "key outside of any section");
        const std::string key = lower(trim(std::string_view(line).substr(0, eq)));
        std::string value = trim(std::string_view(line).substr(eq + 1));
        if (const auto hash = value.find(" #"); hash != std::string::npos) value = trim(value.substr(0, hash));
        const std::string field = section + "." + key;
        if (auto it = seen.find(field); it != seen.end())
            reader.fail(line_no, field, "duplicate key (first set on line " + std::to_string(it->second) + ")");
        seen[field] = line_no;
        if (value.empty()) reader.fail(line_no, field, "missing value");
        reader.apply(section, key, Entry{value, line_no});
    }
    reader.finish();
    cfg.validate();
    return cfg;
}

ExperimentConfig ExperimentConfig::parse(std::string_view text, const std::string& source) {
    std::istringstream in{std::string(text)};
    return parse(in, source);
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string(), 0, "", "cannot open config file");
    return parse(in, path.string());
}

void ExperimentConfig::validate() const {
    const auto fail = [&](const std::string& field, const std::string& msg) {
        const auto it = lines.find(field);
        throw ConfigError(source, it == lines.end() ? 0 : it->second, field, msg);
    };
    static const std::vector<std::string> phantoms{"shepp_logan", "shapes", "blob"};
    if (std::ranges::find(phantoms, phantom.name) == phantoms.end())
        fail("phantom.name", "unknown phantom '" + phantom.name + "' (shepp_logan, shapes, blob)");
    if (phantom.n < 16) fail("phantom.n", "must be at least 16");
    if (phantom.name == "shapes" && (phantom.variant < 1 || phantom.variant > 4))
        fail("phantom.variant", "must be 1..4");

    try {
        (void)geometry.make(phantom.n);
    } catch (const std::invalid_argument& e) {
        fail("geometry.step", e.what());
    }

    const bool three_d = is_3d();
    if (three_d != (misalignment.kind == MisalignKind::random3d) && misalignment.kind != MisalignKind::none)
        fail("misalignment.type", three_d ? "a 3D phantom takes misalignment none or random3d"
                                          : "random3d requires the blob phantom");
    if (misalignment.lo > misalignment.hi) fail("misalignment.lo", "lo exceeds hi");
    if (misalignment.x_lo > misalignment.x_hi) fail("misalignment.x_lo", "x_lo exceeds x_hi");
    const long half = static_cast<long>(phantom.n / 2);
    if (misalignment.kind != MisalignKind::none && misalignment.kind != MisalignKind::cc &&
        (std::abs(misalignment.lo) > half || std::abs(misalignment.hi) > half))
        fail("misalignment.hi", "shifts must stay within N/2 = " + std::to_string(half));
    if (misalignment.kind == MisalignKind::random3d && (std::abs(misalignment.x_lo) > half || std::abs(misalignment.x_hi) > half))
        fail("misalignment.x_hi", "x shifts must stay within nx/2 = " + std::to_string(half));
    if (misalignment.kind == MisalignKind::cc && (misalignment.max_lag < 0 || 2 * static_cast<std::size_t>(misalignment.max_lag) >= phantom.n))
        fail("misalignment.max_lag", "must satisfy 0 <= max_lag < N/2");

    if (noise && !(noise->snr > 0.0)) fail("noise.snr", "must be positive");

    try {
        recon.validate();
    } catch (const std::invalid_argument& e) {
        fail(recon.solver == Solver::tv && !(recon.tv_weight > 0.0) ? "recon.tv_weight" : "recon.solver", e.what());
    }
    try {
        align.validate(phantom.n);
    } catch (const std::invalid_argument& e) {
        fail("align.updates", e.what());
    }
    if (methods.empty()) fail("align.methods", "at least one method is required");
    for (const auto& m : methods)
        if (three_d && (m == "PM" || m == "PM_LPF"))
            fail("align.methods", "method " + m + " is not available for 3D experiments (PBA, NONE, ALIGNED)");
    const bool matching = std::ranges::any_of(methods, [](const std::string& m) { return m == "PM" || m == "PM_LPF"; });
    if (matching && (align.pm_max_lag < 0 || 2 * static_cast<std::size_t>(align.pm_max_lag) >= phantom.n))
        fail("align.pm_max_lag", "must satisfy 0 <= pm_max_lag < N/2 = " + std::to_string(phantom.n / 2));
    if (three_d && slices == 0) fail("align.slices", "must be positive");
}

const std::vector<std::string>& sweep_axes() {
    static const std::vector<std::string> axes{"snr", "step", "J", "L", "k_max"};
    return axes;
}

void apply_override(ExperimentConfig& cfg, std::string_view axis, double value) {
    if (axis == "snr") {
        if (!cfg.noise) cfg.noise = NoiseSpec{};
        cfg.noise->snr = value;
    } else if (axis == "step") {
        cfg.geometry.step = value;
    } else if (axis == "J") {
        cfg.align.inner_iters = static_cast<int>(std::lround(value));
        cfg.recon.inner_iters = cfg.align.inner_iters;
    } else if (axis == "L") {
        cfg.align.outer_updates = static_cast<int>(std::lround(value));
    } else if (axis == "k_max") {
        cfg.align.freq_grid = FreqGrid::make(value, cfg.align.freq_grid.oversampling);
    } else {
        throw std::invalid_argument("unknown sweep axis '" + std::string(axis) + "' (snr, step, J, L, k_max)");
    }
}

}  // namespace pba
