#include "pba/phantoms.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace pba {
namespace {

constexpr double k_support_radius = 0.95;

struct Ellipse {
    double intensity;
    double a, b;      // semi-axes along x and y
    double x0, y0;
    double phi_deg;
};

// Shepp & Logan (1974), unit-square coordinates with y pointing up.
constexpr std::array<Ellipse, 10> k_shepp_logan{{
    {2.00, 0.6900, 0.9200, 0.00, 0.0000, 0.0},
    {-0.98, 0.6624, 0.8740, 0.00, -0.0184, 0.0},
    {-0.02, 0.1100, 0.3100, 0.22, 0.0000, -18.0},
    {-0.02, 0.1600, 0.4100, -0.22, 0.0000, 18.0},
    {0.01, 0.2100, 0.2500, 0.00, 0.3500, 0.0},
    {0.01, 0.0460, 0.0460, 0.00, 0.1000, 0.0},
    {0.01, 0.0460, 0.0460, 0.00, -0.1000, 0.0},
    {0.01, 0.0460, 0.0230, -0.08, -0.6050, 0.0},
    {0.01, 0.0230, 0.0230, 0.00, -0.6060, 0.0},
    {0.01, 0.0230, 0.0460, 0.06, -0.6050, 0.0},
}};

// Pixel-center coordinates in [-1, 1], y pointing up.
double unit_x(std::size_t col, std::size_t n) {
    const double c = (static_cast<double>(n) - 1.0) / 2.0;
    return (static_cast<double>(col) - c) / (static_cast<double>(n) / 2.0);
}

double unit_y(std::size_t row, std::size_t n) {
    const double c = (static_cast<double>(n) - 1.0) / 2.0;
    return (c - static_cast<double>(row)) / (static_cast<double>(n) / 2.0);
}

void require_min_size(std::size_t n, const char* what) {
    if (n < 16)
        throw std::invalid_argument(std::string(what) + ": size must be at least 16, got " + std::to_string(n));
}

// ---------------------------------------------------------------------------
// Geometric shapes

enum class ShapeKind { disk, annulus, rect };

struct Shape {
    ShapeKind kind;
    double cx, cy;
    double p0, p1;  // disk: radius; annulus: inner, outer; rect: half-width, half-height
    double intensity;

    [[nodiscard]] bool contains(double x, double y) const {
        const double dx = x - cx, dy = y - cy;
        switch (kind) {
            case ShapeKind::disk: return dx * dx + dy * dy <= p0 * p0;
            case ShapeKind::annulus: {
                const double r2 = dx * dx + dy * dy;
                return r2 >= p0 * p0 && r2 <= p1 * p1;
            }
            case ShapeKind::rect: return std::abs(dx) <= p0 && std::abs(dy) <= p1;
        }
        return false;
    }

    [[nodiscard]] double area() const {
        switch (kind) {
            case ShapeKind::disk: return std::numbers::pi * p0 * p0;
            case ShapeKind::annulus: return std::numbers::pi * (p1 * p1 - p0 * p0);
            case ShapeKind::rect: return 4.0 * p0 * p1;
        }
        return 0.0;
    }

    [[nodiscard]] double extent() const {
        const double c = std::hypot(cx, cy);
        switch (kind) {
            case ShapeKind::disk: return c + p0;
            case ShapeKind::annulus: return c + p1;
            case ShapeKind::rect: return std::hypot(std::abs(cx) + p0, std::abs(cy) + p1);
        }
        return 0.0;
    }
};

std::vector<Shape> base_layout(int variant) {
    using enum ShapeKind;
    switch (variant) {
        case 1:
            return {{disk, -0.35, 0.25, 0.28, 0.0, 0.8},
                    {rect, 0.35, 0.20, 0.18, 0.25, 0.5},
                    {annulus, 0.00, -0.45, 0.12, 0.30, 1.0}};
        case 2:
            return {{rect, -0.42, -0.10, 0.16, 0.40, 0.6},
                    {rect, 0.08, 0.47, 0.27, 0.14, 0.3},
                    {disk, 0.03, -0.36, 0.20, 0.0, 1.0},
                    {annulus, 0.50, 0.02, 0.09, 0.23, 0.8}};
        case 3: {
            std::vector<Shape> out{{annulus, 0.0, 0.0, 0.10, 0.26, 0.9}};
            const std::array<double, 5> levels{0.3, 0.45, 0.6, 0.75, 1.0};
            for (int i = 0; i < 5; ++i) {
                const double t = 2.0 * std::numbers::pi * i / 5.0 + 0.3;
                out.push_back({disk, 0.56 * std::cos(t), 0.56 * std::sin(t), 0.15, 0.0, levels[static_cast<std::size_t>(i)]});
            }
            return out;
        }
        case 4:
            return {{annulus, 0.0, 0.0, 0.58, 0.74, 0.7},
                    {disk, -0.22, 0.12, 0.20, 0.0, 1.0},
                    {rect, 0.22, -0.14, 0.13, 0.22, 0.4}};
        default:
            throw std::invalid_argument("shapes_phantom: unknown variant " + std::to_string(variant) + " (expected 1..4)");
    }
}

bool layout_valid(const std::vector<Shape>& shapes) {
    for (const auto& s : shapes)
        if (s.extent() > 0.9) return false;
    constexpr int grid = 400;
    for (int i = 0; i < grid; ++i) {
        const double y = -1.0 + (i + 0.5) * 2.0 / grid;
        for (int j = 0; j < grid; ++j) {
            const double x = -1.0 + (j + 0.5) * 2.0 / grid;
            int hits = 0;
            for (const auto& s : shapes)
                hits += s.contains(x, y) ? 1 : 0;
            if (hits > 1) return false;
        }
    }
    return true;
}

std::vector<Shape> jittered_layout(int variant, std::uint64_t seed) {
    const std::vector<Shape> base = base_layout(variant);
    std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(variant));
    std::uniform_real_distribution<double> shift(-0.03, 0.03);
    std::uniform_real_distribution<double> scale(0.95, 1.05);
    for (int attempt = 0; attempt < 64; ++attempt) {
        std::vector<Shape> shapes = base;
        for (auto& s : shapes) {
            s.cx += shift(rng);
            s.cy += shift(rng);
            const double f = scale(rng);
            s.p0 *= f;
            s.p1 *= f;
        }
        if (layout_valid(shapes)) return shapes;
    }
    return base;
}

// ---------------------------------------------------------------------------
// Ellipsoids

struct Ellipsoid {
    double cx, cy, cz;
    double ax, ay, az;
    double intensity;
    std::vector<std::array<double, 4>> pores;  // cx, cy, cz, radius (normalized units)

    [[nodiscard]] bool in_body(double u, double v, double w) const {
        const double du = (u - cx) / ax, dv = (v - cy) / ay, dw = (w - cz) / az;
        return du * du + dv * dv + dw * dw <= 1.0;
    }

    [[nodiscard]] bool in_pore(double u, double v, double w) const {
        for (const auto& p : pores) {
            const double du = u - p[0], dv = v - p[1], dw = w - p[2];
            if (du * du + dv * dv + dw * dw <= p[3] * p[3]) return true;
        }
        return false;
    }

    [[nodiscard]] double value(double u, double v, double w) const {
        return in_body(u, v, w) && !in_pore(u, v, w) ? intensity : 0.0;
    }

    [[nodiscard]] double volume() const {
        double vol = 4.0 / 3.0 * std::numbers::pi * ax * ay * az;
        for (const auto& p : pores)
            vol -= 4.0 / 3.0 * std::numbers::pi * p[3] * p[3] * p[3];
        return vol;
    }
};

std::vector<Ellipsoid> base_blobs() {
    return {
        {-0.30, 0.25, 0.15, 0.32, 0.30, 0.34, 1.0, {{-0.36, 0.30, 0.20, 0.09}, {-0.22, 0.18, 0.06, 0.07}}},
        {0.32, -0.18, 0.05, 0.34, 0.36, 0.30, 0.7, {{0.30, -0.20, 0.02, 0.11}}},
        {0.10, 0.25, -0.45, 0.28, 0.22, 0.20, 0.5, {}},
    };
}

bool blobs_valid(const std::vector<Ellipsoid>& blobs) {
    for (const auto& b : blobs) {
        if (std::abs(b.cx) + b.ax > 0.75) return false;
        if (std::hypot(b.cy, b.cz) + std::max(b.ay, b.az) > 0.9) return false;
        for (const auto& p : b.pores) {
            // pore must sit inside its body
            const double du = (p[0] - b.cx), dv = (p[1] - b.cy), dw = (p[2] - b.cz);
            const double m = std::min({b.ax, b.ay, b.az});
            if (std::sqrt(du * du + dv * dv + dw * dw) + p[3] > m) return false;
        }
    }
    constexpr int grid = 72;
    for (int i = 0; i < grid; ++i) {
        const double u = -1.0 + (i + 0.5) * 2.0 / grid;
        for (int j = 0; j < grid; ++j) {
            const double v = -1.0 + (j + 0.5) * 2.0 / grid;
            for (int k = 0; k < grid; ++k) {
                const double w = -1.0 + (k + 0.5) * 2.0 / grid;
                int hits = 0;
                for (const auto& b : blobs)
                    hits += b.in_body(u, v, w) ? 1 : 0;
                if (hits > 1) return false;
            }
        }
    }
    return true;
}

std::vector<Ellipsoid> jittered_blobs(std::uint64_t seed) {
    const std::vector<Ellipsoid> base = base_blobs();
    std::mt19937_64 rng(seed * 0xD1B54A32D192ED03ULL + 17);
    std::uniform_real_distribution<double> shift(-0.02, 0.02);
    std::uniform_real_distribution<double> scale(0.95, 1.05);
    for (int attempt = 0; attempt < 32; ++attempt) {
        std::vector<Ellipsoid> blobs = base;
        for (auto& b : blobs) {
            const double du = shift(rng), dv = shift(rng), dw = shift(rng);
            b.cx += du;
            b.cy += dv;
            b.cz += dw;
            b.ax *= scale(rng);
            b.ay *= scale(rng);
            b.az *= scale(rng);
            for (auto& p : b.pores) {
                p[0] += du;
                p[1] += dv;
                p[2] += dw;
            }
        }
        if (blobs_valid(blobs)) return blobs;
    }
    return base;
}

double unit_coord(std::size_t i, std::size_t n) {
    const double c = (static_cast<double>(n) - 1.0) / 2.0;
    return (static_cast<double>(i) - c) / (static_cast<double>(n) / 2.0);
}

}  // namespace

Image shepp_logan(std::size_t n) {
    require_min_size(n, "shepp_logan");

    double extent = 0.0;
    for (const auto& e : k_shepp_logan)
        extent = std::max(extent, std::hypot(e.x0, e.y0) + std::max(e.a, e.b));
    const double scale = extent > k_support_radius ? k_support_radius / extent : 1.0;

    Image img(n);
    for (std::size_t row = 0; row < n; ++row) {
        const double y = unit_y(row, n) / scale;
        for (std::size_t col = 0; col < n; ++col) {
            const double x = unit_x(col, n) / scale;
            double v = 0.0;
            for (const auto& e : k_shepp_logan) {
                const double phi = e.phi_deg * std::numbers::pi / 180.0;
                const double dx = x - e.x0, dy = y - e.y0;
                const double xr = dx * std::cos(phi) + dy * std::sin(phi);
                const double yr = -dx * std::sin(phi) + dy * std::cos(phi);
                if ((xr * xr) / (e.a * e.a) + (yr * yr) / (e.b * e.b) <= 1.0)
                    v += e.intensity;
            }
            img(row, col) = v;
        }
    }

    const auto [lo, hi] = std::minmax_element(img.pixels().begin(), img.pixels().end());
    const double vmin = *lo, range = *hi - *lo;
    for (double& p : img.pixels())
        p = (p - vmin) / range;
    return img;
}

Image shapes_phantom(std::size_t n, int variant, std::uint64_t seed) {
    require_min_size(n, "shapes_phantom");
    const auto shapes = jittered_layout(variant, seed);
    Image img(n);
    for (std::size_t row = 0; row < n; ++row) {
        const double y = unit_y(row, n);
        for (std::size_t col = 0; col < n; ++col) {
            const double x = unit_x(col, n);
            for (const auto& s : shapes) {
                if (s.contains(x, y)) {
                    img(row, col) = s.intensity;
                    break;
                }
            }
        }
    }
    return img;
}

double shapes_phantom_analytic_mass(std::size_t n, int variant, std::uint64_t seed) {
    require_min_size(n, "shapes_phantom");
    const double half = static_cast<double>(n) / 2.0;
    double mass = 0.0;
    for (const auto& s : jittered_layout(variant, seed))
        mass += s.intensity * s.area() * half * half;
    return mass;
}

Volume blob_volume(std::size_t nx, std::size_t ny, std::size_t nz, std::uint64_t seed) {
    require_min_size(std::min({nx, ny, nz}), "blob_volume");
    const auto blobs = jittered_blobs(seed);
    Volume vol(nx, ny, nz);
    for (std::size_t x = 0; x < nx; ++x) {
        const double u = unit_coord(x, nx);
        for (std::size_t z = 0; z < nz; ++z) {
            const double w = unit_coord(z, nz);
            for (std::size_t y = 0; y < ny; ++y) {
                const double v = unit_coord(y, ny);
                double value = 0.0;
                for (const auto& b : blobs)
                    value += b.value(u, v, w);
                vol.at(x, y, z) = value;
            }
        }
    }
    return vol;
}

double blob_volume_analytic_mass(std::size_t nx, std::size_t ny, std::size_t nz, std::uint64_t seed) {
    require_min_size(std::min({nx, ny, nz}), "blob_volume");
    const double cell = (nx / 2.0) * (ny / 2.0) * (nz / 2.0);
    double mass = 0.0;
    for (const auto& b : jittered_blobs(seed))
        mass += b.intensity * b.volume() * cell;
    return mass;
}

}  // namespace pba
