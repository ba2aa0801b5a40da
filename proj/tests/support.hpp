#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "pba/image.hpp"
#include "pba/projector.hpp"

namespace testing {

inline std::vector<double> random_vector(std::size_t n, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> v(n);
    for (double& x : v) x = dist(rng);
    return v;
}

inline pba::Image random_image(std::size_t n, std::uint64_t seed) {
    pba::Image img(n);
    const auto v = random_vector(n * n, seed);
    std::ranges::copy(v, img.pixels().begin());
    return img;
}

inline pba::Sinogram random_sinogram(const pba::Geometry& g, std::uint64_t seed) {
    pba::Sinogram s(g);
    const auto v = random_vector(s.data().size(), seed);
    std::ranges::copy(v, s.data().begin());
    return s;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double max_abs(std::span<const double> a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace testing
