#include "pba/misalign.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "pba/fourier.hpp"

namespace pba {

ShiftSet ShiftSet::negated() const {
    ShiftSet out = *this;
    for (double& e : out.eps)
        e = -e;
    return out;
}

double ShiftSet::abs_total() const noexcept {
    double acc = 0.0;
    for (double e : eps)
        acc += std::abs(e);
    return acc;
}

ShiftSet operator+(const ShiftSet& a, const ShiftSet& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("ShiftSet: size mismatch");
    ShiftSet out = a;
    for (std::size_t i = 0; i < out.size(); ++i)
        out.eps[i] += b.eps[i];
    return out;
}

ShiftSet operator-(const ShiftSet& a, const ShiftSet& b) { return a + b.negated(); }

ShiftSet random_shifts(std::size_t count, long lo, long hi, std::uint64_t seed) {
    if (lo > hi)
        throw std::invalid_argument("random_shifts: lo (" + std::to_string(lo) + ") exceeds hi (" + std::to_string(hi) + ")");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<long> dist(lo, hi);
    ShiftSet out;
    out.eps.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
        out.eps.push_back(static_cast<double>(dist(rng)));
    return out;
}

Sinogram apply_shifts(const Sinogram& s, const ShiftSet& shifts) {
    if (shifts.size() != s.num_angles())
        throw std::invalid_argument("apply_shifts: " + std::to_string(shifts.size()) + " shifts for " +
                                    std::to_string(s.num_angles()) + " angles");
    Sinogram out(s.geometry());
    for (std::size_t m = 0; m < s.num_angles(); ++m) {
        const double e = shifts.eps[m];
        if (e == 0.0) {
            std::ranges::copy(s.column(m), out.column(m).begin());
            continue;
        }
        const auto shifted = fractional_shift(s.column(m), -e);
        std::ranges::copy(shifted, out.column(m).begin());
    }
    return out;
}

std::pair<Sinogram, ShiftSet> cc_misalign(const Sinogram& s, int max_lag) {
    if (max_lag < 0 || 2 * static_cast<std::size_t>(max_lag) >= s.n_det())
        throw std::invalid_argument("cc_misalign: max_lag must satisfy 0 <= max_lag < N/2");
    Sinogram out = s;
    ShiftSet shifts{std::vector<double>(s.num_angles(), 0.0)};
    for (std::size_t m = 1; m < s.num_angles(); ++m) {
        const int lag = best_circular_lag(s.column(m), out.column(m - 1), max_lag);
        if (lag == 0) continue;
        // rotated[x] = col[x + lag], i.e. ideal(x - eps) with eps = -lag
        const auto rotated = rotate(s.column(m), -lag);
        std::ranges::copy(rotated, out.column(m).begin());
        shifts.eps[m] = -static_cast<double>(lag);
    }
    return {std::move(out), std::move(shifts)};
}

double noise_sigma(std::span<const double> data, double snr) {
    if (!(snr > 0.0))
        throw std::invalid_argument("noise: snr must be positive");
    if (data.empty()) return 0.0;
    double mean_abs = 0.0;
    for (double v : data)
        mean_abs += std::abs(v);
    mean_abs /= static_cast<double>(data.size());
    return mean_abs / snr;
}

Sinogram add_noise(const Sinogram& s, const NoiseSpec& spec) {
    const double sigma = noise_sigma(s.data(), spec.snr);
    Sinogram out = s;
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    for (double& v : out.data())
        v += sigma * dist(rng);
    return out;
}

}  // namespace pba
