#include "pba/fourier.hpp"

#include <cmath>
#include <numbers>

#include "fft.hpp"
#include "pba/image.hpp"

namespace pba {

FreqGrid FreqGrid::make(double k_max, int oversampling) {
    if (oversampling <= 0)
        throw std::invalid_argument("FreqGrid: oversampling must be positive");
    const double steps = (k_max - 1.0) * oversampling;
    const long count = std::lround(steps);
    if (!(k_max > 1.0) || count < 1 || std::abs(steps - static_cast<double>(count)) > 1e-9)
        throw std::invalid_argument("FreqGrid: k_max must exceed 1 and lie on the 1/oversampling lattice");
    FreqGrid grid;
    grid.oversampling = oversampling;
    for (long j = 1; j <= count; ++j)
        grid.values.push_back(1.0 + static_cast<double>(j) / oversampling);
    return grid;
}

void FreqGrid::validate(std::size_t n) const {
    if (values.empty())
        throw std::invalid_argument("FreqGrid: no frequencies");
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double k = values[i];
        if (!(k > 1.0) || !(k < static_cast<double>(n) + 1.0))
            throw std::invalid_argument("FreqGrid: frequency " + std::to_string(k) + " outside (1, N+1)");
        if (i > 0 && !(k > values[i - 1]))
            throw std::invalid_argument("FreqGrid: frequencies must increase strictly");
    }
}

std::complex<double> dft_at(std::span<const double> g, double k) {
    const std::size_t n = g.size();
    if (n == 0)
        throw std::invalid_argument("dft_at: empty signal");
    if (!(k >= 1.0) || !(k < static_cast<double>(n) + 1.0))
        throw std::invalid_argument("dft_at: frequency " + std::to_string(k) + " outside [1, N+1)");
    const double w = -2.0 * std::numbers::pi * (k - 1.0) / static_cast<double>(n);
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double phase = w * static_cast<double>(i);
        re += g[i] * std::cos(phase);
        im += g[i] * std::sin(phase);
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    return {re * scale, im * scale};
}

std::vector<double> fractional_shift(std::span<const double> g, double eps) {
    if (!std::isfinite(eps))
        throw std::invalid_argument("fractional_shift: shift must be finite");
    const std::size_t n = g.size();
    if (n == 0) return {};
    auto spec = detail::fft_real(g);
    const double base = 2.0 * std::numbers::pi * eps / static_cast<double>(n);
    for (std::size_t j = 0; j < n; ++j) {
        if (n % 2 == 0 && j == n / 2) {
            spec[j] *= std::cos(std::numbers::pi * eps);
            continue;
        }
        const double freq = j <= n / 2 ? static_cast<double>(j) : static_cast<double>(j) - static_cast<double>(n);
        spec[j] *= std::polar(1.0, base * freq);
    }
    const auto back = detail::fft(spec, true);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = back[i].real() / static_cast<double>(n);
    return out;
}

double phase_ratio_shift(std::span<const double> g_meas, std::span<const double> g_ref, double k) {
    if (g_meas.size() != g_ref.size())
        throw std::invalid_argument("phase_ratio_shift: length mismatch");
    const std::size_t n = g_ref.size();
    const auto ref = dft_at(g_ref, k);
    if (std::abs(ref) < 1e-12 * norm2(g_ref) || std::abs(ref) == 0.0)
        throw DegenerateFrequency("phase_ratio_shift: reference coefficient vanishes at k = " + std::to_string(k));
    if (!(k > 1.0))
        throw DegenerateFrequency("phase_ratio_shift: zero frequency carries no phase");
    const auto meas = dft_at(g_meas, k);
    // Re{ N/(i 2pi (k-1)) * (log|r| + i arg r) } = N arg r / (2 pi (k-1))
    double phase = std::arg(meas / ref);
    if (phase >= std::numbers::pi) phase -= 2.0 * std::numbers::pi;
    return static_cast<double>(n) * phase / (2.0 * std::numbers::pi * (k - 1.0));
}

std::vector<double> low_pass(std::span<const double> g, double k_cut) {
    const std::size_t n = g.size();
    if (n == 0) return {};
    auto spec = detail::fft_real(g);
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t partner = j == 0 ? 0 : n - j;
        const double k = 1.0 + static_cast<double>(std::min(j, partner));
        if (k >= k_cut) spec[j] = 0.0;
    }
    const auto back = detail::fft(spec, true);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = back[i].real() / static_cast<double>(n);
    return out;
}

int best_circular_lag(std::span<const double> a, std::span<const double> b, int max_lag) {
    if (a.size() != b.size())
        throw std::invalid_argument("best_circular_lag: length mismatch");
    const long n = static_cast<long>(a.size());
    if (max_lag < 0 || 2L * max_lag >= n)
        throw std::invalid_argument("best_circular_lag: max_lag must satisfy 0 <= max_lag < N/2");
    const auto score = [&](long lag) {
        double acc = 0.0;
        for (long i = 0; i < n; ++i)
            acc += a[static_cast<std::size_t>(((i + lag) % n + n) % n)] * b[static_cast<std::size_t>(i)];
        return acc;
    };
    int best = 0;
    double best_score = score(0);
    for (int mag = 1; mag <= max_lag; ++mag) {
        for (int lag : {mag, -mag}) {
            const double s = score(lag);
            if (s > best_score) {
                best_score = s;
                best = lag;
            }
        }
    }
    return best;
}

std::vector<double> rotate(std::span<const double> g, long lag) {
    const long n = static_cast<long>(g.size());
    std::vector<double> out(g.size());
    for (long i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] = g[static_cast<std::size_t>(((i - lag) % n + n) % n)];
    return out;
}

}  // namespace pba
