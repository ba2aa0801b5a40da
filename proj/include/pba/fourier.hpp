#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pba {

/// Raised when a reference spectrum coefficient is too small to divide by.
/// Callers estimating shifts skip the offending frequency.
class DegenerateFrequency : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Frequencies used for shift estimation. Frequency k follows the 1-based
/// convention of `dft_at`: k = 1 is the zero frequency.
struct FreqGrid {
    std::vector<double> values;
    int oversampling{20};

    /// k = 1 + j / oversampling for j = 1 .. oversampling * (k_max - 1).
    /// The default is 20 values, 1.05 .. 2.0.
    static FreqGrid make(double k_max = 2.0, int oversampling = 20);

    /// Throws std::invalid_argument unless every k lies in (1, n + 1) and the
    /// values increase strictly.
    void validate(std::size_t n) const;
};

/// Unitary DFT of a real signal evaluated at a (possibly fractional) 1-based
/// frequency k:  (1/sqrt(N)) * sum_n g[n] exp(-i 2 pi (k-1) n / N).
/// Direct summation; requires 1 <= k < N + 1.
std::complex<double> dft_at(std::span<const double> g, double k);

/// Circular shift by a real amount: returns h with h[n] = g[n + eps] (indices
/// mod N), realized as a phase ramp on the integer-frequency spectrum. Bins
/// above N/2 use the negative-frequency ramp; for even N the Nyquist bin is
/// multiplied by cos(pi * eps). Integer eps reproduces index rotation.
std::vector<double> fractional_shift(std::span<const double> g, double eps);

/// Shift of `g_meas` relative to `g_ref` read from the phase of the ratio of
/// their spectra at frequency k:
///   Re{ N / (i 2 pi (k-1)) * Log(F(g_meas)_k / F(g_ref)_k) },
/// principal branch with phase in [-pi, pi). For g_meas[n] = g_ref[n + eps]
/// this returns eps when |eps| <= N / (2 (k-1)), and otherwise eps wrapped
/// by a multiple of N / (k-1).
/// Throws DegenerateFrequency if |F(g_ref)_k| < 1e-12 * ||g_ref||.
double phase_ratio_shift(std::span<const double> g_meas, std::span<const double> g_ref, double k);

/// Zeroes every integer frequency bin whose 1-based frequency is >= k_cut,
/// together with its conjugate partner.
std::vector<double> low_pass(std::span<const double> g, double k_cut);

/// Integer lag L in [-max_lag, max_lag] maximizing sum_n a[n + L] * b[n]
/// (circular). Ties go to the smaller |L|, then to the positive lag.
int best_circular_lag(std::span<const double> a, std::span<const double> b, int max_lag);

/// Index rotation: out[n] = g[(n - lag) mod N], i.e. the content moves towards
/// higher indices by `lag`.
std::vector<double> rotate(std::span<const double> g, long lag);

}  // namespace pba
