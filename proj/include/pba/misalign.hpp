#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "pba/projector.hpp"

namespace pba {

/// One translational offset per angle, in detector bins. The convention
/// throughout is that misaligned data satisfy  data_m(x) = ideal_m(x - eps_m).
struct ShiftSet {
    std::vector<double> eps;

    [[nodiscard]] std::size_t size() const noexcept { return eps.size(); }
    [[nodiscard]] ShiftSet negated() const;
    [[nodiscard]] double abs_total() const noexcept;

    friend ShiftSet operator+(const ShiftSet& a, const ShiftSet& b);
    friend ShiftSet operator-(const ShiftSet& a, const ShiftSet& b);
    friend bool operator==(const ShiftSet&, const ShiftSet&) = default;
};

struct NoiseSpec {
    double snr{5.0};
    std::uint64_t seed{0};
};

/// M i.i.d. integers uniform on [lo, hi].
ShiftSet random_shifts(std::size_t count, long lo, long hi, std::uint64_t seed);

/// Column m becomes fractional_shift(column m, -eps_m).
Sinogram apply_shifts(const Sinogram& s, const ShiftSet& shifts);

/// Sequential neighbour registration of perfectly aligned data: for m = 2..M
/// the column is rotated by the integer lag maximizing its circular
/// cross-correlation with the already processed column m-1. Returns the
/// rotated sinogram and the per-column shifts that were introduced, in the
/// `apply_shifts` convention (apply_shifts(s, shifts) equals the output).
std::pair<Sinogram, ShiftSet> cc_misalign(const Sinogram& s, int max_lag);

/// Adds i.i.d. N(0, sigma^2) with sigma = mean(|s|) / snr over all entries.
Sinogram add_noise(const Sinogram& s, const NoiseSpec& spec);

/// Noise standard deviation `add_noise` uses for this sinogram.
double noise_sigma(std::span<const double> data, double snr);

}  // namespace pba
