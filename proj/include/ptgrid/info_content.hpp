#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ptgrid/error.hpp"

namespace ptgrid::info {

/// log2 C(n, k) for real n >= k >= 0 via the log-gamma generalization.
inline double log2_binomial(double n, double k) {
    if (!(k >= 0.0) || !(n >= k)) {
        throw DomainError("log2_binomial requires n >= k >= 0, got n=" + std::to_string(n) + " k=" + std::to_string(k));
    }
    return (std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)) / std::numbers::ln2;
}

inline double grid_spacing(std::size_t resolution) {
    if (resolution < 2) throw DomainError("grid spacing needs resolution >= 2");
    return 2.0 / static_cast<double>(resolution - 1);
}

/// Bits needed to place N indistinguishable points on the 4/delta^2
/// distinguishable positions of [-1,1]^2.
inline double info_raw(double n_points, double delta) {
    if (!(delta > 0.0)) throw DomainError("positional quantization must be positive");
    const double slots = 4.0 / (delta * delta);
    if (slots < n_points) {
        throw DomainError("capacity 4/delta^2 = " + std::to_string(slots) + " is below N = " + std::to_string(n_points));
    }
    return log2_binomial(slots, n_points);
}

/// Occupancy patterns of a binary cell encoding, summed over every possible
/// number of occupied cells with a log-sum-exp.
inline double info_binary(std::size_t n_points, std::size_t resolution) {
    if (resolution < 2) throw DomainError("resolution must be >= 2");
    if (n_points < 1) throw DomainError("need at least one point");
    const double cells = static_cast<double>(resolution - 1) * static_cast<double>(resolution - 1);
    const auto q_max = static_cast<std::size_t>(std::min(static_cast<double>(n_points), cells));

    // Terms are unimodal in q with the peak at cells/2; find the max first.
    const double q_peak = std::min(static_cast<double>(q_max), std::floor(cells / 2.0));
    const double peak = log2_binomial(cells, std::max(1.0, q_peak));
    double acc = 0.0;
    for (std::size_t q = 1; q <= q_max; ++q) {
        acc += std::exp2(log2_binomial(cells, static_cast<double>(q)) - peak);
    }
    return peak + std::log2(acc);
}

/// Stars and bars: N indistinguishable points over (r-1)^2 cells.
inline double info_count(std::size_t n_points, std::size_t resolution) {
    if (resolution < 2) throw DomainError("resolution must be >= 2");
    const double cells = static_cast<double>(resolution - 1) * static_cast<double>(resolution - 1);
    const double n = static_cast<double>(n_points);
    return log2_binomial(n + cells - 1.0, n);
}

/// Effective quantization delta_eff^2 = delta^2 + eta * h^2.
inline double effective_quantization_sq(std::size_t resolution, double delta, double eta) {
    if (eta < 0.0) throw DomainError("eta must be non-negative");
    const double h = grid_spacing(resolution);
    return delta * delta + eta * h * h;
}

inline double info_proposed(double n_points, std::size_t resolution, double delta, double eta) {
    if (!(delta > 0.0)) throw DomainError("positional quantization must be positive");
    const double slots = 4.0 / effective_quantization_sq(resolution, delta, eta);
    if (slots < n_points) {
        throw DomainError("capacity 4/delta_eff^2 = " + std::to_string(slots) + " is below N = " +
                          std::to_string(n_points));
    }
    return log2_binomial(slots, n_points);
}

struct InfoContentReport {
    std::size_t n_points = 0;
    std::size_t resolution = 0;
    double delta = 0.0;
    double eta = 0.0;
    double h = 0.0;

    double raw_bits = 0.0;       // H_X
    double binary_bits = 0.0;    // H_B
    double count_bits = 0.0;     // H_C
    double proposed_bits = 0.0;  // H_G

    double retention_binary = 0.0;
    double retention_count = 0.0;
    double retention_proposed = 0.0;
};

inline InfoContentReport compare_encodings(std::size_t n_points, std::size_t resolution, double delta, double eta) {
    InfoContentReport rep;
    rep.n_points = n_points;
    rep.resolution = resolution;
    rep.delta = delta;
    rep.eta = eta;
    rep.h = grid_spacing(resolution);
    const auto n = static_cast<double>(n_points);
    rep.raw_bits = info_raw(n, delta);
    rep.binary_bits = info_binary(n_points, resolution);
    rep.count_bits = info_count(n_points, resolution);
    rep.proposed_bits = info_proposed(n, resolution, delta, eta);
    if (rep.raw_bits > 0.0) {
        rep.retention_binary = rep.binary_bits / rep.raw_bits;
        rep.retention_count = rep.count_bits / rep.raw_bits;
        rep.retention_proposed = rep.proposed_bits / rep.raw_bits;
    }
    return rep;
}

} // namespace ptgrid::info
