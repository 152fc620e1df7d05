#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "ptgrid/codec.hpp"
#include "ptgrid/stats.hpp"

namespace ptgrid::bench {

struct TimingRow {
    std::size_t x = 0;
    std::vector<double> seconds;
    double median = 0.0;
};

struct EncodingBench {
    std::size_t resolution = 0;
    std::vector<TimingRow> rows;
    /// log(median time) against log(N).
    stats::LinearFit fit;
    [[nodiscard]] double exponent() const { return fit.slope; }
};

struct ReconstructionBench {
    std::size_t points = 0;
    std::vector<TimingRow> rows;
    /// median time = intercept + slope * r^2
    stats::LinearFit fit;
    [[nodiscard]] double r2_coefficient() const { return fit.slope; }
    [[nodiscard]] double r2_t_stat() const { return fit.slope_stderr > 0.0 ? fit.slope / fit.slope_stderr : INFINITY; }
};

namespace detail {

template <typename F>
double time_once(F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count();
}

inline PointCloudBatch uniform_cloud(int dim, std::size_t n, std::uint64_t seed, bool with_channel) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    PointCloudBatch c;
    c.dim = dim;
    c.channels = with_channel ? 1 : 0;
    c.samples.resize(1);
    c.samples[0].coords.resize(n * static_cast<std::size_t>(dim));
    for (double& v : c.samples[0].coords) v = uni(rng);
    if (with_channel) {
        c.samples[0].channels.resize(n);
        for (std::size_t i = 0; i < n; ++i) c.samples[0].channels[i] = 1.0 + 0.5 * c.samples[0].coords[i * 2];
    }
    return c;
}

// Keeps the optimizer from discarding benchmarked work.
inline volatile double sink = 0.0;

} // namespace detail

/// Times topology encoding of one uniform 2D cloud per N and fits the
/// log-log slope of the median times.
inline EncodingBench bench_encoding(const std::vector<std::size_t>& n_list, std::size_t resolution, std::size_t repeats,
                                    std::uint64_t seed = 1) {
    if (n_list.size() < 2) throw ValidationError("bench_encoding needs at least two point counts");
    if (repeats == 0) throw ValidationError("repeats must be >= 1");
    EncodingBench out;
    out.resolution = resolution;
    std::vector<double> lx, ly;
    for (std::size_t n : n_list) {
        if (n == 0) throw ValidationError("point counts must be >= 1");
        const auto cloud = detail::uniform_cloud(2, n, seed + n, false);
        TimingRow row{n, {}, 0.0};
        // One warm-up run so first-touch page faults are not billed to the first N.
        detail::sink = encode_topology(cloud, resolution).values[0];
        for (std::size_t k = 0; k < repeats; ++k) {
            row.seconds.push_back(detail::time_once([&] { detail::sink = encode_topology(cloud, resolution).values[0]; }));
        }
        row.median = stats::median(row.seconds);
        lx.push_back(std::log(static_cast<double>(n)));
        ly.push_back(std::log(row.median));
        out.rows.push_back(std::move(row));
    }
    out.fit = stats::linear_fit(lx, ly);
    return out;
}

/// Times reconstruction of a fixed cloud at growing resolutions and fits
/// median time = a + b r^2.
inline ReconstructionBench bench_reconstruction(std::size_t points, const std::vector<std::size_t>& resolutions,
                                                std::size_t repeats, std::uint64_t seed = 1) {
    if (resolutions.size() < 3) throw ValidationError("bench_reconstruction needs at least three resolutions");
    if (repeats == 0) throw ValidationError("repeats must be >= 1");
    ReconstructionBench out;
    out.points = points;
    const auto cloud = detail::uniform_cloud(2, points, seed, true);
    std::vector<double> lx, ly;
    for (std::size_t r : resolutions) {
        const auto topo = encode_topology(cloud, r);
        const auto resp = encode_response(cloud, r);
        TimingRow row{r, {}, 0.0};
        detail::sink = reconstruct(topo, resp, cloud).samples[0].channels[0];
        for (std::size_t k = 0; k < repeats; ++k) {
            row.seconds.push_back(
                detail::time_once([&] { detail::sink = reconstruct(topo, resp, cloud).samples[0].channels[0]; }));
        }
        row.median = stats::median(row.seconds);
        lx.push_back(static_cast<double>(r) * static_cast<double>(r));
        ly.push_back(row.median);
        out.rows.push_back(std::move(row));
    }
    out.fit = stats::linear_fit(lx, ly);
    return out;
}

} // namespace ptgrid::bench
