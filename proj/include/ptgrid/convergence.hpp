#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "ptgrid/codec.hpp"
#include "ptgrid/info_content.hpp"
#include "ptgrid/stats.hpp"

namespace ptgrid::convergence {

using info::grid_spacing;

enum class Smoothness { C2, C1_alpha, C0_gamma };

inline const char* to_string(Smoothness s) {
    switch (s) {
        case Smoothness::C2: return "C2";
        case Smoothness::C1_alpha: return "C1_alpha";
        case Smoothness::C0_gamma: return "C0_gamma";
    }
    return "?";
}

using Field = std::function<double(std::span<const double>)>;

/// An analytic test field with a known interpolation order.
struct SmoothnessCase {
    Smoothness label = Smoothness::C2;
    std::string name;
    Field field;
    double expected_order = 2.0;
    /// max(|H_xx| + |H_yy|) over the domain, when known. Enables the
    /// pointwise h^2 bound check for C2 fields.
    std::optional<double> curvature_bound;
};

/// sin(pi x) sin(pi y): C2 with max(|H_xx| + |H_yy|) = 2 pi^2.
inline SmoothnessCase sine_product() {
    return {Smoothness::C2, "sin(pi x) sin(pi y)",
            [](std::span<const double> p) { return std::sin(std::numbers::pi * p[0]) * std::sin(std::numbers::pi * p[1]); },
            2.0, 2.0 * std::numbers::pi * std::numbers::pi};
}

/// |x|: Lipschitz with a kink along x = 0.
inline SmoothnessCase abs_kink() {
    return {Smoothness::C0_gamma, "|x|", [](std::span<const double> p) { return std::abs(p[0]); }, 1.0, std::nullopt};
}

/// |x|^(1/2): Holder continuous with exponent 1/2.
inline SmoothnessCase holder_sqrt() {
    return {Smoothness::C0_gamma, "|x|^(1/2)", [](std::span<const double> p) { return std::sqrt(std::abs(p[0])); }, 0.5,
            std::nullopt};
}

/// x|x|^alpha: the first derivative is Holder continuous with exponent alpha.
inline SmoothnessCase holder_derivative(double alpha) {
    return {Smoothness::C1_alpha, "x|x|^" + std::to_string(alpha),
            [alpha](std::span<const double> p) { return p[0] * std::pow(std::abs(p[0]), alpha); }, 1.0 + alpha,
            std::nullopt};
}

/// 1 + x/2 - y/3: reconstructed exactly up to the stabilizer.
inline SmoothnessCase affine() {
    return {Smoothness::C2, "1 + x/2 - y/3", [](std::span<const double> p) { return 1.0 + 0.5 * p[0] - p[1] / 3.0; },
            2.0, 0.0};
}

struct ConvergenceOptions {
    int dim = 2;
    std::vector<std::size_t> resolutions{17, 33, 65, 129, 257};
    /// Encoding points per cell.
    std::size_t density = 4;
    std::size_t eval_points = 100000;
    /// Evaluation points stay this many cells away from the domain boundary.
    /// Boundary vertices only receive one-sided support, which biases them
    /// by O(h) regardless of field smoothness.
    std::size_t boundary_margin_cells = 1;
    std::uint64_t seed = 1;
};

struct ConvergenceRow {
    std::size_t resolution = 0;
    double h = 0.0;
    double max_abs = 0.0;
    double rms = 0.0;
    /// (1/8) max(|H_xx| + |H_yy|) h^2 when the case supplies a curvature bound.
    std::optional<double> pointwise_bound;
};

struct ConvergenceReport {
    std::string field;
    Smoothness label = Smoothness::C2;
    double expected_order = 0.0;
    std::vector<ConvergenceRow> rows;
    /// Errors sat at the stabilizer floor at every resolution; no slope.
    bool exact = false;
    std::optional<stats::LinearFit> rms_fit;
    std::optional<stats::LinearFit> max_fit;

    [[nodiscard]] std::optional<double> rms_slope() const { return rms_fit ? std::optional(rms_fit->slope) : std::nullopt; }
    [[nodiscard]] std::optional<double> max_slope() const { return max_fit ? std::optional(max_fit->slope) : std::nullopt; }
    /// Half-width of the 95% confidence band on the RMS slope.
    [[nodiscard]] double rms_band() const {
        return rms_fit ? stats::t95(rms_fit->n - 2) * rms_fit->slope_stderr : 0.0;
    }
};

namespace detail {

/// Additive recurrence (R_d sequence) in the unit cube; low discrepancy.
inline std::vector<double> cell_pattern(int dim, std::size_t count) {
    // phi_d solves x^(d+1) = x + 1.
    double phi = 2.0;
    for (int it = 0; it < 64; ++it) phi = std::pow(1.0 + phi, 1.0 / (dim + 1));
    std::vector<double> out(count * static_cast<std::size_t>(dim));
    for (std::size_t i = 0; i < count; ++i) {
        for (int a = 0; a < dim; ++a) {
            const double alpha = 1.0 / std::pow(phi, a + 1);
            out[i * static_cast<std::size_t>(dim) + static_cast<std::size_t>(a)] =
                std::fmod(0.5 + alpha * static_cast<double>(i), 1.0);
        }
    }
    return out;
}

} // namespace detail

/// Cloud with the same low-discrepancy pattern of `density` points in every
/// cell. Replicating one pattern keeps each interior vertex's footprint
/// centroid on the vertex, so vertex values carry no first-order bias.
inline PointCloudBatch stratified_cloud(int dim, std::size_t resolution, std::size_t density) {
    if (resolution < 2) throw ValidationError("resolution must be >= 2");
    const auto pattern = detail::cell_pattern(dim, density);
    const std::size_t cells_per_axis = resolution - 1;
    const std::size_t cells = ipow(cells_per_axis, dim);
    const double h = grid_spacing(resolution);
    const auto d = static_cast<std::size_t>(dim);

    PointCloudBatch cloud;
    cloud.dim = dim;
    cloud.samples.resize(1);
    auto& coords = cloud.samples[0].coords;
    coords.reserve(cells * density * d);
    std::array<std::size_t, kMaxDim> cell{};
    for (std::size_t c = 0; c < cells; ++c) {
        std::size_t rem = c;
        for (int a = dim - 1; a >= 0; --a) {
            cell[a] = rem % cells_per_axis;
            rem /= cells_per_axis;
        }
        for (std::size_t p = 0; p < density; ++p) {
            for (std::size_t a = 0; a < d; ++a) {
                const double x = -1.0 + (static_cast<double>(cell[a]) + pattern[p * d + a]) * h;
                coords.push_back(std::clamp(x, -1.0, 1.0));
            }
        }
    }
    return cloud;
}

inline ConvergenceRow measure_resolution(const SmoothnessCase& sc, std::size_t resolution, const ConvergenceOptions& opt) {
    PointCloudBatch cloud = stratified_cloud(opt.dim, resolution, opt.density);
    const std::size_t n = cloud.points(0);
    cloud.channels = 1;
    cloud.samples[0].channels.resize(n);
    for (std::size_t i = 0; i < n; ++i) cloud.samples[0].channels[i] = sc.field(cloud.point(0, i));

    const auto topo = encode_topology(cloud, resolution);
    const auto resp = encode_response(cloud, resolution, ShiftSpec{ShiftMode::offset, ShiftScope::batch, std::nullopt});

    const double h = grid_spacing(resolution);
    const double margin = std::min(1.0, static_cast<double>(opt.boundary_margin_cells) * h);
    std::mt19937_64 rng(opt.seed * 1000003ULL + resolution);
    std::uniform_real_distribution<double> uni(-1.0 + margin, 1.0 - margin);
    PointCloudBatch eval;
    eval.dim = opt.dim;
    eval.samples.resize(1);
    eval.samples[0].coords.resize(opt.eval_points * static_cast<std::size_t>(opt.dim));
    for (double& v : eval.samples[0].coords) v = uni(rng);

    const auto rec = reconstruct(topo, resp, eval);
    double max_abs = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < opt.eval_points; ++i) {
        const double e = rec.samples[0].channels[i] - sc.field(eval.point(0, i));
        max_abs = std::max(max_abs, std::abs(e));
        sq += e * e;
    }
    ConvergenceRow row{resolution, h, max_abs, std::sqrt(sq / static_cast<double>(opt.eval_points)), std::nullopt};
    if (sc.curvature_bound) row.pointwise_bound = *sc.curvature_bound * h * h / 8.0;
    return row;
}

/// Encodes the case's field on progressively finer grids, reconstructs at
/// fresh evaluation points and fits log(error) against log(h).
inline ConvergenceReport run_convergence(const SmoothnessCase& sc, const ConvergenceOptions& opt = {}) {
    if (opt.resolutions.size() < 4) throw ValidationError("convergence study needs at least 4 resolutions");
    for (std::size_t i = 1; i < opt.resolutions.size(); ++i) {
        if (opt.resolutions[i] <= opt.resolutions[i - 1]) throw ValidationError("resolutions must be strictly increasing");
    }
    if (opt.density < 4) throw ValidationError("density must be >= 4 points per cell");
    if (opt.eval_points == 0) throw ValidationError("need at least one evaluation point");

    ConvergenceReport rep;
    rep.field = sc.name;
    rep.label = sc.label;
    rep.expected_order = sc.expected_order;
    for (std::size_t r : opt.resolutions) rep.rows.push_back(measure_resolution(sc, r, opt));

    // Probe the field's magnitude to place the stabilizer floor.
    double scale = 1.0;
    {
        std::mt19937_64 rng(opt.seed);
        std::uniform_real_distribution<double> uni(-1.0, 1.0);
        std::vector<double> p(static_cast<std::size_t>(opt.dim));
        for (int i = 0; i < 1000; ++i) {
            for (double& v : p) v = uni(rng);
            scale = std::max(scale, std::abs(sc.field(p)));
        }
    }
    const double floor = 1e-5 * scale;
    rep.exact = std::all_of(rep.rows.begin(), rep.rows.end(), [&](const ConvergenceRow& r) { return r.max_abs <= floor; });
    if (rep.exact) return rep;

    std::vector<double> lh, lrms, lmax;
    for (const auto& row : rep.rows) {
        lh.push_back(std::log(row.h));
        lrms.push_back(std::log(row.rms));
        lmax.push_back(std::log(row.max_abs));
    }
    rep.rms_fit = stats::linear_fit(lh, lrms);
    rep.max_fit = stats::linear_fit(lh, lmax);
    return rep;
}

} // namespace ptgrid::convergence
