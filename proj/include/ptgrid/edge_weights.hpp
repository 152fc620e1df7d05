#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "ptgrid/types.hpp"

namespace ptgrid::edge {

/// Edge-aware loss multipliers in [1,3], one per vertex, per sample.
struct EdgeWeightMap {
    GridFieldBatch values;
    /// Shape of the response grid the weights were derived from.
    std::size_t source_samples = 0;
    std::size_t source_resolution = 0;
};

namespace detail {

inline void require_2d_single(const GridFieldBatch& g, const char* who) {
    g.check_consistent();
    if (g.dim != 2) throw ValidationError(std::string(who) + ": needs a 2D grid, got " + std::to_string(g.dim) + "D");
    if (g.channels != 1) throw ValidationError(std::string(who) + ": needs a single-channel grid");
}

} // namespace detail

/// Sobel gradient magnitude with zero-padded borders. Axis 0 indexes rows,
/// axis 1 columns; G_x differentiates along columns. Convolution (not
/// correlation), computed separably as smoothing [1 2 1] times
/// difference [1 0 -1].
inline GridFieldBatch sobel_gradient_magnitude(const GridFieldBatch& g) {
    detail::require_2d_single(g, "sobel_gradient_magnitude");
    const std::size_t r = g.resolution;
    GridFieldBatch out = g;
    out.scalar = ScalarType::f64;
    out.shift.reset();

    const auto at = [r](std::span<const double> f, std::ptrdiff_t i, std::ptrdiff_t j) {
        const auto n = static_cast<std::ptrdiff_t>(r);
        return (i < 0 || j < 0 || i >= n || j >= n) ? 0.0 : f[static_cast<std::size_t>(i * n + j)];
    };
    std::vector<double> smooth_rows(r * r), diff_rows(r * r);
    for (std::size_t m = 0; m < g.samples; ++m) {
        const auto f = g.field(m, 0);
        // Vertical pass: [1 2 1] smoothing for G_x, [1 0 -1] difference for G_y.
        for (std::size_t i = 0; i < r; ++i) {
            for (std::size_t j = 0; j < r; ++j) {
                const auto ii = static_cast<std::ptrdiff_t>(i);
                const auto jj = static_cast<std::ptrdiff_t>(j);
                const double up = at(f, ii - 1, jj), mid = at(f, ii, jj), down = at(f, ii + 1, jj);
                smooth_rows[i * r + j] = up + 2.0 * mid + down;
                diff_rows[i * r + j] = up - down;
            }
        }
        auto dst = out.field(m, 0);
        const auto sm = std::span<const double>(smooth_rows);
        const auto df = std::span<const double>(diff_rows);
        for (std::size_t i = 0; i < r; ++i) {
            for (std::size_t j = 0; j < r; ++j) {
                const auto ii = static_cast<std::ptrdiff_t>(i);
                const auto jj = static_cast<std::ptrdiff_t>(j);
                const double gx = at(sm, ii, jj - 1) - at(sm, ii, jj + 1);
                const double gy = at(df, ii, jj - 1) + 2.0 * at(df, ii, jj) + at(df, ii, jj + 1);
                dst[i * r + j] = std::sqrt(gx * gx + gy * gy);
            }
        }
    }
    return out;
}

/// Gamma = 1 + 2 |grad G| / max |grad G|, with the maximum taken per
/// sample. A sample with no gradient gets Gamma = 1 everywhere.
inline EdgeWeightMap edge_weights(const GridFieldBatch& response) {
    auto mag = sobel_gradient_magnitude(response);
    mag.kind = GridKind::weightmap;
    for (std::size_t m = 0; m < mag.samples; ++m) {
        auto f = mag.field(m, 0);
        const double peak = *std::max_element(f.begin(), f.end());
        for (double& v : f) v = peak > 0.0 ? 1.0 + 2.0 * (v / peak) : 1.0;
    }
    return {std::move(mag), response.samples, response.resolution};
}

namespace detail {

inline constexpr double kNormFloor = 1e-6;

inline void require_same(const GridFieldBatch& a, const GridFieldBatch& b, const char* who) {
    a.check_consistent();
    b.check_consistent();
    if (!a.same_shape(b)) {
        throw ShapeError(std::string(who) + ": " + describe_shape(a) + " vs " + describe_shape(b));
    }
}

/// Mean over samples of ||w (pred - target)|| / max(||target||, 1e-6).
/// `weights` may be null (unit weights) or a single-channel grid broadcast
/// over channels.
inline double weighted_rel_l2(const GridFieldBatch& pred, const GridFieldBatch& target, const GridFieldBatch* weights) {
    double total = 0.0;
    for (std::size_t m = 0; m < target.samples; ++m) {
        double num = 0.0, den = 0.0;
        for (std::size_t ch = 0; ch < target.channels; ++ch) {
            const auto p = pred.field(m, ch);
            const auto t = target.field(m, ch);
            for (std::size_t v = 0; v < t.size(); ++v) {
                const double w = weights ? weights->field(m, 0)[v] : 1.0;
                const double e = w * (p[v] - t[v]);
                num += e * e;
                den += t[v] * t[v];
            }
        }
        total += std::sqrt(num) / std::max(std::sqrt(den), kNormFloor);
    }
    return target.samples ? total / static_cast<double>(target.samples) : 0.0;
}

} // namespace detail

inline double edge_weighted_rel_l2(const GridFieldBatch& pred, const GridFieldBatch& target, const EdgeWeightMap& weights) {
    detail::require_same(pred, target, "edge_weighted_rel_l2");
    const auto& w = weights.values;
    w.check_consistent();
    if (w.channels != 1 || w.dim != target.dim || w.resolution != target.resolution || w.samples != target.samples) {
        throw ShapeError("edge_weighted_rel_l2: weights " + describe_shape(w) + " vs target " + describe_shape(target));
    }
    return detail::weighted_rel_l2(pred, target, &w);
}

inline double rel_l2(const GridFieldBatch& pred, const GridFieldBatch& target) {
    detail::require_same(pred, target, "rel_l2");
    return detail::weighted_rel_l2(pred, target, nullptr);
}

/// One global ratio over every sample and point: sqrt(sum (U - U~)^2 / sum U^2).
inline double pointwise_rel_l2(const std::vector<std::vector<double>>& pred, const std::vector<std::vector<double>>& truth) {
    if (pred.size() != truth.size()) throw ShapeError("pointwise_rel_l2: sample counts differ");
    double num = 0.0, den = 0.0;
    for (std::size_t m = 0; m < truth.size(); ++m) {
        if (pred[m].size() != truth[m].size()) {
            throw ShapeError("pointwise_rel_l2: sample " + std::to_string(m) + " sizes differ");
        }
        for (std::size_t i = 0; i < truth[m].size(); ++i) {
            const double e = truth[m][i] - pred[m][i];
            num += e * e;
            den += truth[m][i] * truth[m][i];
        }
    }
    if (den == 0.0) throw ValidationError("pointwise_rel_l2: truth is identically zero");
    return std::sqrt(num / den);
}

inline double pointwise_rel_l2(const PointCloudBatch& pred, const PointCloudBatch& truth) {
    std::vector<std::vector<double>> p, t;
    for (const auto& s : pred.samples) p.push_back(s.channels);
    for (const auto& s : truth.samples) t.push_back(s.channels);
    return pointwise_rel_l2(p, t);
}

} // namespace ptgrid::edge
