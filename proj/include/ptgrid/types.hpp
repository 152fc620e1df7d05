#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ptgrid/error.hpp"

namespace ptgrid {

inline constexpr int kMaxDim = 3;

enum class GridKind : std::uint8_t { topology, response, normalized, weightmap };

/// Scalar width used on disk; in memory everything is double.
enum class ScalarType : std::uint8_t { f32 = 1, f64 = 2 };

inline std::size_t scalar_size(ScalarType t) { return t == ScalarType::f32 ? 4 : 8; }

enum class ShiftMode : std::uint8_t { none = 0, offset = 1, minmax = 2 };
enum class ShiftScope : std::uint8_t { batch = 0, per_sample = 1 };

/// How responses should be mapped to the non-negative reals before encoding.
struct ShiftSpec {
    ShiftMode mode = ShiftMode::none;
    ShiftScope scope = ShiftScope::batch;
    /// Constant for offset mode. Empty means "minus the observed minimum".
    std::optional<double> offset;
};

/// Parameters of one shift group: offset mode uses `a` as the additive
/// constant, min-max mode uses [a, b] as the source range.
struct ShiftParams {
    double a = 0.0;
    double b = 0.0;
};

/// Shift applied to a response batch, stored so it can be inverted exactly.
/// `params` is laid out [group][channel]; there is one group for batch scope
/// and one per sample for per-sample scope.
struct ShiftRecord {
    ShiftMode mode = ShiftMode::none;
    ShiftScope scope = ShiftScope::batch;
    std::size_t channels = 0;
    std::vector<ShiftParams> params;

    [[nodiscard]] bool active() const noexcept { return mode != ShiftMode::none; }

    [[nodiscard]] const ShiftParams& at(std::size_t sample, std::size_t channel) const {
        const std::size_t group = scope == ShiftScope::batch ? 0 : sample;
        const std::size_t idx = group * channels + channel;
        if (idx >= params.size()) {
            throw ValidationError("shift record has no parameters for sample " +
                                  std::to_string(sample) + " channel " + std::to_string(channel));
        }
        return params[idx];
    }

    [[nodiscard]] double forward(double u, std::size_t sample, std::size_t channel) const {
        switch (mode) {
            case ShiftMode::none: return u;
            case ShiftMode::offset: return u + at(sample, channel).a;
            case ShiftMode::minmax: {
                const auto& p = at(sample, channel);
                const double span = p.b - p.a;
                return span > 0.0 ? (u - p.a) / span : u - p.a;
            }
        }
        return u;
    }

    [[nodiscard]] double inverse(double v, std::size_t sample, std::size_t channel) const {
        switch (mode) {
            case ShiftMode::none: return v;
            case ShiftMode::offset: return v - at(sample, channel).a;
            case ShiftMode::minmax: {
                const auto& p = at(sample, channel);
                const double span = p.b - p.a;
                return span > 0.0 ? v * span + p.a : v + p.a;
            }
        }
        return v;
    }
};

/// Per-axis affine map that brought raw coordinates into [-1,1].
struct AxisRange {
    double lo = -1.0;
    double hi = 1.0;
};

/// One point cloud: `coords` is N x dim row-major, `channels` is N x c
/// row-major (empty when the batch carries no responses).
struct PointSample {
    std::vector<double> coords;
    std::vector<double> channels;
};

/// M scattered point clouds sharing a dimension and channel count.
struct PointCloudBatch {
    int dim = 2;
    std::size_t channels = 0;
    std::vector<PointSample> samples;
    /// Shift already applied to, or to be inverted from, the channel values.
    ShiftRecord shift;
    /// Set when coordinates have not been mapped into [-1,1] yet.
    bool raw_range = false;
    /// Affine map used by a rescale step, one entry per axis (empty if none).
    std::vector<AxisRange> rescale;

    [[nodiscard]] std::size_t size() const noexcept { return samples.size(); }

    [[nodiscard]] std::size_t points(std::size_t m) const {
        return samples[m].coords.size() / static_cast<std::size_t>(dim);
    }

    [[nodiscard]] std::span<const double> point(std::size_t m, std::size_t n) const {
        return std::span<const double>(samples[m].coords).subspan(n * static_cast<std::size_t>(dim),
                                                                  static_cast<std::size_t>(dim));
    }
};

/// Checks the structural invariants of a cloud. When `require_unit_range`
/// is set every coordinate must lie in [-1,1].
inline void validate(const PointCloudBatch& cloud, bool require_unit_range = true) {
    if (cloud.dim != 2 && cloud.dim != 3) {
        throw ValidationError("point cloud dimension must be 2 or 3, got " + std::to_string(cloud.dim));
    }
    if (cloud.samples.empty()) throw ValidationError("point cloud batch has no samples");
    if (require_unit_range && cloud.raw_range) {
        throw ValidationError("point cloud is flagged raw-range; rescale it into [-1,1] first");
    }
    const auto d = static_cast<std::size_t>(cloud.dim);
    for (std::size_t m = 0; m < cloud.samples.size(); ++m) {
        const auto& s = cloud.samples[m];
        if (s.coords.empty() || s.coords.size() % d != 0) {
            throw ValidationError("sample " + std::to_string(m) + ": coordinate array must hold N >= 1 points of dim " +
                                  std::to_string(d));
        }
        const std::size_t n_points = s.coords.size() / d;
        if (s.channels.size() != n_points * cloud.channels) {
            throw ValidationError("sample " + std::to_string(m) + ": expected " +
                                  std::to_string(n_points * cloud.channels) + " channel values, got " +
                                  std::to_string(s.channels.size()));
        }
        if (!require_unit_range) continue;
        for (std::size_t n = 0; n < n_points; ++n) {
            for (std::size_t a = 0; a < d; ++a) {
                const double v = s.coords[n * d + a];
                if (!(v >= -1.0 && v <= 1.0)) {
                    throw DomainError("sample " + std::to_string(m) + ", point " + std::to_string(n) + ", axis " +
                                      std::to_string(a) + ": coordinate " + std::to_string(v) +
                                      " outside [-1,1]");
                }
            }
        }
    }
}

inline std::size_t ipow(std::size_t base, int exp) {
    std::size_t out = 1;
    for (int i = 0; i < exp; ++i) out *= base;
    return out;
}

/// M x c x r^dim values on a uniform vertex grid over [-1,1]^dim. Layout is
/// row-major (sample, channel, axis0, ..., axis_{dim-1}).
struct GridFieldBatch {
    int dim = 2;
    std::size_t resolution = 0;
    std::size_t channels = 1;
    std::size_t samples = 0;
    GridKind kind = GridKind::topology;
    ScalarType scalar = ScalarType::f64;
    std::vector<double> values;
    std::optional<ShiftRecord> shift;

    static GridFieldBatch zeros(int dim, std::size_t resolution, std::size_t channels, std::size_t samples,
                                GridKind kind) {
        if (dim != 2 && dim != 3) throw ValidationError("grid dimension must be 2 or 3");
        if (resolution < 2) throw ValidationError("grid resolution must be >= 2");
        if (channels == 0) throw ValidationError("grid needs at least one channel");
        GridFieldBatch g;
        g.dim = dim;
        g.resolution = resolution;
        g.channels = channels;
        g.samples = samples;
        g.kind = kind;
        g.values.assign(samples * channels * ipow(resolution, dim), 0.0);
        return g;
    }

    [[nodiscard]] std::size_t vertices() const { return ipow(resolution, dim); }

    [[nodiscard]] std::span<double> field(std::size_t m, std::size_t ch) {
        return std::span<double>(values).subspan((m * channels + ch) * vertices(), vertices());
    }
    [[nodiscard]] std::span<const double> field(std::size_t m, std::size_t ch) const {
        return std::span<const double>(values).subspan((m * channels + ch) * vertices(), vertices());
    }

    [[nodiscard]] double sum(std::size_t m, std::size_t ch) const {
        double s = 0.0;
        for (double v : field(m, ch)) s += v;
        return s;
    }

    [[nodiscard]] bool same_shape(const GridFieldBatch& o) const noexcept {
        return dim == o.dim && resolution == o.resolution && channels == o.channels && samples == o.samples;
    }

    void check_consistent() const {
        if (dim != 2 && dim != 3) throw ValidationError("grid dimension must be 2 or 3");
        if (resolution < 2) throw ValidationError("grid resolution must be >= 2");
        if (values.size() != samples * channels * vertices()) {
            throw ShapeError("grid payload holds " + std::to_string(values.size()) + " values, shape implies " +
                             std::to_string(samples * channels * vertices()));
        }
    }
};

inline std::string describe_shape(const GridFieldBatch& g) {
    return "[M=" + std::to_string(g.samples) + ", c=" + std::to_string(g.channels) + ", r=" +
           std::to_string(g.resolution) + ", d=" + std::to_string(g.dim) + "]";
}

} // namespace ptgrid
