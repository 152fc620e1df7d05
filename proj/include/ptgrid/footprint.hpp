#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "ptgrid/types.hpp"

namespace ptgrid {

/// Maps a scaled coordinate in [-1,1] to continuous grid index space [0, r-1].
inline double to_grid_index(double coord, std::size_t resolution) {
    if (resolution < 2) throw ValidationError("grid resolution must be >= 2");
    if (!(coord >= -1.0 && coord <= 1.0)) {
        throw DomainError("coordinate " + std::to_string(coord) + " outside [-1,1]");
    }
    return (coord + 1.0) / 2.0 * static_cast<double>(resolution - 1);
}

/// Enclosing cell of one point and its 2^dim partition-of-unity weights.
///
/// Corner `k` of the cell is addressed by its bits: bit `a` set means the
/// high vertex along axis `a`. Its weight is the product over axes of
/// `offset[a]` (high) or `1 - offset[a]` (low).
struct Footprint {
    std::array<std::int32_t, kMaxDim> base{};
    std::array<double, kMaxDim> offset{};
    std::array<double, 1 << kMaxDim> weights{};
};

namespace detail {

template <int Dim>
inline Footprint compute_footprint(std::span<const double> coord, std::size_t resolution) {
    Footprint fp;
    const auto top = static_cast<std::int32_t>(resolution) - 2;
    for (int a = 0; a < Dim; ++a) {
        const double idx = (coord[a] + 1.0) / 2.0 * static_cast<double>(resolution - 1);
        // A coordinate of exactly +1 would floor onto the last vertex; keep it in the last cell.
        auto b = static_cast<std::int32_t>(std::floor(idx));
        b = b < 0 ? 0 : (b > top ? top : b);
        fp.base[a] = b;
        fp.offset[a] = idx - static_cast<double>(b);
    }
    for (int k = 0; k < (1 << Dim); ++k) {
        double w = 1.0;
        for (int a = 0; a < Dim; ++a) w *= ((k >> a) & 1) ? fp.offset[a] : 1.0 - fp.offset[a];
        fp.weights[k] = w;
    }
    return fp;
}

/// Flat vertex index of corner `k` of the footprint's cell.
template <int Dim>
inline std::size_t corner_index(const Footprint& fp, int k, std::size_t resolution) {
    std::size_t idx = 0;
    for (int a = 0; a < Dim; ++a) {
        idx = idx * resolution + static_cast<std::size_t>(fp.base[a] + ((k >> a) & 1));
    }
    return idx;
}

template <typename F>
decltype(auto) dispatch_dim(int dim, F&& f) {
    if (dim == 2) return f(std::integral_constant<int, 2>{});
    if (dim == 3) return f(std::integral_constant<int, 3>{});
    throw ValidationError("dimension must be 2 or 3, got " + std::to_string(dim));
}

} // namespace detail

/// Footprint of a single point; `coord.size()` selects 2D or 3D.
inline Footprint footprint_of(std::span<const double> coord, std::size_t resolution) {
    if (resolution < 2) throw ValidationError("grid resolution must be >= 2");
    for (double c : coord) (void)to_grid_index(c, resolution);
    return detail::dispatch_dim(static_cast<int>(coord.size()),
                                [&](auto d) { return detail::compute_footprint<decltype(d)::value>(coord, resolution); });
}

/// Flat vertex index of corner `k` for a footprint in `dim` dimensions.
inline std::size_t corner_index(const Footprint& fp, int k, int dim, std::size_t resolution) {
    return detail::dispatch_dim(dim, [&](auto d) { return detail::corner_index<decltype(d)::value>(fp, k, resolution); });
}

struct FootprintTable {
    int dim = 2;
    std::size_t resolution = 0;
    std::vector<std::vector<Footprint>> samples;
};

inline FootprintTable footprint(const PointCloudBatch& cloud, std::size_t resolution) {
    validate(cloud);
    if (resolution < 2) throw ValidationError("grid resolution must be >= 2");
    FootprintTable table{cloud.dim, resolution, {}};
    table.samples.resize(cloud.size());
    detail::dispatch_dim(cloud.dim, [&](auto d) {
        constexpr int Dim = decltype(d)::value;
        for (std::size_t m = 0; m < cloud.size(); ++m) {
            const std::size_t n_points = cloud.points(m);
            auto& out = table.samples[m];
            out.reserve(n_points);
            for (std::size_t n = 0; n < n_points; ++n) {
                out.push_back(detail::compute_footprint<Dim>(cloud.point(m, n), resolution));
            }
        }
    });
    return table;
}

} // namespace ptgrid
