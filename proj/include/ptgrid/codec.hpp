#pragma once

#include <algorithm>
#include <limits>
#include <string>
#include <vector>

#include "ptgrid/footprint.hpp"
#include "ptgrid/types.hpp"

namespace ptgrid {

/// Added to the topology grid before dividing; fixed, not configurable.
inline constexpr double kStabilizer = 1e-6;

/// Scatters every point's footprint onto its cell vertices. Within a sample,
/// points are accumulated in ascending index order so the result is
/// bit-reproducible.
inline GridFieldBatch encode_topology(const PointCloudBatch& cloud, std::size_t resolution) {
    validate(cloud);
    auto grid = GridFieldBatch::zeros(cloud.dim, resolution, 1, cloud.size(), GridKind::topology);
    detail::dispatch_dim(cloud.dim, [&](auto d) {
        constexpr int Dim = decltype(d)::value;
        for (std::size_t m = 0; m < cloud.size(); ++m) {
            auto out = grid.field(m, 0);
            const std::size_t n_points = cloud.points(m);
            for (std::size_t n = 0; n < n_points; ++n) {
                const Footprint fp = detail::compute_footprint<Dim>(cloud.point(m, n), resolution);
                for (int k = 0; k < (1 << Dim); ++k) {
                    out[detail::corner_index<Dim>(fp, k, resolution)] += fp.weights[k];
                }
            }
        }
    });
    return grid;
}

/// Derives the shift parameters that make every response non-negative
/// (offset) or map it into [0,1] (min-max).
inline ShiftRecord fit_shift(const PointCloudBatch& cloud, const ShiftSpec& spec) {
    ShiftRecord rec;
    rec.mode = spec.mode;
    rec.scope = spec.scope;
    rec.channels = cloud.channels;
    if (spec.mode == ShiftMode::none) return rec;

    const std::size_t c = cloud.channels;
    const std::size_t groups = spec.scope == ShiftScope::batch ? 1 : cloud.size();
    std::vector<double> lo(groups * c, std::numeric_limits<double>::infinity());
    std::vector<double> hi(groups * c, -std::numeric_limits<double>::infinity());
    for (std::size_t m = 0; m < cloud.size(); ++m) {
        const std::size_t g = spec.scope == ShiftScope::batch ? 0 : m;
        const auto& vals = cloud.samples[m].channels;
        for (std::size_t i = 0; i < vals.size(); ++i) {
            const std::size_t ch = i % c;
            lo[g * c + ch] = std::min(lo[g * c + ch], vals[i]);
            hi[g * c + ch] = std::max(hi[g * c + ch], vals[i]);
        }
    }
    rec.params.resize(groups * c);
    for (std::size_t i = 0; i < rec.params.size(); ++i) {
        if (spec.mode == ShiftMode::offset) {
            rec.params[i].a = spec.offset.value_or(-lo[i]);
        } else {
            rec.params[i] = {lo[i], hi[i]};
        }
    }
    return rec;
}

/// Scatters footprint-weighted response values. The grid carries the shift
/// record so reconstruction can undo it.
inline GridFieldBatch encode_response(const PointCloudBatch& cloud, std::size_t resolution,
                                      const ShiftSpec& shift = {}) {
    validate(cloud);
    if (cloud.channels == 0) throw ValidationError("response encoding needs a cloud with channels");
    const ShiftRecord rec = fit_shift(cloud, shift);
    const std::size_t c = cloud.channels;

    std::vector<std::size_t> offending;
    std::vector<std::vector<double>> shifted(cloud.size());
    for (std::size_t m = 0; m < cloud.size(); ++m) {
        const auto& vals = cloud.samples[m].channels;
        auto& out = shifted[m];
        out.resize(vals.size());
        bool bad = false;
        for (std::size_t i = 0; i < vals.size(); ++i) {
            out[i] = rec.forward(vals[i], m, i % c);
            bad = bad || !(out[i] >= 0.0);
        }
        if (bad) offending.push_back(m);
    }
    if (!offending.empty()) {
        std::string list;
        for (std::size_t i = 0; i < offending.size() && i < 16; ++i) {
            list += (i ? ", " : "") + std::to_string(offending[i]);
        }
        if (offending.size() > 16) list += ", ...";
        throw ValidationError("responses must be non-negative after shifting; offending samples: " + list);
    }

    auto grid = GridFieldBatch::zeros(cloud.dim, resolution, c, cloud.size(), GridKind::response);
    grid.shift = rec;
    detail::dispatch_dim(cloud.dim, [&](auto d) {
        constexpr int Dim = decltype(d)::value;
        for (std::size_t m = 0; m < cloud.size(); ++m) {
            const std::size_t n_points = cloud.points(m);
            for (std::size_t n = 0; n < n_points; ++n) {
                const Footprint fp = detail::compute_footprint<Dim>(cloud.point(m, n), resolution);
                for (std::size_t ch = 0; ch < c; ++ch) {
                    auto out = grid.field(m, ch);
                    const double u = shifted[m][n * c + ch];
                    for (int k = 0; k < (1 << Dim); ++k) {
                        out[detail::corner_index<Dim>(fp, k, resolution)] += fp.weights[k] * u;
                    }
                }
            }
        }
    });
    return grid;
}

/// H = G_u / (G_o + 1e-6). A single-channel topology grid is broadcast over
/// all response channels.
inline GridFieldBatch normalize_grid(const GridFieldBatch& response, const GridFieldBatch& topology) {
    response.check_consistent();
    topology.check_consistent();
    if (topology.kind != GridKind::topology) throw ValidationError("normalize_grid: second argument must be a topology grid");
    if (response.dim != topology.dim || response.resolution != topology.resolution ||
        response.samples != topology.samples || (topology.channels != 1 && topology.channels != response.channels)) {
        throw ShapeError("normalize_grid: response " + describe_shape(response) + " vs topology " +
                         describe_shape(topology));
    }
    GridFieldBatch h = response;
    h.kind = GridKind::normalized;
    h.scalar = ScalarType::f64;
    for (std::size_t m = 0; m < response.samples; ++m) {
        for (std::size_t ch = 0; ch < response.channels; ++ch) {
            auto out = h.field(m, ch);
            const auto go = topology.field(m, topology.channels == 1 ? 0 : ch);
            for (std::size_t v = 0; v < out.size(); ++v) out[v] = out[v] / (go[v] + kStabilizer);
        }
    }
    return h;
}

/// Gathers H at every point of `coords` with the same footprint weights used
/// for encoding. Returns a copy of `coords` whose channels hold the
/// reconstructed responses, with the response grid's shift undone.
inline PointCloudBatch reconstruct(const GridFieldBatch& topology, const GridFieldBatch& response,
                                   const PointCloudBatch& coords) {
    validate(coords);
    if (response.dim != coords.dim) {
        throw ShapeError("reconstruct: grid dimension " + std::to_string(response.dim) + " vs cloud dimension " +
                         std::to_string(coords.dim));
    }
    if (response.samples != coords.size()) {
        throw ShapeError("reconstruct: grid has " + std::to_string(response.samples) + " samples, cloud has " +
                         std::to_string(coords.size()));
    }
    const GridFieldBatch h = normalize_grid(response, topology);
    const std::size_t c = h.channels;
    const std::size_t r = h.resolution;

    PointCloudBatch out;
    out.dim = coords.dim;
    out.channels = c;
    out.samples.resize(coords.size());
    detail::dispatch_dim(coords.dim, [&](auto d) {
        constexpr int Dim = decltype(d)::value;
        for (std::size_t m = 0; m < coords.size(); ++m) {
            const std::size_t n_points = coords.points(m);
            auto& dst = out.samples[m];
            dst.coords = coords.samples[m].coords;
            dst.channels.assign(n_points * c, 0.0);
            for (std::size_t n = 0; n < n_points; ++n) {
                const Footprint fp = detail::compute_footprint<Dim>(coords.point(m, n), r);
                for (std::size_t ch = 0; ch < c; ++ch) {
                    const auto field = h.field(m, ch);
                    double acc = 0.0;
                    for (int k = 0; k < (1 << Dim); ++k) acc += fp.weights[k] * field[detail::corner_index<Dim>(fp, k, r)];
                    if (response.shift) acc = response.shift->inverse(acc, m, ch);
                    dst.channels[n * c + ch] = acc;
                }
            }
        }
    });
    return out;
}

} // namespace ptgrid
