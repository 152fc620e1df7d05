#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <unordered_map>
#include <vector>

#include "ptgrid/codec.hpp"

namespace ptgrid::recovery {

/// Known subset of a cloud after dropping a fraction of its points.
struct PartialObservation {
    PointCloudBatch known;
    double dropout = 0.0;
    std::vector<std::size_t> original_counts;
    /// Indices into the original sample of the points that were kept, ascending.
    std::vector<std::vector<std::size_t>> kept;

    [[nodiscard]] std::size_t missing(std::size_t m) const { return original_counts[m] - known.points(m); }
};

/// Drops floor(dropout * N) points per sample uniformly without replacement.
inline PartialObservation make_partial(const PointCloudBatch& cloud, double dropout, std::uint64_t seed) {
    validate(cloud);
    if (!(dropout >= 0.0 && dropout < 1.0)) throw DomainError("dropout ratio must lie in [0,1)");
    PartialObservation obs;
    obs.dropout = dropout;
    obs.known.dim = cloud.dim;
    obs.known.channels = cloud.channels;
    obs.known.shift = cloud.shift;
    std::mt19937_64 rng(seed);
    const auto d = static_cast<std::size_t>(cloud.dim);
    const std::size_t c = cloud.channels;
    for (std::size_t m = 0; m < cloud.size(); ++m) {
        const std::size_t n = cloud.points(m);
        const auto drop = static_cast<std::size_t>(std::floor(dropout * static_cast<double>(n)));
        if (drop >= n) throw DomainError("dropout would remove every point of sample " + std::to_string(m));
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        // Partial Fisher-Yates: the first `drop` slots are the dropped points.
        for (std::size_t i = 0; i < drop; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, n - 1);
            std::swap(order[i], order[pick(rng)]);
        }
        std::vector<std::size_t> keep(order.begin() + static_cast<std::ptrdiff_t>(drop), order.end());
        std::sort(keep.begin(), keep.end());

        PointSample s;
        s.coords.reserve(keep.size() * d);
        s.channels.reserve(keep.size() * c);
        const auto& src = cloud.samples[m];
        for (std::size_t idx : keep) {
            s.coords.insert(s.coords.end(), src.coords.begin() + static_cast<std::ptrdiff_t>(idx * d),
                            src.coords.begin() + static_cast<std::ptrdiff_t>((idx + 1) * d));
            s.channels.insert(s.channels.end(), src.channels.begin() + static_cast<std::ptrdiff_t>(idx * c),
                              src.channels.begin() + static_cast<std::ptrdiff_t>((idx + 1) * c));
        }
        obs.known.samples.push_back(std::move(s));
        obs.original_counts.push_back(n);
        obs.kept.push_back(std::move(keep));
    }
    return obs;
}

/// Full minus partial topology, clamped at zero.
inline GridFieldBatch complement_grid(const GridFieldBatch& full, const GridFieldBatch& partial) {
    full.check_consistent();
    partial.check_consistent();
    if (!full.same_shape(partial)) {
        throw ShapeError("complement_grid: " + describe_shape(full) + " vs " + describe_shape(partial));
    }
    GridFieldBatch out = full;
    out.kind = GridKind::topology;
    out.scalar = ScalarType::f64;
    out.shift.reset();
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = std::max(0.0, full.values[i] - partial.values[i]);
    return out;
}

struct RecoveredPoints {
    /// Per sample, count x dim row-major coordinates.
    std::vector<std::vector<double>> coords;
    /// Per sample, the smallest interpolated value that was kept.
    std::vector<double> thresholds;
};

/// Interpolates the complement topology at dense_resolution^dim evenly
/// spaced coordinates and keeps the `counts[m]` largest. Ties go to the
/// earlier coordinate in row-major order.
inline RecoveredPoints recover_points(const GridFieldBatch& complement, std::span<const std::size_t> counts,
                                      std::size_t dense_resolution) {
    complement.check_consistent();
    if (complement.channels != 1) throw ValidationError("recover_points: complement grid must have one channel");
    if (counts.size() != complement.samples) throw ShapeError("recover_points: one count per sample required");
    if (dense_resolution < complement.resolution) {
        throw ValidationError("recover_points: dense resolution must be >= grid resolution");
    }
    const int dim = complement.dim;
    const auto d = static_cast<std::size_t>(dim);
    const std::size_t total = ipow(dense_resolution, dim);
    const std::size_t r = complement.resolution;

    // Dense coordinates are shared by every sample, so their footprints are too.
    std::vector<double> dense(total * d);
    std::vector<Footprint> fps(total);
    for (std::size_t q = 0; q < total; ++q) {
        std::size_t rem = q;
        for (int a = dim - 1; a >= 0; --a) {
            const std::size_t i = rem % dense_resolution;
            rem /= dense_resolution;
            dense[q * d + static_cast<std::size_t>(a)] =
                std::clamp(-1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(dense_resolution - 1), -1.0, 1.0);
        }
        fps[q] = footprint_of(std::span<const double>(dense).subspan(q * d, d), r);
    }

    RecoveredPoints out;
    std::vector<double> values(total);
    std::vector<std::size_t> order(total);
    for (std::size_t m = 0; m < complement.samples; ++m) {
        const std::size_t count = counts[m];
        if (count < 1) throw ValidationError("recover_points: count must be >= 1");
        if (count > total) {
            throw ValidationError("recover_points: count " + std::to_string(count) + " exceeds " + std::to_string(total) +
                                  " dense coordinates");
        }
        const auto field = complement.field(m, 0);
        for (std::size_t q = 0; q < total; ++q) {
            double acc = 0.0;
            for (int k = 0; k < (1 << dim); ++k) acc += fps[q].weights[k] * field[corner_index(fps[q], k, dim, r)];
            values[q] = acc;
        }
        std::iota(order.begin(), order.end(), std::size_t{0});
        const auto better = [&](std::size_t a, std::size_t b) {
            return values[a] > values[b] || (values[a] == values[b] && a < b);
        };
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count), order.end(), better);
        std::vector<std::size_t> chosen(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count));
        std::sort(chosen.begin(), chosen.end());
        std::vector<double> xs;
        xs.reserve(count * d);
        for (std::size_t q : chosen) xs.insert(xs.end(), dense.begin() + static_cast<std::ptrdiff_t>(q * d),
                                              dense.begin() + static_cast<std::ptrdiff_t>((q + 1) * d));
        out.coords.push_back(std::move(xs));
        out.thresholds.push_back(values[order[count - 1]]);
    }
    return out;
}

enum class NearestMethod { automatic, brute_force, bucketed };

/// Point sets up to this size use exact brute-force search.
inline constexpr std::size_t kBruteForceLimit = 5000;

struct Neighbor {
    std::size_t index = 0;
    double sq_distance = std::numeric_limits<double>::infinity();
};

namespace detail {

inline double sq_dist(const double* a, const double* b, std::size_t d) {
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return s;
}

inline std::vector<Neighbor> nearest_brute(std::span<const double> query, std::span<const double> ref, std::size_t d) {
    const std::size_t nq = query.size() / d, nr = ref.size() / d;
    std::vector<Neighbor> out(nq);
    for (std::size_t i = 0; i < nq; ++i) {
        for (std::size_t j = 0; j < nr; ++j) {
            const double dd = sq_dist(&query[i * d], &ref[j * d], d);
            if (dd < out[i].sq_distance) out[i] = {j, dd};
        }
    }
    return out;
}

/// Exact nearest-neighbour search over a uniform bucket grid, expanding
/// shells of buckets until no unvisited bucket can hold a closer point.
inline std::vector<Neighbor> nearest_bucketed(std::span<const double> query, std::span<const double> ref, std::size_t d) {
    const std::size_t nq = query.size() / d, nr = ref.size() / d;
    std::array<double, kMaxDim> lo{}, hi{};
    for (std::size_t a = 0; a < d; ++a) {
        lo[a] = std::numeric_limits<double>::infinity();
        hi[a] = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < nr; ++j) {
            lo[a] = std::min(lo[a], ref[j * d + a]);
            hi[a] = std::max(hi[a], ref[j * d + a]);
        }
    }
    double extent = 0.0;
    for (std::size_t a = 0; a < d; ++a) extent = std::max(extent, hi[a] - lo[a]);
    if (extent <= 0.0) extent = 1.0;
    // About two reference points per bucket.
    const double per_axis = std::max(1.0, std::floor(std::pow(static_cast<double>(nr) / 2.0, 1.0 / static_cast<double>(d))));
    const double cell = extent / per_axis;
    const auto nb = static_cast<std::int64_t>(per_axis) + 1;

    const auto bucket_of = [&](const double* p, std::array<std::int64_t, kMaxDim>& b) {
        for (std::size_t a = 0; a < d; ++a) {
            b[a] = std::clamp(static_cast<std::int64_t>(std::floor((p[a] - lo[a]) / cell)), std::int64_t{0}, nb - 1);
        }
    };
    const auto key = [&](const std::array<std::int64_t, kMaxDim>& b) {
        std::int64_t k = 0;
        for (std::size_t a = 0; a < d; ++a) k = k * nb + b[a];
        return k;
    };
    std::unordered_map<std::int64_t, std::vector<std::size_t>> buckets;
    std::array<std::int64_t, kMaxDim> b{};
    for (std::size_t j = 0; j < nr; ++j) {
        bucket_of(&ref[j * d], b);
        buckets[key(b)].push_back(j);
    }

    std::vector<Neighbor> out(nq);
    std::array<std::int64_t, kMaxDim> qb{}, cur{};
    for (std::size_t i = 0; i < nq; ++i) {
        const double* q = &query[i * d];
        bucket_of(q, qb);
        // Distance from q to the outside of its own (clamped) bucket along each axis
        // bounds what any bucket in shell s can offer.
        Neighbor nearest;
        double& best = nearest.sq_distance;
        for (std::int64_t s = 0; s <= nb; ++s) {
            // Every point in shell s is at least (s - 1) * cell + slack away, where slack
            // accounts for queries outside the bucket lattice.
            double slack = std::numeric_limits<double>::infinity();
            for (std::size_t a = 0; a < d; ++a) {
                const double cell_lo = lo[a] + static_cast<double>(qb[a]) * cell;
                const double to_lo = q[a] - cell_lo;
                const double to_hi = cell_lo + cell - q[a];
                slack = std::min(slack, std::min(to_lo, to_hi));
            }
            const double reach = static_cast<double>(s - 1) * cell + std::max(0.0, slack);
            if (s > 0 && reach > 0.0 && reach * reach > best) break;
            // Visit the surface of the (2s+1)^d cube of buckets.
            const std::int64_t side = 2 * s + 1;
            std::int64_t cube = 1;
            for (std::size_t a = 0; a < d; ++a) cube *= side;
            for (std::int64_t t = 0; t < cube; ++t) {
                std::int64_t rem = t;
                bool surface = false, inside = true;
                for (std::size_t a = 0; a < d; ++a) {
                    const std::int64_t off = rem % side - s;
                    rem /= side;
                    surface = surface || off == -s || off == s;
                    cur[a] = qb[a] + off;
                    inside = inside && cur[a] >= 0 && cur[a] < nb;
                }
                if (!surface || !inside) continue;
                const auto it = buckets.find(key(cur));
                if (it == buckets.end()) continue;
                for (std::size_t j : it->second) {
                    const double dd = sq_dist(q, &ref[j * d], d);
                    if (dd < best || (dd == best && j < nearest.index)) nearest = {j, dd};
                }
            }
        }
        out[i] = nearest;
    }
    return out;
}

} // namespace detail

/// Nearest reference point (lowest index on ties) for every query point.
inline std::vector<Neighbor> nearest_neighbors(std::span<const double> query, std::span<const double> ref, int dim,
                                               NearestMethod method = NearestMethod::automatic) {
    const auto d = static_cast<std::size_t>(dim);
    if (ref.empty() || ref.size() % d != 0 || query.size() % d != 0) {
        throw ValidationError("nearest_sq_distances: reference set must be non-empty with whole points");
    }
    if (method == NearestMethod::automatic) {
        method = std::max(query.size(), ref.size()) / d <= kBruteForceLimit ? NearestMethod::brute_force
                                                                            : NearestMethod::bucketed;
    }
    return method == NearestMethod::brute_force ? detail::nearest_brute(query, ref, d)
                                                : detail::nearest_bucketed(query, ref, d);
}

/// Squared distance from every query point to its nearest reference point.
inline std::vector<double> nearest_sq_distances(std::span<const double> query, std::span<const double> ref, int dim,
                                                NearestMethod method = NearestMethod::automatic) {
    const auto nn = nearest_neighbors(query, ref, dim, method);
    std::vector<double> out(nn.size());
    for (std::size_t i = 0; i < nn.size(); ++i) out[i] = nn[i].sq_distance;
    return out;
}

/// Symmetric Chamfer distance between two point sets: mean squared
/// nearest-neighbour distance from each set to the other, summed.
inline double chamfer(std::span<const double> a, std::span<const double> b, int dim,
                      NearestMethod method = NearestMethod::automatic) {
    if (a.empty() || b.empty()) throw ValidationError("chamfer: point sets must be non-empty");
    const auto ab = nearest_sq_distances(a, b, dim, method);
    const auto ba = nearest_sq_distances(b, a, dim, method);
    double sa = 0.0, sb = 0.0;
    for (double v : ab) sa += v;
    for (double v : ba) sb += v;
    return sa / static_cast<double>(ab.size()) + sb / static_cast<double>(ba.size());
}

/// Chamfer distance averaged over samples.
inline double chamfer(const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b, int dim,
                      NearestMethod method = NearestMethod::automatic) {
    if (a.size() != b.size() || a.empty()) throw ShapeError("chamfer: batches must hold the same, non-zero sample count");
    double total = 0.0;
    for (std::size_t m = 0; m < a.size(); ++m) total += chamfer(a[m], b[m], dim, method);
    return total / static_cast<double>(a.size());
}

struct RecoveryResult {
    std::vector<std::vector<double>> coords;
    double chamfer = 0.0;
    double rel_l2 = 0.0;
    std::vector<double> thresholds;
};

/// Reconstructs responses at the recovered coordinates, carries each true
/// point's value over from its nearest recovered point (a known point finds
/// itself at distance zero), and scores coordinates and responses.
inline RecoveryResult evaluate_recovery(const PointCloudBatch& truth, const std::vector<std::vector<double>>& recovered,
                                        const GridFieldBatch& response, const GridFieldBatch& topology) {
    validate(truth);
    if (truth.channels == 0) throw ValidationError("evaluate_recovery: truth cloud needs responses");
    if (recovered.size() != truth.size()) throw ShapeError("evaluate_recovery: sample counts differ");
    const auto d = static_cast<std::size_t>(truth.dim);
    const std::size_t c = truth.channels;

    PointCloudBatch at_recovered;
    at_recovered.dim = truth.dim;
    for (const auto& xs : recovered) at_recovered.samples.push_back({xs, {}});
    const auto rec = reconstruct(topology, response, at_recovered);
    if (rec.channels != c) throw ShapeError("evaluate_recovery: response grid channels differ from truth");

    std::vector<std::vector<double>> pred(truth.size()), actual(truth.size());
    for (std::size_t m = 0; m < truth.size(); ++m) {
        const auto& tx = truth.samples[m].coords;
        const auto& rx = recovered[m];
        const std::size_t nt = tx.size() / d;
        pred[m].resize(nt * c);
        actual[m] = truth.samples[m].channels;
        const auto nn = nearest_neighbors(tx, rx, truth.dim);
        for (std::size_t i = 0; i < nt; ++i) {
            for (std::size_t ch = 0; ch < c; ++ch) pred[m][i * c + ch] = rec.samples[m].channels[nn[i].index * c + ch];
        }
    }

    RecoveryResult res;
    res.coords = recovered;
    std::vector<std::vector<double>> truth_xs;
    for (const auto& s : truth.samples) truth_xs.push_back(s.coords);
    res.chamfer = chamfer(truth_xs, recovered, truth.dim);

    double num = 0.0, den = 0.0;
    for (std::size_t m = 0; m < truth.size(); ++m) {
        for (std::size_t i = 0; i < actual[m].size(); ++i) {
            num += (actual[m][i] - pred[m][i]) * (actual[m][i] - pred[m][i]);
            den += actual[m][i] * actual[m][i];
        }
    }
    if (den == 0.0) throw ValidationError("evaluate_recovery: truth responses are identically zero");
    res.rel_l2 = std::sqrt(num / den);
    return res;
}

/// Recovers the missing points of `partial` from a full topology grid
/// (predicted or exact) and scores the result against `truth`.
inline RecoveryResult recover_and_evaluate(const PointCloudBatch& truth, const PartialObservation& partial,
                                           const GridFieldBatch& full_topology, const GridFieldBatch& response,
                                           std::size_t dense_resolution) {
    const auto partial_topology = encode_topology(partial.known, full_topology.resolution);
    const auto comp = complement_grid(full_topology, partial_topology);
    std::vector<std::size_t> counts;
    for (std::size_t m = 0; m < partial.known.size(); ++m) counts.push_back(partial.missing(m));

    std::vector<std::vector<double>> combined(truth.size());
    std::vector<double> thresholds(truth.size(), std::numeric_limits<double>::quiet_NaN());
    // Samples with nothing missing skip the thresholding step.
    std::vector<std::size_t> active;
    for (std::size_t m = 0; m < counts.size(); ++m) if (counts[m] > 0) active.push_back(m);
    if (!active.empty()) {
        GridFieldBatch sub = GridFieldBatch::zeros(comp.dim, comp.resolution, 1, active.size(), GridKind::topology);
        std::vector<std::size_t> sub_counts;
        for (std::size_t i = 0; i < active.size(); ++i) {
            const auto src = comp.field(active[i], 0);
            std::copy(src.begin(), src.end(), sub.field(i, 0).begin());
            sub_counts.push_back(counts[active[i]]);
        }
        const auto found = recover_points(sub, sub_counts, dense_resolution);
        for (std::size_t i = 0; i < active.size(); ++i) {
            combined[active[i]] = found.coords[i];
            thresholds[active[i]] = found.thresholds[i];
        }
    }
    for (std::size_t m = 0; m < truth.size(); ++m) {
        const auto& known = partial.known.samples[m].coords;
        combined[m].insert(combined[m].end(), known.begin(), known.end());
    }
    auto res = evaluate_recovery(truth, combined, response, full_topology);
    res.thresholds = std::move(thresholds);
    return res;
}

} // namespace ptgrid::recovery
