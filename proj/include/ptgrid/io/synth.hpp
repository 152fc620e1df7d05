#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "ptgrid/types.hpp"

namespace ptgrid::io {

enum class SynthKind { gaussian_bumps, annulus, airfoil };

inline SynthKind parse_synth_kind(std::string_view s) {
    if (s == "gaussian-bumps") return SynthKind::gaussian_bumps;
    if (s == "annulus") return SynthKind::annulus;
    if (s == "airfoil-like") return SynthKind::airfoil;
    throw ValidationError("unknown dataset kind '" + std::string(s) + "' (gaussian-bumps, annulus, airfoil-like)");
}

inline const char* to_string(SynthKind k) {
    switch (k) {
        case SynthKind::gaussian_bumps: return "gaussian-bumps";
        case SynthKind::annulus: return "annulus";
        case SynthKind::airfoil: return "airfoil-like";
    }
    return "?";
}

/// Symmetric four-digit NACA section with chord [-0.5, 0.5] along x,
/// rotated by `angle` radians about the origin.
struct AirfoilShape {
    double thickness = 0.12;
    double angle = 0.0;

    /// Half thickness at chord fraction t in [0,1].
    [[nodiscard]] double half_thickness(double t) const {
        t = std::clamp(t, 0.0, 1.0);
        return 5.0 * thickness *
               (0.2969 * std::sqrt(t) - 0.1260 * t - 0.3516 * t * t + 0.2843 * t * t * t - 0.1015 * t * t * t * t);
    }

    /// Body frame (chord fraction, normal offset) of a world point.
    [[nodiscard]] std::array<double, 2> to_body(double x, double y) const {
        const double c = std::cos(angle), s = std::sin(angle);
        return {c * x + s * y + 0.5, -s * x + c * y};
    }

    [[nodiscard]] std::array<double, 2> to_world(double t, double v) const {
        const double c = std::cos(angle), s = std::sin(angle);
        const double bx = t - 0.5;
        return {c * bx - s * v, s * bx + c * v};
    }

    [[nodiscard]] bool inside(double x, double y) const {
        const auto [t, v] = to_body(x, y);
        return t >= 0.0 && t <= 1.0 && std::abs(v) <= half_thickness(t);
    }
};

namespace detail {

/// Smooth positive field around an airfoil: free stream plus a wake-like
/// bump trailing the body.
inline double airfoil_response(const AirfoilShape& shape, double x, double y) {
    const auto [t, v] = shape.to_body(x, y);
    const double wake = std::exp(-(v * v) / 0.02 - std::pow(std::max(0.0, t - 1.0), 2) / 0.5) * (t > 0.0 ? 1.0 : 0.3);
    return 1.0 + 0.25 * x + 0.6 * wake + 0.2 * std::sin(std::numbers::pi * y);
}

} // namespace detail

/// Deterministic desk-scale datasets: `samples` clouds of `points` points
/// with one analytic, strictly positive response channel.
inline PointCloudBatch synth_dataset(SynthKind kind, std::size_t samples, std::size_t points, std::uint64_t seed,
                                     int dim = 2) {
    if (samples == 0 || points == 0) throw ValidationError("synth_dataset needs samples >= 1 and points >= 1");
    if (dim != 2 && dim != 3) throw ValidationError("synth_dataset dimension must be 2 or 3");
    if (kind != SynthKind::gaussian_bumps && dim != 2) throw ValidationError("only gaussian-bumps supports 3D");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const auto u = [&](double lo, double hi) { return lo + (hi - lo) * uni(rng); };
    const auto d = static_cast<std::size_t>(dim);

    PointCloudBatch cloud;
    cloud.dim = dim;
    cloud.channels = 1;
    cloud.samples.resize(samples);
    for (auto& s : cloud.samples) {
        s.coords.reserve(points * d);
        s.channels.reserve(points);
        switch (kind) {
            case SynthKind::gaussian_bumps: {
                struct Bump {
                    std::array<double, kMaxDim> c;
                    double amp, width;
                };
                std::array<Bump, 3> bumps{};
                for (auto& b : bumps) {
                    for (std::size_t a = 0; a < d; ++a) b.c[a] = u(-0.7, 0.7);
                    b.amp = u(0.5, 1.5);
                    b.width = u(0.2, 0.5);
                }
                for (std::size_t n = 0; n < points; ++n) {
                    std::array<double, kMaxDim> x{};
                    for (std::size_t a = 0; a < d; ++a) x[a] = u(-1.0, 1.0);
                    double val = 0.0;
                    for (const auto& b : bumps) {
                        double r2 = 0.0;
                        for (std::size_t a = 0; a < d; ++a) r2 += (x[a] - b.c[a]) * (x[a] - b.c[a]);
                        val += b.amp * std::exp(-r2 / (2.0 * b.width * b.width));
                    }
                    s.coords.insert(s.coords.end(), x.begin(), x.begin() + static_cast<std::ptrdiff_t>(d));
                    s.channels.push_back(val);
                }
                break;
            }
            case SynthKind::annulus: {
                const double r_in = u(0.2, 0.4), r_out = 0.95;
                const double phase = u(0.0, std::numbers::pi);
                for (std::size_t n = 0; n < points; ++n) {
                    const double rho = std::sqrt(u(r_in * r_in, r_out * r_out));
                    const double theta = u(0.0, 2.0 * std::numbers::pi);
                    s.coords.push_back(rho * std::cos(theta));
                    s.coords.push_back(rho * std::sin(theta));
                    const double radial = std::sin(std::numbers::pi * (rho - r_in) / (r_out - r_in));
                    s.channels.push_back(1.0 + radial * (0.5 + 0.25 * std::cos(2.0 * theta + phase)));
                }
                break;
            }
            case SynthKind::airfoil: {
                const AirfoilShape shape{u(0.10, 0.16), u(-0.1, 0.1)};
                std::size_t n = 0;
                while (n < points) {
                    double x = 0.0, y = 0.0;
                    if (uni(rng) < 0.6) {
                        // Near-body sample: cosine-spaced chord station, offset along the
                        // local normal with a distance concentrated at the surface.
                        const double t = 0.5 * (1.0 - std::cos(std::numbers::pi * uni(rng)));
                        const double side = uni(rng) < 0.5 ? -1.0 : 1.0;
                        const double dt = 1e-4;
                        const double slope = (shape.half_thickness(t + dt) - shape.half_thickness(std::max(0.0, t - dt))) /
                                             (t + dt - std::max(0.0, t - dt));
                        double nx = -slope * side, ny = side;
                        const double len = std::hypot(nx, ny);
                        nx /= len;
                        ny /= len;
                        const double dist = 0.5 * std::pow(uni(rng), 3.0) + 1e-4;
                        const auto p = shape.to_world(t + nx * dist, side * shape.half_thickness(t) + ny * dist);
                        x = p[0];
                        y = p[1];
                    } else {
                        x = u(-1.0, 1.0);
                        y = u(-1.0, 1.0);
                    }
                    if (std::abs(x) > 1.0 || std::abs(y) > 1.0 || shape.inside(x, y)) continue;
                    s.coords.push_back(x);
                    s.coords.push_back(y);
                    s.channels.push_back(detail::airfoil_response(shape, x, y));
                    ++n;
                }
                break;
            }
        }
    }
    return cloud;
}

/// Adds i.i.d. N(0, sigma^2) noise to every coordinate, then clamps to [-1,1].
inline PointCloudBatch add_coordinate_noise(const PointCloudBatch& cloud, double sigma, std::uint64_t seed) {
    validate(cloud);
    if (!(sigma >= 0.0)) throw ValidationError("noise sigma must be non-negative");
    PointCloudBatch out = cloud;
    if (sigma == 0.0) return out;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, sigma);
    for (auto& s : out.samples) {
        for (double& v : s.coords) v = std::clamp(v + noise(rng), -1.0, 1.0);
    }
    return out;
}

} // namespace ptgrid::io
