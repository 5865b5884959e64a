#pragma once

#include <cmath>
#include <numbers>
#include <optional>

#include "coulell/errors.hpp"

namespace coulell {

struct Vec2 {
    double x = 0.0, y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double norm2() const { return x * x + y * y; }
    double norm() const { return std::sqrt(norm2()); }
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }

/// Origin-centred ellipse E(a, b, phi) = e^{i phi} {x^2/a^2 + y^2/b^2 <= 1}.
/// Canonical form: a >= b, phi in [0, pi); phi = 0 by convention when the
/// ellipse degenerates to a disc (|a - b| < 1e-9).
struct Ellipse {
    double a = 1.0, b = 1.0, phi = 0.0;

    double area() const { return std::numbers::pi * a * b; }
    double lambda() const { return (a - b) / (a + b); }

    Ellipse canonicalized() const {
        Ellipse e = *this;
        if (e.a < e.b) {
            std::swap(e.a, e.b);
            e.phi += 0.5 * std::numbers::pi;
        }
        e.phi = std::remainder(e.phi, std::numbers::pi);
        if (e.phi < 0.0) e.phi += std::numbers::pi;
        if (e.phi >= std::numbers::pi) e.phi = 0.0;
        if (std::abs(e.a - e.b) < 1e-9) e.phi = 0.0;
        return e;
    }

    /// World -> axis frame (rotate by -phi).
    Vec2 to_frame(Vec2 z) const {
        const double c = std::cos(phi), s = std::sin(phi);
        return {c * z.x + s * z.y, -s * z.x + c * z.y};
    }

    /// Axis frame -> world.
    Vec2 from_frame(Vec2 u) const {
        const double c = std::cos(phi), s = std::sin(phi);
        return {c * u.x - s * u.y, s * u.x + c * u.y};
    }

    /// x^2/a^2 + y^2/b^2 - 1; negative inside.
    double level(Vec2 z) const {
        const Vec2 u = to_frame(z);
        return (u.x / a) * (u.x / a) + (u.y / b) * (u.y / b) - 1.0;
    }

    bool contains(Vec2 z) const { return level(z) <= 0.0; }

    /// Boundary point at elliptic angle tau.
    Vec2 boundary_point(double tau) const { return from_frame({a * std::cos(tau), b * std::sin(tau)}); }

    /// Outward unit normal at the boundary point with elliptic angle tau.
    Vec2 outward_normal(double tau) const {
        const Vec2 n = from_frame({b * std::cos(tau), a * std::sin(tau)});
        const double len = n.norm();
        return {n.x / len, n.y / len};
    }
};

namespace detail {

/// Quadratic |(z + t e(sigma))/axes|^2 = 1 along the ray from z in world
/// direction sigma: qa t^2 + 2 qb t + qc = 0. All chord/ray queries reduce
/// to this (cf. the two boundary hits of a line with the ellipse).
struct RayQuadratic {
    double qa, qb, qc;
};

inline RayQuadratic ray_quadratic(const Ellipse& e, Vec2 u /*frame coords*/, double sigma_frame) {
    const double cs = std::cos(sigma_frame), sn = std::sin(sigma_frame);
    RayQuadratic q;
    q.qa = (cs / e.a) * (cs / e.a) + (sn / e.b) * (sn / e.b);
    q.qb = u.x * cs / (e.a * e.a) + u.y * sn / (e.b * e.b);
    q.qc = (u.x / e.a) * (u.x / e.a) + (u.y / e.b) * (u.y / e.b) - 1.0;
    return q;
}

} // namespace detail

/// Distance from an interior point to the boundary along direction sigma.
inline double interior_ray_exit(const Ellipse& e, Vec2 z, double sigma) {
    const Vec2 u = e.to_frame(z);
    const auto q = detail::ray_quadratic(e, u, sigma - e.phi);
    const double disc = q.qb * q.qb - q.qa * q.qc;
    // qc < 0 inside, so disc >= |qc| qa > 0
    return (-q.qb + std::sqrt(std::max(disc, 0.0))) / q.qa;
}

/// Entry/exit distances of the chord cut by E on the ray from an exterior
/// point, if the ray hits.
inline std::optional<std::pair<double, double>> exterior_ray_chord(const Ellipse& e, Vec2 z, double sigma) {
    const Vec2 u = e.to_frame(z);
    const auto q = detail::ray_quadratic(e, u, sigma - e.phi);
    const double disc = q.qb * q.qb - q.qa * q.qc;
    if (disc <= 0.0 || q.qb >= 0.0) return std::nullopt;
    const double root = std::sqrt(disc);
    const double t1 = (-q.qb - root) / q.qa;
    const double t2 = (-q.qb + root) / q.qa;
    if (t2 <= 0.0) return std::nullopt;
    return std::make_pair(std::max(t1, 0.0), t2);
}

/// The cone of directions from an exterior point that meet the ellipse:
/// world angles (centre - halfwidth, centre + halfwidth). The discriminant
/// of the ray quadratic is d0 + dc cos 2s + ds sin 2s, so the tangency
/// angles solve a single cos(2s - chi) = -d0/rho equation in closed form.
struct HitArc {
    double center;
    double halfwidth;
};

inline HitArc exterior_hit_arc(const Ellipse& e, Vec2 z) {
    const Vec2 u = e.to_frame(z);
    const double p = u.x / (e.a * e.a), q = u.y / (e.b * e.b);
    const double a0 = 0.5 * (1.0 / (e.a * e.a) + 1.0 / (e.b * e.b));
    const double a2 = 0.5 * (1.0 / (e.a * e.a) - 1.0 / (e.b * e.b));
    const double c = (u.x / e.a) * (u.x / e.a) + (u.y / e.b) * (u.y / e.b) - 1.0;
    if (c <= 0.0) throw OutsideDomain("exterior_hit_arc: point is not outside the ellipse");
    const double d0 = 0.5 * (p * p + q * q) - a0 * c;
    const double dc = 0.5 * (p * p - q * q) - a2 * c;
    const double ds = p * q;
    const double rho = std::hypot(dc, ds);
    const double chi = std::atan2(ds, dc);
    const double ratio = rho > 0.0 ? -d0 / rho : -2.0;
    if (ratio >= 1.0) throw OutsideDomain("exterior_hit_arc: no tangent directions found");
    const double beta = std::acos(std::max(ratio, -1.0));

    HitArc arc;
    arc.halfwidth = 0.5 * beta;
    arc.center = 0.5 * chi;
    // two candidate arcs a half-turn apart; the physical one has qb < 0
    const double cs = std::cos(arc.center), sn = std::sin(arc.center);
    if (p * cs + q * sn >= 0.0) arc.center += std::numbers::pi;
    arc.center += e.phi; // back to world angles
    return arc;
}

} // namespace coulell
