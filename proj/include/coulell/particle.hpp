#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "coulell/ellipse.hpp"
#include "coulell/errors.hpp"
#include "coulell/kernel.hpp"

namespace coulell {

/// Positions of the N-particle discretisation of the energy. Deterministic
/// for a fixed seed: the initial cloud is drawn from an explicit
/// splitmix-based generator, not from a distribution with
/// implementation-defined output.
struct ParticleState {
    std::vector<Vec2> positions;
    std::uint64_t seed = 0;
};

namespace detail {

struct SplitMix64 {
    std::uint64_t state;
    explicit SplitMix64(std::uint64_t s) : state(s) {}
    std::uint64_t next() {
        state += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

/// Per-pair interaction pieces, rational in the displacement: the even
/// trigonometric series are evaluated through the double-angle recurrence
///   cos 2theta = (dx^2 - dy^2)/r^2, sin 2theta = 2 dx dy / r^2,
/// so the hot loop needs no atan2 or trig calls.
struct PairKernel {
    const FourierKernel2D& k;

    double value(double dx, double dy, double r2) const {
        const double c2 = (dx * dx - dy * dy) / r2, s2 = 2.0 * dx * dy / r2;
        double cn = 1.0, sn = 0.0, acc = k.a[0];
        for (std::size_t n = 1; n < k.a.size(); ++n) {
            const double c = cn * c2 - sn * s2;
            const double s = sn * c2 + cn * s2;
            cn = c;
            sn = s;
            acc += k.a[n] * cn + k.b[n] * sn;
        }
        return acc;
    }

    /// f'(theta) at the displacement angle.
    double trace_derivative(double dx, double dy, double r2) const {
        const double c2 = (dx * dx - dy * dy) / r2, s2 = 2.0 * dx * dy / r2;
        double cn = 1.0, sn = 0.0, acc = 0.0;
        for (std::size_t n = 1; n < k.a.size(); ++n) {
            const double c = cn * c2 - sn * s2;
            const double s = sn * c2 + cn * s2;
            cn = c;
            sn = s;
            acc += 2.0 * static_cast<double>(n) * (-k.a[n] * sn + k.b[n] * cn);
        }
        return acc;
    }
};

constexpr double kCoincidenceFloor = 1e-28; // squared separation

} // namespace detail

/// Discrete energy
///   E_N = (1/N^2) sum_{i != j} (-log|z_i - z_j| + kappa(z_i - z_j))
///       + (1/N) sum_i |z_i|^2.
inline double particle_energy(const ParticleState& s, const FourierKernel2D& k) {
    const std::size_t n = s.positions.size();
    const detail::PairKernel pk{k};
    double inter = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dx = s.positions[i].x - s.positions[j].x;
            const double dy = s.positions[i].y - s.positions[j].y;
            const double r2 = dx * dx + dy * dy;
            if (r2 < detail::kCoincidenceFloor)
                throw CoincidentParticles("particle_energy: coincident particles");
            inter += -0.5 * std::log(r2) + pk.value(dx, dy, r2);
        }
    }
    double conf = 0.0;
    for (const Vec2& z : s.positions) conf += z.norm2();
    const double nn = static_cast<double>(n);
    return 2.0 * inter / (nn * nn) + conf / nn;
}

/// Gradient of the discrete energy:
///   dE/dz_i = (2/N^2) sum_{j != i} [ -(z_i - z_j)/|z_i - z_j|^2
///             + grad kappa(z_i - z_j) ] + (2/N) z_i,
/// with grad kappa(d) = f'(arg d) (-d_y, d_x)/|d|^2 by zero-homogeneity.
inline std::vector<Vec2> particle_gradient(const ParticleState& s, const FourierKernel2D& k) {
    const std::size_t n = s.positions.size();
    const detail::PairKernel pk{k};
    std::vector<Vec2> g(n, Vec2{0.0, 0.0});
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dx = s.positions[i].x - s.positions[j].x;
            const double dy = s.positions[i].y - s.positions[j].y;
            const double r2 = dx * dx + dy * dy;
            if (r2 < detail::kCoincidenceFloor)
                throw CoincidentParticles("particle_gradient: coincident particles");
            const double fp = pk.trace_derivative(dx, dy, r2);
            const double fx = (-dx - fp * dy) / r2;
            const double fy = (-dy + fp * dx) / r2;
            // the pair contributes with opposite displacement sign to j;
            // grad kappa is odd, like the Coulomb force
            g[i].x += fx;
            g[i].y += fy;
            g[j].x -= fx;
            g[j].y -= fy;
        }
    }
    const double nn = static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        g[i].x = 2.0 * g[i].x / (nn * nn) + 2.0 * s.positions[i].x / nn;
        g[i].y = 2.0 * g[i].y / (nn * nn) + 2.0 * s.positions[i].y / nn;
    }
    return g;
}

struct MinimizeOptions {
    double tol_g = 1e-8;     // infinity norm of the gradient
    int max_steps = 50000;
    double step0 = 0.1;
    double shrink = 0.5;
    double min_separation = 1e-9;
    double armijo = 1e-4;
    double step_floor = 1e-18;
};

struct MinimizeDiagnostics {
    int steps = 0;
    double grad_inf = 0.0;
    double energy = 0.0;
};

namespace detail {

inline double min_separation2(const std::vector<Vec2>& p) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = i + 1; j < p.size(); ++j) {
            const double dx = p[i].x - p[j].x, dy = p[i].y - p[j].y;
            best = std::min(best, dx * dx + dy * dy);
        }
    return best;
}

} // namespace detail

/// Seeded uniform cloud in the unit disc.
inline ParticleState initial_cloud(std::size_t n, std::uint64_t seed) {
    ParticleState s;
    s.seed = seed;
    s.positions.resize(n);
    detail::SplitMix64 rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = std::sqrt(rng.uniform01());
        const double t = 2.0 * std::numbers::pi * rng.uniform01();
        s.positions[i] = {r * std::cos(t), r * std::sin(t)};
    }
    return s;
}

/// Gradient descent with backtracking line search; monotone in the energy,
/// deterministic for a fixed seed. Steps that would push two particles
/// closer than the separation guard are rejected like insufficient decrease.
inline ParticleState minimize_particles(std::size_t n, const FourierKernel2D& k, std::uint64_t seed,
                                        const MinimizeOptions& opts = {},
                                        MinimizeDiagnostics* diag = nullptr) {
    if (n < 2) throw ValidationError("minimize_particles: need at least two particles");
    ParticleState s = initial_cloud(n, seed);
    double energy = particle_energy(s, k);
    double step = opts.step0;

    int it = 0;
    double gnorm = 0.0;
    const double guard2 = opts.min_separation * opts.min_separation;
    for (; it < opts.max_steps; ++it) {
        const std::vector<Vec2> g = particle_gradient(s, k);
        gnorm = 0.0;
        double gsq = 0.0;
        for (const Vec2& v : g) {
            gnorm = std::max({gnorm, std::abs(v.x), std::abs(v.y)});
            gsq += v.norm2();
        }
        if (gnorm < opts.tol_g) break;

        ParticleState trial = s;
        bool accepted = false;
        for (double t = step; t >= opts.step_floor; t *= opts.shrink) {
            for (std::size_t i = 0; i < n; ++i)
                trial.positions[i] = s.positions[i] - g[i] * t;
            if (detail::min_separation2(trial.positions) < guard2) continue;
            const double e_trial = particle_energy(trial, k);
            if (e_trial <= energy - opts.armijo * t * gsq) {
                s.positions.swap(trial.positions);
                energy = e_trial;
                step = std::min(2.0 * t, 1e3 * opts.step0);
                accepted = true;
                break;
            }
        }
        if (!accepted) throw Stall("minimize_particles: line search floor reached at |grad| = " +
                                   std::to_string(gnorm));
    }
    if (diag) {
        diag->steps = it;
        diag->grad_inf = gnorm;
        diag->energy = energy;
    }
    return s;
}

/// Moment-method ellipse fit: for the uniform law on E(a, b, phi) the
/// centred second-moment matrix is R diag(a^2/4, b^2/4) R^T, so the fitted
/// semi-axes are twice the singular values of the sample covariance.
inline Ellipse fit_ellipse(const ParticleState& s) {
    const std::size_t n = s.positions.size();
    if (n < 8) throw ValidationError("fit_ellipse: need at least 8 points");
    double mx = 0.0, my = 0.0;
    for (const Vec2& z : s.positions) {
        mx += z.x;
        my += z.y;
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const Vec2& z : s.positions) {
        const double dx = z.x - mx, dy = z.y - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    sxx /= static_cast<double>(n);
    sxy /= static_cast<double>(n);
    syy /= static_cast<double>(n);

    const double tr = sxx + syy;
    const double gap = std::sqrt((sxx - syy) * (sxx - syy) + 4.0 * sxy * sxy);
    const double emax = 0.5 * (tr + gap), emin = 0.5 * (tr - gap);
    if (emin < 1e-12) throw DegenerateCloud("fit_ellipse: cloud has (near) zero extent in one direction");

    Ellipse e;
    e.a = 2.0 * std::sqrt(emax);
    e.b = 2.0 * std::sqrt(emin);
    e.phi = 0.5 * std::atan2(2.0 * sxy, sxx - syy);
    return e.canonicalized();
}

} // namespace coulell
