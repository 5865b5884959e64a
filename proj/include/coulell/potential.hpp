#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

#include "coulell/el_system.hpp"
#include "coulell/ellipse.hpp"
#include "coulell/errors.hpp"
#include "coulell/kernel.hpp"
#include "coulell/quadrature.hpp"

namespace coulell {

/// Numerical verdicts on the two Euler-Lagrange conditions for a candidate
/// ellipse. verify_first_el fills the Hessian residual and the direct system
/// residual; verify_second_el fills the potential constant and the exterior
/// gap. NaN marks fields the producing operation does not compute.
struct ELReport {
    double hessian_residual_interior = std::numeric_limits<double>::quiet_NaN();
    double second_el_min_gap = std::numeric_limits<double>::quiet_NaN();
    double C_kappa = std::numeric_limits<double>::quiet_NaN();
    double system_residual = std::numeric_limits<double>::quiet_NaN();
    std::size_t n_interior = 0;
    std::size_t n_exterior = 0;
};

struct PotentialOptions {
    // far-field tensor rule (elliptic polar coordinates)
    std::size_t tensor_rho_nodes = 96;
    std::size_t tensor_tau_nodes = 256;
    // singularity-centred polar rule: doubling refinement until agreement
    std::size_t polar_base_nodes = 512;
    std::size_t polar_max_nodes = 1 << 17;
    double polar_tol = 1e-13;
    double accept_tol = 1e-8; // budget exhausted: accept below this, else throw
};

namespace detail {

/// Radial antiderivative of t (-log t): int_0^r (-log t) t dt.
inline double log_radial_primitive(double r) {
    if (r <= 0.0) return 0.0;
    return 0.25 * r * r * (1.0 - 2.0 * std::log(r));
}

/// Interior rule. In polar coordinates centred at z the kernel angle is
/// constant along each ray and the radial integrals close in elementary
/// form, leaving a single periodic analytic integrand:
///   int_E (-log|z-w| + kappa(z-w)) dw
///     = int_0^{2pi} [ r^2 (1 - 2 log r)/4 + f(sigma) r^2/2 ] dsigma,
/// with r = r(z, sigma) the exit distance. Trapezoid is spectrally accurate
/// and is refined by doubling until two levels agree.
inline double interior_polar_integral(Vec2 z, const Ellipse& e, const FourierKernel2D& k,
                                      const PotentialOptions& opts) {
    const auto term = [&](double sigma) {
        const double r = interior_ray_exit(e, z, sigma);
        return log_radial_primitive(r) + 0.5 * eval(k, sigma) * r * r;
    };
    std::size_t m = opts.polar_base_nodes;
    double sum = 0.0;
    for (std::size_t j = 0; j < m; ++j)
        sum += term(2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(m));
    double value = sum * 2.0 * std::numbers::pi / static_cast<double>(m);

    while (true) {
        // refine with the odd midpoints only
        double add = 0.0;
        for (std::size_t j = 0; j < m; ++j)
            add += term(2.0 * std::numbers::pi * (static_cast<double>(j) + 0.5) / static_cast<double>(m));
        sum += add;
        m *= 2;
        const double next = sum * 2.0 * std::numbers::pi / static_cast<double>(m);
        const double delta = std::abs(next - value);
        value = next;
        if (delta < opts.polar_tol * std::max(1.0, std::abs(value))) return value;
        if (m >= opts.polar_max_nodes) {
            if (delta < opts.accept_tol) return value;
            throw QuadratureBudgetExceeded("interior potential quadrature did not settle");
        }
    }
}

/// Exterior rule for points near the ellipse: integrate over the cone of
/// directions that meet E. The tangency square-root endpoints are absorbed
/// by the cosine substitution sigma = centre - halfwidth cos(v), after which
/// Gauss-Legendre in v converges spectrally.
inline double exterior_chord_integral(Vec2 z, const Ellipse& e, const FourierKernel2D& k,
                                      const PotentialOptions& opts) {
    const HitArc arc = exterior_hit_arc(e, z);
    const auto term = [&](double sigma) {
        const auto chord = exterior_ray_chord(e, z, sigma);
        if (!chord) return 0.0;
        const auto [r1, r2] = *chord;
        return log_radial_primitive(r2) - log_radial_primitive(r1) +
               0.5 * eval(k, sigma) * (r2 * r2 - r1 * r1);
    };

    std::size_t n = 64;
    double value = 0.0;
    bool have_value = false;
    while (true) {
        const Quadrature1D gl = gauss_legendre_on(n, 0.0, std::numbers::pi);
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double v = gl.nodes[i];
            const double sigma = arc.center - arc.halfwidth * std::cos(v);
            sum += gl.weights[i] * arc.halfwidth * std::sin(v) * term(sigma);
        }
        if (have_value) {
            const double delta = std::abs(sum - value);
            value = sum;
            if (delta < opts.polar_tol * std::max(1.0, std::abs(value))) return value;
            if (2 * n > opts.polar_max_nodes) {
                if (delta < opts.accept_tol) return value;
                throw QuadratureBudgetExceeded("exterior potential quadrature did not settle");
            }
        } else {
            value = sum;
            have_value = true;
        }
        n *= 2;
    }
}

/// Far-field rule: tensor Gauss-Legendre (radial) x trapezoid (angular) over
/// elliptic polar coordinates of E; the integrand is smooth at this range.
inline double tensor_integral(Vec2 z, const Ellipse& e, const FourierKernel2D& k,
                              const PotentialOptions& opts) {
    const Quadrature1D gl = gauss_legendre_on(opts.tensor_rho_nodes, 0.0, 1.0);
    const std::size_t mt = opts.tensor_tau_nodes;
    double acc = 0.0;
    for (std::size_t i = 0; i < opts.tensor_rho_nodes; ++i) {
        const double rho = gl.nodes[i];
        double ring = 0.0;
        for (std::size_t j = 0; j < mt; ++j) {
            const double tau = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(mt);
            const Vec2 w = e.from_frame({e.a * rho * std::cos(tau), e.b * rho * std::sin(tau)});
            const Vec2 d = z - w;
            ring += -0.5 * std::log(d.norm2()) + eval(k, std::atan2(d.y, d.x));
        }
        acc += gl.weights[i] * rho * ring;
    }
    return acc * e.a * e.b * 2.0 * std::numbers::pi / static_cast<double>(mt);
}

} // namespace detail

/// Potential of the normalised ellipse measure,
///   P(z) = (1/|E|) int_E (-log|z-w| + kappa(z-w)) dw + |z|^2 / 2,
/// with the zero-homogeneity of kappa folded into the angular factor. The
/// quadrature is singularity-centred polar for points inside or near E and
/// a tensor product rule in elliptic polar coordinates farther than
/// 1.5 max(a, b) from the centre.
inline double potential_at(Vec2 z, const Ellipse& e, const FourierKernel2D& k,
                           const PotentialOptions& opts = {}) {
    const double conf = 0.5 * z.norm2();
    double integral;
    if (z.norm() > 1.5 * std::max(e.a, e.b)) {
        integral = detail::tensor_integral(z, e, k, opts);
    } else if (e.level(z) <= 1e-14) {
        integral = detail::interior_polar_integral(z, e, k, opts);
    } else {
        integral = detail::exterior_chord_integral(z, e, k, opts);
    }
    return integral / e.area() + conf;
}

/// Cauchy transform of chi_E at an interior point:
///   (1/(pi z) * chi_E)(z) = conj(z) - lambda e^{-2 i phi} z.
/// Serves as the analytic oracle for the gradient of the logarithmic part
/// of the potential inside E.
inline std::complex<double> cauchy_transform_interior(Vec2 z, const Ellipse& e) {
    if (e.level(z) > 0.0) throw OutsideDomain("cauchy_transform_interior: point must lie inside the ellipse");
    const std::complex<double> zc(z.x, z.y);
    const std::complex<double> rot = std::polar(1.0, -2.0 * e.phi);
    return std::conj(zc) - e.lambda() * rot * zc;
}

/// Constant interior value of the Calderon-Zygmund operator with kernel
/// trace H on the unit circle applied to chi_E:
///   -(1/2) int log(<xi,e^{i phi}>^2/a^2 + <xi,i e^{i phi}>^2/b^2) H(xi) dsigma.
/// The cancellation of the circle mean of H makes the value invariant under
/// rescaling inside the logarithm.
inline double cz_constant_trace(const std::function<double(double)>& H, const Ellipse& e,
                                std::size_t nodes = 4096) {
    double acc = 0.0;
    for (std::size_t j = 0; j < nodes; ++j) {
        const double t = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(nodes);
        const double cr = std::cos(t - e.phi), sr = std::sin(t - e.phi);
        const double lg = std::log((cr / e.a) * (cr / e.a) + (sr / e.b) * (sr / e.b));
        acc += lg * H(t);
    }
    return -0.5 * acc * 2.0 * std::numbers::pi / static_cast<double>(nodes);
}

/// Same, for the p.v. part of a second derivative of kappa (selector 11, 12
/// or 22).
inline double cz_constant(int selector, const Ellipse& e, const FourierKernel2D& k,
                          std::size_t nodes = 4096) {
    if (selector != 11 && selector != 12 && selector != 22)
        throw ValidationError("cz_constant: selector must be one of 11, 12, 22");
    return cz_constant_trace(
        [&](double t) {
            const CircleJet2 j = circle_jet(k, t);
            return selector == 11 ? j.h11 : selector == 12 ? j.h12 : j.h22;
        },
        e, nodes);
}

/// Beurling transform real/imaginary parts: the p.v. Hessian entries of the
/// logarithmic kernel, with circle traces cos(2 theta)/pi and sin(2 theta)/pi.
/// Their interior constants on E(a, b, phi) are lambda cos 2phi and
/// lambda sin 2phi.
inline double cz_beurling_real(const Ellipse& e, std::size_t nodes = 4096) {
    return cz_constant_trace([](double t) { return std::cos(2.0 * t) / std::numbers::pi; }, e, nodes);
}

inline double cz_beurling_imag(const Ellipse& e, std::size_t nodes = 4096) {
    return cz_constant_trace([](double t) { return std::sin(2.0 * t) / std::numbers::pi; }, e, nodes);
}

/// First Euler-Lagrange check: finite-difference Hessian of the potential at
/// stratified interior sample points (a boundary margin keeps the stencil
/// inside E). Also recomputes the direct system residual for cross-checking.
inline ELReport verify_first_el(const Solution& sol, const FourierKernel2D& k, std::size_t n_samples = 128,
                                const PotentialOptions& popts = {}) {
    if (n_samples < 1) throw ValidationError("verify_first_el: need at least one sample");
    const Ellipse& e = sol.ellipse;
    const double h = 1e-4 * e.b;
    const double rho_max = 1.0 - 3.5 * h * e.a / (e.b * e.b);

    std::size_t n_r = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(n_samples) / 2.0))));
    std::size_t n_t = (n_samples + n_r - 1) / n_r;

    const auto p_at = [&](Vec2 z) { return potential_at(z, e, k, popts); };

    double worst = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < n_r; ++i) {
        const double rho = rho_max * std::sqrt((static_cast<double>(i) + 0.5) / static_cast<double>(n_r));
        for (std::size_t j = 0; j < n_t; ++j) {
            const double tau = 2.0 * std::numbers::pi * (static_cast<double>(j) + 0.25) / static_cast<double>(n_t);
            const Vec2 z = e.from_frame({e.a * rho * std::cos(tau), e.b * rho * std::sin(tau)});
            const double p0 = p_at(z);
            const double pxx = (p_at({z.x + h, z.y}) - 2.0 * p0 + p_at({z.x - h, z.y})) / (h * h);
            const double pyy = (p_at({z.x, z.y + h}) - 2.0 * p0 + p_at({z.x, z.y - h})) / (h * h);
            const double pxy = (p_at({z.x + h, z.y + h}) - p_at({z.x + h, z.y - h}) -
                                p_at({z.x - h, z.y + h}) + p_at({z.x - h, z.y - h})) /
                               (4.0 * h * h);
            worst = std::max({worst, std::abs(pxx), std::abs(pyy), std::abs(pxy)});
            ++count;
        }
    }

    ELReport rep;
    rep.hessian_residual_interior = worst;
    rep.n_interior = count;
    const auto [psi, kr] = pre_rotation(k);
    (void)psi;
    rep.system_residual = L_residual(sol.params, kr);
    return rep;
}

struct SecondELGrid {
    std::size_t n_scale = 100;  // elliptic scale factors
    std::size_t n_tau = 100;    // angular nodes
    double r_max = 0.0;         // 0: default 4 max(a, b)
    double s_min_offset = 1e-3; // innermost shell sits just off the boundary
    double delta_skip_factor = 0.01; // near-boundary band, in units of min(a,b)
};

/// Second Euler-Lagrange check: C = P(0) (the potential is constant on E),
/// then the minimum of P - C over an annular grid from just outside E out to
/// r_max, plus a coarse far-field probe at radius 8. Points within
/// delta_skip of the boundary run with 4x quadrature depth.
inline ELReport verify_second_el(const Solution& sol, const FourierKernel2D& k,
                                 const SecondELGrid& grid = {}, const PotentialOptions& popts = {}) {
    const Ellipse& e = sol.ellipse;
    const double r_max = grid.r_max > 0.0 ? grid.r_max : 4.0 * e.a;
    const double s_max = r_max / e.a;
    const double s_min = 1.0 + grid.s_min_offset;
    if (s_max <= s_min) throw ValidationError("verify_second_el: r_max does not clear the ellipse");

    PotentialOptions deep = popts;
    deep.polar_base_nodes *= 4;

    ELReport rep;
    rep.C_kappa = potential_at({0.0, 0.0}, e, k, popts);

    const double delta_skip = grid.delta_skip_factor * e.b;
    double min_gap = std::numeric_limits<double>::infinity();
    std::size_t count = 0;
    for (std::size_t i = 0; i < grid.n_scale; ++i) {
        const double s = s_min + (s_max - s_min) * static_cast<double>(i) /
                                      static_cast<double>(grid.n_scale - 1);
        const bool near = (s - 1.0) * e.b < delta_skip;
        for (std::size_t j = 0; j < grid.n_tau; ++j) {
            const double tau = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(grid.n_tau);
            const Vec2 z = e.from_frame({e.a * s * std::cos(tau), e.b * s * std::sin(tau)});
            const double p = potential_at(z, e, k, near ? deep : popts);
            min_gap = std::min(min_gap, p - rep.C_kappa);
            ++count;
        }
    }
    // coarse far-field probe: beyond r_max the confinement dominates
    for (int j = 0; j < 8; ++j) {
        const double t = 2.0 * std::numbers::pi * static_cast<double>(j) / 8.0;
        const double r = std::max(8.0, 2.0 * r_max);
        const Vec2 z{r * std::cos(t), r * std::sin(t)};
        min_gap = std::min(min_gap, potential_at(z, e, k, popts) - rep.C_kappa);
        ++count;
    }
    rep.second_el_min_gap = min_gap;
    rep.n_exterior = count;
    return rep;
}

namespace detail {

/// (Delta kappa * chi_E)(z) for z outside E-bar. Zero-homogeneity kills the
/// Dirac factor (the radial derivative integrates to zero on the circle), so
/// only the p.v. part remains, and the divergence theorem turns the area
/// integral into a boundary one:
///   (Delta kappa * chi_E)(z) = -oint_dE <grad kappa(z - w), nu(w)> ds(w).
/// The boundary integrand concentrates near the closest point as z
/// approaches dE; geometrically graded Gauss-Legendre panels around that
/// angle resolve it.
inline double laplacian_convolution_exterior(Vec2 z, double tau_near, const Ellipse& e,
                                             const FourierKernel2D& k, double t_scale) {
    const auto integrand = [&](double tau) {
        const Vec2 w = e.boundary_point(tau);
        const Vec2 d = z - w;
        const double r2 = d.norm2();
        const auto jet = detail::trace_jet(k, std::atan2(d.y, d.x));
        const double fp = jet[1];
        // <grad kappa(d), nu ds> with grad kappa(d) = f'(arg d) (-d_y, d_x)/|d|^2
        // and nu ds = R_phi (b cos tau, a sin tau) dtau
        const Vec2 n = e.from_frame({e.b * std::cos(tau), e.a * std::sin(tau)});
        return fp * (-d.y * n.x + d.x * n.y) / r2;
    };

    const Quadrature1D gl = gauss_legendre(16);
    const int levels = std::max(8, static_cast<int>(std::ceil(std::log2(std::numbers::pi / t_scale))) + 3);

    double acc = 0.0;
    const auto add_panel = [&](double lo, double hi) {
        for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
            const double t = 0.5 * (lo + hi) + 0.5 * (hi - lo) * gl.nodes[i];
            acc += 0.5 * (hi - lo) * gl.weights[i] * integrand(t);
        }
    };

    double width = std::numbers::pi;
    for (int l = 0; l < levels; ++l) {
        add_panel(tau_near + 0.5 * width, tau_near + width);
        add_panel(tau_near - width, tau_near - 0.5 * width);
        width *= 0.5;
    }
    add_panel(tau_near - width, tau_near + width);
    return -acc;
}

} // namespace detail

/// Exterior limit of the Laplacian of the potential at a boundary point
/// (parametrised by elliptic angle): evaluates
///   2 + (Delta kappa * chi_E / |E|)(x + t nu)
/// on the dyadic ladder t = t0 2^{-j} and extrapolates t -> 0+ by Neville's
/// scheme. The subharmonicity bound asserts the limit is >= 1.
inline double laplacian_exterior_limit(double tau, const Solution& sol, const FourierKernel2D& k,
                                       int levels = 7) {
    const Ellipse& e = sol.ellipse;
    const Vec2 x = e.boundary_point(tau);
    const Vec2 nu = e.outward_normal(tau);
    const double t0 = 0.05 * e.b;

    std::vector<double> ts(static_cast<std::size_t>(levels)), gs(static_cast<std::size_t>(levels));
    for (int j = 0; j < levels; ++j) {
        const double t = t0 * std::ldexp(1.0, -j);
        const Vec2 z = x + nu * t;
        // tau is also (approximately) the elliptic angle of the closest
        // boundary point; the panel grading only needs that approximation
        const double conv = detail::laplacian_convolution_exterior(z, tau, e, k, t / e.b);
        ts[static_cast<std::size_t>(j)] = t;
        gs[static_cast<std::size_t>(j)] = 2.0 + conv / e.area();
    }

    // Neville extrapolation to t = 0
    std::vector<double> col = gs;
    double prev_correction = std::numeric_limits<double>::infinity();
    for (int order = 1; order < levels; ++order) {
        for (int i = 0; i < levels - order; ++i) {
            const double t_lo = ts[static_cast<std::size_t>(i)], t_hi = ts[static_cast<std::size_t>(i + order)];
            col[static_cast<std::size_t>(i)] =
                (t_lo * col[static_cast<std::size_t>(i + 1)] - t_hi * col[static_cast<std::size_t>(i)]) /
                (t_lo - t_hi);
        }
        col.resize(static_cast<std::size_t>(levels - order));
        const double corr = std::abs(col.front() - gs.front());
        if (order > 2 && corr > 10.0 * prev_correction + 1e-9)
            throw ExtrapolationUnstable("laplacian_exterior_limit: Neville table diverges");
        prev_correction = std::max(corr, 1e-300);
    }
    return col.front();
}

} // namespace coulell
