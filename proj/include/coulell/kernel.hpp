#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "coulell/errors.hpp"
#include "coulell/trig_poly.hpp"

namespace coulell {

/// Even, zero-homogeneous perturbation kernel kappa in the plane,
/// represented by the Fourier series of its unit-circle trace:
///
///   kappa(e^{i theta}) = sum_{n=0}^{N} a[n] cos(2 n theta) + b[n] sin(2 n theta).
///
/// Only even frequencies are representable, so evenness of kappa is
/// structural. The homogeneous extension kappa(z) = f(arg z) determines
/// the kernel everywhere off the origin.
struct FourierKernel2D {
    std::vector<double> a; // a[n] multiplies cos(2n theta), n = 0..N
    std::vector<double> b; // b[n] multiplies sin(2n theta); b[0] is always 0

    FourierKernel2D() : a(2, 0.0), b(2, 0.0) {}

    /// Build from spec-file coefficient lists: cosines a_0..a_N and sines
    /// b_1..b_N (the sine list starts at frequency 2).
    static FourierKernel2D from_lists(std::vector<double> a_list, const std::vector<double>& b_list) {
        FourierKernel2D k;
        std::size_t order = std::max<std::size_t>({a_list.empty() ? 0 : a_list.size() - 1, b_list.size(), 1});
        k.a.assign(order + 1, 0.0);
        k.b.assign(order + 1, 0.0);
        for (std::size_t n = 0; n < a_list.size(); ++n) k.a[n] = a_list[n];
        for (std::size_t n = 0; n < b_list.size(); ++n) k.b[n + 1] = b_list[n];
        for (double v : k.a)
            if (!std::isfinite(v)) throw ValidationError("kernel coefficient is not finite");
        for (double v : k.b)
            if (!std::isfinite(v)) throw ValidationError("kernel coefficient is not finite");
        return k;
    }

    std::size_t order() const { return a.size() - 1; }

    double a1() const { return a.size() > 1 ? a[1] : 0.0; }
    double b1() const { return b.size() > 1 ? b[1] : 0.0; }

    /// Circle trace f(theta) as a trig polynomial of degree 2N.
    TrigPoly trace() const {
        TrigPoly f(2 * order());
        for (std::size_t n = 0; n < a.size(); ++n) {
            f.add_cos(static_cast<long>(2 * n), a[n]);
            f.add_sin(static_cast<long>(2 * n), b[n]);
        }
        return f;
    }
};

/// Value, gradient and Hessian of the homogeneous extension of kappa at a
/// unit-circle point. trace(hess) equals f''(theta) there.
struct CircleJet2 {
    double value = 0.0;
    std::array<double, 2> grad{0.0, 0.0};
    double h11 = 0.0, h12 = 0.0, h22 = 0.0;
};

inline double eval(const FourierKernel2D& k, double theta) {
    // angle-addition recurrence on 2 theta; no per-term trig calls
    const double c2 = std::cos(2.0 * theta), s2 = std::sin(2.0 * theta);
    double cn = 1.0, sn = 0.0;
    double acc = k.a[0];
    for (std::size_t n = 1; n < k.a.size(); ++n) {
        const double c = cn * c2 - sn * s2;
        const double s = sn * c2 + cn * s2;
        cn = c;
        sn = s;
        acc += k.a[n] * cn + k.b[n] * sn;
    }
    return acc;
}

namespace detail {

/// f, f', f'' of the circle trace at theta, via one recurrence pass.
inline std::array<double, 3> trace_jet(const FourierKernel2D& k, double theta) {
    const double c2 = std::cos(2.0 * theta), s2 = std::sin(2.0 * theta);
    double cn = 1.0, sn = 0.0;
    double f = k.a[0], fp = 0.0, fpp = 0.0;
    for (std::size_t n = 1; n < k.a.size(); ++n) {
        const double c = cn * c2 - sn * s2;
        const double s = sn * c2 + cn * s2;
        cn = c;
        sn = s;
        const double w = 2.0 * static_cast<double>(n);
        f += k.a[n] * cn + k.b[n] * sn;
        fp += w * (-k.a[n] * sn + k.b[n] * cn);
        fpp += -w * w * (k.a[n] * cn + k.b[n] * sn);
    }
    return {f, fp, fpp};
}

} // namespace detail

/// First and second Cartesian derivatives of kappa on the unit circle.
/// Closed forms follow from the zero-homogeneity chain rule
/// (kappa(z) = f(arg z)); they are locked in by a finite-difference
/// oracle in the test suite.
inline CircleJet2 circle_jet(const FourierKernel2D& k, double theta) {
    const auto [f, fp, fpp] = detail::trace_jet(k, theta);
    const double c = std::cos(theta), s = std::sin(theta);
    const double c2 = c * c - s * s, s2 = 2.0 * s * c;
    CircleJet2 j;
    j.value = f;
    j.grad = {-s * fp, c * fp};
    j.h11 = s2 * fp + s * s * fpp;
    j.h22 = -s2 * fp + c * c * fpp;
    j.h12 = -c2 * fp - 0.5 * s2 * fpp;
    return j;
}

/// The three Hessian traces of kappa on the unit circle as exact trig
/// polynomials (p.v. kernels of the associated Calderon-Zygmund operators).
struct HessianTraces {
    TrigPoly h11, h12, h22;
};

inline HessianTraces hessian_traces(const FourierKernel2D& k) {
    const TrigPoly f = k.trace();
    const TrigPoly gx = homog_diff_x(f, 0);
    const TrigPoly gy = homog_diff_y(f, 0);
    HessianTraces h;
    h.h11 = homog_diff_x(gx, 1);
    h.h12 = homog_diff_y(gx, 1);
    h.h22 = homog_diff_y(gy, 1);
    return h;
}

/// sup over the circle of the Frobenius norms of nabla^j kappa, j = 0..3
/// (the C^3 smallness quantity steering the perturbative regime).
/// Derivatives come from the same homogeneity chain rule as circle_jet,
/// extended one more order.
inline double c3_norm(const FourierKernel2D& k) {
    const TrigPoly f = k.trace();
    const TrigPoly gx = homog_diff_x(f, 0);
    const TrigPoly gy = homog_diff_y(f, 0);
    const TrigPoly gxx = homog_diff_x(gx, 1);
    const TrigPoly gxy = homog_diff_y(gx, 1);
    const TrigPoly gyy = homog_diff_y(gy, 1);
    const TrigPoly gxxx = homog_diff_x(gxx, 2);
    const TrigPoly gxxy = homog_diff_y(gxx, 2);
    const TrigPoly gxyy = homog_diff_y(gxy, 2);
    const TrigPoly gyyy = homog_diff_y(gyy, 2);

    const std::size_t m = std::max<std::size_t>(64, 16 * k.order());
    double best = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(m);
        const double n0 = std::abs(f.eval(t));
        const double n1 = std::hypot(gx.eval(t), gy.eval(t));
        const double n2 = std::sqrt(gxx.eval(t) * gxx.eval(t) + 2.0 * gxy.eval(t) * gxy.eval(t) +
                                    gyy.eval(t) * gyy.eval(t));
        const double t111 = gxxx.eval(t), t112 = gxxy.eval(t), t122 = gxyy.eval(t), t222 = gyyy.eval(t);
        const double n3 = std::sqrt(t111 * t111 + 3.0 * t112 * t112 + 3.0 * t122 * t122 + t222 * t222);
        best = std::max({best, n0, n1, n2, n3});
    }
    return best;
}

/// Coefficients of kappa expressed in coordinates w = z e^{i psi}:
///   A_n = a_n cos(2n psi) - b_n sin(2n psi),
///   B_n = a_n sin(2n psi) + b_n cos(2n psi),
/// i.e. the rotated trace is f(theta - psi).
inline FourierKernel2D rotated(const FourierKernel2D& k, double psi) {
    FourierKernel2D r = k;
    for (std::size_t n = 0; n < k.a.size(); ++n) {
        const double c = std::cos(2.0 * static_cast<double>(n) * psi);
        const double s = std::sin(2.0 * static_cast<double>(n) * psi);
        r.a[n] = k.a[n] * c - k.b[n] * s;
        r.b[n] = k.a[n] * s + k.b[n] * c;
    }
    return r;
}

struct ProjectOptions {
    double evenness_tol = 1e-10;  // odd-frequency l2 energy fraction
    double alias_tol = 1e-10;     // tail size relative to largest coefficient
};

struct ProjectResult {
    FourierKernel2D kernel;
    double odd_energy_fraction = 0.0;
    bool alias_warning = false;
};

/// Discrete Fourier analysis of 2M uniform circle samples (theta_j = j pi / M),
/// restricted to even frequencies <= 2N (default truncation N = 32).
/// Odd-frequency content signals that the sampled function was not even and
/// is rejected.
inline ProjectResult project_diagnosed(const std::vector<double>& samples, std::size_t order = 32,
                                       const ProjectOptions& opts = {}) {
    const std::size_t n2 = samples.size();
    if (n2 < 2 || n2 % 2 != 0) throw ValidationError("project: need an even number of samples");
    const std::size_t m = n2 / 2;
    if (n2 < 4 * order + 4) throw ValidationError("project: need 2M >= 4N + 4 samples");

    // full real DFT up to the Nyquist frequency M
    std::vector<double> ca(m + 1, 0.0), sa(m + 1, 0.0);
    for (std::size_t freq = 0; freq <= m; ++freq) {
        double sc = 0.0, ss = 0.0;
        for (std::size_t j = 0; j < n2; ++j) {
            const double t = std::numbers::pi * static_cast<double>(j * freq) / static_cast<double>(m);
            sc += samples[j] * std::cos(t);
            ss += samples[j] * std::sin(t);
        }
        const double norm = (freq == 0 || freq == m) ? 0.5 : 1.0;
        ca[freq] = norm * sc / static_cast<double>(m);
        sa[freq] = (freq == m) ? 0.0 : norm * ss / static_cast<double>(m);
    }

    double odd_energy = 0.0, total_energy = 0.0;
    for (std::size_t freq = 0; freq <= m; ++freq) {
        const double e = ca[freq] * ca[freq] + sa[freq] * sa[freq];
        total_energy += e;
        if (freq % 2 == 1) odd_energy += e;
    }

    ProjectResult res;
    res.odd_energy_fraction = total_energy > 0.0 ? odd_energy / total_energy : 0.0;
    if (res.odd_energy_fraction > opts.evenness_tol)
        throw EvennessViolation("project: odd-frequency energy fraction " +
                                std::to_string(res.odd_energy_fraction) + " exceeds tolerance");

    std::vector<double> a_list(order + 1, 0.0), b_list(order, 0.0);
    for (std::size_t n = 0; n <= order && 2 * n <= m; ++n) {
        a_list[n] = ca[2 * n];
        if (n >= 1) b_list[n - 1] = sa[2 * n];
    }
    res.kernel = FourierKernel2D::from_lists(a_list, b_list);

    double max_coeff = 0.0;
    for (double v : a_list) max_coeff = std::max(max_coeff, std::abs(v));
    for (double v : b_list) max_coeff = std::max(max_coeff, std::abs(v));
    const double tail = std::abs(a_list[order]) + (order >= 1 ? std::abs(b_list[order - 1]) : 0.0);
    res.alias_warning = max_coeff > 0.0 && tail > opts.alias_tol * max_coeff;
    return res;
}

inline FourierKernel2D project(const std::vector<double>& samples, std::size_t order = 32,
                               const ProjectOptions& opts = {}) {
    return project_diagnosed(samples, order, opts).kernel;
}

/// kappa = alpha x^2 / |z|^2 = alpha (1 + cos 2theta) / 2.
inline FourierKernel2D preset_anisotropic(double alpha) {
    return FourierKernel2D::from_lists({0.5 * alpha, 0.5 * alpha}, {0.0});
}

/// kappa = beta x y / |z|^2 = (beta/2) sin 2theta.
inline FourierKernel2D preset_shear(double beta) {
    return FourierKernel2D::from_lists({0.0, 0.0}, {0.5 * beta});
}

/// kappa = beta x^{2l} / |z|^{2l} = beta cos^{2l} theta, expanded by the
/// binomial identity cos^{2l} = 2^{-2l} (C(2l,l) + 2 sum_j C(2l,l-j) cos 2j theta).
inline FourierKernel2D preset_power(double beta, unsigned ell) {
    if (ell == 0) throw InvalidPreset("power preset: exponent must be >= 1");
    std::vector<double> binom(2 * ell + 1, 0.0);
    binom[0] = 1.0;
    for (std::size_t row = 1; row <= 2 * ell; ++row)
        for (std::size_t j = row; j > 0; --j) binom[j] += binom[j - 1];
    const double scale = beta * std::ldexp(1.0, -2 * static_cast<int>(ell));
    std::vector<double> a_list(ell + 1, 0.0), b_list(ell, 0.0);
    a_list[0] = scale * binom[ell];
    for (std::size_t j = 1; j <= ell; ++j) a_list[j] = 2.0 * scale * binom[ell - j];
    return FourierKernel2D::from_lists(a_list, b_list);
}

/// Screw-dislocation kernel kappa = -log((alpha x^2 - 2 beta xy + gamma y^2)/|z|^2)/2,
/// sampled and projected with the truncation order chosen adaptively.
inline FourierKernel2D preset_screw(double alpha, double beta, double gamma) {
    if (!(alpha > 0.0) || !(alpha * gamma - beta * beta > 0.0))
        throw InvalidPreset("screw preset requires alpha > 0 and alpha*gamma - beta^2 > 0");
    const double mean = 0.5 * (alpha + gamma);
    const double diff = 0.5 * (alpha - gamma);
    auto f = [&](double t) { return -0.5 * std::log(mean + diff * std::cos(2.0 * t) - beta * std::sin(2.0 * t)); };
    for (std::size_t order = 8; order <= 512; order *= 2) {
        const std::size_t m = 4 * order + 4;
        std::vector<double> samples(2 * m);
        for (std::size_t j = 0; j < 2 * m; ++j)
            samples[j] = f(std::numbers::pi * static_cast<double>(j) / static_cast<double>(m));
        ProjectResult res = project_diagnosed(samples, order);
        if (!res.alias_warning) return res.kernel;
    }
    throw InvalidPreset("screw preset: coefficients decay too slowly (form nearly degenerate)");
}

} // namespace coulell
