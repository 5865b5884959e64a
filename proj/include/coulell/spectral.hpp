#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>

#include "coulell/kernel.hpp"
#include "coulell/trig_poly.hpp"

namespace coulell {

/// Outcome of minimising the Fourier symbol of W^kappa over directions.
/// The transform satisfies FT(W^kappa)(xi) = 2 pi m(theta_xi) / |xi|^2, so
/// margin = min m certifies strict positivity off the origin (and with it
/// strict convexity of the energy and uniqueness of the minimiser) exactly
/// when margin > 0.
struct PositivityCertificate {
    double margin = 1.0;
    double argmin_angle = 0.0;
    bool is_positive = true;
};

/// Direction-dependent symbol factor
///   m(theta) = 1 + sum_{n>=1} (-1)^n 2n (a_n cos 2n theta + b_n sin 2n theta).
inline double symbol(const FourierKernel2D& k, double theta) {
    const double c2 = std::cos(2.0 * theta), s2 = std::sin(2.0 * theta);
    double cn = 1.0, sn = 0.0, acc = 1.0;
    double sign = -1.0;
    for (std::size_t n = 1; n < k.a.size(); ++n) {
        const double c = cn * c2 - sn * s2;
        const double s = sn * c2 + cn * s2;
        cn = c;
        sn = s;
        acc += sign * 2.0 * static_cast<double>(n) * (k.a[n] * cn + k.b[n] * sn);
        sign = -sign;
    }
    return acc;
}

namespace detail {

inline TrigPoly symbol_poly(const FourierKernel2D& k) {
    TrigPoly m(2 * k.order());
    m.add_cos(0, 1.0);
    double sign = -1.0;
    for (std::size_t n = 1; n < k.a.size(); ++n) {
        m.add_cos(static_cast<long>(2 * n), sign * 2.0 * static_cast<double>(n) * k.a[n]);
        m.add_sin(static_cast<long>(2 * n), sign * 2.0 * static_cast<double>(n) * k.b[n]);
        sign = -sign;
    }
    return m;
}

} // namespace detail

/// Exact minimisation of the symbol: dense grid scan followed by Newton on
/// the derivative of the trig polynomial, restricted to the winning cell.
inline PositivityCertificate certify(const FourierKernel2D& k) {
    const TrigPoly m = detail::symbol_poly(k);
    const TrigPoly mp = m.derivative();
    const TrigPoly mpp = mp.derivative();

    const std::size_t grid = std::max<std::size_t>(256, 64 * k.order());
    const double h = 2.0 * std::numbers::pi / static_cast<double>(grid);
    double best_t = 0.0, best_v = m.eval(0.0);
    for (std::size_t i = 1; i < grid; ++i) {
        const double t = h * static_cast<double>(i);
        const double v = m.eval(t);
        if (v < best_v) {
            best_v = v;
            best_t = t;
        }
    }

    double t = best_t;
    for (int it = 0; it < 40; ++it) {
        const double g = mp.eval(t);
        const double gg = mpp.eval(t);
        if (gg <= 0.0) break; // not locally convex; grid point already fine
        const double step = g / gg;
        const double tn = t - step;
        if (std::abs(tn - best_t) > h) break; // stay inside the winning cell
        t = tn;
        if (std::abs(step) < 1e-15) break;
    }
    if (m.eval(t) < best_v) {
        best_v = m.eval(t);
        best_t = t;
    }

    PositivityCertificate cert;
    cert.margin = best_v;
    // the symbol has period pi; report the argmin in [0, pi)
    cert.argmin_angle = std::remainder(best_t, std::numbers::pi);
    if (cert.argmin_angle < 0.0) cert.argmin_angle += std::numbers::pi;
    if (cert.argmin_angle >= std::numbers::pi - 1e-12) cert.argmin_angle = 0.0;
    cert.is_positive = cert.margin > 0.0;
    return cert;
}

} // namespace coulell
