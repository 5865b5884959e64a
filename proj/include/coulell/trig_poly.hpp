#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <vector>

namespace coulell {

/// Real trigonometric polynomial
///
///   g(t) = c[0] + sum_{m=1}^{deg} c[m] cos(m t) + s[m] sin(m t).
///
/// Supports the exact operations needed to push zero-homogeneous kernels
/// through Cartesian derivatives on the unit circle: differentiation in t
/// and multiplication by cos t / sin t (both map trig polynomials to trig
/// polynomials, so no discretisation error ever enters).
class TrigPoly {
public:
    TrigPoly() : c_(1, 0.0), s_(1, 0.0) {}
    explicit TrigPoly(std::size_t degree) : c_(degree + 1, 0.0), s_(degree + 1, 0.0) {}

    std::size_t degree() const { return c_.size() - 1; }

    double cos_coeff(std::size_t m) const { return m < c_.size() ? c_[m] : 0.0; }
    double sin_coeff(std::size_t m) const { return m < s_.size() ? s_[m] : 0.0; }

    /// Accumulate v * cos(m t); negative m folds onto |m| (cos is even).
    void add_cos(long m, double v) {
        if (m < 0) m = -m;
        ensure(static_cast<std::size_t>(m));
        c_[static_cast<std::size_t>(m)] += v;
    }

    /// Accumulate v * sin(m t); sin is odd, sin(0 t) vanishes.
    void add_sin(long m, double v) {
        if (m < 0) {
            m = -m;
            v = -v;
        }
        if (m == 0) return;
        ensure(static_cast<std::size_t>(m));
        s_[static_cast<std::size_t>(m)] += v;
    }

    double eval(double t) const {
        // iterated angle addition: one sin/cos pair per call
        const double ct = std::cos(t), st = std::sin(t);
        double ck = 1.0, sk = 0.0; // cos(k t), sin(k t) for k = 0
        double acc = c_[0];
        for (std::size_t k = 1; k < c_.size(); ++k) {
            const double cn = ck * ct - sk * st;
            const double sn = sk * ct + ck * st;
            ck = cn;
            sk = sn;
            acc += c_[k] * ck + s_[k] * sk;
        }
        return acc;
    }

    TrigPoly derivative() const {
        TrigPoly d(degree());
        for (std::size_t m = 1; m < c_.size(); ++m) {
            d.c_[m] = static_cast<double>(m) * s_[m];
            d.s_[m] = -static_cast<double>(m) * c_[m];
        }
        return d;
    }

    /// Product with cos t (degree grows by one).
    TrigPoly mul_cos() const {
        TrigPoly r(degree() + 1);
        for (std::size_t m = 0; m < c_.size(); ++m) {
            const long k = static_cast<long>(m);
            // cos t cos kt = (cos(k+1)t + cos(k-1)t)/2
            r.add_cos(k + 1, 0.5 * c_[m]);
            r.add_cos(k - 1, 0.5 * c_[m]);
            // cos t sin kt = (sin(k+1)t + sin(k-1)t)/2
            r.add_sin(k + 1, 0.5 * s_[m]);
            r.add_sin(k - 1, 0.5 * s_[m]);
        }
        return r;
    }

    /// Product with sin t (degree grows by one).
    TrigPoly mul_sin() const {
        TrigPoly r(degree() + 1);
        for (std::size_t m = 0; m < c_.size(); ++m) {
            const long k = static_cast<long>(m);
            // sin t cos kt = (sin(k+1)t - sin(k-1)t)/2
            r.add_sin(k + 1, 0.5 * c_[m]);
            r.add_sin(k - 1, -0.5 * c_[m]);
            // sin t sin kt = (cos(k-1)t - cos(k+1)t)/2
            r.add_cos(k - 1, 0.5 * s_[m]);
            r.add_cos(k + 1, -0.5 * s_[m]);
        }
        return r;
    }

    TrigPoly operator*(double x) const {
        TrigPoly r = *this;
        for (auto& v : r.c_) v *= x;
        for (auto& v : r.s_) v *= x;
        return r;
    }

    TrigPoly operator+(const TrigPoly& o) const {
        TrigPoly r(std::max(degree(), o.degree()));
        for (std::size_t m = 0; m < r.c_.size(); ++m) {
            r.c_[m] = cos_coeff(m) + o.cos_coeff(m);
            r.s_[m] = sin_coeff(m) + o.sin_coeff(m);
        }
        return r;
    }

private:
    void ensure(std::size_t m) {
        if (m >= c_.size()) {
            c_.resize(m + 1, 0.0);
            s_.resize(m + 1, 0.0);
        }
    }

    std::vector<double> c_;
    std::vector<double> s_;
};

/// One Cartesian derivative of a function of the form g(theta)/r^m
/// (theta = arg z, r = |z|). Writing u = x/r^2, v = y/r^2:
///   d/dx [g/r^m] = (-m cos(theta) g - sin(theta) g') / r^{m+1}
///   d/dy [g/r^m] = (-m sin(theta) g + cos(theta) g') / r^{m+1}
/// so the circle trace of any Cartesian derivative is again a trig
/// polynomial and the order m increases by one.
inline TrigPoly homog_diff_x(const TrigPoly& g, int m) {
    return g.mul_cos() * static_cast<double>(-m) + g.derivative().mul_sin() * -1.0;
}

inline TrigPoly homog_diff_y(const TrigPoly& g, int m) {
    return g.mul_sin() * static_cast<double>(-m) + g.derivative().mul_cos();
}

} // namespace coulell
