#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "coulell/errors.hpp"
#include "coulell/newton.hpp"
#include "coulell/quadrature.hpp"

namespace coulell {

/// Surface area of the unit sphere in R^d.
inline double sphere_area(int d) {
    return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
}

struct SphereRule {
    std::vector<Eigen::VectorXd> nodes; // on S^{d-1}
    std::vector<double> weights;        // sum to omega_d
};

/// Product quadrature on S^{d-1}: Gauss-Jacobi with weight (1-t^2)^{(k-3)/2}
/// in each polar cosine (k the remaining dimension) and trapezoid in the
/// azimuth. Exact for all polynomials of degree <= 2 level.
inline SphereRule sphere_quadrature(int d, int level) {
    if (d < 2) throw ValidationError("sphere_quadrature: need dimension >= 2");
    if (level < 1) throw ValidationError("sphere_quadrature: need level >= 1");

    SphereRule rule;
    const std::size_t m_az = static_cast<std::size_t>(2 * level + 2);
    for (std::size_t j = 0; j < m_az; ++j) {
        const double t = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(m_az);
        Eigen::VectorXd x(2);
        x << std::cos(t), std::sin(t);
        rule.nodes.push_back(x);
        rule.weights.push_back(2.0 * std::numbers::pi / static_cast<double>(m_az));
    }

    for (int dim = 3; dim <= d; ++dim) {
        const Quadrature1D polar =
            gauss_jacobi_sym(static_cast<std::size_t>(level + 1), 0.5 * (dim - 3));
        SphereRule next;
        next.nodes.reserve(polar.nodes.size() * rule.nodes.size());
        next.weights.reserve(polar.nodes.size() * rule.nodes.size());
        for (std::size_t i = 0; i < polar.nodes.size(); ++i) {
            const double t = polar.nodes[i];
            const double s = std::sqrt(std::max(0.0, 1.0 - t * t));
            for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
                Eigen::VectorXd x(dim);
                x(0) = t;
                x.tail(dim - 1) = s * rule.nodes[j];
                next.nodes.push_back(x);
                next.weights.push_back(polar.weights[i] * rule.weights[j]);
            }
        }
        rule = std::move(next);
    }
    return rule;
}

/// (2-d)-homogeneous perturbation kernel on R^d, d >= 3, carried by its
/// sphere trace. Gradients and Hessians are taken by central differences of
/// the homogeneous extension kappa(x) = |x|^{2-d} trace(x/|x|). The diagonal
/// reduction of the first-variation system requires the trace to be even in
/// each coordinate, which is validated on sample points at construction.
/// `smallness` caches
/// sup-norm estimates of |nabla^j kappa| on the sphere for j = 0..3
/// (directional finite differences over a sample grid); the perturbative
/// regime needs these small.
struct KernelND {
    int dim = 3;
    std::function<double(const Eigen::VectorXd&)> trace;
    double fd_step = 1e-5;
    std::array<double, 4> smallness{0.0, 0.0, 0.0, 0.0};

    double extension(const Eigen::VectorXd& x) const {
        const double r = x.norm();
        return std::pow(r, 2.0 - static_cast<double>(dim)) * trace(x / r);
    }

    double d_i(const Eigen::VectorXd& xi, int i) const {
        Eigen::VectorXd xp = xi, xm = xi;
        xp(i) += fd_step;
        xm(i) -= fd_step;
        return (extension(xp) - extension(xm)) / (2.0 * fd_step);
    }

    double d_ii(const Eigen::VectorXd& xi, int i) const {
        Eigen::VectorXd xp = xi, xm = xi;
        xp(i) += fd_step;
        xm(i) -= fd_step;
        return (extension(xp) - 2.0 * extension(xi) + extension(xm)) / (fd_step * fd_step);
    }
};

namespace detail {

inline void check_evenness(const KernelND& k) {
    // deterministic sample directions
    std::uint64_t state = 0x1234abcdULL;
    const auto next_unit = [&]() {
        Eigen::VectorXd x(k.dim);
        for (int i = 0; i < k.dim; ++i) {
            state = state * 6364136223846793005ULL + 1442695040888963407ULL;
            x(i) = static_cast<double>(static_cast<std::int64_t>(state >> 11)) * 0x1.0p-52 - 1.0;
        }
        return x.normalized().eval();
    };
    for (int trial = 0; trial < 32; ++trial) {
        const Eigen::VectorXd x = next_unit();
        const double v = k.trace(x);
        for (int i = 0; i < k.dim; ++i) {
            Eigen::VectorXd y = x;
            y(i) = -y(i);
            if (std::abs(k.trace(y) - v) > 1e-10 * std::max(1.0, std::abs(v)))
                throw ValidationError("KernelND: trace is not even in coordinate " + std::to_string(i));
        }
    }
}

inline std::array<double, 4> estimate_smallness(const KernelND& k);

} // namespace detail

inline KernelND make_kernel_nd(int d, std::function<double(const Eigen::VectorXd&)> trace) {
    if (d < 3) throw ValidationError("make_kernel_nd: dimension must be >= 3");
    KernelND k;
    k.dim = d;
    k.trace = std::move(trace);
    detail::check_evenness(k);
    k.smallness = detail::estimate_smallness(k);
    return k;
}

namespace detail {

/// Directional finite-difference estimates of sup |nabla^j kappa| over a
/// coarse sphere grid, j = 0..3. The third-order stencil uses a wider step;
/// these are diagnostics for the perturbative regime, not certified bounds.
inline std::array<double, 4> estimate_smallness(const KernelND& k) {
    const int d = k.dim;
    const SphereRule grid = sphere_quadrature(d, 3);
    std::vector<Eigen::VectorXd> dirs;
    for (int i = 0; i < d; ++i) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(d);
        v(i) = 1.0;
        dirs.push_back(v);
    }
    dirs.push_back(Eigen::VectorXd::Constant(d, 1.0).normalized());
    {
        Eigen::VectorXd v = Eigen::VectorXd::Constant(d, 1.0);
        v(0) = -1.0;
        dirs.push_back(v.normalized());
    }

    // probe the quadrature nodes plus the coordinate poles and the main
    // diagonal (the extrema of axis-aligned traces sit at the poles)
    std::vector<Eigen::VectorXd> probes = grid.nodes;
    for (int i = 0; i < d; ++i) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(d);
        v(i) = 1.0;
        probes.push_back(v);
    }
    probes.push_back(Eigen::VectorXd::Constant(d, 1.0).normalized());

    std::array<double, 4> sup{0.0, 0.0, 0.0, 0.0};
    const double h1 = 1e-5, h2 = 1e-4, h3 = 1e-2;
    for (const auto& xi : probes) {
        sup[0] = std::max(sup[0], std::abs(k.trace(xi)));
        for (const auto& v : dirs) {
            const auto g = [&](double s) { return k.extension(xi + s * v); };
            sup[1] = std::max(sup[1], std::abs((g(h1) - g(-h1)) / (2.0 * h1)));
            sup[2] = std::max(sup[2], std::abs((g(h2) - 2.0 * g(0.0) + g(-h2)) / (h2 * h2)));
            sup[3] = std::max(sup[3], std::abs((g(2.0 * h3) - 2.0 * g(h3) + 2.0 * g(-h3) - g(-2.0 * h3)) /
                                               (2.0 * h3 * h3 * h3)));
        }
    }
    return sup;
}

} // namespace detail

inline KernelND kernel_nd_zero(int d) {
    return make_kernel_nd(d, [](const Eigen::VectorXd&) { return 0.0; });
}

/// kappa(x) = eps x_axis^2 / |x|^d (sphere trace eps xi_axis^2).
inline KernelND kernel_nd_power(int d, int axis, double eps) {
    if (axis < 0 || axis >= d) throw ValidationError("kernel_nd_power: axis out of range");
    return make_kernel_nd(d, [axis, eps](const Eigen::VectorXd& xi) { return eps * xi(axis) * xi(axis); });
}

/// Scattered sphere samples, interpolated by a Gaussian radial basis and
/// symmetrised over coordinate sign flips (so the even-in-each-variable
/// requirement holds structurally).
inline KernelND kernel_nd_from_samples(int d, std::vector<Eigen::VectorXd> points,
                                       const std::vector<double>& values) {
    if (points.size() != values.size() || points.size() < static_cast<std::size_t>(d + 1))
        throw ValidationError("kernel_nd_from_samples: need matching point/value lists");
    for (auto& p : points) {
        if (p.size() != d) throw ValidationError("kernel_nd_from_samples: point dimension mismatch");
        const double r = p.norm();
        if (!(r > 0.0)) throw ValidationError("kernel_nd_from_samples: zero sample point");
        p /= r;
    }
    const std::size_t n = points.size();

    std::vector<double> dists;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) dists.push_back((points[i] - points[j]).norm());
    std::nth_element(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(dists.size() / 2), dists.end());
    const double shape = 2.0 * std::max(dists[dists.size() / 2], 1e-3);

    Eigen::MatrixXd phi(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double r = (points[i] - points[j]).norm() / shape;
            phi(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = std::exp(-r * r);
        }
    phi.diagonal().array() += 1e-10;
    Eigen::VectorXd rhs(n);
    for (std::size_t i = 0; i < n; ++i) rhs(static_cast<Eigen::Index>(i)) = values[i];
    const Eigen::VectorXd coeff = phi.ldlt().solve(rhs);

    auto interp = [points, coeff, shape](const Eigen::VectorXd& x) {
        double acc = 0.0;
        for (std::size_t j = 0; j < points.size(); ++j) {
            const double r = (x - points[j]).norm() / shape;
            acc += coeff(static_cast<Eigen::Index>(j)) * std::exp(-r * r);
        }
        return acc;
    };
    // average over the 2^d sign-flip orbit
    auto even_interp = [interp, d](const Eigen::VectorXd& x) {
        double acc = 0.0;
        Eigen::VectorXd y(d);
        for (unsigned mask = 0; mask < (1u << d); ++mask) {
            for (int i = 0; i < d; ++i) y(i) = (mask >> i) & 1u ? -x(i) : x(i);
            acc += interp(y);
        }
        return acc / static_cast<double>(1u << d);
    };
    return make_kernel_nd(d, even_interp);
}

struct NdOptions {
    int level = 0;        // 0: 15 for d = 3, 10 otherwise (exactness 30 / 20)
    double tol = 1e-9;
    int max_iter = 50;
    double fd_step = 1e-5; // Newton Jacobian step
};

inline int nd_default_level(int d) { return d == 3 ? 15 : 10; }

/// Diagonal first-variation system for the semi-axes:
///   G_i(a) = int xi_i d_i W0 dsigma - int log|xi/a| d_ii W0 dsigma
///          + I_i(kappa) + F_i(a, kappa) + (omega_d/d) prod_j a_j,
/// with W0 = |x|^{2-d}, whose surface derivatives are (2-d) xi_i and
/// (2-d)(1 - d xi_i^2) (locked in by finite differences in the tests).
inline Eigen::VectorXd G_nd(const Eigen::VectorXd& a, const KernelND& k, const SphereRule& rule) {
    const int d = k.dim;
    if (a.size() != d) throw ValidationError("G_nd: axis count must match the dimension");
    if (a.minCoeff() <= 0.0) throw DomainError("G_nd: semi-axes must be positive");
    const double omega = sphere_area(d);
    const double dd = static_cast<double>(d);

    double vol_term = omega / dd;
    for (int j = 0; j < d; ++j) vol_term *= a(j);

    Eigen::VectorXd g = Eigen::VectorXd::Constant(d, (2.0 - dd) * omega / dd + vol_term);
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const Eigen::VectorXd& xi = rule.nodes[q];
        const double w = rule.weights[q];
        double ra2 = 0.0;
        for (int i = 0; i < d; ++i) ra2 += (xi(i) / a(i)) * (xi(i) / a(i));
        const double lg = 0.5 * std::log(ra2);
        for (int i = 0; i < d; ++i) {
            const double dW0 = (2.0 - dd) * (1.0 - dd * xi(i) * xi(i));
            g(i) += w * (-lg * dW0 + xi(i) * k.d_i(xi, i) - lg * k.d_ii(xi, i));
        }
    }
    return g;
}

struct NdSolution {
    Eigen::VectorXd a;
    double residual = 0.0;
    int iterations = 0;
};

/// Newton continuation from the kappa = 0 ball of radius (d-2)^{1/d}.
inline NdSolution solve_nd(const KernelND& k, const NdOptions& opts = {}) {
    const int d = k.dim;
    const int level = opts.level > 0 ? opts.level : nd_default_level(d);
    const SphereRule rule = sphere_quadrature(d, level);

    const double r0 = std::pow(static_cast<double>(d) - 2.0, 1.0 / static_cast<double>(d));
    const auto fun = [&](const Eigen::VectorXd& x) { return G_nd(x, k, rule); };
    const auto inside = [](const Eigen::VectorXd& x) { return x.minCoeff() > 0.0; };

    NewtonOptions nopts;
    nopts.tol = opts.tol;
    nopts.max_iter = opts.max_iter;
    nopts.fd_step = opts.fd_step;
    const NewtonResult res = newton_solve(fun, Eigen::VectorXd::Constant(d, r0), inside, nopts);
    return {res.x, res.residual, res.iterations};
}

} // namespace coulell
