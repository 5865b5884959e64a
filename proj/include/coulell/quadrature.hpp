#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace coulell {

struct Quadrature1D {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Gauss rule for the symmetric Jacobi weight (1 - x^2)^alpha on [-1, 1],
/// computed by Golub-Welsch from the three-term recurrence. alpha = 0 is
/// Gauss-Legendre; alpha = 1/2 is Gauss-Chebyshev of the second kind.
inline Quadrature1D gauss_jacobi_sym(std::size_t n, double alpha) {
    // total mass of the weight: 2^{2a+1} Gamma(a+1)^2 / Gamma(2a+2)
    const double mass = std::exp((2.0 * alpha + 1.0) * std::numbers::ln2 + 2.0 * std::lgamma(alpha + 1.0) -
                                 std::lgamma(2.0 * alpha + 2.0));
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t k = 1; k < n; ++k) {
        const double kk = static_cast<double>(k);
        double beta;
        if (k == 1)
            beta = 1.0 / (2.0 * alpha + 3.0);
        else
            beta = 4.0 * kk * (kk + alpha) * (kk + alpha) * (kk + 2.0 * alpha) /
                   ((2.0 * kk + 2.0 * alpha) * (2.0 * kk + 2.0 * alpha) * (2.0 * kk + 2.0 * alpha + 1.0) *
                    (2.0 * kk + 2.0 * alpha - 1.0));
        const double off = std::sqrt(beta);
        jac(static_cast<Eigen::Index>(k - 1), static_cast<Eigen::Index>(k)) = off;
        jac(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k - 1)) = off;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
    Quadrature1D q;
    q.nodes.resize(n);
    q.weights.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        q.nodes[i] = es.eigenvalues()(static_cast<Eigen::Index>(i));
        const double v0 = es.eigenvectors()(0, static_cast<Eigen::Index>(i));
        q.weights[i] = mass * v0 * v0;
    }
    return q;
}

inline Quadrature1D gauss_legendre(std::size_t n) { return gauss_jacobi_sym(n, 0.0); }

/// Gauss-Legendre rule mapped to [a, b].
inline Quadrature1D gauss_legendre_on(std::size_t n, double a, double b) {
    Quadrature1D q = gauss_legendre(n);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (std::size_t i = 0; i < n; ++i) {
        q.nodes[i] = mid + half * q.nodes[i];
        q.weights[i] *= half;
    }
    return q;
}

} // namespace coulell
