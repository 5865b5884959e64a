#pragma once

#include <array>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "coulell/ellipse.hpp"
#include "coulell/errors.hpp"
#include "coulell/kernel.hpp"
#include "coulell/newton.hpp"
#include "coulell/spectral.hpp"

namespace coulell {

/// Solver coordinates for the candidate ellipse: p = a b (area / pi),
/// lambda = (a - b)/(a + b), tilt phi. q = (1 + lambda)/(1 - lambda)
/// recovers the aspect ratio a/b.
struct EllipseParams {
    double p = 1.0;
    double lambda = 0.0;
    double phi = 0.0;

    double q() const { return (1.0 + lambda) / (1.0 - lambda); }

    Ellipse to_ellipse() const {
        const double qq = q();
        return Ellipse{std::sqrt(p * qq), std::sqrt(p / qq), phi};
    }
};

struct SolveOptions {
    std::size_t quad_nodes = 2048; // trapezoid nodes for the F integrals
    double tol_newton = 1e-12;
    int max_iter = 50;
    double fd_step = 1e-7;   // Jacobian forward-difference step
    double lambda_eps = 1e-6; // switch point for the regularised third equation
};

struct Solution {
    Ellipse ellipse;              // canonical output geometry
    double pre_rotation = 0.0;    // psi removing the sin(2theta) mode
    EllipseParams params;         // solved variables in the rotated frame
    double residual = 0.0;        // infinity norm of the unregularised system
    int iterations = 0;
    PositivityCertificate certificate;
};

/// Circle integrals I_1 = (1/pi) int xi_1 d_1 kappa, I_2 = (1/pi) int xi_2 d_2 kappa,
/// I_3 = (1/pi) int xi_1 d_2 kappa. In Fourier coefficients these collapse to
/// (a_1, -a_1, b_1); the test suite re-derives them by quadrature.
inline std::array<double, 3> I_integrals(const FourierKernel2D& k) {
    return {k.a1(), -k.a1(), k.b1()};
}

/// Rotation angle psi solving a_1 sin(2 psi) + b_1 cos(2 psi) = 0, reduced to
/// [-pi/4, pi/4), plus the kernel expressed in the rotated coordinates
/// (whose b_1 vanishes). The quarter-turn sibling solution describes the
/// same ellipse and is absorbed by the final canonicalisation.
inline std::pair<double, FourierKernel2D> pre_rotation(const FourierKernel2D& k) {
    double psi = 0.0;
    if (k.a1() != 0.0 || k.b1() != 0.0) psi = -0.5 * std::atan2(k.b1(), k.a1());
    while (psi >= 0.25 * std::numbers::pi) psi -= 0.5 * std::numbers::pi;
    while (psi < -0.25 * std::numbers::pi) psi += 0.5 * std::numbers::pi;
    FourierKernel2D kr = rotated(k, psi);
    kr.b[1] = 0.0; // vanishes analytically; clear the round-off remnant
    return {psi, kr};
}

/// F_j(lambda, phi, kappa) = -(1/2pi) int log(<xi,e^{i phi}>^2 + q^2 <xi,i e^{i phi}>^2)
/// d_sel(j) kappa(xi) dsigma(xi), sel = (11, 22, 12), by trapezoid quadrature
/// (spectrally exact for these periodic analytic integrands). Vanishes
/// identically at lambda = 0 where the logarithm is zero.
inline std::array<double, 3> F_integrals(double lambda, double phi, const FourierKernel2D& k,
                                         std::size_t nodes = 2048) {
    if (!(std::abs(lambda) < 1.0)) throw DomainError("F_integrals: |lambda| must be < 1");
    if (lambda == 0.0) return {0.0, 0.0, 0.0};
    const double q = (1.0 + lambda) / (1.0 - lambda);
    double f1 = 0.0, f2 = 0.0, f3 = 0.0;
    for (std::size_t j = 0; j < nodes; ++j) {
        const double theta = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(nodes);
        const double cr = std::cos(theta - phi), sr = std::sin(theta - phi);
        const double lg = std::log(cr * cr + q * q * sr * sr);
        const CircleJet2 jet = circle_jet(k, theta);
        f1 += lg * jet.h11;
        f2 += lg * jet.h22;
        f3 += lg * jet.h12;
    }
    const double scale = -1.0 / (2.0 * std::numbers::pi) * (2.0 * std::numbers::pi / static_cast<double>(nodes));
    return {scale * f1, scale * f2, scale * f3};
}

/// Regularised Euler-Lagrange system G(p, lambda, phi) for a kernel that has
/// already been pre-rotated (b_1 = 0):
///   G_1 = p - 1 + cos(2 phi) lambda + F_1 + I_1
///   G_2 = p - 1 - cos(2 phi) lambda + F_2 + I_2
///   G_3 = sin(2 phi) + F_3 / lambda        (|lambda| >= lambda_eps)
///       = sin(2 phi) + dF_3/dlambda(0,phi) (central difference otherwise)
inline std::array<double, 3> G_eval(const EllipseParams& params, const FourierKernel2D& k_rotated,
                                    std::size_t nodes = 2048, double lambda_eps = 1e-6) {
    const auto [i1, i2, i3] = I_integrals(k_rotated);
    (void)i3;
    const auto [f1, f2, f3] = F_integrals(params.lambda, params.phi, k_rotated, nodes);
    const double c2 = std::cos(2.0 * params.phi), s2 = std::sin(2.0 * params.phi);
    const double g1 = params.p - 1.0 + c2 * params.lambda + f1 + i1;
    const double g2 = params.p - 1.0 - c2 * params.lambda + f2 + i2;
    double g3;
    if (std::abs(params.lambda) >= lambda_eps) {
        g3 = s2 + f3 / params.lambda;
    } else {
        const auto fp = F_integrals(lambda_eps, params.phi, k_rotated, nodes);
        const auto fm = F_integrals(-lambda_eps, params.phi, k_rotated, nodes);
        g3 = s2 + (fp[2] - fm[2]) / (2.0 * lambda_eps);
    }
    return {g1, g2, g3};
}

/// Infinity norm of the unregularised system L (third equation multiplied
/// back by lambda); this is the residual reported on solutions.
inline double L_residual(const EllipseParams& params, const FourierKernel2D& k_rotated,
                         std::size_t nodes = 2048) {
    const auto [i1, i2, i3] = I_integrals(k_rotated);
    (void)i3;
    const auto [f1, f2, f3] = F_integrals(params.lambda, params.phi, k_rotated, nodes);
    const double c2 = std::cos(2.0 * params.phi), s2 = std::sin(2.0 * params.phi);
    const double l1 = params.p - 1.0 + c2 * params.lambda + f1 + i1;
    const double l2 = params.p - 1.0 - c2 * params.lambda + f2 + i2;
    const double l3 = s2 * params.lambda + f3;
    return std::max({std::abs(l1), std::abs(l2), std::abs(l3)});
}

/// Full pipeline: pre-rotation, damped Newton on G from the disc base point
/// (1, 0, 0), conversion back to world coordinates and canonicalisation.
inline Solution solve(const FourierKernel2D& k, const SolveOptions& opts = {}) {
    const auto [psi, kr] = pre_rotation(k);

    const auto g_fun = [&](const Eigen::VectorXd& x) {
        const EllipseParams prm{x(0), x(1), x(2)};
        const auto g = G_eval(prm, kr, opts.quad_nodes, opts.lambda_eps);
        return Eigen::Vector3d(g[0], g[1], g[2]);
    };
    const auto inside = [](const Eigen::VectorXd& x) { return x(0) > 0.0 && std::abs(x(1)) < 1.0; };

    NewtonOptions nopts;
    nopts.tol = opts.tol_newton;
    nopts.max_iter = opts.max_iter;
    nopts.fd_step = opts.fd_step;
    const NewtonResult res = newton_solve(g_fun, Eigen::Vector3d(1.0, 0.0, 0.0), inside, nopts);

    Solution sol;
    sol.pre_rotation = psi;
    sol.params = EllipseParams{res.x(0), res.x(1), res.x(2)};
    sol.iterations = res.iterations;
    sol.residual = L_residual(sol.params, kr, opts.quad_nodes);

    Ellipse raw = sol.params.to_ellipse();
    raw.phi = sol.params.phi - psi; // undo the pre-rotation
    sol.ellipse = raw.canonicalized();
    sol.certificate = certify(k);
    return sol;
}

} // namespace coulell
