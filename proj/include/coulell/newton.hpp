#pragma once

#include <cmath>
#include <functional>
#include <string>

#include <Eigen/Dense>

#include "coulell/errors.hpp"

namespace coulell {

struct NewtonOptions {
    double tol = 1e-12;        // infinity-norm residual target
    int max_iter = 50;
    double fd_step = 1e-7;     // forward-difference Jacobian step (relative)
    double armijo = 1e-4;      // sufficient-decrease constant
    double step_floor = 1e-14; // backtracking lower bound
};

struct NewtonResult {
    Eigen::VectorXd x;
    double residual = 0.0;
    int iterations = 0;
};

/// Damped Newton with a forward-difference Jacobian and backtracking on the
/// residual infinity norm. `inside` guards the admissible region; trial
/// points outside it are treated as insufficient decrease, and a full step
/// that cannot be damped back into the region reports LeftDomain.
inline NewtonResult newton_solve(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
                                 Eigen::VectorXd x0,
                                 const std::function<bool(const Eigen::VectorXd&)>& inside,
                                 const NewtonOptions& opts = {}) {
    const auto norm_inf = [](const Eigen::VectorXd& v) { return v.cwiseAbs().maxCoeff(); };
    if (!inside(x0)) throw LeftDomain("newton: starting point outside the admissible region");

    Eigen::VectorXd x = x0;
    Eigen::VectorXd r = f(x);
    double rn = norm_inf(r);
    const Eigen::Index n = x.size();

    for (int it = 0; it < opts.max_iter; ++it) {
        if (rn < opts.tol) {
            return {x, rn, it};
        }
        Eigen::MatrixXd jac(n, n);
        for (Eigen::Index j = 0; j < n; ++j) {
            const double h = opts.fd_step * std::max(1.0, std::abs(x(j)));
            Eigen::VectorXd xp = x;
            xp(j) += h;
            if (!inside(xp)) {
                xp(j) = x(j) - h; // probe inward when the boundary is close
                jac.col(j) = (r - f(xp)) / h;
            } else {
                jac.col(j) = (f(xp) - r) / h;
            }
        }
        const Eigen::VectorXd dir = jac.fullPivLu().solve(-r);

        double t = 1.0;
        bool accepted = false;
        bool full_step_outside = !inside(x + dir);
        while (t >= opts.step_floor) {
            const Eigen::VectorXd xt = x + t * dir;
            if (inside(xt)) {
                const Eigen::VectorXd rt = f(xt);
                const double rtn = norm_inf(rt);
                if (rtn <= (1.0 - opts.armijo * t) * rn) {
                    x = xt;
                    r = rt;
                    rn = rtn;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if (!accepted) {
            if (full_step_outside)
                throw LeftDomain("newton: iterate pushed against the domain boundary");
            throw NoConvergence("newton: line search stalled at residual " + std::to_string(rn));
        }
    }
    if (rn < opts.tol) {
        return {x, rn, opts.max_iter};
    }
    throw NoConvergence("newton: iteration limit reached at residual " + std::to_string(rn));
}

} // namespace coulell
