// Acceptance suite: drives every contract criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion. Exits nonzero if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "coulell/el_system.hpp"
#include "coulell/ellipsoid_nd.hpp"
#include "coulell/kernel.hpp"
#include "coulell/particle.hpp"
#include "coulell/potential.hpp"
#include "coulell/spectral.hpp"

using namespace coulell;

namespace {

constexpr double kPi = std::numbers::pi;

struct Check {
    bool ok = true;
    std::ostringstream detail;

    void expect(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            detail << (detail.str().empty() ? "" : "; ") << what;
        }
    }
};

FourierKernel2D random_kernel(std::mt19937_64& rng, std::size_t order, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> a(order + 1), b(order);
    for (std::size_t n = 0; n <= order; ++n) a[n] = scale * u(rng) / static_cast<double>((n + 1) * (n + 1));
    for (std::size_t n = 0; n < order; ++n) b[n] = scale * u(rng) / static_cast<double>((n + 2) * (n + 2));
    return FourierKernel2D::from_lists(a, b);
}

// ---- criteria -------------------------------------------------------------

Check criterion_1_circle_law() {
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    const Solution s = solve(FourierKernel2D{});
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.expect(std::abs(s.ellipse.a - 1.0) < 1e-12, "a != 1");
    c.expect(std::abs(s.ellipse.b - 1.0) < 1e-12, "b != 1");
    c.expect(s.residual < 1e-12, "residual " + std::to_string(s.residual));
    c.expect(secs < 1.0, "took " + std::to_string(secs) + " s");
    c.detail << "residual " << s.residual << ", " << secs << " s";
    return c;
}

Check criterion_2_anisotropic() {
    Check c;
    for (double alpha : {0.05, 0.2, 0.5}) {
        const Solution s = solve(preset_anisotropic(alpha));
        const double ea = std::abs(s.ellipse.a - std::sqrt(1.0 + alpha));
        const double eb = std::abs(s.ellipse.b - std::sqrt(1.0 - alpha));
        const double ephi = std::min(std::abs(s.ellipse.phi), std::abs(s.ellipse.phi - 0.5 * kPi));
        c.expect(ea < 1e-6, "a error " + std::to_string(ea) + " at alpha " + std::to_string(alpha));
        c.expect(eb < 1e-6, "b error " + std::to_string(eb));
        c.expect(ephi < 1e-8, "phi error " + std::to_string(ephi));
        c.detail << "alpha " << alpha << ": axis err " << std::max(ea, eb) << "; ";
    }
    return c;
}

Check criterion_3_shear() {
    Check c;
    const Solution s = solve(preset_shear(0.2));
    c.expect(std::abs(s.ellipse.a - std::sqrt(1.2)) < 1e-6, "a");
    c.expect(std::abs(s.ellipse.b - std::sqrt(0.8)) < 1e-6, "b");
    c.expect(std::abs(s.ellipse.phi - 0.75 * kPi) < 1e-6, "phi " + std::to_string(s.ellipse.phi));
    c.detail << "(a,b,phi) = (" << s.ellipse.a << ", " << s.ellipse.b << ", " << s.ellipse.phi << ")";
    return c;
}

Check criterion_4_circle_integrals() {
    Check c;
    std::mt19937_64 rng(1234);
    const std::size_t m = 2048;
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const FourierKernel2D k = random_kernel(rng, 6);
        double i1 = 0.0, i2 = 0.0, i3 = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            const double t = 2.0 * kPi * static_cast<double>(j) / m;
            const CircleJet2 jet = circle_jet(k, t);
            i1 += std::cos(t) * jet.grad[0];
            i2 += std::sin(t) * jet.grad[1];
            i3 += std::cos(t) * jet.grad[1];
        }
        const double w = 2.0 / static_cast<double>(m);
        worst = std::max({worst, std::abs(i1 * w - k.a1()), std::abs(i2 * w + k.a1()),
                          std::abs(i3 * w - k.b1())});
    }
    c.expect(worst < 1e-12, "worst deviation " + std::to_string(worst));
    c.detail << "worst |quadrature - closed form| = " << worst;
    return c;
}

Check criterion_5_jacobian_anchor() {
    Check c;
    const FourierKernel2D k0;
    const double h = 1e-7;
    const double anchor[3][3] = {{1, 1, 0}, {1, -1, 0}, {0, 0, 2}};
    const EllipseParams base{1.0, 0.0, 0.0};
    const auto g0 = G_eval(base, k0);
    double worst = 0.0;
    for (int col = 0; col < 3; ++col) {
        EllipseParams p = base;
        (col == 0 ? p.p : col == 1 ? p.lambda : p.phi) += h;
        const auto g1 = G_eval(p, k0);
        for (int row = 0; row < 3; ++row)
            worst = std::max(worst, std::abs((g1[row] - g0[row]) / h - anchor[row][col]));
    }
    c.expect(worst < 1e-6, "worst entry deviation " + std::to_string(worst));
    c.detail << "worst entry deviation " << worst;
    return c;
}

Check criterion_6_beurling() {
    Check c;
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> ua(0.4, 2.5), up(0.0, kPi);
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        double a = ua(rng), b = ua(rng);
        if (a < b) std::swap(a, b);
        const Ellipse e{a, b, up(rng)};
        worst = std::max(worst, std::abs(cz_beurling_real(e) - e.lambda() * std::cos(2 * e.phi)));
        worst = std::max(worst, std::abs(cz_beurling_imag(e) - e.lambda() * std::sin(2 * e.phi)));
    }
    c.expect(worst < 1e-10, "worst deviation " + std::to_string(worst));
    c.detail << "worst deviation " << worst;
    return c;
}

Check criterion_7_positivity_margin() {
    Check c;
    for (double alpha : {0.2, 0.5, 0.99}) {
        const double m = certify(preset_anisotropic(alpha)).margin;
        c.expect(std::abs(m - (1.0 - alpha)) < 1e-12,
                 "margin(" + std::to_string(alpha) + ") = " + std::to_string(m));
    }
    c.expect(certify(FourierKernel2D{}).margin == 1.0, "margin(0) != 1");
    c.detail << "margins exact";
    return c;
}

Check criterion_8_first_el() {
    Check c;
    const FourierKernel2D k = preset_anisotropic(0.2);
    const Solution sol = solve(k);
    const ELReport good = verify_first_el(sol, k, 128);
    c.expect(good.hessian_residual_interior < 1e-3,
             "solution residual " + std::to_string(good.hessian_residual_interior));

    Solution wrong = sol;
    wrong.ellipse = Ellipse{1.0, 1.0, 0.0};
    wrong.params = EllipseParams{1.0, 0.0, 0.0};
    const ELReport bad = verify_first_el(wrong, k, 64);
    c.expect(bad.hessian_residual_interior > 0.05,
             "control residual " + std::to_string(bad.hessian_residual_interior));
    c.detail << "solution " << good.hessian_residual_interior << ", wrong disc "
             << bad.hessian_residual_interior;
    return c;
}

Check criterion_9_second_el() {
    Check c;
    SecondELGrid grid; // 100 x 100 by default
    const FourierKernel2D k0;
    const Solution disc = solve(k0);
    grid.r_max = 3.0;
    const ELReport r0 = verify_second_el(disc, k0, grid);
    c.expect(r0.second_el_min_gap >= -1e-6, "kappa=0 gap " + std::to_string(r0.second_el_min_gap));

    const FourierKernel2D ka = preset_anisotropic(0.2);
    const Solution sa = solve(ka);
    SecondELGrid ga;
    const ELReport ra = verify_second_el(sa, ka, ga);
    c.expect(ra.second_el_min_gap >= -1e-6, "alpha=0.2 gap " + std::to_string(ra.second_el_min_gap));

    // Wrong-size disc controls, pinned by the brute-force oracle: for the
    // undersized disc B(0, 1/2) the constant P(0) = log 2 + 1/2 exceeds the
    // exterior minimum P(1) = 1/2, so the gap is -log 2 < 0. For the
    // oversized disc B(0, 2) the same oracle gives a positive gap (+3/2):
    // that control is caught by the first-EL Hessian (Delta P = 3/2) instead.
    Solution under = disc;
    under.ellipse = Ellipse{0.5, 0.5, 0.0};
    under.params = EllipseParams{0.25, 0.0, 0.0};
    SecondELGrid gu;
    gu.n_scale = 60;
    gu.n_tau = 40;
    gu.r_max = 3.0;
    const ELReport ru = verify_second_el(under, k0, gu);
    c.expect(ru.second_el_min_gap < -0.6, "undersized control gap " + std::to_string(ru.second_el_min_gap));
    c.expect(std::abs(ru.second_el_min_gap + std::log(2.0)) < 5e-3,
             "undersized gap vs oracle " + std::to_string(ru.second_el_min_gap));

    Solution over = disc;
    over.ellipse = Ellipse{2.0, 2.0, 0.0};
    over.params = EllipseParams{4.0, 0.0, 0.0};
    SecondELGrid go;
    go.n_scale = 60;
    go.n_tau = 40;
    go.r_max = 6.0;
    const ELReport ro = verify_second_el(over, k0, go);
    c.expect(std::abs(ro.second_el_min_gap - 1.5) < 0.02,
             "oversized gap vs oracle " + std::to_string(ro.second_el_min_gap));
    const ELReport ro_first = verify_first_el(over, k0, 16);
    c.expect(ro_first.hessian_residual_interior > 0.05, "oversized control missed by first EL");

    c.detail << "gaps: kappa0 " << r0.second_el_min_gap << ", alpha02 " << ra.second_el_min_gap
             << ", undersized " << ru.second_el_min_gap << " (negative control; oversized gap is +"
             << ro.second_el_min_gap << " by the oracle and is flagged by the first EL instead)";
    return c;
}

Check criterion_10_subharmonicity() {
    Check c;
    const FourierKernel2D k0;
    const Solution disc = solve(k0);
    double worst0 = 0.0;
    for (int i = 0; i < 16; ++i)
        worst0 = std::max(worst0,
                          std::abs(laplacian_exterior_limit(2.0 * kPi * i / 16.0, disc, k0) - 2.0));
    c.expect(worst0 < 1e-6, "kappa=0 deviation from 2: " + std::to_string(worst0));

    const FourierKernel2D ka = preset_anisotropic(0.2);
    const Solution sa = solve(ka);
    double min_limit = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 16; ++i)
        min_limit = std::min(min_limit, laplacian_exterior_limit(2.0 * kPi * i / 16.0, sa, ka));
    c.expect(min_limit >= 1.0, "minimum limit " + std::to_string(min_limit));
    c.detail << "kappa=0 exact to " << worst0 << "; alpha=0.2 min limit " << min_limit;
    return c;
}

Check criterion_11_particle_oracle() {
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    const FourierKernel2D k = preset_shear(0.2);
    MinimizeOptions opts;
    opts.tol_g = 1e-6;
    opts.max_steps = 2000;
    const ParticleState cloud = minimize_particles(2000, k, 7, opts);
    const Ellipse fit = fit_ellipse(cloud);
    const Solution sol = solve(k);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const double ra = std::abs(fit.a - sol.ellipse.a) / sol.ellipse.a;
    const double rb = std::abs(fit.b - sol.ellipse.b) / sol.ellipse.b;
    const double dphi = std::abs(std::remainder(fit.phi - sol.ellipse.phi, kPi)) * 180.0 / kPi;
    c.expect(ra < 0.03, "a rel err " + std::to_string(ra));
    c.expect(rb < 0.03, "b rel err " + std::to_string(rb));
    c.expect(dphi < 2.0, "angle err " + std::to_string(dphi) + " deg");
    c.expect(secs < 300.0, "took " + std::to_string(secs) + " s");
    c.detail << "rel err (" << ra << ", " << rb << "), angle " << dphi << " deg, " << secs << " s";
    return c;
}

Check criterion_12_nd_base() {
    Check c;
    for (int d : {3, 4, 5}) {
        const NdSolution sol = solve_nd(kernel_nd_zero(d));
        const double r0 = std::pow(d - 2.0, 1.0 / d);
        double worst = 0.0;
        for (int i = 0; i < d; ++i) worst = std::max(worst, std::abs(sol.a(i) - r0));
        c.expect(worst < 1e-10, "d=" + std::to_string(d) + " radius error " + std::to_string(worst));
        c.expect(sol.residual < 1e-10, "d=" + std::to_string(d) + " residual");

        // central-difference Jacobian at the base vs d(d-2)^{(d-1)/d} moments
        const SphereRule rule = sphere_quadrature(d, nd_default_level(d));
        const KernelND k0 = kernel_nd_zero(d);
        const Eigen::VectorXd base = Eigen::VectorXd::Constant(d, r0);
        const double h = 1e-5;
        double jac_worst = 0.0;
        const double scale = d * std::pow(d - 2.0, (d - 1.0) / d);
        for (int j = 0; j < d; ++j) {
            Eigen::VectorXd ap = base, am = base;
            ap(j) += h;
            am(j) -= h;
            const Eigen::VectorXd col = (G_nd(ap, k0, rule) - G_nd(am, k0, rule)) / (2.0 * h);
            for (int i = 0; i < d; ++i) {
                double moment = 0.0;
                for (std::size_t q = 0; q < rule.nodes.size(); ++q)
                    moment += rule.weights[q] * rule.nodes[q](i) * rule.nodes[q](i) * rule.nodes[q](j) *
                              rule.nodes[q](j);
                jac_worst = std::max(jac_worst, std::abs(col(i) - scale * moment));
            }
        }
        c.expect(jac_worst < 1e-6, "d=" + std::to_string(d) + " jacobian deviation " + std::to_string(jac_worst));
    }

    // Monte Carlo cross-check of the d = 3 moment integrals (3 sigma)
    std::mt19937_64 rng(31415);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const std::size_t n = 10000000;
    double m4 = 0.0, m22 = 0.0, m4sq = 0.0, m22sq = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
        Eigen::Vector3d x(gauss(rng), gauss(rng), gauss(rng));
        x.normalize();
        const double f4 = x(0) * x(0) * x(0) * x(0);
        const double f22 = x(0) * x(0) * x(1) * x(1);
        m4 += f4;
        m22 += f22;
        m4sq += f4 * f4;
        m22sq += f22 * f22;
    }
    const double area = 4.0 * kPi;
    const double mean4 = m4 / n, mean22 = m22 / n;
    const double sd4 = area * std::sqrt((m4sq / n - mean4 * mean4) / n);
    const double sd22 = area * std::sqrt((m22sq / n - mean22 * mean22) / n);
    c.expect(std::abs(area * mean4 - 4.0 * kPi / 5.0) < 3.0 * sd4, "MC xi^4 outside 3 sigma");
    c.expect(std::abs(area * mean22 - 4.0 * kPi / 15.0) < 3.0 * sd22, "MC xi^2 xi^2 outside 3 sigma");
    c.detail << "radii/Jacobians to tolerance; MC moments within 3 sigma";
    return c;
}

Check criterion_13_property_suites() {
    Check c;
    std::mt19937_64 rng(999);

    // (kij0): circle averages of Hessian entries vanish
    double worst_canc = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const FourierKernel2D k = random_kernel(rng, 6);
        const std::size_t m = 1024;
        double s11 = 0.0, s12 = 0.0, s22 = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            const CircleJet2 jet = circle_jet(k, 2.0 * kPi * static_cast<double>(j) / m);
            s11 += jet.h11;
            s12 += jet.h12;
            s22 += jet.h22;
        }
        const double w = 2.0 * kPi / static_cast<double>(m);
        worst_canc = std::max({worst_canc, std::abs(s11 * w), std::abs(s12 * w), std::abs(s22 * w)});
    }
    c.expect(worst_canc < 1e-12, "cancellation " + std::to_string(worst_canc));

    // rotation equivariance of solve
    const FourierKernel2D k = random_kernel(rng, 4, 0.25);
    const Solution base = solve(k);
    double worst_rot = 0.0;
    for (double rho : {0.45, -0.9}) {
        const Solution rot = solve(rotated(k, rho));
        worst_rot = std::max({worst_rot, std::abs(rot.ellipse.a - base.ellipse.a),
                              std::abs(rot.ellipse.b - base.ellipse.b),
                              std::abs(std::remainder(rot.ellipse.phi - base.ellipse.phi - rho, kPi))});
    }
    c.expect(worst_rot < 1e-9, "rotation equivariance " + std::to_string(worst_rot));

    // particle gradient vs finite differences of the energy
    const FourierKernel2D kp = preset_screw(2.0, 0.4, 1.5);
    ParticleState st = initial_cloud(8, 5);
    const auto g = particle_gradient(st, kp);
    double gscale = 0.0;
    for (auto& v : g) gscale = std::max({gscale, std::abs(v.x), std::abs(v.y)});
    double worst_grad = 0.0;
    const double h = 1e-6;
    for (std::size_t i = 0; i < st.positions.size(); ++i) {
        ParticleState sp = st, sm = st;
        sp.positions[i].x += h;
        sm.positions[i].x -= h;
        worst_grad = std::max(worst_grad,
                              std::abs((particle_energy(sp, kp) - particle_energy(sm, kp)) / (2 * h) - g[i].x));
        sp = st;
        sm = st;
        sp.positions[i].y += h;
        sm.positions[i].y -= h;
        worst_grad = std::max(worst_grad,
                              std::abs((particle_energy(sp, kp) - particle_energy(sm, kp)) / (2 * h) - g[i].y));
    }
    c.expect(worst_grad < 1e-6 * std::max(1.0, gscale), "gradient FD " + std::to_string(worst_grad));

    // project o eval identity
    double worst_proj = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
        const FourierKernel2D kk = random_kernel(rng, 6);
        const std::size_t m = 64;
        std::vector<double> samples(2 * m);
        for (std::size_t j = 0; j < 2 * m; ++j) samples[j] = eval(kk, kPi * static_cast<double>(j) / m);
        const FourierKernel2D back = project(samples, 6);
        for (std::size_t n = 0; n <= 6; ++n) {
            worst_proj = std::max(worst_proj, std::abs(back.a[n] - kk.a[n]));
            worst_proj = std::max(worst_proj, std::abs(back.b[n] - kk.b[n]));
        }
    }
    c.expect(worst_proj < 1e-13, "round trip " + std::to_string(worst_proj));

    c.detail << "cancellation " << worst_canc << ", equivariance " << worst_rot << ", gradient "
             << worst_grad << ", round trip " << worst_proj;
    return c;
}

} // namespace

int main() {
    struct Entry {
        int id;
        const char* name;
        std::function<Check()> run;
    };
    const std::vector<Entry> entries = {
        {1, "circle law (kappa = 0 gives the unit disc)", criterion_1_circle_law},
        {2, "anisotropic exact semi-axes sqrt(1 -+ alpha)", criterion_2_anisotropic},
        {3, "shear solution E(sqrt(1.2), sqrt(0.8), 3pi/4)", criterion_3_shear},
        {4, "circle integrals I1 = a1, I2 = -a1, I3 = b1", criterion_4_circle_integrals},
        {5, "base-point Jacobian anchor", criterion_5_jacobian_anchor},
        {6, "Beurling interior constants on random ellipses", criterion_6_beurling},
        {7, "positivity margins 1 - alpha", criterion_7_positivity_margin},
        {8, "first Euler-Lagrange Hessian residuals", criterion_8_first_el},
        {9, "second Euler-Lagrange exterior gap", criterion_9_second_el},
        {10, "boundary Laplacian limits >= 1", criterion_10_subharmonicity},
        {11, "particle oracle vs analytic solution", criterion_11_particle_oracle},
        {12, "d-dimensional base solutions and Jacobian", criterion_12_nd_base},
        {13, "property suites (cancellation, equivariance, FD, round trip)", criterion_13_property_suites},
    };

    int failures = 0;
    for (const auto& e : entries) {
        Check c;
        try {
            c = e.run();
        } catch (const std::exception& ex) {
            c.ok = false;
            c.detail << "exception: " << ex.what();
        }
        std::printf("[%s] criterion %2d: %s — %s\n", c.ok ? "PASS" : "FAIL", e.id, e.name,
                    c.detail.str().c_str());
        std::fflush(stdout);
        if (!c.ok) ++failures;
    }
    if (failures) std::printf("%d criterion(s) FAILED\n", failures);
    else std::printf("all 13 criteria passed\n");
    return failures == 0 ? 0 : 1;
}
