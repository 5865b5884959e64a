// coulell: minimising ellipses/ellipsoids of perturbed Coulomb energies.
//
// Subcommands: solve, spectrum, verify, simulate, solve-nd, field.
// Structured outputs are JSON with 17-significant-digit floats, point data
// is CSV. Exit codes: 0 success, 2 solver failure (no convergence, left
// domain, stalled descent), 3 invalid input.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "coulell/el_system.hpp"
#include "coulell/ellipsoid_nd.hpp"
#include "coulell/errors.hpp"
#include "coulell/json_io.hpp"
#include "coulell/kernel.hpp"
#include "coulell/particle.hpp"
#include "coulell/potential.hpp"
#include "coulell/spectral.hpp"

namespace {

using coulell::ordered_json;

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw coulell::ValidationError("cannot write to " + path);
    out << text;
}

struct Cli {
    std::string kernel_path, solution_path, out_path = "-", csv_path;
    std::size_t quad_nodes = 2048;
    double tol = 1e-12;
    std::size_t n_particles = 2000;
    std::uint64_t seed = 0;
    int steps = 50000;
    double tol_g = 1e-6;
    std::size_t interior_samples = 128;
    std::size_t grid_scale = 100, grid_angular = 100;
    double r_max = 0.0;
    int dim = 3;
    int nd_level = 0;
    double nd_tol = 1e-9;
    std::size_t nx = 101, ny = 101;
    double extent = 0.0;
    bool deterministic = false;
};

int run_solve(const Cli& cli) {
    const coulell::FourierKernel2D k = coulell::load_kernel_2d_file(cli.kernel_path);
    coulell::SolveOptions opts;
    opts.quad_nodes = cli.quad_nodes;
    opts.tol_newton = cli.tol;
    const coulell::Solution sol = coulell::solve(k, opts);
    if (!sol.certificate.is_positive)
        std::cerr << "warning: positivity margin " << sol.certificate.margin
                  << " <= 0; the minimiser may be non-unique or non-elliptical\n";
    write_text(cli.out_path, coulell::dump_json_17(coulell::solution_to_json(sol)));
    return 0;
}

int run_spectrum(const Cli& cli) {
    const coulell::FourierKernel2D k = coulell::load_kernel_2d_file(cli.kernel_path);
    const coulell::PositivityCertificate cert = coulell::certify(k);
    if (!cert.is_positive)
        std::cerr << "warning: positivity margin " << cert.margin
                  << " <= 0; the minimiser may be non-unique or non-elliptical\n";
    ordered_json j;
    j["margin"] = cert.margin;
    j["argmin_angle"] = cert.argmin_angle;
    write_text(cli.out_path, coulell::dump_json_17(j));
    return 0;
}

int run_verify(const Cli& cli) {
    const coulell::FourierKernel2D k = coulell::load_kernel_2d_file(cli.kernel_path);
    const coulell::Solution sol = coulell::solution_from_json(coulell::parse_json_file(cli.solution_path));
    const coulell::ELReport first = coulell::verify_first_el(sol, k, cli.interior_samples);
    coulell::SecondELGrid grid;
    grid.n_scale = cli.grid_scale;
    grid.n_tau = cli.grid_angular;
    grid.r_max = cli.r_max;
    const coulell::ELReport second = coulell::verify_second_el(sol, k, grid);

    ordered_json j;
    j["C_kappa"] = second.C_kappa;
    j["hessian_residual_interior"] = first.hessian_residual_interior;
    j["second_el_min_gap"] = second.second_el_min_gap;
    j["system_residual"] = first.system_residual;
    j["sample_counts"] =
        ordered_json{{"interior", first.n_interior}, {"exterior", second.n_exterior}};
    write_text(cli.out_path, coulell::dump_json_17(j));
    return 0;
}

int run_simulate(const Cli& cli) {
    const coulell::FourierKernel2D k = coulell::load_kernel_2d_file(cli.kernel_path);
    coulell::MinimizeOptions opts;
    opts.tol_g = cli.tol_g;
    opts.max_steps = cli.steps;
    coulell::MinimizeDiagnostics diag;
    const coulell::ParticleState state =
        coulell::minimize_particles(cli.n_particles, k, cli.seed, opts, &diag);
    const coulell::Ellipse fit = coulell::fit_ellipse(state);

    if (!cli.csv_path.empty()) {
        std::string csv = "x,y\n";
        char buf[80];
        for (const coulell::Vec2& z : state.positions) {
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", z.x, z.y);
            csv += buf;
        }
        write_text(cli.csv_path, csv);
    }

    ordered_json j;
    j["n"] = cli.n_particles;
    j["seed"] = cli.seed;
    j["steps"] = diag.steps;
    j["grad_inf"] = diag.grad_inf;
    j["energy"] = diag.energy;
    j["fit"] = ordered_json{{"a", fit.a}, {"b", fit.b}, {"phi", fit.phi}};
    if (!cli.solution_path.empty()) {
        const coulell::Solution ref =
            coulell::solution_from_json(coulell::parse_json_file(cli.solution_path));
        const double angle_err =
            std::abs(std::remainder(fit.phi - ref.ellipse.phi, std::numbers::pi));
        j["comparison"] = ordered_json{
            {"ref_a", ref.ellipse.a},
            {"ref_b", ref.ellipse.b},
            {"ref_phi", ref.ellipse.phi},
            {"rel_err_a", std::abs(fit.a - ref.ellipse.a) / ref.ellipse.a},
            {"rel_err_b", std::abs(fit.b - ref.ellipse.b) / ref.ellipse.b},
            {"angle_err_rad", angle_err},
            {"angle_err_deg", angle_err * 180.0 / std::numbers::pi}};
    }
    write_text(cli.out_path, coulell::dump_json_17(j));
    return 0;
}

int run_solve_nd(const Cli& cli) {
    const coulell::KernelND k = coulell::load_kernel_nd(coulell::parse_json_file(cli.kernel_path), cli.dim);
    coulell::NdOptions opts;
    opts.level = cli.nd_level;
    opts.tol = cli.nd_tol;
    std::cerr << "note: uniqueness in d >= 3 assumes a positive Fourier transform of the "
                 "interaction potential; this hypothesis is not certified here\n";
    const coulell::NdSolution sol = coulell::solve_nd(k, opts);
    ordered_json j;
    j["a"] = ordered_json::array();
    for (int i = 0; i < cli.dim; ++i) j["a"].push_back(sol.a(i));
    j["residual"] = sol.residual;
    j["iterations"] = sol.iterations;
    write_text(cli.out_path, coulell::dump_json_17(j));
    return 0;
}

int run_field(const Cli& cli) {
    const coulell::FourierKernel2D k = coulell::load_kernel_2d_file(cli.kernel_path);
    const coulell::Solution sol = coulell::solution_from_json(coulell::parse_json_file(cli.solution_path));
    const coulell::Ellipse& e = sol.ellipse;
    const double ext = cli.extent > 0.0 ? cli.extent : 2.5 * e.a;

    std::string csv = "x,y,P,region\n";
    char buf[120];
    for (std::size_t iy = 0; iy < cli.ny; ++iy) {
        const double y = -ext + 2.0 * ext * static_cast<double>(iy) / static_cast<double>(cli.ny - 1);
        for (std::size_t ix = 0; ix < cli.nx; ++ix) {
            const double x = -ext + 2.0 * ext * static_cast<double>(ix) / static_cast<double>(cli.nx - 1);
            const double p = coulell::potential_at({x, y}, e, k);
            const bool inside = e.contains({x, y});
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%s\n", x, y, p, inside ? "in" : "out");
            csv += buf;
        }
    }
    write_text(cli.out_path, csv);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"minimising ellipses of nonlocally perturbed Coulomb energies"};
    app.require_subcommand(1);
    Cli cli;

    app.add_flag("--deterministic", cli.deterministic,
                 "force single-threaded fixed-order reductions (already the default mode)");

    CLI::App* solve = app.add_subcommand("solve", "solve the ellipse system for a 2D kernel");
    solve->add_option("--kernel", cli.kernel_path, "kernel spec JSON")->required();
    solve->add_option("--quad-nodes", cli.quad_nodes, "trapezoid nodes for the F integrals");
    solve->add_option("--tol", cli.tol, "Newton residual tolerance")->check(CLI::PositiveNumber);
    solve->add_option("--out", cli.out_path, "output path (default stdout)");

    CLI::App* spectrum = app.add_subcommand("spectrum", "positivity certificate of the symbol");
    spectrum->add_option("--kernel", cli.kernel_path, "kernel spec JSON")->required();
    spectrum->add_option("--out", cli.out_path, "output path (default stdout)");

    CLI::App* verify = app.add_subcommand("verify", "check both Euler-Lagrange conditions numerically");
    verify->add_option("--kernel", cli.kernel_path, "kernel spec JSON")->required();
    verify->add_option("--solution", cli.solution_path, "solution JSON from solve")->required();
    verify->add_option("--interior-samples", cli.interior_samples, "interior Hessian sample count");
    verify->add_option("--grid-scale", cli.grid_scale, "annular grid: radial shells");
    verify->add_option("--grid-angular", cli.grid_angular, "annular grid: angular nodes");
    verify->add_option("--r-max", cli.r_max, "outer radius of the exterior grid");
    verify->add_option("--out", cli.out_path, "output path (default stdout)");

    CLI::App* simulate = app.add_subcommand("simulate", "N-particle gradient-descent oracle");
    simulate->add_option("--kernel", cli.kernel_path, "kernel spec JSON")->required();
    simulate->add_option("--n", cli.n_particles, "particle count")->required()->check(CLI::Range(2, 100000));
    simulate->add_option("--seed", cli.seed, "PRNG seed")->required();
    simulate->add_option("--steps", cli.steps, "descent step limit")->check(CLI::PositiveNumber);
    simulate->add_option("--tol-g", cli.tol_g, "gradient infinity-norm target")->check(CLI::PositiveNumber);
    simulate->add_option("--solution", cli.solution_path, "solution JSON to compare against");
    simulate->add_option("--csv", cli.csv_path, "write final positions CSV here");
    simulate->add_option("--out", cli.out_path, "output path (default stdout)");

    CLI::App* solve_nd = app.add_subcommand("solve-nd", "solve the d >= 3 diagonal ellipsoid system");
    solve_nd->add_option("--dim", cli.dim, "ambient dimension")->required()->check(CLI::Range(3, 8));
    solve_nd->add_option("--kernel", cli.kernel_path, "nd kernel spec JSON")->required();
    solve_nd->add_option("--level", cli.nd_level, "quadrature exactness level");
    solve_nd->add_option("--tol", cli.nd_tol, "Newton residual tolerance")->check(CLI::PositiveNumber);
    solve_nd->add_option("--out", cli.out_path, "output path (default stdout)");

    CLI::App* field = app.add_subcommand("field", "emit a potential grid as CSV");
    field->add_option("--kernel", cli.kernel_path, "kernel spec JSON")->required();
    field->add_option("--solution", cli.solution_path, "solution JSON from solve")->required();
    field->add_option("--out", cli.out_path, "output path (default stdout)")->required();
    field->add_option("--nx", cli.nx, "grid columns")->check(CLI::Range(2, 4096));
    field->add_option("--ny", cli.ny, "grid rows")->check(CLI::Range(2, 4096));
    field->add_option("--extent", cli.extent, "half-width of the square grid");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) return run_solve(cli);
        if (spectrum->parsed()) return run_spectrum(cli);
        if (verify->parsed()) return run_verify(cli);
        if (simulate->parsed()) return run_simulate(cli);
        if (solve_nd->parsed()) return run_solve_nd(cli);
        if (field->parsed()) return run_field(cli);
    } catch (const coulell::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const coulell::SolverFailure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const coulell::DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
