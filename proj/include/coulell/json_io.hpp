#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include <json.hpp>

#include "coulell/el_system.hpp"
#include "coulell/ellipsoid_nd.hpp"
#include "coulell/errors.hpp"
#include "coulell/kernel.hpp"

namespace coulell {

using ordered_json = nlohmann::ordered_json;

namespace detail {

inline void dump_17(const ordered_json& j, std::string& out, int depth) {
    const std::string pad(2 * static_cast<std::size_t>(depth), ' ');
    const std::string pad_in(2 * static_cast<std::size_t>(depth + 1), ' ');
    switch (j.type()) {
        case nlohmann::detail::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ",\n";
                first = false;
                out += pad_in + nlohmann::json(it.key()).dump() + ": ";
                dump_17(it.value(), out, depth + 1);
            }
            out += "\n" + pad + "}";
            return;
        }
        case nlohmann::detail::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            out += "[";
            bool first = true;
            for (const auto& v : j) {
                if (!first) out += ", ";
                first = false;
                dump_17(v, out, depth + 1);
            }
            out += "]";
            return;
        }
        case nlohmann::detail::value_t::number_float: {
            const double v = j.get<double>();
            if (!std::isfinite(v)) {
                out += "null";
                return;
            }
            char buf[40];
            std::snprintf(buf, sizeof(buf), "%.17g", v == 0.0 ? 0.0 : v);
            out += buf;
            return;
        }
        default:
            out += j.dump();
            return;
    }
}

} // namespace detail

/// Serialise with every floating-point number at 17 significant digits
/// (bit-faithful round trips, byte-identical reruns).
inline std::string dump_json_17(const ordered_json& j) {
    std::string out;
    detail::dump_17(j, out, 0);
    out += "\n";
    return out;
}

inline nlohmann::json parse_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open file: " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("malformed JSON in " + path + ": " + e.what());
    }
}

/// Kernel spec: {"type":"fourier","a":[...],"b":[...]} with a = a_0..a_N and
/// b = b_1..b_N, or {"type":"preset","name":...,"params":{...}}.
inline FourierKernel2D load_kernel_2d(const nlohmann::json& spec) {
    try {
        const std::string type = spec.at("type").get<std::string>();
        if (type == "fourier") {
            std::vector<double> a = spec.at("a").get<std::vector<double>>();
            std::vector<double> b;
            if (spec.contains("b")) b = spec.at("b").get<std::vector<double>>();
            return FourierKernel2D::from_lists(a, b);
        }
        if (type == "preset") {
            const std::string name = spec.at("name").get<std::string>();
            const nlohmann::json params = spec.value("params", nlohmann::json::object());
            if (name == "anisotropic") return preset_anisotropic(params.at("alpha").get<double>());
            if (name == "shear") return preset_shear(params.at("beta").get<double>());
            if (name == "power")
                return preset_power(params.at("beta").get<double>(), params.at("l").get<unsigned>());
            if (name == "screw")
                return preset_screw(params.at("alpha").get<double>(), params.at("beta").get<double>(),
                                    params.at("gamma").get<double>());
            throw ValidationError("unknown preset: " + name);
        }
        throw ValidationError("unknown kernel type: " + type);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("invalid kernel spec: ") + e.what());
    }
}

inline FourierKernel2D load_kernel_2d_file(const std::string& path) {
    return load_kernel_2d(parse_json_file(path));
}

/// d >= 3 kernel spec: {"type":"power","axis":1,"epsilon":...} (axis is
/// 1-based) or {"type":"samples","points":[[...],...],"values":[...]}.
inline KernelND load_kernel_nd(const nlohmann::json& spec, int dim) {
    try {
        const std::string type = spec.at("type").get<std::string>();
        if (type == "power") {
            const int axis = spec.at("axis").get<int>();
            if (axis < 1 || axis > dim) throw ValidationError("kernel axis out of range");
            return kernel_nd_power(dim, axis - 1, spec.at("epsilon").get<double>());
        }
        if (type == "samples") {
            std::vector<Eigen::VectorXd> pts;
            for (const auto& p : spec.at("points")) {
                const std::vector<double> v = p.get<std::vector<double>>();
                Eigen::VectorXd x(static_cast<Eigen::Index>(v.size()));
                for (std::size_t i = 0; i < v.size(); ++i) x(static_cast<Eigen::Index>(i)) = v[i];
                pts.push_back(x);
            }
            const std::vector<double> vals = spec.at("values").get<std::vector<double>>();
            return kernel_nd_from_samples(dim, pts, vals);
        }
        throw ValidationError("unknown nd kernel type: " + type);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("invalid nd kernel spec: ") + e.what());
    }
}

/// The p/lambda/phi written out describe the canonical ellipse (lambda >= 0,
/// phi in [0, pi)); the unregularised system is invariant under the
/// (lambda, phi) -> (-lambda, phi + pi/2) relabelling, so residual checks on
/// re-read parameters are unaffected by the canonicalisation.
inline ordered_json solution_to_json(const Solution& sol) {
    ordered_json j;
    j["a"] = sol.ellipse.a;
    j["b"] = sol.ellipse.b;
    j["phi"] = sol.ellipse.phi;
    j["psi"] = sol.pre_rotation;
    j["p"] = sol.ellipse.a * sol.ellipse.b;
    j["lambda"] = sol.ellipse.lambda();
    j["residual"] = sol.residual;
    j["iterations"] = sol.iterations;
    j["positivity"] = ordered_json{{"margin", sol.certificate.margin},
                                   {"argmin_angle", sol.certificate.argmin_angle}};
    return j;
}

inline Solution solution_from_json(const nlohmann::json& j) {
    try {
        Solution sol;
        sol.ellipse = Ellipse{j.at("a").get<double>(), j.at("b").get<double>(), j.at("phi").get<double>()};
        sol.pre_rotation = j.at("psi").get<double>();
        // rebuild the rotated-frame parameters from the geometry so the pair
        // is consistent even if p/lambda were edited
        sol.params = EllipseParams{sol.ellipse.a * sol.ellipse.b, sol.ellipse.lambda(),
                                   sol.ellipse.phi + sol.pre_rotation};
        sol.residual = j.at("residual").get<double>();
        sol.iterations = j.value("iterations", 0);
        if (j.contains("positivity")) {
            sol.certificate.margin = j["positivity"].value("margin", 1.0);
            sol.certificate.argmin_angle = j["positivity"].value("argmin_angle", 0.0);
            sol.certificate.is_positive = sol.certificate.margin > 0.0;
        }
        if (!(sol.ellipse.a > 0.0) || !(sol.ellipse.b > 0.0))
            throw ValidationError("solution file: semi-axes must be positive");
        return sol;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("invalid solution file: ") + e.what());
    }
}

} // namespace coulell
