#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const std::string kCliPath = COULELL_CLI_PATH;

int run_cli(const std::string& args) {
    const int rc = std::system((kCliPath + " " + args + " > /dev/null 2>&1").c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("coulell_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

} // namespace

TEST_CASE("cli end to end") {
    TempDir dir;
    const fs::path kernel = dir.path / "aniso.json";
    write_file(kernel, R"({"type":"preset","name":"anisotropic","params":{"alpha":0.2}})");
    const fs::path sol = dir.path / "sol.json";

    SECTION("solve writes the expected 17-digit solution") {
        REQUIRE(run_cli("solve --kernel " + kernel.string() + " --out " + sol.string()) == 0);
        const nlohmann::json j = nlohmann::json::parse(slurp(sol));
        REQUIRE_THAT(j["a"].get<double>(), Catch::Matchers::WithinAbs(std::sqrt(1.2), 1e-9));
        REQUIRE_THAT(j["b"].get<double>(), Catch::Matchers::WithinAbs(std::sqrt(0.8), 1e-9));
        REQUIRE_THAT(j["phi"].get<double>(), Catch::Matchers::WithinAbs(1.5707963267948966, 1e-9));
        REQUIRE(j["residual"].get<double>() < 1e-12);
        REQUIRE_THAT(j["positivity"]["margin"].get<double>(), Catch::Matchers::WithinAbs(0.8, 1e-12));
        // 17 significant digits survive in the raw text
        REQUIRE(slurp(sol).find("1.0954451150103") != std::string::npos);
    }

    SECTION("rerunning reproduces every artifact byte for byte") {
        const fs::path sol2 = dir.path / "sol2.json";
        REQUIRE(run_cli("solve --kernel " + kernel.string() + " --out " + sol.string()) == 0);
        REQUIRE(run_cli("solve --kernel " + kernel.string() + " --out " + sol2.string()) == 0);
        REQUIRE(slurp(sol) == slurp(sol2));

        const std::string sim_args = "simulate --kernel " + kernel.string() +
                                     " --n 48 --seed 12 --steps 60 --tol-g 1e-3 --csv ";
        const fs::path csv1 = dir.path / "c1.csv", csv2 = dir.path / "c2.csv";
        const fs::path sim1 = dir.path / "s1.json", sim2 = dir.path / "s2.json";
        REQUIRE(run_cli(sim_args + csv1.string() + " --out " + sim1.string()) == 0);
        REQUIRE(run_cli(sim_args + csv2.string() + " --out " + sim2.string()) == 0);
        REQUIRE(slurp(csv1) == slurp(csv2));
        REQUIRE(slurp(sim1) == slurp(sim2));
    }

    SECTION("solution round trips through verify and simulate") {
        REQUIRE(run_cli("solve --kernel " + kernel.string() + " --out " + sol.string()) == 0);
        const fs::path rep = dir.path / "report.json";
        REQUIRE(run_cli("verify --kernel " + kernel.string() + " --solution " + sol.string() +
                        " --interior-samples 8 --grid-scale 12 --grid-angular 12 --out " + rep.string()) == 0);
        const nlohmann::json j = nlohmann::json::parse(slurp(rep));
        REQUIRE(j["hessian_residual_interior"].get<double>() < 1e-3);
        REQUIRE(j["second_el_min_gap"].get<double>() > -1e-6);
        REQUIRE(j["system_residual"].get<double>() < 1e-10);
        REQUIRE(j["sample_counts"]["exterior"].get<int>() > 100);

        const fs::path simout = dir.path / "sim.json";
        const fs::path csv = dir.path / "cloud.csv";
        REQUIRE(run_cli("simulate --kernel " + kernel.string() + " --n 64 --seed 3 --steps 200" +
                        " --tol-g 1e-4 --solution " + sol.string() + " --csv " + csv.string() +
                        " --out " + simout.string()) == 0);
        const nlohmann::json s = nlohmann::json::parse(slurp(simout));
        REQUIRE(s.contains("comparison"));
        REQUIRE(s["comparison"]["rel_err_a"].get<double>() < 0.2);
        const std::string cloud = slurp(csv);
        REQUIRE(cloud.rfind("x,y\n", 0) == 0);
        REQUIRE(std::count(cloud.begin(), cloud.end(), '\n') == 65); // header + 64 points
    }

    SECTION("spectrum") {
        const fs::path spec = dir.path / "spec.json";
        REQUIRE(run_cli("spectrum --kernel " + kernel.string() + " --out " + spec.string()) == 0);
        const nlohmann::json j = nlohmann::json::parse(slurp(spec));
        REQUIRE_THAT(j["margin"].get<double>(), Catch::Matchers::WithinAbs(0.8, 1e-12));
        REQUIRE_THAT(j["argmin_angle"].get<double>(), Catch::Matchers::WithinAbs(0.0, 1e-7));
    }

    SECTION("field emits a labelled grid") {
        REQUIRE(run_cli("solve --kernel " + kernel.string() + " --out " + sol.string()) == 0);
        const fs::path grid = dir.path / "field.csv";
        REQUIRE(run_cli("field --kernel " + kernel.string() + " --solution " + sol.string() + " --out " +
                        grid.string() + " --nx 9 --ny 9 --extent 2.0") == 0);
        const std::string text = slurp(grid);
        REQUIRE(text.rfind("x,y,P,region\n", 0) == 0);
        REQUIRE(text.find(",in\n") != std::string::npos);
        REQUIRE(text.find(",out\n") != std::string::npos);
        REQUIRE(std::count(text.begin(), text.end(), '\n') == 82);
    }

    SECTION("solve-nd") {
        const fs::path ndk = dir.path / "nd.json";
        write_file(ndk, R"({"type":"power","axis":1,"epsilon":0.0})");
        const fs::path ndout = dir.path / "nd_out.json";
        REQUIRE(run_cli("solve-nd --dim 3 --kernel " + ndk.string() + " --out " + ndout.string()) == 0);
        const nlohmann::json j = nlohmann::json::parse(slurp(ndout));
        REQUIRE(j["a"].size() == 3);
        for (const auto& v : j["a"])
            REQUIRE_THAT(v.get<double>(), Catch::Matchers::WithinAbs(1.0, 1e-10));
        REQUIRE(j["residual"].get<double>() < 1e-10);
    }

    SECTION("error taxonomy maps to exit codes") {
        const fs::path bad = dir.path / "bad.json";
        write_file(bad, "not json at all");
        const fs::path artifact = dir.path / "artifact.json";
        REQUIRE(run_cli("solve --kernel " + bad.string() + " --out " + artifact.string()) == 3);
        REQUIRE_FALSE(fs::exists(artifact));

        const fs::path invalid = dir.path / "invalid_preset.json";
        write_file(invalid, R"({"type":"preset","name":"screw","params":{"alpha":-1,"beta":0,"gamma":1}})");
        REQUIRE(run_cli("solve --kernel " + invalid.string()) == 3);

        const fs::path missing = dir.path / "missing.json";
        REQUIRE(run_cli("solve --kernel " + missing.string()) == 3);

        const fs::path huge = dir.path / "huge.json";
        write_file(huge, R"({"type":"preset","name":"anisotropic","params":{"alpha":1.6}})");
        REQUIRE(run_cli("solve --kernel " + huge.string()) == 2);

        REQUIRE(run_cli("nonsense-subcommand") != 0);
    }

    SECTION("deterministic flag is accepted") {
        REQUIRE(run_cli("--deterministic solve --kernel " + kernel.string() + " --out " + sol.string()) == 0);
    }
}
