#include "doctest.h"

#include "rotbonnet/cli.hpp"
#include "rotbonnet/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace rotbonnet;
using nlohmann::json;

namespace {

const std::filesystem::path scenarios = ROTBONNET_SCENARIO_DIR;

std::string config_error(const json& j)
{
    try {
        parse_scenario(j);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ConfigError) return e.what();
        return "wrong code: " + std::string(e.what());
    }
    return "no error";
}

json minimal()
{
    return json::parse(R"({
      "name": "minimal",
      "profile": {"builtin": "sphere"},
      "n": 1,
      "chart": {"box": [[0.5, 2.5]], "resolution": 11},
      "data": {"explicit": {"g": [["1"]], "alpha": [[["0"]]], "h": "u1"}}
    })");
}

} // namespace

TEST_CASE("profile expressions get symbolic derivatives")
{
    const auto P = parse_profile(json::parse(R"j({"f": "a * sin(t / a)", "epsilon": 1, "interval": [0.2, 3.0],
                                                 "params": {"a": 2.0}})j"),
                                 {});
    for (double t : {0.3, 1.0, 2.5}) {
        CHECK(P.f(t) == doctest::Approx(2 * std::sin(t / 2)).epsilon(1e-14));
        CHECK(P.f_prime(t) == doctest::Approx(std::cos(t / 2)).epsilon(1e-14));
        CHECK(P.f_second(t) == doctest::Approx(-0.5 * std::sin(t / 2)).epsilon(1e-14));
    }
    CHECK_FALSE(P.numeric_derivatives());
}

TEST_CASE("existence violation is raised at load")
{
    try {
        load_scenario(scenarios / "negative_existence.cfg");
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ExistenceViolation);
        CHECK(exit_code_for(e.code()) == ExitConfig);
    }
}

TEST_CASE("config errors name the offending key")
{
    json j = minimal();
    CHECK(config_error(j) == "no error");

    j = minimal();
    j.erase("n");
    CHECK(config_error(j).find("'n'") != std::string::npos);

    j = minimal();
    j["data"]["explicit"]["g"] = json::array({json::array({"1", "0"})});
    CHECK(config_error(j).find("data.explicit.g") != std::string::npos);

    j = minimal();
    j["data"]["explicit"]["h"] = "u1 +* 2";
    CHECK(config_error(j).find("data.explicit.h") != std::string::npos);

    j = minimal();
    j["data"]["extract_from"] = {{"t", "u1"}, {"omega", {"1", "0"}}};
    CHECK(config_error(j).find("exactly one") != std::string::npos);

    j = minimal();
    j["data"] = {{"extract_from", {{"t", "u1"}, {"omega", {"1", "1"}}}}};
    CHECK(config_error(j).find("unit") != std::string::npos);

    j = minimal();
    j["chart"]["box"] = {{0.5, 2.5}, {0.0, 1.0}, {0.0, 1.0}};
    CHECK(config_error(j).find("chart.k") != std::string::npos);

    j = minimal();
    j["tolerances"] = {{"bogus", 1e-3}};
    CHECK(config_error(j).find("bogus") != std::string::npos);

    j = minimal();
    j["profile"] = {{"builtin", "torus"}};
    CHECK(config_error(j).find("profile.builtin") != std::string::npos);
}

TEST_CASE("explicit fields evaluate with symbolic partials")
{
    const Scenario s = load_scenario(scenarios / "leaf_sphere.cfg");
    CHECK(s.chart.dim() == 2);
    CHECK(s.data.e_rank == 1);
    Vec u(2);
    u << 1.2, 0.4;
    const double f0 = std::sin(1.0);
    CHECK(s.data.g(u)(1, 1) == doctest::Approx(f0 * f0 * std::sin(1.2) * std::sin(1.2)));
    CHECK(s.data.g.partial(u, 0)(1, 1) == doctest::Approx(f0 * f0 * std::sin(2.4)));
    CHECK(s.data.hf.partial(u, 0) == 0.0);
}

TEST_CASE("extract_from reproduces the analytic immersion")
{
    const Scenario s = load_scenario(scenarios / "tilted_circle.cfg");
    REQUIRE(s.extracted);
    REQUIRE(s.reference);
    const auto& x = *s.reference;
    REQUIRE(x.has_second_derivatives());
    Vec u(1);
    u << 0.3;
    // point on a unit great circle tilted by pi/4
    const Vec p = immersion_point(s.profile, x, u);
    CHECK(p.head(2).norm() == doctest::Approx(std::sin(x.t(u))));
    CHECK(x.t(u) == doctest::Approx(std::acos(-std::sin(0.3) * std::sqrt(0.5))));
    const Mat J = immersion_jacobian(s.profile, x, u);
    CHECK(J.norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("run maps outcomes onto exit codes")
{
    const auto out = std::filesystem::temp_directory_path() / "rotbonnet_test_run";
    std::filesystem::remove_all(out);
    auto run_one = [&](const std::string& name, const std::string& sub) {
        RunOptions o;
        o.subcommand = sub;
        o.config = scenarios / (name + ".cfg");
        o.out_dir = out;
        o.quiet = true;
        return run(o);
    };

    const auto leaf = run_one("leaf_sphere", "check");
    CHECK(leaf.exit_code == ExitPass);
    REQUIRE(leaf.stages.size() == 1);
    CHECK(leaf.stages[0].info.at("intrinsic_sectional_curvature_mean") ==
          doctest::Approx(1 / std::pow(std::sin(1.0), 2)).epsilon(1e-6));

    CHECK(run_one("perturbed_slice", "check").exit_code == ExitResidual);
    const auto ns = run_one("negative_not_submersion", "reconstruct");
    CHECK(ns.exit_code == ExitNumerical);
    CHECK(ns.error.at("code") == "NotSubmersion");
    CHECK(ns.error.at("stage") == "reconstruct");
    CHECK(run_one("negative_existence", "check").exit_code == ExitConfig);
    CHECK(run_one("missing_file", "check").exit_code == ExitConfig);
    CHECK(run_one("leaf_sphere", "frobnicate").exit_code == ExitConfig);

    const auto lift = run_one("leaf_sphere", "lift");
    CHECK(lift.exit_code == ExitPass);
    CHECK(lift.diagnostics.at("samples").size() == 5);

    const auto tc = run_one("tilted_circle", "reconstruct");
    CHECK(tc.exit_code == ExitPass);
    CHECK(std::filesystem::exists(out / "tilted_circle.csv"));
    CHECK(std::filesystem::exists(out / "tilted_circle.obj"));
    CHECK(std::filesystem::exists(out / "tilted_circle.reconstruct.json"));

    // OBJ holds two objects: the surface of revolution and a polyline
    std::ifstream obj(out / "tilted_circle.obj");
    std::string line;
    int objects = 0, lines = 0;
    while (std::getline(obj, line)) {
        objects += line.rfind("o ", 0) == 0;
        lines += line.rfind("l ", 0) == 0;
    }
    CHECK(objects == 2);
    CHECK(lines == 1);
}

TEST_CASE("reports are byte-identical across runs")
{
    const auto base = std::filesystem::temp_directory_path() / "rotbonnet_test_determinism";
    std::string docs[2];
    for (int i = 0; i < 2; ++i) {
        RunOptions o;
        o.subcommand = "ambient-validate";
        o.config = scenarios / "ambient_hyperbolic.cfg";
        o.out_dir = base / std::to_string(i);
        o.quiet = true;
        o.seed = 7;
        CHECK(run(o).exit_code == ExitPass);
        std::ifstream in(o.out_dir / "ambient_hyperbolic.ambient-validate.json");
        docs[i].assign(std::istreambuf_iterator<char>(in), {});
    }
    CHECK(!docs[0].empty());
    CHECK(docs[0] == docs[1]);
}
