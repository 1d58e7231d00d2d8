// Acceptance run: one PASS/FAIL line per criterion. argv[1] is the CLI
// executable used for the exit-code checks.

#include "fixtures.hpp"
#include "rotbonnet/ambient.hpp"
#include "rotbonnet/cli.hpp"
#include "rotbonnet/reconstruct.hpp"
#include "rotbonnet/scenario.hpp"

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>

using namespace rotbonnet;
using namespace fixtures;

namespace {

const std::filesystem::path scenarios = ROTBONNET_SCENARIO_DIR;

struct Model {
    std::string name;
    ProfileCurve profile;
    double lambda, mu;
};

std::vector<Model> models()
{
    return {{"sphere", ProfileCurve::sphere(), 1.0, 0.0},
            {"cylinder", ProfileCurve::cylinder(), 1.0, 1.0},
            {"hyperbolic", ProfileCurve::hyperbolic(), -1.0, 0.0}};
}

double seconds_since(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string sci(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", x);
    return buf;
}

int failures = 0;

void criterion(int id, const std::string& title, const std::function<bool(std::ostringstream&)>& body)
{
    std::ostringstream detail;
    bool ok = false;
    try {
        ok = body(detail);
    } catch (const std::exception& e) {
        detail << "unexpected error: " << e.what();
    }
    failures += !ok;
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << id << ": " << title << " [" << detail.str() << "]"
              << std::endl;
}

std::vector<double> samples(const Interval& I, int count)
{
    std::vector<double> t;
    for (int i = 0; i < count; ++i) t.push_back(I.lo + (I.hi - I.lo) * (i + 0.5) / count);
    return t;
}

double entry(const ResidualReport& r, const std::string& name) { return r.entry(name).max_residual; }

struct Pipeline {
    std::string name;
    Scenario scenario;
    ResidualReport compat;
    FlatLiftData lift;
    ResidualReport flat;
    std::optional<ReconstructionResult> result;
};

Pipeline pipeline(const std::string& name, bool reconstruct_too)
{
    Pipeline p;
    p.name = name;
    p.scenario = load_scenario(scenarios / (name + ".cfg"));
    p.compat = check_compat(p.scenario.data);
    p.lift = build_lift(p.scenario.data);
    p.flat = flat_compat_residual(p.lift);
    if (reconstruct_too) p.result = reconstruct(p.lift, p.scenario.tolerances);
    return p;
}

int run_cli(const std::string& exe, const std::string& args)
{
    const std::string cmd = "\"" + exe + "\" " + args + " --quiet --out-dir \"" +
                            (std::filesystem::temp_directory_path() / "rotbonnet_acceptance").string() +
                            "\" > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

int main(int argc, char* argv[])
{
    const std::string exe = argc > 1 ? argv[1] : "rotbonnet";
    const std::vector<std::string> full = {"slice_sphere", "slice_cylinder", "slice_hyperbolic", "tilted_circle"};

    criterion(1, "ambient curvature matches the finite-difference oracle", [](std::ostringstream& d) {
        bool ok = true;
        const auto start = std::chrono::steady_clock::now();
        for (const auto& m : models()) {
            const auto r = ambient_validation_report(m.profile, 2, 20261015, 100);
            const double e = entry(r, "curvature_oracle_relative");
            ok &= r.info.at("draws") == 100 && e <= 1e-6;
            d << m.name << " " << sci(e) << "; ";
        }
        const double secs = seconds_since(start);
        d << "runtime " << secs << " s";
        return ok && secs < 10.0;
    });

    criterion(2, "model-space curvature values", [](std::ostringstream& d) {
        double worst = 0;
        for (const auto& m : models())
            for (double t : samples(m.profile.interval(), 100)) {
                const auto w = warp_scalars(m.profile, t);
                worst = std::max({worst, std::abs(w.lambda - m.lambda), std::abs(w.mu - m.mu)});
            }
        d << "max deviation " << sci(worst);
        return worst <= 1e-9;
    });

    criterion(3, "lifted warp scalar identities", [](std::ostringstream& d) {
        double worst = 0;
        for (const auto& m : models()) {
            const double eps = m.profile.epsilon();
            for (double t : samples(m.profile.interval(), 100)) {
                const auto w = warp_scalars(m.profile, t);
                worst = std::max({worst, std::abs(w.lambda_tilde * w.lambda_tilde - eps * w.lambda),
                                  std::abs(w.lambda_tilde * w.mu_tilde - eps * w.mu)});
            }
        }
        d << "max deviation " << sci(worst);
        return worst <= 1e-9;
    });

    criterion(4, "leaf suite", [](std::ostringstream& d) {
        bool ok = true;
        const Chart chart({0.5, 0.0}, {2.5, 2.0}, {21, 21});
        for (const auto& m : models()) {
            const auto r = ambient_validation_report(m.profile, 2, 7, 100);
            const double t0 = 0.5 * (m.profile.interval().lo + m.profile.interval().hi);
            const auto c = check_compat(leaf_data(m.profile, t0, chart));
            const double f0 = m.profile.f(t0);
            const double k = std::abs(c.info.at("intrinsic_sectional_curvature_mean") - 1 / (f0 * f0));
            const double worst = std::max({entry(r, "leaf_shape_operator"), entry(r, "leaf_mean_curvature"),
                                           entry(r, "leaf_sectional_curvature"), c.max_residual(), k});
            ok &= worst <= 1e-6;
            d << m.name << " " << sci(worst) << "; ";
        }
        return ok;
    });

    criterion(5, "extracted data satisfy the compatibility equations", [](std::ostringstream& d) {
        const auto S = ProfileCurve::sphere();
        const double slice = check_compat(extract_data(slice_immersion(), S, Chart({0.5, 0.0}, {2.5, 2.0}, {41, 41}), 2))
                                 .max_residual();
        const double circle = check_compat(load_scenario(scenarios / "tilted_circle.cfg").data).max_residual();
        d << "slice " << sci(slice) << "; tilted circle " << sci(circle);
        return slice <= 1e-6 && circle <= 1e-6;
    });

    criterion(6, "flatness of the lifted connection", [](std::ostringstream& d) {
        bool ok = true;
        for (const std::string name : {"leaf_sphere", "slice_sphere", "slice_cylinder", "slice_hyperbolic", "tilted_circle"}) {
            const auto p = pipeline(name, false);
            if (p.compat.max_residual() > 1e-6) continue;
            const double z = entry(p.flat, "zero_curvature");
            ok &= z <= 1e-6;
            d << name << " " << sci(z) << "; ";
        }
        const Scenario base = load_scenario(scenarios / "perturbed_slice.cfg");
        auto zero_curvature = [&](double delta) {
            auto j = base.raw;
            j["constants"]["delta"] = delta;
            return entry(flat_compat_residual(build_lift(parse_scenario(j).data)), "zero_curvature");
        };
        const double z1 = zero_curvature(1e-3), z2 = zero_curvature(5e-4);
        const double ratio = z1 / z2;
        d << "perturbed " << sci(z1) << " / " << sci(z2) << " ratio " << ratio;
        return ok && z1 >= 1e-4 && std::abs(ratio / 2 - 1) <= 0.2;
    });

    criterion(7, "reconstruction fidelity on the 41x41 slice", [](std::ostringstream& d) {
        const auto start = std::chrono::steady_clock::now();
        const auto p = pipeline("slice_sphere", true);
        const double secs = seconds_since(start);
        const auto& res = *p.result;
        const Chart& chart = p.scenario.chart;
        std::vector<Vec> got, want;
        for (std::size_t i = 0; i < chart.node_count(); ++i) {
            got.push_back(res.states[i].position);
            want.push_back(immersion_point(p.scenario.profile, *p.scenario.reference, chart.node(i)));
        }
        const double pos = rigid_fit_error(got, want, true);
        const double path = entry(res.report, "path_independence"), gram = entry(res.report, "gram_drift");
        d << "position " << sci(pos) << "; path " << sci(path) << "; gram " << sci(gram) << "; runtime " << secs
          << " s";
        return chart.resolution() == std::vector<int>{41, 41} && pos <= 1e-5 && path <= 1e-6 && gram <= 1e-6 &&
               secs < 30.0;
    });

    std::vector<Pipeline> runs;
    for (const auto& name : full) runs.push_back(pipeline(name, true));

    criterion(8, "curve of centers", [&](std::ostringstream& d) {
        bool ok = true;
        for (const auto& p : runs) {
            const auto& r = p.result->report;
            const double spread = entry(r, "center_spread"), straight = entry(r, "straightness"),
                         dist = entry(r, "distance_identity");
            ok &= spread <= 1e-6 && straight <= 1e-5 && dist <= 1e-6;
            d << p.name << " " << sci(spread) << "/" << sci(straight) << "/" << sci(dist) << "; ";
        }
        return ok;
    });

    criterion(9, "projection to the warped target", [&](std::ostringstream& d) {
        bool ok = true;
        for (const auto& p : runs) {
            const auto& r = p.result->report;
            const double a = std::max(entry(r, "sphere"), entry(r, "last_coordinate"));
            const double b = std::max({entry(r, "frame_x_is_dt"), entry(r, "frame_zeta_is_normal"),
                                       entry(r, "dt_decomposition")});
            ok &= a <= 1e-6 && b <= 1e-5;
            d << p.name << " " << sci(a) << "/" << sci(b) << "; ";
        }
        return ok;
    });

    criterion(10, "negative controls and exit codes", [&](std::ostringstream& d) {
        bool ok = true;
        auto raises = [](ErrorCode code, const std::function<void()>& f) {
            try {
                f();
            } catch (const Error& e) {
                return e.code() == code;
            }
            return false;
        };
        ok &= raises(ErrorCode::NotSubmersion, [] {
            const auto s = load_scenario(scenarios / "negative_not_submersion.cfg");
            reconstruct(build_lift(s.data), s.tolerances);
        });
        ok &= raises(ErrorCode::ExistenceViolation, [] {
            ProfileCurve::make({[](double t) { return std::cosh(t); }, [](double t) { return std::sinh(t); }, {}}, 1,
                               {0.1, 1.0});
        });
        ok &= raises(ErrorCode::ExistenceViolation, [] {
            ProfileCurve::make({[](double t) { return 2 + 0.5 * std::sin(t); }, [](double t) { return 0.5 * std::cos(t); }, {}},
                               -1, {0.1, 1.0});
        });
        ok &= raises(ErrorCode::CurvatureTooLarge, [] {
            reconstruct(build_lift(slice_data(ProfileCurve::sphere(), Chart({0.5, 0.0}, {2.5, 2.0}, {21, 21}), 0.2)),
                        Tolerances{});
        });
        d << "library " << (ok ? "ok" : "mismatch") << "; cli";
        for (const auto& entry : std::filesystem::directory_iterator(scenarios)) {
            if (entry.path().extension() != ".cfg") continue;
            const auto j = read_json(entry.path());
            const auto& e = j.at("expect");
            const int code = run_cli(exe, e.at("subcommand").get<std::string>() + " --config \"" + entry.path().string() + "\"");
            const bool match = code == e.at("exit_code").get<int>();
            ok &= match;
            if (!match) d << " " << entry.path().stem().string() << "=" << code;
        }
        const int missing = run_cli(exe, "check --config /nonexistent.cfg");
        const int bad_flag = run_cli(exe, "check --config x.cfg --tol-scale abc");
        ok &= missing == ExitConfig && bad_flag == ExitConfig;
        d << " bundled " << (ok ? "match" : "mismatch") << ", missing config " << missing << ", bad flag " << bad_flag;
        return ok;
    });

    return failures == 0 ? 0 : 1;
}
