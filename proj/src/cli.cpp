#include "rotbonnet/cli.hpp"

#include "rotbonnet/ambient.hpp"
#include "rotbonnet/export.hpp"
#include "rotbonnet/scenario.hpp"

#include <chrono>
#include <fstream>
#include <iostream>

namespace rotbonnet {

using nlohmann::json;

bool RunReport::pass() const
{
    if (!error.is_null()) return false;
    for (const auto& s : stages)
        if (!s.pass()) return false;
    return true;
}

int exit_code_for(ErrorCode code)
{
    switch (code) {
    case ErrorCode::ConfigError:
    case ErrorCode::ExistenceViolation:
    case ErrorCode::NonPositiveRadius: return ExitConfig;
    default: return ExitNumerical;
    }
}

json to_json(const RunReport& r)
{
    json j;
    j["scenario"] = r.scenario;
    j["subcommand"] = r.subcommand;
    j["seed"] = r.seed;
    j["tol_scale"] = r.tol_scale;
    j["stages"] = json::array();
    for (const auto& s : r.stages) j["stages"].push_back(s);
    j["diagnostics"] = r.diagnostics;
    j["tolerances"] = r.tolerances;
    j["error"] = r.error;
    j["files"] = r.files;
    j["verdict"] = r.pass() ? "pass" : "fail";
    j["exit_code"] = r.exit_code;
    return j;
}

namespace {

class Runner {
public:
    Runner(const RunOptions& options, RunReport& report) : options_(options), report_(report) {}

    template <class F>
    auto stage(const std::string& name, F&& body)
    {
        current_ = name;
        const auto start = std::chrono::steady_clock::now();
        auto finish = [&] {
            const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
            report_.timings.push_back({name, dt.count()});
        };
        if constexpr (std::is_void_v<decltype(body())>) {
            body();
            finish();
        } else {
            auto value = body();
            finish();
            return value;
        }
    }

    void add(ResidualReport r)
    {
        if (!options_.quiet) std::cout << format_table(r);
        report_.stages.push_back(std::move(r));
    }

    const std::string& current() const { return current_; }

private:
    const RunOptions& options_;
    RunReport& report_;
    std::string current_ = "load";
};

std::vector<std::size_t> sample_nodes(const Chart& chart, int count = 5)
{
    std::vector<std::size_t> out;
    const std::size_t N = chart.node_count();
    for (int i = 0; i < count; ++i) {
        const std::size_t node = N <= 1 ? 0 : (N - 1) * static_cast<std::size_t>(i) / static_cast<std::size_t>(count - 1);
        if (out.empty() || out.back() != node) out.push_back(node);
    }
    return out;
}

json lift_samples(const FlatLiftData& lift)
{
    json out = json::array();
    for (std::size_t node : sample_nodes(lift.base.chart)) {
        const Vec u = lift.base.chart.node(node);
        json s;
        s["node"] = node;
        s["u"] = vector_json(u);
        s["fiber_metric"] = matrix_json(lift.metric(u));
        s["lambda_tilde"] = lift.lambda_tilde(u);
        s["mu_tilde"] = lift.mu_tilde(u);
        s["alpha"] = json::array();
        for (const auto& m : lift.alpha(u)) s["alpha"].push_back(matrix_json(m));
        s["connection"] = json::array();
        for (const auto& m : connection_matrices(lift, u)) s["connection"].push_back(matrix_json(m));
        s["zero_curvature_defect"] = zero_curvature_defect(lift, u);
        out.push_back(s);
    }
    return out;
}

// Comparison with the analytic immersion. After normalisation the only
// freedom left is a rotation of the first n+1 coordinates.
ResidualReport reference_report(const Scenario& sc, const ReconstructionResult& res, const Tolerances& tol)
{
    const AnalyticImmersion& x = *sc.reference;
    std::vector<Vec> normalised, raw, target;
    ResidualAccumulator dt;
    for (std::size_t node = 0; node < sc.chart.node_count(); ++node) {
        const Vec u = sc.chart.node(node);
        normalised.push_back(res.tau(res.states[node].position));
        raw.push_back(res.states[node].position);
        target.push_back(immersion_point(sc.profile, x, u));
        dt.add(std::abs(res.warped[node].t - x.t(u)));
    }
    ResidualReport r;
    r.stage = "reference";
    const double warped = rigid_fit_error(normalised, target, false);
    r.add("normalized_position", warped, warped, tol.position);
    r.add("height_function", dt.max(), dt.mean(), tol.position);
    if (sc.profile.epsilon() == 1) {
        const double e = rigid_fit_error(raw, target, true);
        r.add("flat_position", e, e, tol.position);
    }
    return r;
}

void write_json(const std::filesystem::path& path, const json& j)
{
    std::ofstream out(path);
    if (!out) fail(ErrorCode::ConfigError, "cannot write '" + path.string() + "'");
    out << j.dump(2) << '\n';
}

void execute(const RunOptions& opt, RunReport& report, Runner& runner)
{
    const Scenario sc = runner.stage("load", [&] { return load_scenario(opt.config); });
    report.scenario = sc.name;
    report.seed = opt.seed.value_or(sc.seed);
    const Tolerances tol = sc.tolerances.scaled(opt.tol_scale);
    report.tolerances = to_json(tol);

    if (opt.subcommand == "ambient-validate") {
        runner.add(runner.stage("ambient", [&] {
            return ambient_validation_report(sc.profile, sc.n, report.seed, sc.draws, opt.tol_scale);
        }));
        return;
    }
    if (sc.data.n == 0) fail(ErrorCode::ConfigError, "scenario has no chart/data section");

    runner.add(runner.stage("compat", [&] { return check_compat(sc.data, tol.compat); }));
    if (opt.subcommand == "check") return;

    runner.add(runner.stage("whitney", [&] { return whitney_report(sc.data, tol.whitney); }));
    const FlatLiftData lift = runner.stage("lift", [&] { return build_lift(sc.data); });
    runner.add(runner.stage("flat", [&] { return flat_compat_residual(lift, tol.flat); }));
    if (opt.subcommand == "lift") {
        report.diagnostics["samples"] = lift_samples(lift);
        return;
    }

    const ReconstructionResult res = runner.stage("reconstruct", [&] { return reconstruct(lift, tol); });
    runner.add(res.report);
    if (sc.reference) runner.add(runner.stage("reference", [&] { return reference_report(sc, res, tol); }));

    json centers = json::array();
    for (std::size_t b = 0; b < res.centers.s.size(); ++b)
        centers.push_back({{"s", res.centers.s[b]}, {"sigma", vector_json(res.tau(res.centers.sigma[b]))}});
    report.diagnostics["tau"] = {{"L", matrix_json(res.tau.L)}, {"b", vector_json(res.tau.b)}};
    report.diagnostics["centers"] = centers;

    runner.stage("export", [&] {
        if (sc.outputs.csv) {
            const auto path = opt.out_dir / (sc.name + ".csv");
            write_csv(path, sc.chart, res);
            report.files.push_back(path.filename().string());
        }
        if (sc.outputs.obj && sc.n == 1 && sc.chart.dim() <= 2) {
            const auto path = opt.out_dir / (sc.name + ".obj");
            write_obj(path, sc.profile, sc.chart, res);
            report.files.push_back(path.filename().string());
        }
    });
}

} // namespace

RunReport run(const RunOptions& opt)
{
    RunReport report;
    report.subcommand = opt.subcommand;
    report.tol_scale = opt.tol_scale;
    report.scenario = opt.config.stem().string();
    Runner runner(opt, report);

    auto record = [&](int code, const std::string& name, const std::string& message) {
        report.exit_code = code;
        report.error = {{"code", name}, {"message", message}, {"stage", runner.current()}};
        if (!opt.quiet) std::cerr << "error [" << runner.current() << "] " << message << '\n';
    };

    try {
        if (opt.subcommand != "check" && opt.subcommand != "lift" && opt.subcommand != "reconstruct" &&
            opt.subcommand != "ambient-validate")
            fail(ErrorCode::ConfigError, "unknown subcommand '" + opt.subcommand + "'");
        if (!(opt.tol_scale > 0)) fail(ErrorCode::ConfigError, "--tol-scale must be positive");
        std::filesystem::create_directories(opt.out_dir);
        execute(opt, report, runner);
        report.exit_code = report.pass() ? ExitPass : ExitResidual;
    } catch (const Error& e) {
        record(exit_code_for(e.code()), std::string(to_string(e.code())), e.what());
    } catch (const json::exception& e) {
        record(ExitConfig, "ConfigError", std::string("ConfigError: ") + e.what());
    } catch (const std::filesystem::filesystem_error& e) {
        record(ExitConfig, "ConfigError", std::string("ConfigError: ") + e.what());
    }

    {
        try {
            const auto path = opt.out_dir / (report.scenario + "." + opt.subcommand + ".json");
            write_json(path, to_json(report));
        } catch (const std::exception& e) {
            if (!opt.quiet) std::cerr << "error writing report: " << e.what() << '\n';
            if (report.exit_code == ExitPass) report.exit_code = ExitConfig;
        }
    }

    if (!opt.quiet) {
        for (const auto& t : report.timings) std::cout << "time " << t.stage << ' ' << t.seconds << " s\n";
        std::cout << "verdict " << (report.pass() ? "pass" : "fail") << " (exit " << report.exit_code << ")\n";
    }
    return report;
}

} // namespace rotbonnet
