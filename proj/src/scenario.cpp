#include "rotbonnet/scenario.hpp"

#include "rotbonnet/errors.hpp"
#include "rotbonnet/expr.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace rotbonnet {

using nlohmann::json;
using expr::Expression;

namespace {

const json& require(const json& j, const std::string& key, const std::string& where)
{
    if (!j.is_object() || !j.contains(key)) fail(ErrorCode::ConfigError, where + ": missing key '" + key + "'");
    return j.at(key);
}

double number(const json& j, const std::string& where)
{
    if (!j.is_number()) fail(ErrorCode::ConfigError, where + ": expected a number");
    return j.get<double>();
}

std::string text(const json& j, const std::string& where)
{
    if (j.is_number()) return j.dump();
    if (!j.is_string()) fail(ErrorCode::ConfigError, where + ": expected an expression string");
    return j.get<std::string>();
}

std::vector<std::string> chart_variables(int k)
{
    std::vector<std::string> v;
    for (int i = 1; i <= k; ++i) v.push_back("u" + std::to_string(i));
    return v;
}

Expression parse_expr(const json& j, const std::vector<std::string>& vars, const Constants& c,
                      const std::string& where)
{
    try {
        return Expression::parse(text(j, where), vars, c);
    } catch (const Error& e) {
        fail(ErrorCode::ConfigError, where + ": " + e.what());
    }
}

// Array of expressions with the expected length.
std::vector<Expression> parse_vector(const json& j, std::size_t len, const std::vector<std::string>& vars,
                                     const Constants& c, const std::string& where)
{
    if (!j.is_array() || j.size() != len)
        fail(ErrorCode::ConfigError, where + ": expected an array of " + std::to_string(len) + " entries");
    std::vector<Expression> out;
    for (std::size_t i = 0; i < len; ++i) out.push_back(parse_expr(j[i], vars, c, where + "[" + std::to_string(i) + "]"));
    return out;
}

using ExprMatrix = std::vector<std::vector<Expression>>;

ExprMatrix parse_matrix(const json& j, std::size_t rows, std::size_t cols, const std::vector<std::string>& vars,
                        const Constants& c, const std::string& where)
{
    if (!j.is_array() || j.size() != rows)
        fail(ErrorCode::ConfigError, where + ": expected " + std::to_string(rows) + " rows");
    ExprMatrix out;
    for (std::size_t i = 0; i < rows; ++i)
        out.push_back(parse_vector(j[i], cols, vars, c, where + "[" + std::to_string(i) + "]"));
    return out;
}

double eval(const Expression& e, const Vec& u) { return e(std::span<const double>(u.data(), u.size())); }

ScalarField scalar_field(const Expression& e)
{
    std::vector<Expression> d;
    for (std::size_t i = 0; i < e.arity(); ++i) d.push_back(e.derivative(i));
    ScalarField f;
    f.eval = [e](const Vec& u) { return eval(e, u); };
    f.partial = [d](const Vec& u, int i) { return eval(d[i], u); };
    return f;
}

VectorField vector_field(const std::vector<Expression>& es, std::size_t arity)
{
    std::vector<std::vector<Expression>> d(arity);
    for (std::size_t i = 0; i < arity; ++i)
        for (const auto& e : es) d[i].push_back(e.derivative(i));
    VectorField f;
    f.eval = [es](const Vec& u) {
        Vec v(static_cast<Eigen::Index>(es.size()));
        for (std::size_t a = 0; a < es.size(); ++a) v[a] = eval(es[a], u);
        return v;
    };
    f.partial = [d](const Vec& u, int i) {
        Vec v(static_cast<Eigen::Index>(d[i].size()));
        for (std::size_t a = 0; a < d[i].size(); ++a) v[a] = eval(d[i][a], u);
        return v;
    };
    return f;
}

Mat eval_matrix(const ExprMatrix& m, const Vec& u)
{
    Mat out(static_cast<Eigen::Index>(m.size()), m.empty() ? 0 : static_cast<Eigen::Index>(m[0].size()));
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m[i].size(); ++j) out(i, j) = eval(m[i][j], u);
    return out;
}

ExprMatrix derivative(const ExprMatrix& m, std::size_t var)
{
    ExprMatrix out = m;
    for (auto& row : out)
        for (auto& e : row) e = e.derivative(var);
    return out;
}

MatrixField matrix_field(const ExprMatrix& m, std::size_t arity)
{
    std::vector<ExprMatrix> d;
    for (std::size_t i = 0; i < arity; ++i) d.push_back(derivative(m, i));
    MatrixField f;
    f.eval = [m](const Vec& u) { return eval_matrix(m, u); };
    f.partial = [d](const Vec& u, int i) { return eval_matrix(d[i], u); };
    return f;
}

StackField stack_field(const std::vector<ExprMatrix>& s, std::size_t arity)
{
    std::vector<std::vector<ExprMatrix>> d(arity);
    for (std::size_t i = 0; i < arity; ++i)
        for (const auto& m : s) d[i].push_back(derivative(m, i));
    StackField f;
    f.eval = [s](const Vec& u) {
        MatStack out;
        for (const auto& m : s) out.push_back(eval_matrix(m, u));
        return out;
    };
    f.partial = [d](const Vec& u, int i) {
        MatStack out;
        for (const auto& m : d[i]) out.push_back(eval_matrix(m, u));
        return out;
    };
    return f;
}

ExprMatrix constant_matrix(std::size_t rows, std::size_t cols, bool identity)
{
    ExprMatrix m(rows, std::vector<Expression>(cols, Expression::constant(0.0)));
    if (identity)
        for (std::size_t i = 0; i < std::min(rows, cols); ++i) m[i][i] = Expression::constant(1.0);
    return m;
}

Chart parse_chart(const json& j, int n)
{
    const json& box = require(j, "box", "chart");
    if (!box.is_array() || box.empty()) fail(ErrorCode::ConfigError, "chart.box: expected a list of [lo, hi] pairs");
    std::vector<double> lo, hi;
    for (const auto& b : box) {
        if (!b.is_array() || b.size() != 2) fail(ErrorCode::ConfigError, "chart.box: expected [lo, hi] pairs");
        lo.push_back(number(b[0], "chart.box"));
        hi.push_back(number(b[1], "chart.box"));
    }
    const int k = static_cast<int>(lo.size());
    if (j.contains("k") && j.at("k") != k) fail(ErrorCode::ConfigError, "chart.k: does not match the box dimension");
    if (k > n + 1) fail(ErrorCode::ConfigError, "chart.k: must not exceed n + 1");
    std::vector<int> res;
    const json& r = require(j, "resolution", "chart");
    if (r.is_number_integer()) {
        res.assign(k, r.get<int>());
    } else if (r.is_array() && static_cast<int>(r.size()) == k) {
        for (const auto& x : r) {
            if (!x.is_number_integer()) fail(ErrorCode::ConfigError, "chart.resolution: expected integers");
            res.push_back(x.get<int>());
        }
    } else {
        fail(ErrorCode::ConfigError, "chart.resolution: expected an integer or one per axis");
    }
    return Chart(lo, hi, res);
}

ImmersionData parse_explicit(const json& j, const Chart& chart, int n, const ProfileCurve& P, const Constants& c)
{
    const int k = chart.dim();
    const auto vars = chart_variables(k);
    const std::size_t K = static_cast<std::size_t>(k);
    const int r = n + 1 - k;
    if (j.contains("e_rank") && j.at("e_rank") != r)
        fail(ErrorCode::ConfigError, "data.explicit.e_rank: must equal n + 1 - k = " + std::to_string(r));
    const std::size_t R = static_cast<std::size_t>(r);

    ImmersionData d;
    d.chart = chart;
    d.n = n;
    d.profile = P;
    d.e_rank = r;
    const Domain domain = chart.domain();

    d.g = matrix_field(parse_matrix(require(j, "g", "data.explicit"), K, K, vars, c, "data.explicit.g"), K);
    d.e_metric = matrix_field(j.contains("e_metric")
                                  ? parse_matrix(j.at("e_metric"), R, R, vars, c, "data.explicit.e_metric")
                                  : constant_matrix(R, R, true),
                              K);
    std::vector<ExprMatrix> nab;
    if (j.contains("nabla_e")) {
        const json& ne = j.at("nabla_e");
        if (!ne.is_array() || ne.size() != K)
            fail(ErrorCode::ConfigError, "data.explicit.nabla_e: expected one matrix per coordinate");
        for (std::size_t i = 0; i < K; ++i)
            nab.push_back(parse_matrix(ne[i], R, R, vars, c, "data.explicit.nabla_e[" + std::to_string(i) + "]"));
    } else {
        nab.assign(K, constant_matrix(R, R, false));
    }
    d.nabla_e = stack_field(nab, K);

    std::vector<ExprMatrix> al;
    const json& aj = require(j, "alpha", "data.explicit");
    if (!aj.is_array() || aj.size() != R)
        fail(ErrorCode::ConfigError, "data.explicit.alpha: expected one k x k matrix per fiber index");
    for (std::size_t a = 0; a < R; ++a)
        al.push_back(parse_matrix(aj[a], K, K, vars, c, "data.explicit.alpha[" + std::to_string(a) + "]"));
    d.alpha = stack_field(al, K);

    d.rho = j.contains("rho") ? vector_field(parse_vector(j.at("rho"), R, vars, c, "data.explicit.rho"), K)
                              : constant_field<Vec>(Vec::Zero(r));
    d.hf = scalar_field(parse_expr(require(j, "h", "data.explicit"), vars, c, "data.explicit.h"));
    if (j.contains("T")) d.t_explicit = vector_field(parse_vector(j.at("T"), K, vars, c, "data.explicit.T"), K);

    d.g.domain = d.e_metric.domain = d.nabla_e.domain = d.alpha.domain = d.rho.domain = d.hf.domain = domain;
    if (d.t_explicit) d.t_explicit->domain = domain;
    return d;
}

} // namespace

Constants parse_constants(const json& j)
{
    Constants c;
    if (j.is_null()) return c;
    if (!j.is_object()) fail(ErrorCode::ConfigError, "constants: expected an object");
    for (const auto& [key, value] : j.items()) c[key] = number(value, "constants." + key);
    return c;
}

ProfileCurve parse_profile(const json& j, const Constants& constants)
{
    if (!j.is_object()) fail(ErrorCode::ConfigError, "profile: expected an object");
    Constants c = constants;
    if (j.contains("params")) {
        for (const auto& [key, value] : parse_constants(j.at("params"))) c[key] = value;
    }
    const double h0 = j.contains("h0") ? number(j.at("h0"), "profile.h0") : 0.0;
    std::optional<Interval> interval;
    if (j.contains("interval")) {
        const json& iv = j.at("interval");
        if (!iv.is_array() || iv.size() != 2) fail(ErrorCode::ConfigError, "profile.interval: expected [lo, hi]");
        interval = Interval{number(iv[0], "profile.interval"), number(iv[1], "profile.interval")};
        if (!(interval->lo < interval->hi)) fail(ErrorCode::ConfigError, "profile.interval: empty interval");
    }
    if (j.contains("builtin")) {
        const std::string name = text(j.at("builtin"), "profile.builtin");
        const double radius = c.count("radius") ? c.at("radius") : 1.0;
        if (name == "sphere") return ProfileCurve::sphere(radius, interval.value_or(Interval{0.1, 3.0}), h0);
        if (name == "hyperbolic") return ProfileCurve::hyperbolic(radius, interval.value_or(Interval{0.2, 2.0}), h0);
        if (name == "cylinder") return ProfileCurve::cylinder(radius, interval.value_or(Interval{-5.0, 5.0}), h0);
        fail(ErrorCode::ConfigError, "profile.builtin: unknown profile '" + name + "'");
    }
    if (!interval) fail(ErrorCode::ConfigError, "profile: missing key 'interval'");
    const json& ej = require(j, "epsilon", "profile");
    if (!ej.is_number_integer() || (ej.get<int>() != 1 && ej.get<int>() != -1))
        fail(ErrorCode::ConfigError, "profile.epsilon: expected +1 or -1");
    const std::vector<std::string> vars{"t"};
    const Expression f = parse_expr(require(j, "f", "profile"), vars, c, "profile.f");
    const Expression fp = j.contains("fp") ? parse_expr(j.at("fp"), vars, c, "profile.fp") : f.derivative(0);
    const Expression fpp = j.contains("fpp") ? parse_expr(j.at("fpp"), vars, c, "profile.fpp") : fp.derivative(0);
    auto fn = [](const Expression& e) { return [e](double t) { return e({t}); }; };
    return ProfileCurve::make({fn(f), fn(fp), fn(fpp)}, ej.get<int>(), *interval, h0);
}

AnalyticImmersion parse_immersion(const json& j, int k, int n, const Constants& c)
{
    const auto vars = chart_variables(k);
    const std::size_t K = static_cast<std::size_t>(k);
    const Expression t = parse_expr(require(j, "t", "immersion"), vars, c, "immersion.t");
    const auto omega = parse_vector(require(j, "omega", "immersion"), static_cast<std::size_t>(n + 1), vars, c,
                                    "immersion.omega");
    std::vector<Expression> dt;
    ExprMatrix ddt(K), domega(K);
    std::vector<ExprMatrix> ddomega(K, ExprMatrix(K));
    for (std::size_t i = 0; i < K; ++i) {
        dt.push_back(t.derivative(i));
        for (std::size_t j2 = 0; j2 < K; ++j2) ddt[i].push_back(t.derivative(i).derivative(j2));
        for (const auto& w : omega) domega[i].push_back(w.derivative(i));
    }
    // ddomega[i][j][a] = d_i d_j omega_a
    for (std::size_t i = 0; i < K; ++i)
        for (std::size_t j2 = 0; j2 < K; ++j2)
            for (const auto& w : omega) ddomega[i][j2].push_back(w.derivative(j2).derivative(i));

    AnalyticImmersion x;
    x.t = [t](const Vec& u) { return eval(t, u); };
    x.dt = [dt](const Vec& u) {
        Vec v(static_cast<Eigen::Index>(dt.size()));
        for (std::size_t i = 0; i < dt.size(); ++i) v[i] = eval(dt[i], u);
        return v;
    };
    x.omega = [omega](const Vec& u) {
        Vec v(static_cast<Eigen::Index>(omega.size()));
        for (std::size_t a = 0; a < omega.size(); ++a) v[a] = eval(omega[a], u);
        return v;
    };
    // domega stored by coordinate; transpose into (n+1) x k
    x.domega = [domega](const Vec& u) { return Mat(eval_matrix(domega, u).transpose()); };
    x.ddt = [ddt](const Vec& u) { return eval_matrix(ddt, u); };
    x.ddomega = [ddomega](const Vec& u) {
        MatStack out;
        for (const auto& m : ddomega) out.push_back(Mat(eval_matrix(m, u).transpose()));
        return out;
    };
    return x;
}

Scenario parse_scenario(const json& j)
{
    if (!j.is_object()) fail(ErrorCode::ConfigError, "scenario: expected a JSON object");
    Scenario s;
    s.raw = j;
    s.name = text(require(j, "name", "scenario"), "name");
    if (j.contains("expect")) {
        const json& e = j.at("expect");
        if (e.contains("subcommand")) s.expect_subcommand = text(e.at("subcommand"), "expect.subcommand");
        if (e.contains("exit_code")) s.expect_exit_code = e.at("exit_code").get<int>();
    }
    const Constants c = parse_constants(j.contains("constants") ? j.at("constants") : json());
    const json& nj = require(j, "n", "scenario");
    if (!nj.is_number_integer() || nj.get<int>() < 1) fail(ErrorCode::ConfigError, "n: expected a positive integer");
    s.n = nj.get<int>();
    if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("draws")) s.draws = j.at("draws").get<int>();
    if (j.contains("tolerances")) apply_overrides(s.tolerances, j.at("tolerances"));
    if (j.contains("outputs")) {
        const json& o = j.at("outputs");
        s.outputs.report = o.value("report", true);
        s.outputs.csv = o.value("csv", true);
        s.outputs.obj = o.value("obj", true);
    }

    s.profile = parse_profile(require(j, "profile", "scenario"), c);
    if (!j.contains("chart")) return s; // ambient-only scenario
    s.chart = parse_chart(j.at("chart"), s.n);
    const int k = s.chart.dim();

    const json& data = require(j, "data", "scenario");
    const bool has_explicit = data.contains("explicit");
    const bool has_extract = data.contains("extract_from");
    if (has_explicit == has_extract)
        fail(ErrorCode::ConfigError, "data: exactly one of 'explicit' and 'extract_from' is required");
    if (has_explicit) {
        s.data = parse_explicit(data.at("explicit"), s.chart, s.n, s.profile, c);
        validate_data(s.data);
    } else {
        const AnalyticImmersion x = parse_immersion(data.at("extract_from"), k, s.n, c);
        for (std::size_t node = 0; node < s.chart.node_count(); ++node)
            if (std::abs(x.omega(s.chart.node(node)).norm() - 1.0) > 1e-10)
                fail(ErrorCode::ConfigError, "data.extract_from.omega: not a unit vector on the chart");
        s.data = extract_data(x, s.profile, s.chart, s.n);
        s.extracted = true;
        s.reference = x;
    }
    if (j.contains("reference")) s.reference = parse_immersion(j.at("reference"), k, s.n, c);
    return s;
}

json read_json(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) fail(ErrorCode::ConfigError, "cannot open config '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return json::parse(ss.str(), nullptr, true, true);
    } catch (const json::exception& e) {
        fail(ErrorCode::ConfigError, "malformed JSON in '" + path.string() + "': " + e.what());
    }
}

Scenario load_scenario(const std::filesystem::path& path) { return parse_scenario(read_json(path)); }

} // namespace rotbonnet
