#include "doctest.h"

#include "fixtures.hpp"

#include <cmath>

using namespace rotbonnet;
using namespace fixtures;

namespace {

void check_all_pass(const ResidualReport& r, double tol)
{
    for (const auto& e : r.entries) {
        INFO(e.name << " max=" << e.max_residual);
        CHECK(e.max_residual <= tol);
    }
}

} // namespace

TEST_CASE("weingarten operator of simple second fundamental forms")
{
    const Chart chart({0.5, 0.0}, {2.5, 2.0}, {5, 5});
    const auto S = ProfileCurve::sphere();
    const auto zero = slice_data(S, chart);
    CHECK(max_abs(weingarten(zero, vec({1.0}), vec({1.0, 0.5}))) == 0.0);

    const double t0 = 1.0;
    const auto leaf = leaf_data(S, t0, chart);
    const Mat A = weingarten(leaf, vec({1.0}), vec({1.2, 0.3}));
    const double c = std::cos(t0) / std::sin(t0);
    CHECK(max_abs(Mat(A + c * Mat::Identity(2, 2))) <= 1e-12);
    CHECK(A.trace() / 2 == doctest::Approx(-c));
}

TEST_CASE("leaf data satisfies the compatibility equations")
{
    const Chart chart({0.5, 0.0}, {2.5, 2.0}, {9, 9});
    for (const auto& P : {ProfileCurve::sphere(), ProfileCurve::cylinder(), ProfileCurve::hyperbolic()}) {
        const double t0 = P.interval().mid();
        const auto report = check_compat(leaf_data(P, t0, chart));
        check_all_pass(report, 1e-8);
        CHECK(report.info.at("intrinsic_sectional_curvature_mean") ==
              doctest::Approx(1 / (P.f(t0) * P.f(t0))).epsilon(1e-6));
    }
}

TEST_CASE("slice data satisfies the compatibility equations")
{
    const Chart chart({0.5, 0.0}, {2.5, 2.0}, {9, 9});
    check_all_pass(check_compat(slice_data(ProfileCurve::sphere(), chart)), 1e-8);
    check_all_pass(check_compat(slice_data(ProfileCurve::hyperbolic(), Chart({0.5, 0}, {1.8, 2}, {9, 9}))), 1e-8);
    check_all_pass(check_compat(slice_data(ProfileCurve::cylinder(), Chart({-1, 0}, {1, 2}, {9, 9}))), 1e-8);
}

TEST_CASE("perturbed slice is detected linearly")
{
    const Chart chart({0.5, 0.0}, {2.5, 2.0}, {9, 9});
    const auto S = ProfileCurve::sphere();
    const auto r1 = check_compat(slice_data(S, chart, 1e-3, false));
    const auto r2 = check_compat(slice_data(S, chart, 5e-4, false));
    CHECK(r1.entry("normal_conformal").max_residual >= 1e-4);
    CHECK(r1.entry("normal_conformal").max_residual / r2.entry("normal_conformal").max_residual ==
          doctest::Approx(2.0).epsilon(0.05));
    const auto w = check_compat(slice_data(S, chart, 1e-3, true));
    CHECK(w.entry("codazzi").max_residual >= 1e-4);
    CHECK_FALSE(w.pass());
}

TEST_CASE("extracted slice data")
{
    const auto S = ProfileCurve::sphere();
    const Chart chart({0.5, 0.0}, {2.5, 2.0}, {9, 9});
    const auto data = extract_data(slice_immersion(), S, chart, 2);
    const Vec u = vec({1.1, 0.7});
    CHECK(max_abs(data.alpha(u)) <= 1e-7);
    CHECK(max_abs(data.rho(u)) <= 1e-12);
    CHECK(gradient_t(data, u).dot(data.g(u) * gradient_t(data, u)) == doctest::Approx(1.0).epsilon(1e-10));
    check_all_pass(check_compat(data), 1e-8);
}

TEST_CASE("extracted tilted great circle")
{
    const auto S = ProfileCurve::sphere();
    const Chart chart({-1.0}, {1.0}, {41});
    const auto data = extract_data(tilted_circle(), S, chart, 1);
    for (std::size_t i = 0; i < chart.node_count(); ++i) {
        const Vec u = chart.node(i);
        CHECK(std::abs(gradient_t(data, u)[0]) > 0.1);
        CHECK(std::abs(data.rho(u)[0]) > 0.1);
    }
    check_all_pass(check_compat(data), 1e-6);
}

TEST_CASE("extracted leaf inclusion")
{
    const auto S = ProfileCurve::sphere();
    const double t0 = 1.2;
    AnalyticImmersion x;
    x.t = [t0](const Vec&) { return t0; };
    x.dt = [](const Vec&) { return vec({0.0, 0.0}); };
    x.omega = [](const Vec& u) {
        return vec({std::sin(u[0]) * std::cos(u[1]), std::sin(u[0]) * std::sin(u[1]), std::cos(u[0])});
    };
    x.domega = [](const Vec& u) {
        Mat m(3, 2);
        m << std::cos(u[0]) * std::cos(u[1]), -std::sin(u[0]) * std::sin(u[1]), std::cos(u[0]) * std::sin(u[1]),
            std::sin(u[0]) * std::cos(u[1]), -std::sin(u[0]), 0.0;
        return m;
    };
    const Chart chart({0.5, 0.0}, {2.5, 2.0}, {9, 9});
    const auto data = extract_data(x, S, chart, 2);
    const Vec u = vec({1.0, 1.0});
    CHECK(gradient_t(data, u).norm() <= 1e-12);
    CHECK(std::abs(data.rho(u)[0]) == doctest::Approx(1.0));
    const Mat A = weingarten(data, data.rho(u), u);
    const double c = std::cos(t0) / std::sin(t0);
    CHECK(max_abs(Mat(A + c * Mat::Identity(2, 2))) <= 1e-6);
    check_all_pass(check_compat(data), 1e-6);
}

TEST_CASE("errors of the compat stage")
{
    const auto S = ProfileCurve::sphere();
    const Chart chart({0.5, 0.0}, {2.5, 2.0}, {5, 5});
    auto d = slice_data(S, chart);
    d.hf.eval = [](const Vec& u) { return 3 * u[0]; };
    CHECK_THROWS_AS(check_compat(d), Error);

    AnalyticImmersion degenerate = slice_immersion();
    degenerate.omega = [](const Vec&) { return vec({1.0, 0.0, 0.0}); };
    degenerate.domega = [](const Vec&) { return Mat(Mat::Zero(3, 2)); };
    try {
        extract_data(degenerate, S, chart, 2);
        FAIL("expected RankDeficient");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::RankDeficient);
    }
}
