#include "doctest.h"

#include "fixtures.hpp"
#include "rotbonnet/reconstruct.hpp"

#include <cmath>
#include <iostream>

using namespace rotbonnet;
using namespace fixtures;

namespace {

void require_pass(const ResidualReport& r)
{
    for (const auto& e : r.entries) {
        INFO(e.name << " max=" << e.max_residual << " tol=" << e.tolerance);
        CHECK(e.pass);
    }
}

} // namespace

TEST_CASE("slice on the sphere reconstructs up to rigid motion")
{
    const auto S = ProfileCurve::sphere();
    const Chart chart({0.5, 0.0}, {2.5, 2.0}, {41, 41});
    const auto lift = build_lift(slice_data(S, chart));
    const auto res = reconstruct(lift, Tolerances{});
    require_pass(res.report);
    if (!res.report.pass()) std::cout << format_table(res.report);

    std::vector<Vec> got, want;
    const auto x = slice_immersion();
    for (std::size_t i = 0; i < chart.node_count(); ++i) {
        got.push_back(res.states[i].position);
        want.push_back(immersion_point(S, x, chart.node(i)));
    }
    CHECK(rigid_fit_error(got, want, true) <= 1e-5);

    // tau(sigma(s)) lies on the axis at height -cos s for h0 = -cos(mid I).
    const auto S2 = ProfileCurve::sphere(1.0, {0.1, 3.0}, -std::cos(1.55));
    const auto res2 = reconstruct(build_lift(slice_data(S2, chart)), Tolerances{});
    for (std::size_t b = 0; b < res2.centers.s.size(); ++b) {
        const Vec y = res2.tau(res2.centers.sigma[b]);
        CHECK(std::abs(y[3] + std::cos(res2.centers.s[b])) <= 1e-5);
        CHECK(y.head(3).norm() <= 1e-5);
    }
}

TEST_CASE("hyperbolic and cylinder slices")
{
    const auto H = ProfileCurve::hyperbolic();
    const auto rh = reconstruct(build_lift(slice_data(H, Chart({0.4, 0.0}, {1.8, 2.0}, {61, 61}))), Tolerances{});
    require_pass(rh.report);
    const Mat J = signature_matrix(4, -1);
    CHECK(max_abs(Mat(rh.tau.L.transpose() * J * rh.tau.L - J)) <= 1e-10);

    const auto C = ProfileCurve::cylinder();
    const auto rc = reconstruct(build_lift(slice_data(C, Chart({-1.0, 0.0}, {1.0, 2.0}, {31, 31}))), Tolerances{});
    require_pass(rc.report);
    for (std::size_t b = 0; b + 1 < rc.centers.s.size(); ++b) {
        CHECK((rc.centers.sigma_prime[b] - rc.centers.sigma_prime[0]).norm() <= 1e-6);
        CHECK(signature_dot(rc.centers.sigma_prime[b], rc.centers.sigma_prime[b], 1) == doctest::Approx(1.0));
    }
}

TEST_CASE("tilted great circle round trip")
{
    const auto S = ProfileCurve::sphere(1.0, {0.1, 3.0}, -std::cos(1.55));
    const Chart chart({-1.0}, {1.0}, {201});
    const auto x = tilted_circle();
    const auto res = reconstruct(build_lift(extract_data(x, S, chart, 1)), Tolerances{});
    require_pass(res.report);
    std::vector<Vec> got, want;
    for (std::size_t i = 0; i < chart.node_count(); ++i) {
        got.push_back(res.states[i].position);
        want.push_back(immersion_point(S, x, chart.node(i)));
        CHECK(std::abs(res.tau(res.states[i].position).norm() - 1.0) <= 1e-5);
    }
    CHECK(rigid_fit_error(got, want, true) <= 1e-5);
}

TEST_CASE("closed great circle returns to its start")
{
    const auto S = ProfileCurve::sphere();
    const Chart chart({0.0}, {2 * M_PI}, {801});
    const auto lift = build_lift(extract_data(tilted_circle(), S, chart, 1));
    const auto states = integrate_frame(lift, base_state(lift, chart.node(0)), {0});
    CHECK((states.back().position - states.front().position).norm() <= 1e-6);
    CHECK(max_abs(Mat(states.back().frame - states.front().frame)) <= 1e-6);
}

TEST_CASE("straightness of synthetic curves")
{
    CenterCurve line, circle;
    for (int i = 0; i < 20; ++i) {
        const double s = 0.1 * i + 0.01 * (i % 3);
        line.s.push_back(s);
        line.sigma.push_back(vec({1.0 + 2 * s, -s, 0.5 * s}));
        circle.s.push_back(s);
        circle.sigma.push_back(vec({std::cos(s), std::sin(s), 0.0}));
    }
    CHECK(straightness_check(line) <= 1e-10);
    CHECK(straightness_check(circle) > 1e-2);
    CenterCurve few;
    few.s = {0, 1, 2};
    few.sigma = {vec({0.0}), vec({1.0}), vec({2.0})};
    CHECK_THROWS_AS(straightness_check(few), Error);
}

TEST_CASE("normalisation of centers already on the axis")
{
    const auto C = ProfileCurve::cylinder();
    CenterCurve c;
    for (int i = 0; i < 6; ++i) {
        c.s.push_back(i * 0.5);
        c.sigma.push_back(vec({0, 0, 0, i * 0.5 + 3}));
        c.sigma_prime.push_back(vec({0, 0, 0, 1}));
    }
    const auto tau = normalize(c, C, 1.0);
    CHECK(max_abs(Mat(tau.L - Mat::Identity(4, 4))) <= 1e-14);
    CHECK(tau.b[3] == doctest::Approx(C.h(1.0) - 4.0));
}

TEST_CASE("non-submersion is rejected")
{
    const auto S = ProfileCurve::sphere();
    const Chart chart({0.5}, {2.5}, {81});
    const auto lift = build_lift(extract_data(tilted_circle(), S, chart, 1));
    try {
        reconstruct(lift, Tolerances{});
        FAIL("expected NotSubmersion");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotSubmersion);
    }
}

TEST_CASE("curved lifts are not integrated")
{
    const auto S = ProfileCurve::sphere();
    const Chart chart({0.5, 0.0}, {2.5, 2.0}, {11, 11});
    try {
        reconstruct(build_lift(slice_data(S, chart, 0.2)), Tolerances{});
        FAIL("expected CurvatureTooLarge");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::CurvatureTooLarge);
    }
}
