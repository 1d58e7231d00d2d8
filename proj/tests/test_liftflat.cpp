#include "doctest.h"

#include "fixtures.hpp"
#include "rotbonnet/liftflat.hpp"

#include <cmath>

using namespace rotbonnet;
using namespace fixtures;

TEST_CASE("lifted second fundamental form of the model profiles")
{
    const Chart chart({0.5, 0.0}, {2.5, 2.0}, {5, 5});
    const auto S = ProfileCurve::sphere();
    const auto lift = build_lift(slice_data(S, chart));
    const Vec u = vec({M_PI / 2, 0.7});
    const MatStack al = lift.alpha(u);
    REQUIRE(al.size() == 2);
    CHECK(max_abs(al[0]) == 0.0);
    // mu_tilde = 0 at pi/2, so alpha_check = -<u, v> zeta.
    CHECK(max_abs(Mat(al[1] + lift.base.g(u))) <= 1e-12);

    const auto C = ProfileCurve::cylinder();
    const Chart cchart({-1.0, 0.0}, {1.0, 2.0}, {5, 5});
    const auto lc = build_lift(slice_data(C, cchart));
    const Vec v = vec({0.2, 0.3});
    Mat expect = -lc.base.g(v);
    expect(0, 0) += 1.0;
    CHECK(max_abs(Mat(lc.alpha(v)[1] - expect)) <= 1e-12);

    const auto H = ProfileCurve::hyperbolic();
    const Chart hchart({0.5, 0.0}, {1.5, 2.0}, {5, 5});
    const auto lh = build_lift(slice_data(H, hchart));
    const Vec w = vec({1.0, 0.3});
    // eps = -1, lambda_tilde = 1, mu_tilde = 0: alpha_check = +<u, v> zeta with <zeta, zeta> = -1.
    CHECK(max_abs(Mat(lh.alpha(w)[1] - lh.base.g(w))) <= 1e-12);
    CHECK(lh.metric(w)(1, 1) == -1.0);
}

TEST_CASE("position field derivative")
{
    const Chart chart({0.5, 0.0}, {2.5, 2.0}, {7, 7});
    const auto S = ProfileCurve::sphere();
    CHECK(whitney_report(slice_data(S, chart), 1e-7).pass());
    const auto leaf = leaf_data(S, 1.1, chart);
    CHECK(whitney_report(leaf, 1e-7).pass());
    const auto d = whitney_derivative(leaf, 1, vec({1.2, 0.4}));
    const double c = std::cos(1.1) / std::sin(1.1);
    CHECK(std::abs(d.tangent[1] - c) <= 1e-7);
    CHECK(std::abs(d.tangent[0]) <= 1e-7);

    const double delta = 1e-3;
    const auto bad = whitney_report(slice_data(S, chart, delta, false), 1e-7);
    CHECK(bad.entry("position_field_derivative").max_residual == doctest::Approx(delta).epsilon(0.2));
}

TEST_CASE("zero curvature of valid lifts")
{
    const Chart chart({0.5, 0.0}, {2.5, 2.0}, {9, 9});
    for (const auto& P : {ProfileCurve::sphere(), ProfileCurve::hyperbolic()}) {
        const auto lo = P.interval().lo + 0.3, hi = std::min(P.interval().hi - 0.3, 2.5);
        const Chart c({lo, 0.0}, {hi, 2.0}, {9, 9});
        const auto r = flat_compat_residual(build_lift(slice_data(P, c)));
        for (const auto& e : r.entries) {
            INFO(e.name << " " << e.max_residual);
            CHECK(e.pass);
        }
    }
    const auto r = flat_compat_residual(build_lift(leaf_data(ProfileCurve::sphere(), 1.0, chart)));
    for (const auto& e : r.entries) {
        INFO(e.name << " " << e.max_residual);
        CHECK(e.pass);
    }
    const auto tc = extract_data(tilted_circle(), ProfileCurve::sphere(), Chart({-1.0}, {1.0}, {21}), 1);
    CHECK(flat_compat_residual(build_lift(tc)).pass());
}

TEST_CASE("zero curvature detects perturbations linearly")
{
    const Chart chart({0.5, 0.0}, {2.5, 2.0}, {9, 9});
    const auto S = ProfileCurve::sphere();
    const double r1 = flat_compat_residual(build_lift(slice_data(S, chart, 1e-3))).entry("zero_curvature").max_residual;
    const double r2 = flat_compat_residual(build_lift(slice_data(S, chart, 5e-4))).entry("zero_curvature").max_residual;
    CHECK(r1 >= 1e-4);
    CHECK(r1 / r2 == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("connection matrices of the slice")
{
    const Chart chart({0.5, 0.0}, {2.5, 2.0}, {5, 5});
    const auto lift = build_lift(slice_data(ProfileCurve::sphere(), chart));
    const Vec u = vec({1.0, 0.5});
    const MatStack O = connection_matrices(lift, u);
    // Only the zeta row/column couples tangent and normal blocks.
    for (const auto& m : O) CHECK(max_abs(Mat(m.block(2, 0, 1, 2))) == 0.0);
    CHECK(max_abs(Mat(O[1].block(3, 0, 1, 2))) > 0.1);
}

TEST_CASE("lift hypothesis")
{
    const auto bad = ProfileCurve::unchecked({[](double t) { return 2 * t; }, [](double) { return 2.0; },
                                              [](double) { return 0.0; }},
                                             1, {1, 2}, [](double) { return 1.0; });
    const auto d = slice_data(bad, Chart({1.2, 0.0}, {1.8, 1.0}, {4, 4}));
    try {
        build_lift(d);
        FAIL("expected LiftHypothesisViolated");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::LiftHypothesisViolated);
    }
}
