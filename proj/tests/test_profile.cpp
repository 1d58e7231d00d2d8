#include "doctest.h"

#include "rotbonnet/errors.hpp"
#include "rotbonnet/profile.hpp"

#include <cmath>

using namespace rotbonnet;

namespace {

ErrorCode code_of(const std::function<void()>& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::ConfigError;
}

ProfileFunctions sin_profile()
{
    return {[](double t) { return std::sin(t); }, [](double t) { return std::cos(t); },
            [](double t) { return -std::sin(t); }};
}

} // namespace

TEST_CASE("sphere profile recovers h = -cos t")
{
    const auto P = ProfileCurve::make(sin_profile(), 1, {0.1, 3.0}, -std::cos(1.55));
    for (double t : {0.2, 0.9, 1.55, 2.4, 2.95}) {
        CHECK(P.h_prime(t) == doctest::Approx(std::sin(t)).epsilon(1e-13));
        CHECK(P.h(t) == doctest::Approx(-std::cos(t)).epsilon(1e-10));
    }
    CHECK(check_arclength(P, validation_samples(P.interval())) <= 1e-12);
}

TEST_CASE("cylinder and hyperbolic profiles")
{
    const auto C = ProfileCurve::make({[](double) { return 1.0; }, [](double) { return 0.0; },
                                       [](double) { return 0.0; }},
                                      1, {-5, 5}, 0.0);
    CHECK(C.h_prime(1.7) == 1.0);
    CHECK(C.h(2.0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(check_arclength(C, {-4.0, 0.0, 3.3}) == 0.0);

    const auto H = ProfileCurve::make({[](double t) { return std::sinh(t); }, [](double t) { return std::cosh(t); },
                                       [](double t) { return std::sinh(t); }},
                                      -1, {0.2, 2.0}, std::cosh(1.1));
    for (double t : {0.3, 1.0, 1.9}) {
        CHECK(H.h_prime(t) == doctest::Approx(std::sinh(t)).epsilon(1e-12));
        CHECK(H.h(t) == doctest::Approx(std::cosh(t)).epsilon(1e-10));
    }
}

TEST_CASE("existence and radius violations")
{
    CHECK(code_of([] {
              ProfileCurve::make({[](double t) { return 2 * t; }, [](double) { return 2.0; },
                                  [](double) { return 0.0; }},
                                 1, {1, 2});
          }) == ErrorCode::ExistenceViolation);
    CHECK(code_of([] {
              ProfileCurve::make({[](double t) { return std::cosh(t); }, [](double t) { return std::sinh(t); },
                                  [](double t) { return std::cosh(t); }},
                                 1, {0.2, 2.0});
          }) == ErrorCode::ExistenceViolation);
    CHECK(code_of([] { ProfileCurve::make(sin_profile(), 1, {-0.5, 1.0}); }) == ErrorCode::NonPositiveRadius);
    CHECK(code_of([] { ProfileCurve::sphere().f(3.5); }) == ErrorCode::OutOfDomain);
}

TEST_CASE("warp scalars of the model spaces")
{
    const auto S = ProfileCurve::sphere();
    auto w = warp_scalars(S, M_PI / 2);
    CHECK(w.lambda == doctest::Approx(1.0));
    CHECK(std::abs(w.mu) < 1e-12);
    CHECK(w.lambda_tilde == doctest::Approx(1.0));
    CHECK(std::abs(w.mu_tilde) < 1e-12);

    w = warp_scalars(ProfileCurve::cylinder(), 0.4);
    CHECK(w.lambda == 1.0);
    CHECK(w.mu == 1.0);
    CHECK(w.lambda_tilde == 1.0);
    CHECK(w.mu_tilde == 1.0);

    w = warp_scalars(ProfileCurve::hyperbolic(), 1.0);
    CHECK(w.lambda == doctest::Approx(-1.0));
    CHECK(std::abs(w.mu) < 1e-12);
    CHECK(w.lambda_tilde == doctest::Approx(1.0));
    CHECK(std::abs(w.mu_tilde) < 1e-12);
}

TEST_CASE("remark identities and monotone h on all built-ins")
{
    for (const auto& P : {ProfileCurve::sphere(), ProfileCurve::cylinder(), ProfileCurve::hyperbolic()}) {
        double prev = -1e300;
        for (double t : validation_samples(P.interval())) {
            const auto w = warp_scalars(P, t);
            const int e = P.epsilon();
            CHECK(std::abs(w.lambda_tilde * w.lambda_tilde - e * w.lambda) <= 1e-9);
            CHECK(std::abs(w.lambda_tilde * w.mu_tilde - e * w.mu) <= 1e-9);
            CHECK(P.h(t) > prev);
            prev = P.h(t);
        }
    }
}

TEST_CASE("tabulated h differentiates back to h'")
{
    const auto P = ProfileCurve::hyperbolic();
    for (double t = 0.3; t < 1.9; t += 0.17) {
        const double d = 1e-4;
        const double fd = (P.h(t + d) - P.h(t - d)) / (2 * d);
        CHECK(std::abs(fd - P.h_prime(t)) / P.h_prime(t) <= 1e-6);
    }
}

TEST_CASE("corrupted h' is detected by the arclength check")
{
    const auto P = ProfileCurve::unchecked(sin_profile(), 1, {0.1, 3.0}, [](double t) { return 1.01 * std::sin(t); });
    std::vector<double> ts;
    for (int i = 0; i < 100; ++i) ts.push_back(0.1 + 2.9 * (i + 0.5) / 100);
    double expect = 0;
    for (double t : ts) expect = std::max(expect, (1.01 * 1.01 - 1) * std::sin(t) * std::sin(t));
    CHECK(check_arclength(P, ts) == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("finite-difference fallback is flagged")
{
    const auto P = ProfileCurve::make({[](double t) { return std::sin(t); }, nullptr, nullptr}, 1, {0.1, 3.0});
    CHECK(P.numeric_derivatives());
    CHECK(P.f_second(1.0) == doctest::Approx(-std::sin(1.0)).epsilon(1e-5));
    CHECK_FALSE(ProfileCurve::sphere().numeric_derivatives());
}
