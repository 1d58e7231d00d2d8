#include "rotbonnet/profile.hpp"

#include "rotbonnet/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rotbonnet {

namespace {

constexpr int kTableCells = 4096;
constexpr double kEndpointShrink = 1e-9;
constexpr double kFallbackStep = 1e-5;

std::string at(double t)
{
    std::ostringstream os;
    os.precision(12);
    os << "t = " << t;
    return os.str();
}

} // namespace

struct ProfileCurve::Impl {
    ProfileFunctions fns;
    ScalarFn h_prime;
    int epsilon = 1;
    Interval interval;
    bool numeric = false;

    // h tabulated on a uniform grid over the shrunk interval.
    double t0 = 0.0;
    double dt = 0.0;
    std::vector<double> h_nodes;
    std::vector<double> hp_nodes;

    double hermite(double t) const
    {
        double s = (t - t0) / dt;
        auto cell = static_cast<long>(std::floor(s));
        cell = std::clamp<long>(cell, 0, static_cast<long>(h_nodes.size()) - 2);
        const double x = s - static_cast<double>(cell);
        const double y0 = h_nodes[cell], y1 = h_nodes[cell + 1];
        const double m0 = hp_nodes[cell] * dt, m1 = hp_nodes[cell + 1] * dt;
        const double x2 = x * x, x3 = x2 * x;
        return (2 * x3 - 3 * x2 + 1) * y0 + (x3 - 2 * x2 + x) * m0 + (-2 * x3 + 3 * x2) * y1 + (x3 - x2) * m1;
    }
};

std::vector<double> validation_samples(const Interval& interval)
{
    std::vector<double> out;
    out.reserve(514);
    const double a = interval.lo + kEndpointShrink;
    const double b = interval.hi - kEndpointShrink;
    out.push_back(a);
    for (int i = 0; i < 512; ++i) out.push_back(a + (b - a) * (i + 0.5) / 512.0);
    out.push_back(b);
    return out;
}

ProfileCurve ProfileCurve::build(ProfileFunctions fns, int epsilon, Interval interval, ScalarFn h_prime,
                                 double h0)
{
    if (epsilon != 1 && epsilon != -1) fail(ErrorCode::ConfigError, "epsilon must be +1 or -1");
    if (!(interval.lo < interval.hi)) fail(ErrorCode::ConfigError, "profile interval is empty");
    if (!fns.f) fail(ErrorCode::ConfigError, "profile function f is missing");

    auto impl = std::make_shared<Impl>();
    impl->epsilon = epsilon;
    impl->interval = interval;
    impl->numeric = !fns.f_prime || !fns.f_second;
    if (!fns.f_prime) {
        ScalarFn f = fns.f;
        fns.f_prime = [f](double t) {
            const double d = kFallbackStep * std::max(1.0, std::abs(t));
            return (f(t + d) - f(t - d)) / (2 * d);
        };
    }
    if (!fns.f_second) {
        ScalarFn f = fns.f;
        fns.f_second = [f](double t) {
            const double d = kFallbackStep * std::max(1.0, std::abs(t));
            return (f(t + d) - 2 * f(t) + f(t - d)) / (d * d);
        };
    }
    if (!h_prime) {
        ScalarFn fp = fns.f_prime;
        h_prime = [fp, epsilon](double t) {
            const double v = fp(t);
            return std::sqrt(std::max(0.0, epsilon * (1.0 - v * v)));
        };
    }
    impl->fns = std::move(fns);
    impl->h_prime = std::move(h_prime);

    const double a = interval.lo + kEndpointShrink;
    const double b = interval.hi - kEndpointShrink;
    impl->t0 = a;
    impl->dt = (b - a) / kTableCells;
    impl->h_nodes.assign(kTableCells + 1, 0.0);
    impl->hp_nodes.assign(kTableCells + 1, 0.0);
    const auto& hp = impl->h_prime;
    for (int i = 0; i <= kTableCells; ++i) impl->hp_nodes[i] = hp(a + i * impl->dt);
    using boost::math::quadrature::gauss_kronrod;
    for (int i = 0; i < kTableCells; ++i) {
        const double lo = a + i * impl->dt;
        const double hi = (i + 1 == kTableCells) ? b : lo + impl->dt;
        impl->h_nodes[i + 1] = impl->h_nodes[i] + gauss_kronrod<double, 15>::integrate(hp, lo, hi, 5, 1e-14);
    }
    const double shift = h0 - impl->hermite(interval.mid());
    for (double& v : impl->h_nodes) v += shift;

    return ProfileCurve(std::move(impl));
}

ProfileCurve ProfileCurve::make(ProfileFunctions fns, int epsilon, Interval interval, double h0)
{
    if (!fns.f) fail(ErrorCode::ConfigError, "profile function f is missing");
    // Validate before tabulating: sqrt of a negative would silently clamp.
    const auto samples = validation_samples(interval);
    auto fp = fns.f_prime;
    if (!fp) {
        ScalarFn f = fns.f;
        fp = [f](double t) {
            const double d = kFallbackStep * std::max(1.0, std::abs(t));
            return (f(t + d) - f(t - d)) / (2 * d);
        };
    }
    for (double t : samples) {
        const double ft = fns.f(t);
        if (!(ft > 0.0)) fail(ErrorCode::NonPositiveRadius, "f(t) <= 0 at " + at(t));
        const double d = fp(t);
        if (!(epsilon * (1.0 - d * d) > 0.0))
            fail(ErrorCode::ExistenceViolation, "eps (1 - f'(t)^2) <= 0 at " + at(t));
    }
    return build(std::move(fns), epsilon, interval, nullptr, h0);
}

ProfileCurve ProfileCurve::unchecked(ProfileFunctions fns, int epsilon, Interval interval, ScalarFn h_prime,
                                     double h0)
{
    return build(std::move(fns), epsilon, interval, std::move(h_prime), h0);
}

ProfileCurve ProfileCurve::sphere(double radius, Interval interval, double h0)
{
    const double r = radius;
    return make({[r](double t) { return r * std::sin(t / r); }, [r](double t) { return std::cos(t / r); },
                 [r](double t) { return -std::sin(t / r) / r; }},
                1, interval, h0);
}

ProfileCurve ProfileCurve::hyperbolic(double radius, Interval interval, double h0)
{
    const double r = radius;
    return make({[r](double t) { return r * std::sinh(t / r); }, [r](double t) { return std::cosh(t / r); },
                 [r](double t) { return std::sinh(t / r) / r; }},
                -1, interval, h0);
}

ProfileCurve ProfileCurve::cylinder(double radius, Interval interval, double h0)
{
    const double r = radius;
    return make({[r](double) { return r; }, [](double) { return 0.0; }, [](double) { return 0.0; }}, 1, interval,
                h0);
}

void ProfileCurve::require_domain(double t) const
{
    if (!impl_) fail(ErrorCode::ConfigError, "empty profile");
    if (!impl_->interval.contains(t)) fail(ErrorCode::OutOfDomain, "profile evaluated outside I at " + at(t));
}

int ProfileCurve::epsilon() const { return impl_->epsilon; }
const Interval& ProfileCurve::interval() const { return impl_->interval; }
bool ProfileCurve::numeric_derivatives() const { return impl_->numeric; }

double ProfileCurve::f(double t) const
{
    require_domain(t);
    return impl_->fns.f(t);
}

double ProfileCurve::f_prime(double t) const
{
    require_domain(t);
    return impl_->fns.f_prime(t);
}

double ProfileCurve::f_second(double t) const
{
    require_domain(t);
    return impl_->fns.f_second(t);
}

double ProfileCurve::h_prime(double t) const
{
    require_domain(t);
    return impl_->h_prime(t);
}

double ProfileCurve::h_second(double t) const
{
    require_domain(t);
    return -impl_->epsilon * impl_->fns.f_prime(t) * impl_->fns.f_second(t) / impl_->h_prime(t);
}

double ProfileCurve::h(double t) const
{
    require_domain(t);
    return impl_->hermite(t);
}

WarpScalars warp_scalars(const ProfileCurve& profile, double t)
{
    const double f = profile.f(t);
    const double fp = profile.f_prime(t);
    const double fpp = profile.f_second(t);
    const double hp = profile.h_prime(t);
    const int eps = profile.epsilon();
    WarpScalars w;
    w.lambda = (1.0 - fp * fp) / (f * f);
    w.mu = w.lambda + fpp / f;
    w.lambda_tilde = hp / f;
    w.mu_tilde = hp / f + eps * fpp / hp;
    return w;
}

double check_arclength(const ProfileCurve& profile, const std::vector<double>& samples)
{
    double worst = 0.0;
    for (double t : samples) {
        const double fp = profile.f_prime(t);
        const double hp = profile.h_prime(t);
        worst = std::max(worst, std::abs(fp * fp + profile.epsilon() * hp * hp - 1.0));
    }
    return worst;
}

} // namespace rotbonnet
