#pragma once

#include <functional>
#include <memory>
#include <vector>

namespace rotbonnet {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double t) const noexcept { return lo < t && t < hi; }
    double mid() const noexcept { return 0.5 * (lo + hi); }
    double width() const noexcept { return hi - lo; }
};

using ScalarFn = std::function<double(double)>;

/// The warping function and, optionally, its first two derivatives. Missing
/// derivatives fall back to central differences (relative step 1e-5), which
/// is recorded on the resulting profile.
struct ProfileFunctions {
    ScalarFn f;
    ScalarFn f_prime;
    ScalarFn f_second;
};

struct WarpScalars {
    double lambda = 0.0;
    double mu = 0.0;
    double lambda_tilde = 0.0;
    double mu_tilde = 0.0;
};

/// Arc-length generating curve (f, h) of a rotational hypersurface in
/// E^{n+2} with signature (1, ..., 1, eps):  f'^2 + eps h'^2 = 1, h' > 0.
///
/// h is tabulated once at construction (Gauss-Kronrod on each cell, cubic
/// Hermite interpolation using the exact h' at the nodes) and normalised so
/// that h(mid I) = h0. Instances are immutable and safe to share between
/// threads.
class ProfileCurve {
public:
    ProfileCurve() = default;

    /// Validates f > 0 and eps (1 - f'^2) > 0 on a 512-point grid plus the
    /// interval endpoints shrunk by 1e-9.
    static ProfileCurve make(ProfileFunctions fns, int epsilon, Interval interval, double h0 = 0.0);

    /// Builds a profile with a caller-supplied h' and no validation. Only
    /// useful for exercising the residual checks with corrupted data.
    static ProfileCurve unchecked(ProfileFunctions fns, int epsilon, Interval interval, ScalarFn h_prime,
                                  double h0 = 0.0);

    static ProfileCurve sphere(double radius = 1.0, Interval interval = {0.1, 3.0}, double h0 = 0.0);
    static ProfileCurve hyperbolic(double radius = 1.0, Interval interval = {0.2, 2.0}, double h0 = 0.0);
    static ProfileCurve cylinder(double radius = 1.0, Interval interval = {-5.0, 5.0}, double h0 = 0.0);

    int epsilon() const;
    const Interval& interval() const;
    bool contains(double t) const { return interval().contains(t); }
    bool numeric_derivatives() const;

    double f(double t) const;
    double f_prime(double t) const;
    double f_second(double t) const;
    double h_prime(double t) const;
    /// h'' = -eps f' f'' / h', from differentiating the arc-length relation.
    double h_second(double t) const;
    double h(double t) const;

private:
    struct Impl;
    explicit ProfileCurve(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    static ProfileCurve build(ProfileFunctions fns, int epsilon, Interval interval, ScalarFn h_prime,
                              double h0);
    void require_domain(double t) const;

    std::shared_ptr<const Impl> impl_;
};

WarpScalars warp_scalars(const ProfileCurve& profile, double t);

/// max |f'^2 + eps h'^2 - 1| over the samples.
double check_arclength(const ProfileCurve& profile, const std::vector<double>& samples);

/// The 512-point validation grid plus both endpoints shrunk by 1e-9.
std::vector<double> validation_samples(const Interval& interval);

} // namespace rotbonnet
