#pragma once

#include "rotbonnet/chartfields.hpp"
#include "rotbonnet/profile.hpp"
#include "rotbonnet/report.hpp"

#include <functional>
#include <optional>

namespace rotbonnet {

/// Abstract immersion data over a chart: metric g, normal bundle E of rank
/// r = n + 1 - k with fiber metric and connection, second fundamental form,
/// the section rho and the height function hf.
///
/// Index conventions: nabla_e(u)[i](a, b) is the a-component of
/// nabla'_i e_b; alpha(u)[a](i, j) is the a-component of alpha'(d_i, d_j).
struct ImmersionData {
    Chart chart;
    int n = 0;
    ProfileCurve profile;
    MetricField g;
    int e_rank = 0;
    MatrixField e_metric;
    StackField nabla_e;
    StackField alpha;
    VectorField rho;
    ScalarField hf;
    /// Independently known T (e.g. from an extracted immersion); when
    /// present it is compared against grad hf.
    std::optional<VectorField> t_explicit;

    int k() const { return chart.dim(); }
};

/// Fails with ConfigError on dimension mismatches, non-positive metrics or
/// k > n + 1.
void validate_data(const ImmersionData& data);

/// A'_xi as a k x k matrix acting on coordinate components: g A' = <alpha', xi>.
Mat weingarten(const ImmersionData& data, const Vec& xi, const Vec& u);

/// Gradient T of hf at u.
Vec gradient_t(const ImmersionData& data, const Vec& u);

/// Residuals of the unit-norm, gradient, conformal (two), Gauss, Codazzi and
/// Ricci equations plus alpha symmetry and fiber-metric compatibility, over
/// interior nodes. Residuals are measured in orthonormal frames of TM and E.
/// Fails with DomainEscape if hf leaves the profile interval at any node.
ResidualReport check_compat(const ImmersionData& data, double tol = 1e-6);

/// Immersion x = (t, omega): chart -> I x S^n with analytic first
/// derivatives. dt is the coordinate gradient of t and domega the
/// (n+1) x k Jacobian of omega. Second derivatives are optional: ddt is the
/// Hessian of t and ddomega[i] the derivative of domega along u^i. Without
/// them the Jacobian is differenced numerically.
struct AnalyticImmersion {
    std::function<double(const Vec&)> t;
    std::function<Vec(const Vec&)> dt;
    std::function<Vec(const Vec&)> omega;
    std::function<Mat(const Vec&)> domega;
    std::function<Mat(const Vec&)> ddt;
    std::function<MatStack(const Vec&)> ddomega;

    bool has_second_derivatives() const { return ddt && ddomega; }
};

/// Position Phi(x(u)) in E^{n+2} and its coordinate Jacobian.
Vec immersion_point(const ProfileCurve& profile, const AnalyticImmersion& x, const Vec& u);
Mat immersion_jacobian(const ProfileCurve& profile, const AnalyticImmersion& x, const Vec& u);
/// Derivative of the Jacobian along u^i.
Mat immersion_jacobian_derivative(const ProfileCurve& profile, const AnalyticImmersion& x, const Vec& u, int i);

/// Numerical immersion data of x. The normal frame at u is obtained by
/// projecting a reference frame, fixed at the lower chart corner, onto the
/// normal space of x inside T M-bar and orthonormalising; fields are exact
/// closures, derivatives of the frame use central differences.
/// Fails with RankDeficient if the pulled-back metric degenerates and with
/// FrameFlip if the projected reference frame becomes ill-conditioned.
ImmersionData extract_data(const AnalyticImmersion& x, const ProfileCurve& profile, const Chart& chart, int n);

/// The adapted normal frame used by extract_data (columns nu_a in E^{n+2}).
Mat extracted_normal_frame(const AnalyticImmersion& x, const ProfileCurve& profile, const Chart& chart,
                           const Vec& u);

} // namespace rotbonnet
