#include "rotbonnet/ambient.hpp"

#include "rotbonnet/chartfields.hpp"
#include "rotbonnet/errors.hpp"

#include <cmath>
#include <random>

namespace rotbonnet {

namespace {

// Columns form an orthonormal basis of the complement of omega in R^{n+1}.
Mat complement_basis(const Vec& omega)
{
    Eigen::HouseholderQR<Mat> qr(omega);
    const Mat Q = qr.householderQ() * Mat::Identity(omega.size(), omega.size());
    return Q.rightCols(omega.size() - 1);
}

Vec tangential(const Vec& omega, const Vec& x) { return x - omega.dot(x) * omega; }

} // namespace

void validate_point(const ProfileCurve& profile, const AmbientPoint& p)
{
    if (!profile.contains(p.t)) fail(ErrorCode::OutOfDomain, "ambient point has t outside the profile interval");
    if (std::abs(p.omega.norm() - 1.0) > 1e-10) fail(ErrorCode::ConfigError, "ambient point omega is not unit");
}

Vec embed(const ProfileCurve& profile, const AmbientPoint& p)
{
    validate_point(profile, p);
    const auto n1 = p.omega.size();
    Vec x(n1 + 1);
    x.head(n1) = profile.f(p.t) * p.omega;
    x[n1] = profile.h(p.t);
    return x;
}

FrameFields frame_fields(const ProfileCurve& profile, const AmbientPoint& p)
{
    validate_point(profile, p);
    const auto n1 = p.omega.size();
    const double fp = profile.f_prime(p.t);
    const double hp = profile.h_prime(p.t);
    FrameFields out{Vec(n1 + 1), Vec(n1 + 1)};
    out.dt.head(n1) = fp * p.omega;
    out.dt[n1] = hp;
    out.normal.head(n1) = hp * p.omega;
    out.normal[n1] = -profile.epsilon() * fp;
    return out;
}

double warped_dot(const ProfileCurve& profile, double t, const AmbientTangent& u, const AmbientTangent& v)
{
    const double f = profile.f(t);
    return u.a * v.a + f * f * u.w.dot(v.w);
}

double warped_norm(const ProfileCurve& profile, double t, const AmbientTangent& u)
{
    return std::sqrt(warped_dot(profile, t, u, u));
}

Vec pushforward(const ProfileCurve& profile, const AmbientPoint& p, const AmbientTangent& v)
{
    const auto fr = frame_fields(profile, p);
    Vec x = v.a * fr.dt;
    x.head(p.omega.size()) += profile.f(p.t) * v.w;
    return x;
}

AmbientTangent to_tangent(const ProfileCurve& profile, const AmbientPoint& p, const Vec& X)
{
    const auto fr = frame_fields(profile, p);
    const int eps = profile.epsilon();
    const Vec tangent = X - eps * signature_dot(X, fr.normal, eps) * fr.normal;
    AmbientTangent out;
    out.a = signature_dot(tangent, fr.dt, eps);
    const auto n1 = p.omega.size();
    out.w = (tangent.head(n1) - out.a * profile.f_prime(p.t) * p.omega) / profile.f(p.t);
    return out;
}

AmbientTangent ambient_curvature(const ProfileCurve& profile, double t, const AmbientTangent& u,
                                 const AmbientTangent& v, const AmbientTangent& w)
{
    const auto ws = warp_scalars(profile, t);
    const double vw = warped_dot(profile, t, v, w);
    const double uw = warped_dot(profile, t, u, w);
    // <u,v,w> = <v,w>u - <u,w>v
    AmbientTangent out = (u * vw - v * uw) * ws.lambda;
    AmbientTangent bracket = (u * v.a - v * u.a) * w.a;
    bracket.a += vw * u.a - uw * v.a;
    return out - bracket * ws.mu;
}

AmbientTangent shape_operator(const ProfileCurve& profile, double t, const AmbientTangent& v)
{
    const double f = profile.f(t);
    const double hp = profile.h_prime(t);
    const double fpp = profile.f_second(t);
    AmbientTangent out = v * (-hp / f);
    out.a += (hp / f + profile.epsilon() * fpp / hp) * v.a;
    return out;
}

AmbientPoint displace(const AmbientPoint& p, const AmbientTangent& u, double s)
{
    AmbientPoint q;
    q.t = p.t + s * u.a;
    q.omega = (p.omega + s * u.w).normalized();
    return q;
}

AmbientTangent covariant_derivative(const ProfileCurve& profile, const AmbientPoint& p, const AmbientTangent& u,
                                    const TangentField& Y)
{
    const double f = profile.f(p.t);
    const double fp = profile.f_prime(p.t);
    const double step = 1e-5;
    const AmbientTangent y0 = Y(p);
    const AmbientTangent yp = Y(displace(p, u, step));
    const AmbientTangent ym = Y(displace(p, u, -step));
    const double db = (yp.a - ym.a) / (2 * step);
    const Vec dz = (yp.w - ym.w) / (2 * step);
    // nabla_u (b d_t + Z) = u(b) d_t + b (f'/f) u_vert + nabla^S Z + a (f'/f) Z - f f' <w, z> d_t
    AmbientTangent out;
    out.a = db - f * fp * u.w.dot(y0.w);
    out.w = tangential(p.omega, dz) + (fp / f) * (u.a * y0.w + y0.a * u.w);
    return out;
}

AmbientTangent fd_covariant_derivative(const ProfileCurve& profile, const AmbientPoint& p,
                                       const AmbientTangent& u, const TangentField& Y, double step)
{
    const AmbientPoint pp = displace(p, u, step);
    const AmbientPoint pm = displace(p, u, -step);
    const Vec dZ = (pushforward(profile, pp, Y(pp)) - pushforward(profile, pm, Y(pm))) / (2 * step);
    return to_tangent(profile, p, dZ);
}

double conformal_check(const ProfileCurve& profile, const AmbientPoint& p, const AmbientTangent& u)
{
    const TangentField V = [&profile](const AmbientPoint& q) {
        return AmbientTangent{profile.f(q.t), Vec::Zero(q.omega.size())};
    };
    const AmbientTangent lhs = covariant_derivative(profile, p, u, V);
    return warped_norm(profile, p.t, lhs - u * profile.f_prime(p.t));
}

AmbientTangent fd_curvature_oracle(const ProfileCurve& profile, const AmbientPoint& p, const AmbientTangent& u,
                                   const AmbientTangent& v, const AmbientTangent& w, double step)
{
    validate_point(profile, p);
    const int n = static_cast<int>(p.omega.size()) - 1;
    const double reach = 2 * step * std::max(1.0, std::abs(p.t)) * 2;
    if (!profile.contains(p.t - reach) || !profile.contains(p.t + reach))
        fail(ErrorCode::OutOfDomain, "curvature oracle stencil leaves the profile interval");

    // Stereographic chart from -omega: omega(y) = ((1-|y|^2) omega0 + 2 B y) / (1 + |y|^2).
    // The metric in (t, y) is diag(1, 4 f(t)^2 / (1+|y|^2)^2 I).
    const Mat B = complement_basis(p.omega);
    MetricField G;
    G.eval = [&profile, n](const Vec& x) {
        const double f = profile.f(x[0]);
        const double conf = 2.0 / (1.0 + x.tail(n).squaredNorm());
        Mat m = Mat::Identity(n + 1, n + 1);
        m.bottomRightCorner(n, n) *= f * f * conf * conf;
        return m;
    };
    Vec x0 = Vec::Zero(n + 1);
    x0[0] = p.t;

    auto coords = [&B](const AmbientTangent& z) {
        Vec c(B.cols() + 1);
        c[0] = z.a;
        c.tail(B.cols()) = 0.5 * B.transpose() * z.w;
        return c;
    };
    const Vec cu = coords(u), cv = coords(v), cw = coords(w);

    auto evaluate = [&](double rel) {
        const RiemannTensor R = intrinsic_riemann(G, x0, rel);
        const Vec c = R.apply(cu, cv, cw);
        return AmbientTangent{c[0], 2.0 * B * c.tail(n)};
    };
    const AmbientTangent fine = evaluate(step);
    const AmbientTangent coarse = evaluate(2 * step);

    const double scale = std::max(1e-300, warped_norm(profile, p.t, u) * warped_norm(profile, p.t, v) *
                                              warped_norm(profile, p.t, w));
    // Second-order scheme: fine - exact ~ (coarse - fine) / 3, removed by extrapolation.
    const double estimate = warped_norm(profile, p.t, coarse - fine) / 3.0 / scale;
    if (estimate > 1e-4) fail(ErrorCode::StepTooLarge, "curvature oracle Richardson estimate exceeds bound");
    return fine * (4.0 / 3.0) - coarse * (1.0 / 3.0);
}

ResidualReport ambient_validation_report(const ProfileCurve& profile, int n, std::uint64_t seed, int draws,
                                         double tol_scale)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const Interval I = profile.interval();
    const double margin = 0.02 * I.width();
    std::uniform_real_distribution<double> uniform_t(I.lo + margin, I.hi - margin);
    const int eps = profile.epsilon();

    auto random_unit = [&]() {
        Vec x(n + 1);
        for (auto& c : x) c = gauss(rng);
        return Vec(x.normalized());
    };
    auto random_tangent = [&](const AmbientPoint& p) {
        Vec g(n + 1);
        for (auto& c : g) c = gauss(rng);
        return AmbientTangent{gauss(rng), tangential(p.omega, g) / profile.f(p.t)};
    };

    ResidualAccumulator oracle, antisym, skew, bianchi, pair, frames, adjoint, shape_fd, conformal, conformal_fd,
        leaf_shape, leaf_mean, leaf_sectional, remark, arclength;
    for (int d = 0; d < draws; ++d) {
        AmbientPoint p{uniform_t(rng), random_unit()};
        const double t = p.t;
        const AmbientTangent u = random_tangent(p), v = random_tangent(p), w = random_tangent(p),
                             z = random_tangent(p);
        auto dot = [&](const AmbientTangent& x, const AmbientTangent& y) { return warped_dot(profile, t, x, y); };
        auto norm = [&](const AmbientTangent& x) { return warped_norm(profile, t, x); };
        const double scale = norm(u) * norm(v) * norm(w);

        const AmbientTangent R = ambient_curvature(profile, t, u, v, w);
        oracle.add(norm(R - fd_curvature_oracle(profile, p, u, v, w)) / scale);
        antisym.add(norm(R + ambient_curvature(profile, t, v, u, w)) / scale);
        skew.add(std::abs(dot(R, z) + dot(ambient_curvature(profile, t, u, v, z), w)) / (scale * norm(z)));
        bianchi.add(norm(R + ambient_curvature(profile, t, v, w, u) + ambient_curvature(profile, t, w, u, v)) /
                    scale);
        pair.add(std::abs(dot(R, z) - dot(ambient_curvature(profile, t, w, z, u), v)) / (scale * norm(z)));

        const auto fr = frame_fields(profile, p);
        const Vec pu = pushforward(profile, p, u);
        frames.add(std::max({std::abs(signature_dot(fr.dt, fr.dt, eps) - 1.0),
                             std::abs(signature_dot(fr.normal, fr.normal, eps) - eps),
                             std::abs(signature_dot(fr.dt, fr.normal, eps)),
                             std::abs(signature_dot(pu, fr.normal, eps)) / norm(u),
                             std::abs(signature_dot(pu, pu, eps) - dot(u, u)) / dot(u, u)}));

        adjoint.add(std::abs(dot(shape_operator(profile, t, u), v) - dot(u, shape_operator(profile, t, v))) /
                    (norm(u) * norm(v)));
        // A v = -(D_v N_t)^T for the embedded hypersurface.
        const double hstep = 1e-5;
        const Vec dN = (frame_fields(profile, displace(p, u, hstep)).normal -
                        frame_fields(profile, displace(p, u, -hstep)).normal) /
                       (2 * hstep);
        shape_fd.add(norm(shape_operator(profile, t, u) + to_tangent(profile, p, dN)) / norm(u));

        conformal.add(conformal_check(profile, p, u) / norm(u));
        const TangentField V = [&profile](const AmbientPoint& q) {
            return AmbientTangent{profile.f(q.t), Vec::Zero(q.omega.size())};
        };
        conformal_fd.add(norm(covariant_derivative(profile, p, u, V) - fd_covariant_derivative(profile, p, u, V)) /
                         norm(u));

        // Leaf Sigma_t: horizontal vectors.
        AmbientTangent hu{0.0, u.w}, hv{0.0, v.w};
        const double f = profile.f(t), fp = profile.f_prime(t), hp = profile.h_prime(t);
        leaf_shape.add(norm(shape_operator(profile, t, hu) + hu * (hp / f)) / norm(hu));
        const TangentField dt_field = [n](const AmbientPoint&) { return AmbientTangent{1.0, Vec::Zero(n + 1)}; };
        // Weingarten map of the leaf w.r.t. d_t: A u = -(nabla_u d_t).
        const AmbientTangent weingarten = covariant_derivative(profile, p, hu, dt_field) * -1.0;
        leaf_mean.add(std::abs(dot(weingarten, hu) / dot(hu, hu) + fp / f));
        if (n >= 2) {
            // Orthonormal horizontal pair; Gauss with alpha(x, y) = -(f'/f) <x, y> d_t.
            const AmbientTangent e1 = hu * (1.0 / norm(hu));
            AmbientTangent e2 = hv - e1 * dot(hv, e1);
            e2 = e2 * (1.0 / norm(e2));
            const double ambient_k = dot(ambient_curvature(profile, t, e1, e2, e2), e1);
            const double c = fp / f;
            leaf_sectional.add(std::abs(ambient_k + c * c - 1.0 / (f * f)));
        }

        const auto ws = warp_scalars(profile, t);
        remark.add(std::max(std::abs(ws.lambda_tilde * ws.lambda_tilde - eps * ws.lambda),
                            std::abs(ws.lambda_tilde * ws.mu_tilde - eps * ws.mu)));
        arclength.add(check_arclength(profile, {t}));
    }

    ResidualReport report;
    report.stage = "ambient";
    report.add("curvature_oracle_relative", oracle.max(), oracle.mean(), 1e-6 * tol_scale);
    report.add("curvature_antisymmetry", antisym.max(), antisym.mean(), 1e-10 * tol_scale);
    report.add("curvature_skew_wz", skew.max(), skew.mean(), 1e-10 * tol_scale);
    report.add("first_bianchi", bianchi.max(), bianchi.mean(), 1e-10 * tol_scale);
    report.add("pair_symmetry", pair.max(), pair.mean(), 1e-10 * tol_scale);
    report.add("frame_orthonormality", frames.max(), frames.mean(), 1e-9 * tol_scale);
    report.add("shape_self_adjoint", adjoint.max(), adjoint.mean(), 1e-9 * tol_scale);
    report.add("shape_vs_normal_derivative", shape_fd.max(), shape_fd.mean(), 1e-6 * tol_scale);
    report.add("closed_conformal", conformal.max(), conformal.mean(), 1e-8 * tol_scale);
    report.add("connection_vs_extrinsic", conformal_fd.max(), conformal_fd.mean(), 1e-6 * tol_scale);
    report.add("leaf_shape_operator", leaf_shape.max(), leaf_shape.mean(), 1e-9 * tol_scale);
    report.add("leaf_mean_curvature", leaf_mean.max(), leaf_mean.mean(), 1e-6 * tol_scale);
    if (n >= 2) report.add("leaf_sectional_curvature", leaf_sectional.max(), leaf_sectional.mean(), 1e-9 * tol_scale);
    report.add("warp_scalar_identities", remark.max(), remark.mean(), 1e-9 * tol_scale);
    report.add("arclength", arclength.max(), arclength.mean(), 1e-12 * tol_scale);
    report.info["draws"] = draws;
    report.info["n"] = n;
    report.info["epsilon"] = eps;
    report.info["numeric_profile_derivatives"] = profile.numeric_derivatives() ? 1.0 : 0.0;
    return report;
}

} // namespace rotbonnet
