#include "rotbonnet/liftflat.hpp"

#include "rotbonnet/errors.hpp"

#include <cmath>

namespace rotbonnet {

namespace {

Vec height_gradient(const ImmersionData& data, const Vec& u)
{
    Vec dh(data.k());
    for (int i = 0; i < data.k(); ++i) dh[i] = data.hf.d(u, i);
    return dh;
}

Mat block_frame(const Mat& g, const Mat& ge)
{
    const Eigen::Index k = g.rows(), r = ge.rows();
    Mat P = Mat::Zero(k + r + 1, k + r + 1);
    P.topLeftCorner(k, k) = orthonormal_frame(g);
    if (r) P.block(k, k, r, r) = orthonormal_frame(ge);
    P(k + r, k + r) = 1.0;
    return P;
}

} // namespace

WhitneyDerivative whitney_derivative(const ImmersionData& data, int v, const Vec& u)
{
    const int k = data.k(), r = data.e_rank;
    const MatStack gamma = christoffels(data.g, u);
    const MatStack al = data.alpha(u);
    const MatStack W = data.nabla_e(u);
    const Vec T = gradient_t(data, u);
    const Vec rho = data.rho(u);
    const auto grad_at = [&data](const Vec& x) { return gradient_t(data, x); };

    WhitneyDerivative out;
    // nabla_v T - A'_rho d_v
    out.tangent = central_difference(grad_at, u, v, relative_step(u[v]));
    for (int m = 0; m < k; ++m) out.tangent[m] += gamma[m].row(v).dot(T);
    if (r) out.tangent -= weingarten(data, rho, u).col(v);
    // alpha'(d_v, T) + nabla'_v rho
    out.normal = data.rho.d(u, v) + W[v] * rho;
    for (int a = 0; a < r; ++a) out.normal[a] += al[a].row(v).dot(T);
    return out;
}

ResidualReport whitney_report(const ImmersionData& data, double tol)
{
    const int k = data.k(), r = data.e_rank;
    const ProfileCurve& P = data.profile;
    ResidualAccumulator eq19, conformal;
    for (std::size_t node : data.chart.interior_nodes()) {
        const Vec u = data.chart.node(node);
        const Mat g = data.g(u);
        const Mat ge = data.e_metric(u);
        const Vec dh = height_gradient(data, u);
        const Vec T = g.ldlt().solve(dh);
        const Vec rho = data.rho(u);
        const double t = data.hf(u);
        const double f = P.f(t), fp = P.f_prime(t);
        auto norm = [&](const Vec& a, const Vec& b) {
            return std::sqrt(std::max(0.0, a.dot(g * a) + (r ? b.dot(ge * b) : 0.0)));
        };
        for (int v = 0; v < k; ++v) {
            const auto d = whitney_derivative(data, v, u);
            const Vec ev = unit_vector(k, v);
            const Vec tan = d.tangent - (fp / f) * (ev - dh[v] * T);
            const Vec nor = d.normal + (fp / f) * dh[v] * rho;
            eq19.add(norm(tan, nor) / std::sqrt(g(v, v)));
            // v(f(hf)) X + f nabla''_v X - f' d_v
            const Vec tan2 = fp * dh[v] * T + f * d.tangent - fp * ev;
            const Vec nor2 = fp * dh[v] * rho + f * d.normal;
            conformal.add(norm(tan2, nor2) / std::sqrt(g(v, v)));
        }
    }
    ResidualReport report;
    report.stage = "whitney";
    report.add("position_field_derivative", eq19.max(), eq19.mean(), tol);
    report.add("closed_conformal_lift", conformal.max(), conformal.mean(), tol);
    return report;
}

FlatLiftData build_lift(const ImmersionData& data)
{
    const ProfileCurve& P = data.profile;
    const int eps = P.epsilon();
    const int k = data.k(), r = data.e_rank;
    for (std::size_t node = 0; node < data.chart.node_count(); ++node) {
        const double t = data.hf(data.chart.node(node));
        if (!P.contains(t)) fail(ErrorCode::DomainEscape, "height function leaves the profile interval");
        const double fp = P.f_prime(t);
        if (!(eps * (1.0 - fp * fp) > 0.0))
            fail(ErrorCode::LiftHypothesisViolated, "eps (1 - f'^2) is not positive on the chart");
    }

    FlatLiftData lift;
    lift.base = data;
    lift.epsilon = eps;
    const Domain domain = data.chart.domain();

    lift.lambda_tilde.eval = [data](const Vec& u) { return warp_scalars(data.profile, data.hf(u)).lambda_tilde; };
    lift.lambda_tilde.domain = domain;
    lift.mu_tilde.eval = [data](const Vec& u) { return warp_scalars(data.profile, data.hf(u)).mu_tilde; };
    lift.mu_tilde.domain = domain;

    lift.metric.eval = [data, eps, r](const Vec& u) {
        Mat m = Mat::Zero(r + 1, r + 1);
        if (r) m.topLeftCorner(r, r) = data.e_metric(u);
        m(r, r) = eps;
        return m;
    };
    lift.metric.domain = domain;

    // alpha_check(u, v) = alpha'(u, v) + eps (-lt <u, v> + mt <u, X><v, X>) zeta
    lift.alpha.eval = [data, eps, r](const Vec& u) {
        const auto ws = warp_scalars(data.profile, data.hf(u));
        const Vec dh = height_gradient(data, u);
        MatStack out = data.alpha(u);
        out.resize(r + 1);
        out[r] = eps * (-ws.lambda_tilde * data.g(u) + ws.mu_tilde * dh * dh.transpose());
        return out;
    };
    lift.alpha.domain = domain;

    // nabla_i zeta = -mt T_i rho; nabla_i e_b = nabla'_i e_b + eps mt T_i <e_b, rho> zeta.
    lift.nabla.eval = [data, eps, k, r](const Vec& u) {
        const double mt = warp_scalars(data.profile, data.hf(u)).mu_tilde;
        const Vec dh = height_gradient(data, u);
        const Vec rho = data.rho(u);
        const Vec rho_low = r ? Vec(data.e_metric(u) * rho) : Vec(0);
        const MatStack W = data.nabla_e(u);
        MatStack out(k, Mat::Zero(r + 1, r + 1));
        for (int i = 0; i < k; ++i) {
            if (r) {
                out[i].topLeftCorner(r, r) = W[i];
                out[i].block(0, r, r, 1) = -mt * dh[i] * rho;
                out[i].block(r, 0, 1, r) = eps * mt * dh[i] * rho_low.transpose();
            }
        }
        return out;
    };
    lift.nabla.domain = domain;
    return lift;
}

Mat frame_gram(const FlatLiftData& lift, const Vec& u)
{
    const int k = lift.k(), R = lift.rank();
    Mat G = Mat::Zero(k + R, k + R);
    G.topLeftCorner(k, k) = lift.base.g(u);
    G.bottomRightCorner(R, R) = lift.metric(u);
    return G;
}

MatStack connection_matrices(const FlatLiftData& lift, const Vec& u)
{
    const int k = lift.k(), R = lift.rank();
    const MatStack gamma = christoffels(lift.base.g, u);
    const MatStack al = lift.alpha(u);
    const MatStack nab = lift.nabla(u);
    const Mat g = lift.base.g(u);
    const Mat ge = lift.metric(u);
    MatStack omega(k, Mat::Zero(k + R, k + R));
    for (int i = 0; i < k; ++i) {
        Mat a_i(R, k); // a_i(A, j) = alpha^A_ij
        for (int A = 0; A < R; ++A) a_i.row(A) = al[A].row(i);
        Mat gam(k, k); // gam(m, j) = Gamma^m_ij
        for (int m = 0; m < k; ++m) gam.row(m) = gamma[m].row(i);
        Mat& O = omega[i];
        O.topLeftCorner(k, k) = gam;
        O.bottomLeftCorner(R, k) = a_i;
        O.topRightCorner(k, R) = -g.ldlt().solve(a_i.transpose() * ge);
        O.bottomRightCorner(R, R) = nab[i];
    }
    return omega;
}

double zero_curvature_defect(const FlatLiftData& lift, const Vec& u)
{
    const int k = lift.k();
    const MatStack omega = connection_matrices(lift, u);
    const auto at = [&lift](const Vec& x) { return connection_matrices(lift, x); };
    std::vector<MatStack> d(k);
    for (int i = 0; i < k; ++i) d[i] = central_difference(at, u, i, relative_step(u[i]));
    const Mat P = block_frame(lift.base.g(u), lift.base.e_metric(u));
    const Mat Pinv = P.inverse();
    double worst = 0.0;
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) {
            const Mat C = d[i][j] - d[j][i] + omega[i] * omega[j] - omega[j] * omega[i];
            worst = std::max(worst, max_abs(Mat(Pinv * C * P)));
        }
    return worst;
}

ResidualReport flat_compat_residual(const FlatLiftData& lift, double tol)
{
    const ImmersionData& data = lift.base;
    const int k = lift.k(), R = lift.rank(), eps = lift.epsilon;
    ResidualAccumulator flat, parallel, symmetry, fiber, remark, level, unit;
    for (std::size_t node : data.chart.interior_nodes()) {
        const Vec u = data.chart.node(node);
        flat.add(zero_curvature_defect(lift, u));

        const MatStack omega = connection_matrices(lift, u);
        const Mat G = frame_gram(lift, u);
        const Mat P = block_frame(data.g(u), data.e_metric(u));
        double par = 0.0;
        for (int i = 0; i < k; ++i) {
            Mat dG = Mat::Zero(k + R, k + R);
            dG.topLeftCorner(k, k) = data.g.d(u, i);
            if (R > 1) dG.block(k, k, R - 1, R - 1) = data.e_metric.d(u, i);
            const Mat defect = dG - omega[i].transpose() * G - G * omega[i];
            par = std::max(par, max_abs(Mat(P.transpose() * defect * P)));
        }
        parallel.add(par);

        const MatStack al = lift.alpha(u);
        double sym = 0.0;
        for (const auto& m : al) sym = std::max(sym, max_abs(Mat(m - m.transpose())));
        symmetry.add(sym);

        const Mat ge = lift.metric(u);
        double fib = 0.0;
        const MatStack nab = lift.nabla(u);
        for (int i = 0; i < k; ++i) {
            const Mat d = lift.metric.d(u, i) - nab[i].transpose() * ge - ge * nab[i];
            fib = std::max(fib, max_abs(d));
        }
        fiber.add(fib);

        const auto ws = warp_scalars(data.profile, data.hf(u));
        remark.add(std::max(std::abs(ws.lambda_tilde * ws.lambda_tilde - eps * ws.lambda),
                            std::abs(ws.lambda_tilde * ws.mu_tilde - eps * ws.mu)));

        // Directions orthogonal to T do not change hf, f(hf) or h(hf).
        const Mat g = data.g(u);
        const Vec T = gradient_t(data, u);
        const double tt = T.dot(g * T);
        double lev = 0.0;
        for (int i = 0; i < k; ++i) {
            Vec v = unit_vector(k, i);
            if (tt > 1e-14) v -= (T.dot(g * v) / tt) * T;
            const double s = relative_step(0.0);
            const Vec up = u + s * v, um = u - s * v;
            const double hp = data.hf(up), hm = data.hf(um);
            const ProfileCurve& Pf = data.profile;
            lev = std::max({lev, std::abs(hp - hm) / (2 * s), std::abs(Pf.f(hp) - Pf.f(hm)) / (2 * s),
                            std::abs(Pf.h(hp) - Pf.h(hm)) / (2 * s)});
        }
        level.add(lev);

        const Vec rho = data.rho(u);
        unit.add(std::abs(tt + (R > 1 ? rho.dot(data.e_metric(u) * rho) : 0.0) - 1.0));
    }
    ResidualReport report;
    report.stage = "lift";
    report.add("zero_curvature", flat.max(), flat.mean(), tol);
    report.add("metric_parallelism", parallel.max(), parallel.mean(), tol);
    report.add("lifted_alpha_symmetry", symmetry.max(), symmetry.mean(), tol);
    report.add("lifted_fiber_compatibility", fiber.max(), fiber.mean(), tol);
    report.add("warp_scalar_identities", remark.max(), remark.mean(), 1e-9);
    report.add("level_set_constancy", level.max(), level.mean(), tol);
    report.add("position_field_unit_norm", unit.max(), unit.mean(), tol);
    return report;
}

} // namespace rotbonnet
