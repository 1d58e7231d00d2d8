#include "rotbonnet/compat.hpp"

#include "rotbonnet/errors.hpp"

#include <cmath>
#include <string>

namespace rotbonnet {

namespace {

// Maximum of |sum T_{abcd} P_{a a'} P_{b b'} P_{c c'} P_{d d'}| for a tensor
// given as a callable on index quadruples. Dimensions may differ per slot.
template <class F>
double max_abs_transformed4(F tensor, const Mat& P0, const Mat& P1, const Mat& P2, const Mat& P3)
{
    const Eigen::Index d0 = P0.rows(), d1 = P1.rows(), d2 = P2.rows(), d3 = P3.rows();
    std::vector<double> raw(static_cast<std::size_t>(d0 * d1 * d2 * d3));
    auto at = [&](Eigen::Index a, Eigen::Index b, Eigen::Index c, Eigen::Index d) -> double& {
        return raw[static_cast<std::size_t>(((a * d1 + b) * d2 + c) * d3 + d)];
    };
    for (Eigen::Index a = 0; a < d0; ++a)
        for (Eigen::Index b = 0; b < d1; ++b)
            for (Eigen::Index c = 0; c < d2; ++c)
                for (Eigen::Index d = 0; d < d3; ++d) at(a, b, c, d) = tensor(a, b, c, d);
    double worst = 0.0;
    for (Eigen::Index A = 0; A < P0.cols(); ++A)
        for (Eigen::Index B = 0; B < P1.cols(); ++B)
            for (Eigen::Index C = 0; C < P2.cols(); ++C)
                for (Eigen::Index D = 0; D < P3.cols(); ++D) {
                    double s = 0.0;
                    for (Eigen::Index a = 0; a < d0; ++a)
                        for (Eigen::Index b = 0; b < d1; ++b)
                            for (Eigen::Index c = 0; c < d2; ++c)
                                for (Eigen::Index d = 0; d < d3; ++d)
                                    s += at(a, b, c, d) * P0(a, A) * P1(b, B) * P2(c, C) * P3(d, D);
                    worst = std::max(worst, std::abs(s));
                }
    return worst;
}

double frobenius(const Mat& m) { return m.size() ? m.norm() : 0.0; }

// Orthonormal frame of the fiber metric; empty for rank zero.
Mat fiber_frame(const Mat& ge) { return ge.size() ? orthonormal_frame(ge) : Mat(0, 0); }

} // namespace

void validate_data(const ImmersionData& data)
{
    const int k = data.k();
    if (k < 1) fail(ErrorCode::ConfigError, "chart dimension must be positive");
    if (k > data.n + 1) fail(ErrorCode::ConfigError, "chart dimension exceeds n + 1");
    if (data.e_rank != data.n + 1 - k) fail(ErrorCode::ConfigError, "e_rank must equal n + 1 - k");
    if (!data.g.eval || !data.e_metric.eval || !data.nabla_e.eval || !data.alpha.eval || !data.rho.eval ||
        !data.hf.eval)
        fail(ErrorCode::ConfigError, "immersion data has missing fields");
    const Vec u = data.chart.node(0);
    const Mat g = data.g(u);
    if (g.rows() != k || g.cols() != k) fail(ErrorCode::ConfigError, "metric has wrong shape");
    const int r = data.e_rank;
    const Mat ge = data.e_metric(u);
    if (ge.rows() != r || ge.cols() != r) fail(ErrorCode::ConfigError, "e_metric has wrong shape");
    const MatStack w = data.nabla_e(u);
    if (static_cast<int>(w.size()) != k) fail(ErrorCode::ConfigError, "nabla_e needs one matrix per coordinate");
    for (const auto& m : w)
        if (m.rows() != r || m.cols() != r) fail(ErrorCode::ConfigError, "nabla_e matrices have wrong shape");
    const MatStack al = data.alpha(u);
    if (static_cast<int>(al.size()) != r) fail(ErrorCode::ConfigError, "alpha needs one matrix per fiber index");
    for (const auto& m : al)
        if (m.rows() != k || m.cols() != k) fail(ErrorCode::ConfigError, "alpha matrices have wrong shape");
    if (data.rho(u).size() != r) fail(ErrorCode::ConfigError, "rho has wrong length");
    verify_metric(data.g, data.chart);
    if (r > 0) verify_metric(data.e_metric, data.chart);
}

Mat weingarten(const ImmersionData& data, const Vec& xi, const Vec& u)
{
    const int k = data.k();
    const MatStack al = data.alpha(u);
    const Vec xi_low = data.e_metric(u) * xi;
    Mat s = Mat::Zero(k, k);
    for (int a = 0; a < data.e_rank; ++a) s += xi_low[a] * al[a];
    return data.g(u).ldlt().solve(s);
}

Vec gradient_t(const ImmersionData& data, const Vec& u) { return gradient(data.hf, data.g, u); }

ResidualReport check_compat(const ImmersionData& data, double tol)
{
    const int k = data.k();
    const int r = data.e_rank;
    const ProfileCurve& P = data.profile;
    const Chart& chart = data.chart;

    for (std::size_t node = 0; node < chart.node_count(); ++node) {
        const double t = data.hf(chart.node(node));
        if (!P.contains(t)) fail(ErrorCode::DomainEscape, "height function leaves the profile interval");
    }

    ResidualAccumulator unit, grad, eq14, eq15, gauss, codazzi, ricci, symmetry, fiber, sectional;
    for (std::size_t node : chart.interior_nodes()) {
        const Vec u = chart.node(node);
        const Mat g = data.g(u);
        const Mat ginv = g.inverse();
        const Mat Pt = orthonormal_frame(g);
        const Mat ge = data.e_metric(u);
        const Mat Pe = fiber_frame(ge);
        const Mat Pe_inv = r ? Mat(Pe.inverse()) : Mat(0, 0);
        const Mat Pt_inv = Pt.inverse();
        const MatStack gamma = christoffels(data.g, u);
        const MatStack W = data.nabla_e(u);
        const MatStack al = data.alpha(u);
        const Vec rho = data.rho(u);

        Vec dh(k);
        for (int i = 0; i < k; ++i) dh[i] = data.hf.d(u, i);
        const Vec T = ginv * dh;
        const double t = data.hf(u);
        const double c = P.f_prime(t) / P.f(t);
        const auto ws = warp_scalars(P, t);

        unit.add(std::abs(T.dot(dh) + rho.dot(ge * rho) - 1.0));

        if (data.t_explicit) {
            const Vec d = (*data.t_explicit)(u)-T;
            grad.add(std::sqrt(std::max(0.0, d.dot(g * d))));
        } else {
            grad.add(0.0);
        }

        // alpha'(d_i, T) + nabla'_i rho + c <d_i, T> rho
        Mat m14 = Mat::Zero(r, k);
        for (int i = 0; i < k; ++i) {
            Vec col = data.rho.d(u, i) + W[i] * rho + c * dh[i] * rho;
            for (int a = 0; a < r; ++a) col[a] += al[a].row(i).dot(T);
            m14.col(i) = col;
        }
        eq14.add(r ? frobenius(Pe_inv * m14 * Pt) : 0.0);

        // nabla_i T - A'_rho d_i - c (d_i - <d_i, T> T)
        const Mat a_rho = r ? weingarten(data, rho, u) : Mat(Mat::Zero(k, k));
        const auto grad_at = [&data](const Vec& x) { return gradient_t(data, x); };
        Mat m15(k, k);
        for (int i = 0; i < k; ++i) {
            Vec col = central_difference(grad_at, u, i, relative_step(u[i]));
            for (int m = 0; m < k; ++m) col[m] += gamma[m].row(i).dot(T);
            col -= a_rho.col(i);
            col -= c * (unit_vector(k, i) - dh[i] * T);
            m15.col(i) = col;
        }
        eq15.add(frobenius(Pt_inv * m15 * Pt));

        // Gauss
        const RiemannTensor R = intrinsic_riemann(data.g, u);
        auto ip_alpha = [&](int i, int j, int p, int q) {
            double s = 0.0;
            for (int a = 0; a < r; ++a)
                for (int b = 0; b < r; ++b) s += al[a](i, j) * ge(a, b) * al[b](p, q);
            return s;
        };
        // (a, b, c, d) = <b, c><a, d> - <a, c><b, d>, with T filling a slot via dh.
        auto quad = [&](double bc, double ad, double ac, double bd) { return bc * ad - ac * bd; };
        auto gauss_defect = [&](Eigen::Index i, Eigen::Index j, Eigen::Index kk, Eigen::Index l) {
            const double lhs = R.lowered(int(i), int(j), int(kk), int(l));
            const double lam = quad(g(j, kk), g(i, l), g(i, kk), g(j, l));
            const double jitl = quad(dh[i], g(j, l), dh[j], g(i, l));
            const double ijkt = quad(g(j, kk), dh[i], g(i, kk), dh[j]);
            const double rhs = ws.lambda * lam + ws.mu * (dh[kk] * jitl - ijkt * dh[l]) +
                               ip_alpha(int(j), int(kk), int(i), int(l)) - ip_alpha(int(i), int(kk), int(j), int(l));
            return lhs - rhs;
        };
        gauss.add(max_abs_transformed4(gauss_defect, Pt, Pt, Pt, Pt));
        if (k >= 2) sectional.add(R.sectional(0, 1));

        // Codazzi: (nabla_i alpha)(j, l) - (nabla_j alpha)(i, l) = -mu (g_jl T_i - g_il T_j) rho
        if (r > 0) {
            std::vector<MatStack> dal(k);
            for (int i = 0; i < k; ++i) dal[i] = data.alpha.d(u, i);
            auto cov = [&](int a, int i, int j, int l) {
                double s = dal[i][a](j, l);
                for (int b = 0; b < r; ++b) s += W[i](a, b) * al[b](j, l);
                for (int m = 0; m < k; ++m) s -= gamma[m](i, j) * al[a](m, l) + gamma[m](i, l) * al[a](j, m);
                return s;
            };
            auto codazzi_defect = [&](Eigen::Index a, Eigen::Index i, Eigen::Index j, Eigen::Index l) {
                const int A = int(a), I = int(i), J = int(j), L = int(l);
                return cov(A, I, J, L) - cov(A, J, I, L) + ws.mu * (g(J, L) * dh[I] - g(I, L) * dh[J]) * rho[A];
            };
            const Mat Ptrans = Pe_inv.transpose();
            codazzi.add(max_abs_transformed4(codazzi_defect, Ptrans, Pt, Pt, Pt));
        } else {
            codazzi.add(0.0);
        }

        // Ricci: <R'(d_i, d_j) e_b, e_a> = <[A_b, A_a] d_i, d_j>
        if (r > 0) {
            std::vector<MatStack> dW(k);
            for (int i = 0; i < k; ++i) dW[i] = data.nabla_e.d(u, i);
            MatStack S(r, Mat::Zero(k, k));
            for (int b = 0; b < r; ++b)
                for (int cc = 0; cc < r; ++cc) S[b] += ge(cc, b) * al[cc];
            std::vector<Mat> lhs(k * k), rhs(k * k);
            for (int i = 0; i < k; ++i)
                for (int j = 0; j < k; ++j) {
                    const Mat Rp = dW[i][j] - dW[j][i] + W[i] * W[j] - W[j] * W[i];
                    lhs[i * k + j] = ge * Rp;
                    Mat m(r, r);
                    for (int a = 0; a < r; ++a)
                        for (int b = 0; b < r; ++b)
                            m(a, b) = (S[b] * ginv * S[a] - S[a] * ginv * S[b])(j, i);
                    rhs[i * k + j] = m;
                }
            auto ricci_defect = [&](Eigen::Index i, Eigen::Index j, Eigen::Index a, Eigen::Index b) {
                return lhs[i * k + j](a, b) - rhs[i * k + j](a, b);
            };
            ricci.add(max_abs_transformed4(ricci_defect, Pt, Pt, Pe, Pe));

            double asym = 0.0;
            for (int a = 0; a < r; ++a) asym = std::max(asym, max_abs(Mat(Pt.transpose() * (al[a] - al[a].transpose()) * Pt)));
            symmetry.add(asym);

            double fib = 0.0;
            for (int i = 0; i < k; ++i) {
                const Mat d = data.e_metric.d(u, i) - W[i].transpose() * ge - ge * W[i];
                fib = std::max(fib, max_abs(Mat(Pe.transpose() * d * Pe)));
            }
            fiber.add(fib);
        } else {
            ricci.add(0.0);
            symmetry.add(0.0);
            fiber.add(0.0);
        }
    }

    ResidualReport report;
    report.stage = "compat";
    report.add("unit_norm", unit.max(), unit.mean(), tol);
    report.add("gradient", grad.max(), grad.mean(), tol);
    report.add("normal_conformal", eq14.max(), eq14.mean(), tol);
    report.add("tangent_conformal", eq15.max(), eq15.mean(), tol);
    report.add("gauss", gauss.max(), gauss.mean(), tol);
    report.add("codazzi", codazzi.max(), codazzi.mean(), tol);
    report.add("ricci", ricci.max(), ricci.mean(), tol);
    report.add("alpha_symmetry", symmetry.max(), symmetry.mean(), tol);
    report.add("fiber_metric_compatibility", fiber.max(), fiber.mean(), tol);
    if (k >= 2) report.info["intrinsic_sectional_curvature_mean"] = sectional.mean();
    report.info["interior_nodes"] = static_cast<double>(unit.count());
    report.info["explicit_gradient"] = data.t_explicit ? 1.0 : 0.0;
    return report;
}

Vec immersion_point(const ProfileCurve& profile, const AnalyticImmersion& x, const Vec& u)
{
    const double t = x.t(u);
    const Vec omega = x.omega(u);
    Vec p(omega.size() + 1);
    p.head(omega.size()) = profile.f(t) * omega;
    p[omega.size()] = profile.h(t);
    return p;
}

Mat immersion_jacobian(const ProfileCurve& profile, const AnalyticImmersion& x, const Vec& u)
{
    const double t = x.t(u);
    const Vec omega = x.omega(u);
    const Vec dt = x.dt(u);
    const Mat domega = x.domega(u);
    const auto n1 = omega.size();
    Vec d_t(n1 + 1);
    d_t.head(n1) = profile.f_prime(t) * omega;
    d_t[n1] = profile.h_prime(t);
    Mat J(n1 + 1, dt.size());
    for (Eigen::Index j = 0; j < dt.size(); ++j) {
        J.col(j) = dt[j] * d_t;
        J.col(j).head(n1) += profile.f(t) * domega.col(j);
    }
    return J;
}

Mat immersion_jacobian_derivative(const ProfileCurve& profile, const AnalyticImmersion& x, const Vec& u, int i)
{
    if (!x.has_second_derivatives()) {
        const auto jac = [&](const Vec& p) { return immersion_jacobian(profile, x, p); };
        return central_difference(jac, u, i, relative_step(u[i]));
    }
    const double t = x.t(u);
    const Vec omega = x.omega(u);
    const Vec dt = x.dt(u);
    const Mat ddt = x.ddt(u);
    const Mat domega = x.domega(u);
    const Mat ddomega = x.ddomega(u)[i];
    const auto n1 = omega.size();
    const double f = profile.f(t), fp = profile.f_prime(t);
    Vec d_t(n1 + 1), dd_t(n1 + 1);
    d_t.head(n1) = fp * omega;
    d_t[n1] = profile.h_prime(t);
    // d_i of the ambient field d_t along the immersion
    dd_t.head(n1) = dt[i] * profile.f_second(t) * omega + fp * domega.col(i);
    dd_t[n1] = dt[i] * profile.h_second(t);
    Mat out(n1 + 1, dt.size());
    for (Eigen::Index j = 0; j < dt.size(); ++j) {
        out.col(j) = ddt(i, j) * d_t + dt[j] * dd_t;
        out.col(j).head(n1) += fp * dt[i] * domega.col(j) + f * ddomega.col(j);
    }
    return out;
}

namespace {

Vec ambient_dt(const ProfileCurve& profile, double t, const Vec& omega)
{
    const auto n1 = omega.size();
    Vec d(n1 + 1);
    d.head(n1) = profile.f_prime(t) * omega;
    d[n1] = profile.h_prime(t);
    return d;
}

Vec ambient_normal(const ProfileCurve& profile, double t, const Vec& omega)
{
    const auto n1 = omega.size();
    Vec d(n1 + 1);
    d.head(n1) = profile.h_prime(t) * omega;
    d[n1] = -profile.epsilon() * profile.f_prime(t);
    return d;
}

// Columns spanning the tangent space of the immersion and the normal of M-bar.
Mat excluded_span(const ProfileCurve& profile, const AnalyticImmersion& x, const Vec& u)
{
    const Mat J = immersion_jacobian(profile, x, u);
    Mat B(J.rows(), J.cols() + 1);
    B.leftCols(J.cols()) = J;
    B.col(J.cols()) = ambient_normal(profile, x.t(u), x.omega(u));
    return B;
}

// Signature-orthogonal projection of the columns of V away from span(B).
Mat project_away(const Mat& V, const Mat& B, int eps)
{
    const Mat S = signature_matrix(B.rows(), eps);
    const Mat H = B.transpose() * S * B;
    return V - B * H.fullPivLu().solve(B.transpose() * S * V);
}

// Gram-Schmidt in the signature form; all vectors here are spacelike.
// Returns false if a column loses more than the allowed fraction of its length.
bool orthonormalise(Mat& V, int eps, double min_norm)
{
    for (Eigen::Index a = 0; a < V.cols(); ++a) {
        for (Eigen::Index b = 0; b < a; ++b) V.col(a) -= signature_dot(V.col(b), V.col(a), eps) * V.col(b);
        const double nn = signature_dot(V.col(a), V.col(a), eps);
        if (!(nn > min_norm * min_norm)) return false;
        V.col(a) /= std::sqrt(nn);
    }
    return true;
}

Mat reference_frame(const AnalyticImmersion& x, const ProfileCurve& profile, const Chart& chart, int r)
{
    const int eps = profile.epsilon();
    const Vec u0 = chart.node(0);
    const Mat B = excluded_span(profile, x, u0);
    const Eigen::Index N = B.rows();
    // Greedy choice of standard basis vectors with the largest projected residual.
    Mat chosen(N, 0);
    Mat candidates = project_away(Mat::Identity(N, N), B, eps);
    for (int a = 0; a < r; ++a) {
        Eigen::Index best = -1;
        double best_norm = 0.0;
        for (Eigen::Index j = 0; j < N; ++j) {
            Vec v = candidates.col(j);
            for (Eigen::Index b = 0; b < chosen.cols(); ++b)
                v -= signature_dot(chosen.col(b), v, eps) * chosen.col(b);
            const double nn = signature_dot(v, v, eps);
            if (nn > best_norm) {
                best_norm = nn;
                best = j;
            }
        }
        if (best < 0 || best_norm < 1e-8) fail(ErrorCode::RankDeficient, "normal space at the base corner is degenerate");
        Vec v = candidates.col(best);
        for (Eigen::Index b = 0; b < chosen.cols(); ++b) v -= signature_dot(chosen.col(b), v, eps) * chosen.col(b);
        chosen.conservativeResize(N, chosen.cols() + 1);
        chosen.col(chosen.cols() - 1) = v / std::sqrt(signature_dot(v, v, eps));
    }
    return chosen;
}

Mat normal_frame_from(const Mat& reference, const AnalyticImmersion& x, const ProfileCurve& profile, const Vec& u)
{
    Mat V = project_away(reference, excluded_span(profile, x, u), profile.epsilon());
    if (!orthonormalise(V, profile.epsilon(), 0.1))
        fail(ErrorCode::FrameFlip, "normal frame cannot be continued from the base corner");
    return V;
}

} // namespace

Mat extracted_normal_frame(const AnalyticImmersion& x, const ProfileCurve& profile, const Chart& chart, const Vec& u)
{
    const int n1 = static_cast<int>(x.omega(chart.node(0)).size());
    const int r = n1 - chart.dim();
    return normal_frame_from(reference_frame(x, profile, chart, r), x, profile, u);
}

ImmersionData extract_data(const AnalyticImmersion& x, const ProfileCurve& profile, const Chart& chart, int n)
{
    const int k = chart.dim();
    const int r = n + 1 - k;
    if (r < 0) fail(ErrorCode::ConfigError, "chart dimension exceeds n + 1");
    const int eps = profile.epsilon();
    const Mat S = signature_matrix(n + 2, eps);

    for (std::size_t node = 0; node < chart.node_count(); ++node) {
        const Vec u = chart.node(node);
        if (!profile.contains(x.t(u))) fail(ErrorCode::DomainEscape, "immersion leaves the profile interval");
        if (x.omega(u).size() != n + 1) fail(ErrorCode::ConfigError, "omega has wrong length");
        const Mat J = immersion_jacobian(profile, x, u);
        const Eigen::SelfAdjointEigenSolver<Mat> es(J.transpose() * S * J);
        if (es.eigenvalues().minCoeff() <= 1e-10 * std::max(1.0, es.eigenvalues().maxCoeff()))
            fail(ErrorCode::RankDeficient, "pushforward drops rank");
    }

    const Mat reference = reference_frame(x, profile, chart, r);
    const auto frame = [reference, x, profile](const Vec& u) { return normal_frame_from(reference, x, profile, u); };
    for (std::size_t node = 0; node < chart.node_count(); ++node) frame(chart.node(node));

    const Domain domain = chart.domain();
    ImmersionData data;
    data.chart = chart;
    data.n = n;
    data.profile = profile;
    data.e_rank = r;

    data.g.eval = [x, profile, S](const Vec& u) {
        const Mat J = immersion_jacobian(profile, x, u);
        return Mat(J.transpose() * S * J);
    };
    data.g.domain = domain;
    if (x.has_second_derivatives())
        data.g.partial = [x, profile, S](const Vec& u, int i) {
            const Mat J = immersion_jacobian(profile, x, u);
            const Mat dJ = immersion_jacobian_derivative(profile, x, u, i);
            const Mat half = J.transpose() * S * dJ;
            return Mat(half + half.transpose());
        };

    data.e_metric = constant_field<Mat>(Mat::Identity(r, r));
    data.e_metric.domain = domain;

    data.rho.eval = [x, profile, S, frame](const Vec& u) {
        return Vec(frame(u).transpose() * S * ambient_dt(profile, x.t(u), x.omega(u)));
    };
    data.rho.domain = domain;

    data.alpha.eval = [x, profile, S, frame, k, r](const Vec& u) {
        const Mat nu = frame(u);
        MatStack al(r, Mat::Zero(k, k));
        for (int i = 0; i < k; ++i) {
            const Mat dJ = immersion_jacobian_derivative(profile, x, u, i);
            const Mat proj = nu.transpose() * S * dJ; // r x k, row a, column j
            for (int a = 0; a < r; ++a) al[a].row(i) = proj.row(a);
        }
        for (auto& m : al) m = 0.5 * (m + m.transpose()).eval();
        return al;
    };
    data.alpha.domain = domain;

    data.nabla_e.eval = [S, frame, k](const Vec& u) {
        const Mat nu = frame(u);
        MatStack W(k);
        for (int i = 0; i < k; ++i) {
            const Mat dnu = central_difference(frame, u, i, relative_step(u[i]));
            const Mat w = nu.transpose() * S * dnu;
            W[i] = 0.5 * (w - w.transpose());
        }
        return W;
    };
    data.nabla_e.domain = domain;

    data.hf.eval = [x](const Vec& u) { return x.t(u); };
    data.hf.partial = [x](const Vec& u, int i) { return x.dt(u)[i]; };
    data.hf.domain = domain;

    VectorField t_explicit;
    t_explicit.eval = [x, profile, S](const Vec& u) {
        const Mat J = immersion_jacobian(profile, x, u);
        const Vec lowered = J.transpose() * S * ambient_dt(profile, x.t(u), x.omega(u));
        return Vec((J.transpose() * S * J).ldlt().solve(lowered));
    };
    t_explicit.domain = domain;
    data.t_explicit = t_explicit;
    return data;
}

} // namespace rotbonnet
