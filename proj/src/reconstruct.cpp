#include "rotbonnet/reconstruct.hpp"

#include "rotbonnet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rotbonnet {

namespace {

Mat block_frame(const Mat& g, const Mat& ge)
{
    const Eigen::Index k = g.rows(), r = ge.rows();
    Mat P = Mat::Zero(k + r + 1, k + r + 1);
    P.topLeftCorner(k, k) = orthonormal_frame(g);
    if (r) P.block(k, k, r, r) = orthonormal_frame(ge);
    P(k + r, k + r) = 1.0;
    return P;
}

Vec height_gradient(const ImmersionData& data, const Vec& u)
{
    Vec dh(data.k());
    for (int i = 0; i < data.k(); ++i) dh[i] = data.hf.d(u, i);
    return dh;
}

// Frame components of X = T + rho.
Vec position_field(const FlatLiftData& lift, const Vec& u)
{
    const int k = lift.k(), r = lift.base.e_rank;
    Vec x = Vec::Zero(k + r + 1);
    x.head(k) = gradient_t(lift.base, u);
    if (r) x.segment(k, r) = lift.base.rho(u);
    return x;
}

double tangent_norm(const ImmersionData& data, const Vec& u)
{
    const Vec T = gradient_t(data, u);
    return std::sqrt(std::max(0.0, T.dot(data.g(u) * T)));
}

// Lattice nodes from which stage `s` of the staircase starts.
bool stage_start(const std::vector<int>& idx, const std::vector<int>& order, std::size_t s)
{
    for (std::size_t j = s; j < order.size(); ++j)
        if (idx[order[j]] != 0) return false;
    return true;
}

} // namespace

FrameState base_state(const FlatLiftData& lift, const Vec& u)
{
    const int k = lift.k(), r = lift.base.e_rank;
    Mat A = Mat::Zero(k + r, k + r);
    A.topLeftCorner(k, k) = lift.base.g(u);
    if (r) A.bottomRightCorner(r, r) = lift.base.e_metric(u);
    Eigen::LLT<Mat> llt(A);
    if (llt.info() != Eigen::Success) fail(ErrorCode::ConfigError, "frame Gram matrix is not positive definite");
    FrameState s;
    s.position = Vec::Zero(k + r + 1);
    s.frame = Mat::Zero(k + r + 1, k + r + 1);
    s.frame.topLeftCorner(k + r, k + r) = Mat(llt.matrixL()).transpose();
    s.frame(k + r, k + r) = 1.0;
    return s;
}

double gram_error(const FlatLiftData& lift, const Vec& u, const Mat& frame)
{
    const Mat J = signature_matrix(frame.rows(), lift.epsilon);
    const Mat P = block_frame(lift.base.g(u), lift.base.e_metric(u));
    return max_abs(Mat(P.transpose() * (frame.transpose() * J * frame - frame_gram(lift, u)) * P));
}

std::vector<FrameState> integrate_frame(const FlatLiftData& lift, const FrameState& base,
                                        const std::vector<int>& axis_order, double gram_abort)
{
    const Chart& chart = lift.base.chart;
    const int k = chart.dim();
    if (static_cast<int>(axis_order.size()) != k) fail(ErrorCode::ConfigError, "axis order has wrong length");

    std::vector<FrameState> states(chart.node_count());
    std::vector<MatStack> omega_at(chart.node_count());
    std::vector<bool> have_omega(chart.node_count(), false);
    const auto node_omega = [&](std::size_t node) -> const MatStack& {
        if (!have_omega[node]) {
            omega_at[node] = connection_matrices(lift, chart.node(node));
            have_omega[node] = true;
        }
        return omega_at[node];
    };

    states[0] = base;
    for (std::size_t s = 0; s < axis_order.size(); ++s) {
        const int a = axis_order[s];
        const double h = chart.spacing(a);
        for (std::size_t start = 0; start < chart.node_count(); ++start) {
            std::vector<int> idx = chart.multi_index(start);
            if (!stage_start(idx, axis_order, s)) continue;
            for (int step = 1; step < chart.resolution()[a]; ++step) {
                const std::size_t from = chart.flat_index(idx);
                ++idx[a];
                const std::size_t to = chart.flat_index(idx);
                Vec mid = chart.node(from);
                mid[a] += 0.5 * h;
                const Mat& O0 = node_omega(from)[a];
                const Mat Om = connection_matrices(lift, mid)[a];
                const Mat& O1 = node_omega(to)[a];

                const Mat& F = states[from].frame;
                const Mat k1 = F * O0;
                const Mat F2 = F + 0.5 * h * k1;
                const Mat k2 = F2 * Om;
                const Mat F3 = F + 0.5 * h * k2;
                const Mat k3 = F3 * Om;
                const Mat F4 = F + h * k3;
                const Mat k4 = F4 * O1;
                FrameState next;
                next.frame = F + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4);
                // d_a g is column a of the frame along the same stages.
                next.position = states[from].position +
                                (h / 6.0) * (F.col(a) + 2 * F2.col(a) + 2 * F3.col(a) + F4.col(a));
                if (gram_error(lift, chart.node(to), next.frame) > gram_abort)
                    fail(ErrorCode::GramDrift, "frame Gram matrix drifted beyond the abort threshold");
                states[to] = std::move(next);
            }
        }
    }
    return states;
}

CenterCurve curve_of_centers(const FlatLiftData& lift, const std::vector<FrameState>& states, const Tolerances& tol,
                             CenterDiagnostics* diagnostics, int bins)
{
    const ImmersionData& data = lift.base;
    const ProfileCurve& P = data.profile;
    const Chart& chart = data.chart;
    const int eps = lift.epsilon;
    const std::size_t count = chart.node_count();

    double min_grad = 1e300;
    for (std::size_t node = 0; node < count; ++node) {
        const double tn = tangent_norm(data, chart.node(node));
        min_grad = std::min(min_grad, tn);
        if (tn < tol.submersion) fail(ErrorCode::NotSubmersion, "gradient of the height function is below tol_T");
    }

    std::vector<double> hv(count);
    std::vector<Vec> psi(count), dir(count);
    for (std::size_t node = 0; node < count; ++node) {
        const Vec u = chart.node(node);
        const Mat& F = states[node].frame;
        const double t = data.hf(u);
        const double f = P.f(t), fp = P.f_prime(t), hp = P.h_prime(t);
        const Vec X = F * position_field(lift, u);
        const Vec zeta = F.col(F.cols() - 1);
        hv[node] = t;
        psi[node] = states[node].position - f * fp * X - eps * f * hp * zeta;
        dir[node] = eps * (hp * X - fp * zeta);
    }

    const auto [lo_it, hi_it] = std::minmax_element(hv.begin(), hv.end());
    const double lo = *lo_it, width = (*hi_it - *lo_it) / bins;
    std::vector<std::vector<std::size_t>> members(bins);
    for (std::size_t node = 0; node < count; ++node) {
        const int b = std::min(bins - 1, static_cast<int>((hv[node] - lo) / width));
        members[b].push_back(node);
    }

    CenterCurve c;
    c.epsilon = eps;
    double spread = 0.0;
    for (const auto& m : members) {
        if (m.empty()) continue;
        double s = 0.0;
        for (std::size_t node : m) s += hv[node];
        s /= static_cast<double>(m.size());
        std::vector<Vec> moved;
        Vec mean = Vec::Zero(psi[m[0]].size()), dmean = mean;
        for (std::size_t node : m) {
            moved.push_back(psi[node] + (P.h(s) - P.h(hv[node])) * dir[node]);
            mean += moved.back();
            dmean += dir[node];
        }
        mean /= static_cast<double>(m.size());
        dmean /= static_cast<double>(m.size());
        for (const auto& x : moved) spread = std::max(spread, (x - mean).norm());
        c.s.push_back(s);
        c.sigma.push_back(mean);
        c.direction.push_back(dmean);
    }
    if (spread > tol.spread_abort) fail(ErrorCode::LeafSpread, "level sets of the height function do not share a center");

    // sigma is affine in h(s) along a straight line; difference in h and rescale by h'.
    const std::size_t nb = c.s.size();
    c.sigma_prime.resize(nb);
    for (std::size_t b = 0; b < nb; ++b) {
        const std::size_t i0 = b == 0 ? 0 : b - 1;
        const std::size_t i1 = b + 1 == nb ? b : b + 1;
        if (i0 == i1) {
            c.sigma_prime[b] = P.h_prime(c.s[b]) * c.direction[b];
            continue;
        }
        c.sigma_prime[b] = P.h_prime(c.s[b]) * (c.sigma[i1] - c.sigma[i0]) / (P.h(c.s[i1]) - P.h(c.s[i0]));
    }

    if (diagnostics) {
        double distance = 0.0, speed = 0.0;
        for (std::size_t b = 0; b < nb; ++b) {
            const double hp = P.h_prime(c.s[b]);
            speed = std::max(speed, std::abs(signature_dot(c.sigma_prime[b], c.sigma_prime[b], eps) - eps * hp * hp) /
                                        (hp * hp));
        }
        std::size_t b = 0;
        for (const auto& m : members) {
            if (m.empty()) continue;
            for (std::size_t node : m) {
                const Vec centre = c.sigma[b] - (P.h(c.s[b]) - P.h(hv[node])) * c.direction[b];
                const Vec d = centre - states[node].position;
                const double f = P.f(hv[node]);
                distance = std::max(distance, std::abs(signature_dot(d, d, eps) - f * f));
            }
            ++b;
        }
        diagnostics->spread = spread;
        diagnostics->distance = distance;
        diagnostics->speed = speed;
        diagnostics->min_gradient = min_grad;
    }
    return c;
}

namespace {

// Centred differences on a non-uniform grid; one-sided second order at the ends.
std::vector<Vec> differentiate(const std::vector<double>& s, const std::vector<Vec>& y)
{
    const std::size_t n = s.size();
    std::vector<Vec> d(n);
    auto three_point = [&](std::size_t i0, std::size_t i1, std::size_t i2, double x) {
        const double x0 = s[i0], x1 = s[i1], x2 = s[i2];
        const double w0 = (2 * x - x1 - x2) / ((x0 - x1) * (x0 - x2));
        const double w1 = (2 * x - x0 - x2) / ((x1 - x0) * (x1 - x2));
        const double w2 = (2 * x - x0 - x1) / ((x2 - x0) * (x2 - x1));
        return Vec(w0 * y[i0] + w1 * y[i1] + w2 * y[i2]);
    };
    for (std::size_t i = 0; i < n; ++i) {
        if (i == 0)
            d[i] = three_point(0, 1, 2, s[0]);
        else if (i + 1 == n)
            d[i] = three_point(n - 3, n - 2, n - 1, s[n - 1]);
        else
            d[i] = three_point(i - 1, i, i + 1, s[i]);
    }
    return d;
}

} // namespace

double straightness_check(const CenterCurve& c)
{
    if (c.s.size() < 5 || c.sigma.size() != c.s.size())
        fail(ErrorCode::TooFewSamples, "straightness check needs at least five center samples");
    const std::vector<Vec> d1 = c.sigma_prime.size() == c.s.size() ? c.sigma_prime : differentiate(c.s, c.sigma);
    const std::vector<Vec> d2 = differentiate(c.s, d1);
    const int eps = c.epsilon;
    double worst = 0.0;
    for (std::size_t i = 0; i < c.s.size(); ++i) {
        const double ss = signature_dot(d1[i], d1[i], eps);
        if (std::abs(ss) < 1e-300) fail(ErrorCode::DegenerateDirection, "center curve has a null tangent");
        const Vec perp = d2[i] - (signature_dot(d2[i], d1[i], eps) / ss) * d1[i];
        worst = std::max(worst, std::sqrt(std::abs(signature_dot(perp, perp, eps))) / std::abs(ss));
    }
    return worst;
}

RigidMotion normalize(const CenterCurve& c, const ProfileCurve& profile, double s0)
{
    if (c.s.empty()) fail(ErrorCode::TooFewSamples, "no center samples");
    std::size_t i0 = 0;
    for (std::size_t i = 1; i < c.s.size(); ++i)
        if (std::abs(c.s[i] - s0) < std::abs(c.s[i0] - s0)) i0 = i;
    const int eps = c.epsilon;
    const Vec& sp = c.sigma_prime.empty() ? c.direction[i0] : c.sigma_prime[i0];
    const double ss = signature_dot(sp, sp, eps);
    if (!(eps * ss > 1e-14)) fail(ErrorCode::DegenerateDirection, "center direction is null or of the wrong type");
    const Vec e_hat = sp / std::sqrt(std::abs(ss));
    const Eigen::Index N = e_hat.size();
    const Vec e = unit_vector(N, N - 1);
    const Vec m = e_hat - e;
    const double mm = signature_dot(m, m, eps);
    RigidMotion tau;
    tau.L = Mat::Identity(N, N);
    if (std::abs(mm) > 1e-14) tau.L -= (2.0 / mm) * m * (signature_matrix(N, eps) * m).transpose();
    tau.b = profile.h(c.s[i0]) * e - tau.L * c.sigma[i0];
    return tau;
}

std::vector<WarpedPoint> project_to_warped(const FlatLiftData& lift, const std::vector<FrameState>& states,
                                           const RigidMotion& tau, const Tolerances& tol,
                                           ProjectionDiagnostics* diagnostics)
{
    const ImmersionData& data = lift.base;
    const ProfileCurve& P = data.profile;
    const Chart& chart = data.chart;
    const int k = data.k(), r = data.e_rank;
    const int n1 = data.n + 1;
    ProjectionDiagnostics d;
    std::vector<WarpedPoint> out(chart.node_count());
    for (std::size_t node = 0; node < chart.node_count(); ++node) {
        const Vec u = chart.node(node);
        const Mat LF = tau.L * states[node].frame;
        const Vec y = tau(states[node].position);
        const double t = data.hf(u);
        const double f = P.f(t), fp = P.f_prime(t), hp = P.h_prime(t);
        const Vec raw = y.head(n1) / f;
        const double sphere = std::abs(raw.norm() - 1.0);
        if (sphere > tol.sphere_abort) fail(ErrorCode::SphereEscape, "recovered point leaves the sphere bundle");
        const Vec omega = raw.normalized();
        out[node] = {t, omega};

        Vec dt(n1 + 1), nt(n1 + 1);
        dt << fp * omega, hp;
        nt << hp * omega, -P.epsilon() * fp;
        const Vec X = LF * position_field(lift, u);
        const Vec zeta = LF.col(LF.cols() - 1);

        d.sphere = std::max(d.sphere, sphere);
        d.last_coordinate = std::max(d.last_coordinate, std::abs(y[n1] - P.h(t)));
        d.frame_x = std::max(d.frame_x, (X - dt).cwiseAbs().maxCoeff());
        d.frame_zeta = std::max(d.frame_zeta, (zeta - nt).cwiseAbs().maxCoeff());
        d.frame_system = std::max(d.frame_system, (fp * (X - dt) + hp * (zeta - nt)).cwiseAbs().maxCoeff());

        // Coordinate derivatives of (t, omega) read off the transported frame.
        const Vec dh = height_gradient(data, u);
        Mat domega(n1, k);
        for (int i = 0; i < k; ++i) {
            Vec w = (LF.col(i).head(n1) - fp * dh[i] * omega) / f;
            domega.col(i) = w - omega.dot(w) * omega;
        }
        const Vec T = gradient_t(data, u);
        const double a = T.dot(dh);
        const Vec w = domega * T;
        Vec pushed = a * dt;
        pushed.head(n1) += f * w;
        if (r) pushed += LF.middleCols(k, r) * data.rho(u);
        d.dt_decomposition = std::max(d.dt_decomposition, (pushed - dt).cwiseAbs().maxCoeff());

        const Mat g = data.g(u);
        const Mat M = dh * dh.transpose() + f * f * domega.transpose() * domega;
        const Mat Pt = orthonormal_frame(g);
        d.warped_metric = std::max(d.warped_metric, max_abs(Mat(Pt.transpose() * (M - g) * Pt)));
    }
    if (diagnostics) *diagnostics = d;
    return out;
}

double rigid_fit_error(const std::vector<Vec>& source, const std::vector<Vec>& target, bool translate)
{
    if (source.size() != target.size() || source.empty()) fail(ErrorCode::ConfigError, "fit needs matching samples");
    const Eigen::Index d = source[0].size();
    Vec cs = Vec::Zero(d), ct = Vec::Zero(d);
    if (translate) {
        for (std::size_t i = 0; i < source.size(); ++i) {
            cs += source[i];
            ct += target[i];
        }
        cs /= static_cast<double>(source.size());
        ct /= static_cast<double>(source.size());
    }
    Mat H = Mat::Zero(d, d);
    for (std::size_t i = 0; i < source.size(); ++i) H += (source[i] - cs) * (target[i] - ct).transpose();
    Eigen::JacobiSVD<Mat> svd(H, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Mat R = svd.matrixV() * svd.matrixU().transpose();
    double worst = 0.0;
    for (std::size_t i = 0; i < source.size(); ++i)
        worst = std::max(worst, (R * (source[i] - cs) + ct - target[i]).norm());
    return worst;
}

namespace {

// Antisymmetric part of <D_V U, X> for the T-orthogonal projections U, V of
// coordinate directions; vanishes because [V, U] hf = 0.
double leaf_torsion(const FlatLiftData& lift, const Vec& u)
{
    const ImmersionData& data = lift.base;
    const int k = data.k();
    const int N = k + lift.rank();
    auto projected = [&data, k](const Vec& x, int a) {
        const Mat g = data.g(x);
        const Vec T = gradient_t(data, x);
        Vec v = unit_vector(k, a) - (T.dot(g.col(a)) / T.dot(g * T)) * T;
        return v;
    };
    const MatStack omega = connection_matrices(lift, u);
    const Mat G = frame_gram(lift, u);
    const Vec X = position_field(lift, u);
    auto derivative = [&](int a, int b) {
        // D_{V_a} V_b in frame components
        const Vec va = projected(u, a);
        Vec out = Vec::Zero(N);
        Vec vb = Vec::Zero(N);
        vb.head(k) = projected(u, b);
        for (int i = 0; i < k; ++i) {
            const auto comp = [&](const Vec& x) { return projected(x, b); };
            Vec dvb = Vec::Zero(N);
            dvb.head(k) = central_difference(comp, u, i, relative_step(u[i]));
            out += va[i] * (dvb + omega[i] * vb);
        }
        return out;
    };
    double worst = 0.0;
    for (int a = 0; a < k; ++a)
        for (int b = a + 1; b < k; ++b)
            worst = std::max(worst, std::abs((derivative(a, b) - derivative(b, a)).dot(G * X)));
    return worst;
}

// D_v X and D_v zeta from the frame equations against their closed forms.
double transport_identities(const FlatLiftData& lift, const Vec& u)
{
    const ImmersionData& data = lift.base;
    const int k = data.k();
    const int N = k + lift.rank();
    const int eps = lift.epsilon;
    const MatStack omega = connection_matrices(lift, u);
    const Vec X = position_field(lift, u);
    const Vec dh = height_gradient(data, u);
    const double t = data.hf(u);
    const auto ws = warp_scalars(data.profile, t);
    const double c = data.profile.f_prime(t) / data.profile.f(t);
    const auto field = [&lift](const Vec& x) { return position_field(lift, x); };
    const Mat P = block_frame(data.g(u), data.e_metric(u));
    const Mat Pinv = P.inverse();
    double worst = 0.0;
    for (int v = 0; v < k; ++v) {
        const Vec ev = unit_vector(N, v);
        const Vec zeta = unit_vector(N, N - 1);
        const Vec dX = central_difference(field, u, v, relative_step(u[v])) + omega[v] * X;
        const Vec expect_x = c * (ev - dh[v] * X) + eps * dh[v] * (ws.mu_tilde - ws.lambda_tilde) * zeta;
        const Vec dz = omega[v] * zeta;
        const Vec expect_z = ws.lambda_tilde * ev - ws.mu_tilde * dh[v] * X;
        worst = std::max({worst, (Pinv * (dX - expect_x)).cwiseAbs().maxCoeff(),
                          (Pinv * (dz - expect_z)).cwiseAbs().maxCoeff()});
    }
    return worst;
}

} // namespace

ReconstructionResult reconstruct(const FlatLiftData& lift, const Tolerances& tol)
{
    const ImmersionData& data = lift.base;
    const Chart& chart = data.chart;
    const int k = data.k();
    ReconstructionResult res;
    ResidualReport& rep = res.report;
    rep.stage = "reconstruct";

    const auto interior = chart.interior_nodes();
    ResidualAccumulator curvature, torsion, transport;
    for (std::size_t node : interior) {
        const Vec u = chart.node(node);
        curvature.add(zero_curvature_defect(lift, u));
        if (k >= 2) torsion.add(leaf_torsion(lift, u));
        transport.add(transport_identities(lift, u));
    }
    if (curvature.max() > tol.curvature_abort)
        fail(ErrorCode::CurvatureTooLarge, "zero-curvature residual exceeds the integration threshold");
    rep.add("zero_curvature", curvature.max(), curvature.mean(), tol.flat);

    const FrameState base = base_state(lift, chart.node(0));
    std::vector<int> order(k);
    std::iota(order.begin(), order.end(), 0);
    res.states = integrate_frame(lift, base, order, tol.gram_abort);
    std::reverse(order.begin(), order.end());
    res.transposed = integrate_frame(lift, base, order, tol.gram_abort);

    ResidualAccumulator gram, path;
    for (std::size_t node = 0; node < chart.node_count(); ++node) {
        const Vec u = chart.node(node);
        gram.add(std::max(gram_error(lift, u, res.states[node].frame), gram_error(lift, u, res.transposed[node].frame)));
        path.add(std::max((res.states[node].position - res.transposed[node].position).cwiseAbs().maxCoeff(),
                          max_abs(Mat(res.states[node].frame - res.transposed[node].frame))));
    }
    rep.add("gram_drift", gram.max(), gram.mean(), tol.gram_report);
    rep.add("path_independence", path.max(), path.mean(), tol.path);
    if (k >= 2) rep.add("leaf_torsion", torsion.max(), torsion.mean(), tol.compat);
    rep.add("transport_identities", transport.max(), transport.mean(), tol.frame);

    CenterDiagnostics cd;
    res.centers = curve_of_centers(lift, res.states, tol, &cd);
    rep.add("center_spread", cd.spread, cd.spread, tol.spread);
    rep.add("distance_identity", cd.distance, cd.distance, tol.distance);
    rep.add("center_speed", cd.speed, cd.speed, tol.straightness);
    rep.add("straightness", straightness_check(res.centers), 0.0, tol.straightness);

    const double s_mid = 0.5 * (res.centers.s.front() + res.centers.s.back());
    res.tau = normalize(res.centers, data.profile, s_mid);
    const Eigen::Index N = res.tau.L.rows();
    const Mat J = signature_matrix(N, lift.epsilon);
    rep.add("signature_preserved", max_abs(Mat(res.tau.L.transpose() * J * res.tau.L - J)), 0.0, 1e-10);
    double axis = 0.0;
    for (std::size_t b = 0; b < res.centers.s.size(); ++b) {
        const Vec target = data.profile.h(res.centers.s[b]) * unit_vector(N, N - 1);
        axis = std::max(axis, (res.tau(res.centers.sigma[b]) - target).norm());
    }
    rep.add("centers_on_axis", axis, axis, tol.last_coordinate);

    ProjectionDiagnostics pd;
    res.warped = project_to_warped(lift, res.states, res.tau, tol, &pd);
    rep.add("sphere", pd.sphere, pd.sphere, tol.sphere);
    rep.add("last_coordinate", pd.last_coordinate, pd.last_coordinate, tol.last_coordinate);
    rep.add("frame_x_is_dt", pd.frame_x, pd.frame_x, tol.frame);
    rep.add("frame_zeta_is_normal", pd.frame_zeta, pd.frame_zeta, tol.frame);
    rep.add("frame_system", pd.frame_system, pd.frame_system, tol.frame);
    rep.add("dt_decomposition", pd.dt_decomposition, pd.dt_decomposition, tol.dt_decomposition);
    rep.add("warped_metric", pd.warped_metric, pd.warped_metric, tol.warped_metric);

    rep.info["integration_steps"] = static_cast<double>(chart.node_count() - 1);
    rep.info["center_samples"] = static_cast<double>(res.centers.s.size());
    rep.info["min_gradient_norm"] = cd.min_gradient;
    return res;
}

} // namespace rotbonnet
