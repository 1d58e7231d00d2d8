#include "rotbonnet/chartfields.hpp"

#include <string>

namespace rotbonnet {

Chart::Chart(std::vector<double> lo, std::vector<double> hi, std::vector<int> resolution)
    : lo_(std::move(lo)), hi_(std::move(hi)), resolution_(std::move(resolution))
{
    if (lo_.empty() || lo_.size() != hi_.size() || lo_.size() != resolution_.size())
        fail(ErrorCode::ConfigError, "chart box and resolution must have matching dimension >= 1");
    count_ = 1;
    for (std::size_t i = 0; i < lo_.size(); ++i) {
        if (!(lo_[i] < hi_[i])) fail(ErrorCode::ConfigError, "chart box is degenerate on axis " + std::to_string(i));
        if (resolution_[i] < 3) fail(ErrorCode::ConfigError, "chart resolution must be >= 3 on every axis");
        count_ *= static_cast<std::size_t>(resolution_[i]);
    }
}

std::vector<int> Chart::multi_index(std::size_t flat) const
{
    std::vector<int> idx(lo_.size());
    for (int a = dim() - 1; a >= 0; --a) {
        idx[a] = static_cast<int>(flat % resolution_[a]);
        flat /= resolution_[a];
    }
    return idx;
}

std::size_t Chart::flat_index(const std::vector<int>& index) const
{
    std::size_t flat = 0;
    for (int a = 0; a < dim(); ++a) flat = flat * resolution_[a] + index[a];
    return flat;
}

double Chart::spacing(int axis) const { return (hi_[axis] - lo_[axis]) / (resolution_[axis] - 1); }

Vec Chart::node(const std::vector<int>& index) const
{
    Vec u(dim());
    for (int a = 0; a < dim(); ++a) u[a] = lo_[a] + index[a] * spacing(a);
    return u;
}

Vec Chart::node(std::size_t flat) const { return node(multi_index(flat)); }

bool Chart::on_boundary(std::size_t flat) const
{
    const auto idx = multi_index(flat);
    for (int a = 0; a < dim(); ++a)
        if (idx[a] == 0 || idx[a] == resolution_[a] - 1) return true;
    return false;
}

std::vector<std::size_t> Chart::interior_nodes() const
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < count_; ++i)
        if (!on_boundary(i)) out.push_back(i);
    return out;
}

Domain Chart::domain(double relative_margin) const
{
    Domain d{Vec(dim()), Vec(dim())};
    for (int a = 0; a < dim(); ++a) {
        const double pad = relative_margin * (hi_[a] - lo_[a]);
        d.lo[a] = lo_[a] - pad;
        d.hi[a] = hi_[a] + pad;
    }
    return d;
}

void verify_metric(const MetricField& g, const Chart& chart)
{
    for (std::size_t i = 0; i < chart.node_count(); ++i) {
        const Mat m = g(chart.node(i));
        if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + m.cwiseAbs().maxCoeff()))
            fail(ErrorCode::ConfigError, "metric is not symmetric at node " + std::to_string(i));
        Eigen::LLT<Mat> llt(m);
        if (llt.info() != Eigen::Success)
            fail(ErrorCode::ConfigError, "metric is not positive definite at node " + std::to_string(i));
    }
}

MatStack christoffels(const MetricField& g, const Vec& u, double rel)
{
    const int k = static_cast<int>(u.size());
    const Mat ginv = g(u).inverse();
    std::vector<Mat> dg(k);
    for (int i = 0; i < k; ++i) dg[i] = g.d(u, i, rel);
    // Gamma_{l,ij} = 1/2 (d_i g_jl + d_j g_il - d_l g_ij)
    MatStack lowered(k, Mat::Zero(k, k));
    for (int l = 0; l < k; ++l)
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j)
                lowered[l](i, j) = 0.5 * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
    MatStack gamma(k, Mat::Zero(k, k));
    for (int m = 0; m < k; ++m)
        for (int l = 0; l < k; ++l) gamma[m] += ginv(m, l) * lowered[l];
    return gamma;
}

RiemannTensor::RiemannTensor(int dim, Mat metric)
    : dim_(dim), metric_(std::move(metric)), data_(static_cast<std::size_t>(dim) * dim * dim * dim, 0.0)
{
}

double RiemannTensor::lowered(int i, int j, int k, int l) const
{
    double s = 0.0;
    for (int m = 0; m < dim_; ++m) s += metric_(l, m) * up(m, k, i, j);
    return s;
}

double RiemannTensor::sectional(int i, int j) const
{
    const double area = metric_(i, i) * metric_(j, j) - metric_(i, j) * metric_(i, j);
    return lowered(i, j, j, i) / area;
}

Vec RiemannTensor::apply(const Vec& u, const Vec& v, const Vec& w) const
{
    Vec out = Vec::Zero(dim_);
    for (int l = 0; l < dim_; ++l)
        for (int k = 0; k < dim_; ++k)
            for (int i = 0; i < dim_; ++i)
                for (int j = 0; j < dim_; ++j) out[l] += up(l, k, i, j) * u[i] * v[j] * w[k];
    return out;
}

RiemannTensor intrinsic_riemann(const MetricField& g, const Vec& u, double rel)
{
    const int d = static_cast<int>(u.size());
    const MatStack gamma = christoffels(g, u, rel);
    auto gamma_at = [&g, rel](const Vec& x) { return christoffels(g, x, rel); };
    std::vector<MatStack> dgamma(d);
    for (int i = 0; i < d; ++i) {
        const double step = relative_step(u[i], rel);
        if (g.domain) {
            Vec probe = u;
            probe[i] += 2 * step;
            const bool up = g.domain->contains(probe);
            probe[i] = u[i] - 2 * step;
            if (!up || !g.domain->contains(probe))
                fail(ErrorCode::BoundaryStencil, "curvature stencil leaves the chart domain");
        }
        dgamma[i] = central_difference4(gamma_at, u, i, step);
    }
    RiemannTensor R(d, g(u));
    // R^l_{kij} = d_i Gamma^l_{jk} - d_j Gamma^l_{ik} + Gamma^l_{im} Gamma^m_{jk} - Gamma^l_{jm} Gamma^m_{ik}
    for (int l = 0; l < d; ++l)
        for (int k = 0; k < d; ++k)
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    double v = dgamma[i][l](j, k) - dgamma[j][l](i, k);
                    for (int m = 0; m < d; ++m) v += gamma[l](i, m) * gamma[m](j, k) - gamma[l](j, m) * gamma[m](i, k);
                    R.up(l, k, i, j) = v;
                }
    return R;
}

Vec gradient(const ScalarField& h, const MetricField& g, const Vec& u)
{
    const int k = static_cast<int>(u.size());
    Vec dh(k);
    for (int i = 0; i < k; ++i) dh[i] = h.d(u, i);
    return g(u).ldlt().solve(dh);
}

} // namespace rotbonnet
