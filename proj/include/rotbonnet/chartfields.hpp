#pragma once

#include "rotbonnet/errors.hpp"
#include "rotbonnet/linalg.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace rotbonnet {

/// Axis-aligned box [lo, hi] in R^k; fields are required to be evaluable on
/// it (dilated slightly so that stencils at boundary nodes stay inside).
struct Domain {
    Vec lo;
    Vec hi;

    bool contains(const Vec& u) const
    {
        for (Eigen::Index i = 0; i < u.size(); ++i)
            if (u[i] < lo[i] || u[i] > hi[i]) return false;
        return true;
    }
};

/// Rectangular chart with a uniform lattice of nodes. Nodes are numbered
/// row-major with the first axis varying slowest.
class Chart {
public:
    Chart() = default;
    Chart(std::vector<double> lo, std::vector<double> hi, std::vector<int> resolution);

    int dim() const noexcept { return static_cast<int>(lo_.size()); }
    const std::vector<double>& lo() const noexcept { return lo_; }
    const std::vector<double>& hi() const noexcept { return hi_; }
    const std::vector<int>& resolution() const noexcept { return resolution_; }

    std::size_t node_count() const noexcept { return count_; }
    std::vector<int> multi_index(std::size_t flat) const;
    std::size_t flat_index(const std::vector<int>& index) const;
    Vec node(std::size_t flat) const;
    Vec node(const std::vector<int>& index) const;
    double spacing(int axis) const;

    bool on_boundary(std::size_t flat) const;
    /// Nodes at least one lattice step away from every face; residual checks
    /// run only here.
    std::vector<std::size_t> interior_nodes() const;

    /// Box dilated by `relative_margin` of its extent on each axis.
    Domain domain(double relative_margin = 1e-2) const;

private:
    std::vector<double> lo_, hi_;
    std::vector<int> resolution_;
    std::size_t count_ = 0;
};

/// Smooth field on a chart, stored as a closure. Analytic partial derivatives
/// are optional; when absent, central differences with relative step 1e-4
/// are used.
template <class V>
struct Field {
    std::function<V(const Vec&)> eval;
    std::function<V(const Vec&, int)> partial;
    std::optional<Domain> domain;

    V operator()(const Vec& u) const { return eval(u); }
    bool has_partials() const noexcept { return static_cast<bool>(partial); }

    V d(const Vec& u, int i, double rel = 1e-4) const
    {
        if (partial) return partial(u, i);
        const double step = relative_step(u[i], rel);
        if (domain) {
            Vec probe = u;
            probe[i] += step;
            const bool up = domain->contains(probe);
            probe[i] = u[i] - step;
            if (!up || !domain->contains(probe))
                fail(ErrorCode::BoundaryStencil, "finite-difference stencil leaves the chart domain");
        }
        return central_difference(eval, u, i, step);
    }
};

using ScalarField = Field<double>;
using VectorField = Field<Vec>;
using MatrixField = Field<Mat>;
using StackField = Field<MatStack>;

template <class V>
Field<V> constant_field(V value)
{
    Field<V> out;
    out.eval = [value](const Vec&) { return value; };
    out.partial = [value](const Vec&, int) { return lincomb(0.0, value, 0.0, value); };
    return out;
}

/// Symmetric positive-definite k x k metric field.
using MetricField = MatrixField;

/// Fails with ConfigError if g is not symmetric positive definite at some node.
void verify_metric(const MetricField& g, const Chart& chart);

/// Christoffel symbols Gamma[m](i, j) of the Levi-Civita connection.
MatStack christoffels(const MetricField& g, const Vec& u, double rel = 1e-4);

/// Curvature with R(X, Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z.
class RiemannTensor {
public:
    RiemannTensor(int dim, Mat metric);

    int dim() const noexcept { return dim_; }
    /// R^l_{kij}, the l-th component of R(d_i, d_j) d_k.
    double& up(int l, int k, int i, int j) { return data_[index(l, k, i, j)]; }
    double up(int l, int k, int i, int j) const { return data_[index(l, k, i, j)]; }
    /// <R(d_i, d_j) d_k, d_l>.
    double lowered(int i, int j, int k, int l) const;
    /// Sectional curvature of the coordinate plane (d_i, d_j).
    double sectional(int i, int j) const;
    /// R(u, v)w for coordinate vectors u, v, w.
    Vec apply(const Vec& u, const Vec& v, const Vec& w) const;
    const Mat& metric() const noexcept { return metric_; }

private:
    std::size_t index(int l, int k, int i, int j) const
    {
        return ((static_cast<std::size_t>(l) * dim_ + k) * dim_ + i) * dim_ + j;
    }

    int dim_;
    Mat metric_;
    std::vector<double> data_;
};

RiemannTensor intrinsic_riemann(const MetricField& g, const Vec& u, double rel = 1e-4);

/// Components of grad h, T^i = g^{ij} d_j h.
Vec gradient(const ScalarField& h, const MetricField& g, const Vec& u);

} // namespace rotbonnet
