#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <vector>

namespace rotbonnet {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// A family of matrices indexed by one extra slot, e.g. Christoffel symbols
/// Gamma[m](i, j) or second fundamental form components alpha[a](i, j).
using MatStack = std::vector<Mat>;

// Bilinear form of E^{d} with signature (1, ..., 1, eps).
inline double signature_dot(const Vec& x, const Vec& y, int eps)
{
    const Eigen::Index d = x.size();
    return x.head(d - 1).dot(y.head(d - 1)) + eps * x[d - 1] * y[d - 1];
}

inline Mat signature_matrix(Eigen::Index dim, int eps)
{
    Mat J = Mat::Identity(dim, dim);
    J(dim - 1, dim - 1) = eps;
    return J;
}

inline Vec unit_vector(Eigen::Index dim, Eigen::Index i)
{
    Vec e = Vec::Zero(dim);
    e[i] = 1.0;
    return e;
}

// Linear combination helpers so that finite-difference code can be written
// once for scalars, vectors, matrices and matrix stacks.
inline double lincomb(double a, double x, double b, double y) { return a * x + b * y; }
inline Vec lincomb(double a, const Vec& x, double b, const Vec& y) { return a * x + b * y; }
inline Mat lincomb(double a, const Mat& x, double b, const Mat& y) { return a * x + b * y; }
inline MatStack lincomb(double a, const MatStack& x, double b, const MatStack& y)
{
    MatStack out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = a * x[i] + b * y[i];
    return out;
}

inline double max_abs(double x) { return std::abs(x); }
inline double max_abs(const Vec& x) { return x.size() ? x.cwiseAbs().maxCoeff() : 0.0; }
inline double max_abs(const Mat& x) { return x.size() ? x.cwiseAbs().maxCoeff() : 0.0; }
inline double max_abs(const MatStack& x)
{
    double m = 0.0;
    for (const auto& a : x) m = std::max(m, max_abs(a));
    return m;
}

/// Relative central-difference step used throughout: 1e-4 scaled by the
/// magnitude of the coordinate.
inline double relative_step(double coordinate, double rel = 1e-4)
{
    return rel * std::max(1.0, std::abs(coordinate));
}

template <class F>
auto central_difference(const F& f, const Vec& u, Eigen::Index i, double step)
{
    Vec up = u, um = u;
    up[i] += step;
    um[i] -= step;
    return lincomb(0.5 / step, f(up), -0.5 / step, f(um));
}

/// Fourth-order five-point central difference; needs u +- 2 step.
template <class F>
auto central_difference4(const F& f, const Vec& u, Eigen::Index i, double step)
{
    Vec p1 = u, m1 = u, p2 = u, m2 = u;
    p1[i] += step;
    m1[i] -= step;
    p2[i] += 2 * step;
    m2[i] -= 2 * step;
    const auto inner = lincomb(8.0 / (12 * step), f(p1), -8.0 / (12 * step), f(m1));
    const auto outer = lincomb(-1.0 / (12 * step), f(p2), 1.0 / (12 * step), f(m2));
    return lincomb(1.0, inner, 1.0, outer);
}

/// Cholesky factor L (lower) of a symmetric positive-definite matrix; the
/// columns of L^{-T} form an orthonormal frame for the form.
inline Mat orthonormal_frame(const Mat& gram)
{
    Eigen::LLT<Mat> llt(gram);
    const Mat L = llt.matrixL();
    return L.transpose().triangularView<Eigen::Upper>().solve(Mat::Identity(gram.rows(), gram.cols()));
}

} // namespace rotbonnet
