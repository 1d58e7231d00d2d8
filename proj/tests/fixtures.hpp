#pragma once

#include "rotbonnet/compat.hpp"

#include <cmath>

namespace fixtures {

using namespace rotbonnet;

inline Vec vec(std::initializer_list<double> xs)
{
    Vec v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

/// Leaf Sigma_{t0} in M-bar^3 (n = k = 2) in spherical coordinates of radius f(t0).
inline ImmersionData leaf_data(const ProfileCurve& P, double t0, const Chart& chart)
{
    const double f0 = P.f(t0);
    const double c = P.f_prime(t0) / f0;
    ImmersionData d;
    d.chart = chart;
    d.n = 2;
    d.profile = P;
    d.e_rank = 1;
    d.g.eval = [f0](const Vec& u) {
        Mat m = Mat::Identity(2, 2) * f0 * f0;
        m(1, 1) *= std::sin(u[0]) * std::sin(u[0]);
        return m;
    };
    d.g.partial = [f0](const Vec& u, int i) {
        Mat m = Mat::Zero(2, 2);
        if (i == 0) m(1, 1) = f0 * f0 * std::sin(2 * u[0]);
        return m;
    };
    d.e_metric = constant_field<Mat>(Mat::Identity(1, 1));
    d.nabla_e = constant_field<MatStack>(MatStack(2, Mat::Zero(1, 1)));
    const auto g = d.g;
    d.alpha.eval = [g, c](const Vec& u) { return MatStack{Mat(-c * g(u))}; };
    d.alpha.partial = [g, c](const Vec& u, int i) { return MatStack{Mat(-c * g.d(u, i))}; };
    d.rho = constant_field<Vec>(vec({1.0}));
    d.hf = constant_field(t0);
    return d;
}

/// Totally geodesic slice (t, theta) -> (t, (cos theta, sin theta, 0)) written as explicit data.
inline ImmersionData slice_data(const ProfileCurve& P, const Chart& chart, double delta = 0.0, bool weighted = true)
{
    ImmersionData d;
    d.chart = chart;
    d.n = 2;
    d.profile = P;
    d.e_rank = 1;
    d.g.eval = [P](const Vec& u) {
        Mat m = Mat::Identity(2, 2);
        m(1, 1) = P.f(u[0]) * P.f(u[0]);
        return m;
    };
    d.g.partial = [P](const Vec& u, int i) {
        Mat m = Mat::Zero(2, 2);
        if (i == 0) m(1, 1) = 2 * P.f(u[0]) * P.f_prime(u[0]);
        return m;
    };
    d.e_metric = constant_field<Mat>(Mat::Identity(1, 1));
    d.nabla_e = constant_field<MatStack>(MatStack(2, Mat::Zero(1, 1)));
    const auto g = d.g;
    d.alpha.eval = [g, delta, weighted](const Vec& u) { return MatStack{Mat(delta * (weighted ? u[0] : 1.0) * g(u))}; };
    d.rho = constant_field<Vec>(vec({0.0}));
    d.hf.eval = [](const Vec& u) { return u[0]; };
    d.hf.partial = [](const Vec&, int i) { return i == 0 ? 1.0 : 0.0; };
    return d;
}

inline AnalyticImmersion slice_immersion()
{
    AnalyticImmersion x;
    x.t = [](const Vec& u) { return u[0]; };
    x.dt = [](const Vec&) { return vec({1.0, 0.0}); };
    x.omega = [](const Vec& u) { return vec({std::cos(u[1]), std::sin(u[1]), 0.0}); };
    x.domega = [](const Vec& u) {
        Mat m = Mat::Zero(3, 2);
        m(0, 1) = -std::sin(u[1]);
        m(1, 1) = std::cos(u[1]);
        return m;
    };
    x.ddt = [](const Vec&) { return Mat(Mat::Zero(2, 2)); };
    x.ddomega = [](const Vec& u) {
        MatStack d(2, Mat::Zero(3, 2));
        d[1](0, 1) = -std::cos(u[1]);
        d[1](1, 1) = -std::sin(u[1]);
        return d;
    };
    return x;
}

/// Great circle s -> (cos s, sin s cos b, sin s sin b) on the unit sphere profile (n = 1).
inline AnalyticImmersion tilted_circle(double beta = M_PI / 4)
{
    const double cb = std::cos(beta), sb = std::sin(beta);
    auto point = [cb, sb](double s) { return vec({std::cos(s), std::sin(s) * cb, std::sin(s) * sb}); };
    AnalyticImmersion x;
    x.t = [point](const Vec& u) { return std::acos(-point(u[0])[2]); };
    x.dt = [point, sb](const Vec& u) {
        const Vec c = point(u[0]);
        const double st = std::sqrt(c[0] * c[0] + c[1] * c[1]);
        return vec({std::cos(u[0]) * sb / st});
    };
    x.omega = [point](const Vec& u) {
        const Vec c = point(u[0]);
        return Vec(c.head(2).normalized());
    };
    x.domega = [point, cb, sb](const Vec& u) {
        const Vec c = point(u[0]);
        const Vec dc = vec({-std::sin(u[0]), std::cos(u[0]) * cb, std::cos(u[0]) * sb});
        const double st = c.head(2).norm();
        const Vec w = c.head(2) / st;
        Mat m(2, 1);
        m.col(0) = (dc.head(2) - w * w.dot(dc.head(2))) / st;
        return m;
    };
    return x;
}

} // namespace fixtures
