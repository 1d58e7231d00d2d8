#pragma once

#include "rotbonnet/compat.hpp"

namespace rotbonnet {

/// Data lifted to the flat space E^{n+2}: the fiber E is extended by a line
/// <zeta> with <zeta, zeta> = eps, giving a bundle of rank r + 1 whose last
/// index is zeta. X = T + rho is stored by its components.
struct FlatLiftData {
    ImmersionData base;
    int epsilon = 1;
    /// block-diag(E metric, eps)
    MatrixField metric;
    /// alpha_check(u)[A](i, j), A = 0..r with A = r the zeta component.
    StackField alpha;
    /// nabla_check(u)[i](A, B), the A-component of nabla_i e_B.
    StackField nabla;
    ScalarField lambda_tilde;
    ScalarField mu_tilde;

    int k() const { return base.k(); }
    int rank() const { return base.e_rank + 1; }
    int ambient_dim() const { return base.n + 2; }
};

/// nabla''_v X split into tangent (k) and fiber (r) components.
struct WhitneyDerivative {
    Vec tangent;
    Vec normal;
};

WhitneyDerivative whitney_derivative(const ImmersionData& data, int v, const Vec& u);

/// Residuals of nabla''_v X = (f'/f)(d_v - <d_v, T> X) and of
/// nabla''_v (f X) = f' d_v at interior nodes.
ResidualReport whitney_report(const ImmersionData& data, double tol = 1e-6);

/// Fails with LiftHypothesisViolated if eps (1 - f'(hf)^2) <= 0 at a node.
FlatLiftData build_lift(const ImmersionData& data);

/// Omega_i such that d_i F = F Omega_i for the frame F = [d_1 g .. d_k g | e_1 .. e_r | zeta].
MatStack connection_matrices(const FlatLiftData& lift, const Vec& u);

/// block-diag(g, E metric, eps), the Gram matrix of the frame F.
Mat frame_gram(const FlatLiftData& lift, const Vec& u);

/// Largest orthonormal-frame component of d_i Omega_j - d_j Omega_i + [Omega_i, Omega_j].
double zero_curvature_defect(const FlatLiftData& lift, const Vec& u);

/// Zero-curvature residual together with metric parallelism, symmetry of
/// alpha_check, fiber-metric compatibility of nabla_check, the warp-scalar
/// identities, and constancy of hf along T-orthogonal directions.
ResidualReport flat_compat_residual(const FlatLiftData& lift, double tol = 1e-6);

} // namespace rotbonnet
