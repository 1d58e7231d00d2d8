#pragma once

#include "rotbonnet/liftflat.hpp"
#include "rotbonnet/tolerances.hpp"

#include <optional>
#include <vector>

namespace rotbonnet {

/// Point g(u) in E^{n+2} and the frame [d_1 g .. d_k g | e_1 .. e_r | zeta].
struct FrameState {
    Vec position;
    Mat frame;
};

/// Gram-consistent initial frame at u: block-diag(L^T, 1) with L L^T the
/// Cholesky factorisation of block-diag(g, E metric); position at the origin.
FrameState base_state(const FlatLiftData& lift, const Vec& u);

/// Fourth-order Runge-Kutta transport of the frame over every chart node,
/// one step per lattice edge, along the staircase that follows the axes in
/// `axis_order` starting from node 0. Fails with GramDrift when the frame
/// Gram matrix leaves block-diag(g, E metric, eps) by more than gram_abort.
std::vector<FrameState> integrate_frame(const FlatLiftData& lift, const FrameState& base,
                                        const std::vector<int>& axis_order, double gram_abort = 1e-4);

/// Max orthonormal-frame deviation of F^T J F from block-diag(g, E metric, eps).
double gram_error(const FlatLiftData& lift, const Vec& u, const Mat& frame);

/// Samples of the curve of centers: sigma at bin parameters s, and sigma'
/// when it is known independently of differencing.
struct CenterCurve {
    std::vector<double> s;
    std::vector<Vec> sigma;
    std::vector<Vec> sigma_prime;
    /// Mean of eps (h' X - f' zeta) per bin; sigma' = h'(s) * direction.
    std::vector<Vec> direction;
    int epsilon = 1;
};

struct CenterDiagnostics {
    double spread = 0.0;
    double distance = 0.0;
    double speed = 0.0;
    double min_gradient = 0.0;
};

/// Psi = g - f f' X - eps f h' zeta per node, binned into 64 level sets of
/// hf. Each Psi is carried along its own axis direction to the bin parameter
/// before averaging. Fails with NotSubmersion if |T| < tol.submersion at a
/// node and with LeafSpread if a bin spreads beyond tol.spread_abort.
CenterCurve curve_of_centers(const FlatLiftData& lift, const std::vector<FrameState>& states, const Tolerances& tol,
                             CenterDiagnostics* diagnostics = nullptr, int bins = 64);

/// max |sigma''_perp| / |<sigma', sigma'>| from centred differences; sigma'
/// is differenced from sigma when not supplied. Fails with TooFewSamples
/// below five samples.
double straightness_check(const CenterCurve& c);

/// Signature-preserving affine map x -> L x + b.
struct RigidMotion {
    Mat L;
    Vec b;

    Vec operator()(const Vec& x) const { return L * x + b; }
};

/// Maps the line of centers to the last coordinate axis with sigma'
/// pointing along +e_{n+2} and sigma(s0) to (0, .., 0, h(s0)). L is a single
/// reflection in the signature form. Fails with DegenerateDirection on a
/// null direction.
RigidMotion normalize(const CenterCurve& c, const ProfileCurve& profile, double s0);

struct WarpedPoint {
    double t = 0.0;
    Vec omega;
};

struct ProjectionDiagnostics {
    double sphere = 0.0;
    double last_coordinate = 0.0;
    double frame_x = 0.0;
    double frame_zeta = 0.0;
    double frame_system = 0.0;
    double dt_decomposition = 0.0;
    double warped_metric = 0.0;
};

/// t = hf, omega = spatial part of tau(g) / f(t), with the checks of the
/// identification X = d_t, zeta = N_t. Fails with SphereEscape when
/// | |omega| - 1 | exceeds tol.sphere_abort.
std::vector<WarpedPoint> project_to_warped(const FlatLiftData& lift, const std::vector<FrameState>& states,
                                           const RigidMotion& tau, const Tolerances& tol,
                                           ProjectionDiagnostics* diagnostics = nullptr);

/// Least-squares orthogonal map (reflections allowed) taking `source` rows
/// onto `target` rows, optionally with translation. Returns the max
/// Euclidean point error after the fit.
double rigid_fit_error(const std::vector<Vec>& source, const std::vector<Vec>& target, bool translate);

struct ReconstructionResult {
    std::vector<FrameState> states;
    std::vector<FrameState> transposed;
    CenterCurve centers;
    RigidMotion tau;
    std::vector<WarpedPoint> warped;
    ResidualReport report;
};

/// The full pipeline: zero-curvature pre-check (CurvatureTooLarge above
/// tol.curvature_abort), integration along both staircases, curve of centers,
/// straightness, normalisation, projection and frame identities.
ReconstructionResult reconstruct(const FlatLiftData& lift, const Tolerances& tol);

} // namespace rotbonnet
