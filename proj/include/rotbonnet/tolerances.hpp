#pragma once

#include "json.hpp"

namespace rotbonnet {

/// Acceptance tolerances for every pipeline stage. `scaled` multiplies all
/// residual tolerances uniformly; the submersion threshold is left alone.
struct Tolerances {
    double compat = 1e-6;
    double flat = 1e-6;
    double whitney = 1e-6;
    double curvature_abort = 1e-4;
    double path = 1e-6;
    double gram_report = 1e-6;
    double gram_abort = 1e-4;
    double position = 1e-5;
    double spread = 1e-6;
    double spread_abort = 1e-3;
    double straightness = 1e-5;
    double distance = 1e-6;
    double sphere = 1e-6;
    double sphere_abort = 1e-3;
    double last_coordinate = 1e-6;
    double frame = 1e-5;
    double dt_decomposition = 1e-5;
    double warped_metric = 1e-5;
    double submersion = 0.1;

    Tolerances scaled(double factor) const;
};

/// Overrides fields present in `j`; unknown keys raise ConfigError.
void apply_overrides(Tolerances& tol, const nlohmann::json& j);
nlohmann::json to_json(const Tolerances& tol);

} // namespace rotbonnet
