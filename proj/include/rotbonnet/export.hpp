#pragma once

#include "rotbonnet/reconstruct.hpp"

#include "json.hpp"

#include <filesystem>

namespace rotbonnet {

nlohmann::json matrix_json(const Mat& m);
nlohmann::json vector_json(const Vec& v);

/// Per-node table: chart coordinates, flat position, normalised position,
/// then t and omega.
void write_csv(const std::filesystem::path& path, const Chart& chart, const ReconstructionResult& result);

/// Surface of revolution swept from a (t, theta) grid, followed by the
/// reconstructed curve (k = 1, polyline) or surface (k = 2, quads split into
/// triangles). Only meaningful for n = 1.
void write_obj(const std::filesystem::path& path, const ProfileCurve& profile, const Chart& chart,
               const ReconstructionResult& result, int t_steps = 48, int theta_steps = 64);

} // namespace rotbonnet
