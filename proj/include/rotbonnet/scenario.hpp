#pragma once

#include "rotbonnet/compat.hpp"
#include "rotbonnet/tolerances.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

namespace rotbonnet {

struct ScenarioOutputs {
    bool report = true;
    bool csv = true;
    bool obj = true;
};

/// A parsed scenario configuration.
///
/// Expressions are written over `t` (profile) or `u1`..`uk` (chart fields)
/// and may use the names in the top-level `constants` object. Missing f'
/// and f'' are differentiated symbolically.
struct Scenario {
    std::string name;
    std::string expect_subcommand;
    std::optional<int> expect_exit_code;
    ProfileCurve profile;
    int n = 0;
    Chart chart;
    ImmersionData data;
    bool extracted = false;
    /// Immersion the reconstruction is compared against (the extraction
    /// source when the data were extracted).
    std::optional<AnalyticImmersion> reference;
    Tolerances tolerances;
    ScenarioOutputs outputs;
    std::uint64_t seed = 0;
    int draws = 100;
    nlohmann::json raw;
};

using Constants = std::map<std::string, double>;

Constants parse_constants(const nlohmann::json& j);
ProfileCurve parse_profile(const nlohmann::json& j, const Constants& constants);
AnalyticImmersion parse_immersion(const nlohmann::json& j, int k, int n, const Constants& constants);
Scenario parse_scenario(const nlohmann::json& j);
/// Reads and parses a scenario file; unreadable files and malformed JSON
/// raise ConfigError.
Scenario load_scenario(const std::filesystem::path& path);
nlohmann::json read_json(const std::filesystem::path& path);

} // namespace rotbonnet
