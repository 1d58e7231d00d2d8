#pragma once

#include "rotbonnet/errors.hpp"
#include "rotbonnet/report.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace rotbonnet {

enum ExitCode { ExitPass = 0, ExitResidual = 1, ExitConfig = 2, ExitNumerical = 3 };

struct RunOptions {
    std::string subcommand;
    std::filesystem::path config;
    std::filesystem::path out_dir = ".";
    std::optional<std::uint64_t> seed;
    double tol_scale = 1.0;
    bool quiet = false;
};

struct StageTiming {
    std::string stage;
    double seconds = 0.0;
};

struct RunReport {
    std::string scenario;
    std::string subcommand;
    std::uint64_t seed = 0;
    double tol_scale = 1.0;
    std::vector<ResidualReport> stages;
    std::vector<StageTiming> timings;
    nlohmann::json diagnostics = nlohmann::json::object();
    nlohmann::json tolerances;
    nlohmann::json error; // null unless a stage aborted
    std::vector<std::string> files;
    int exit_code = ExitPass;

    bool pass() const;
};

/// Exit status for an error code: configuration and hypothesis failures map
/// to 2, numerical aborts to 3.
int exit_code_for(ErrorCode code);

/// Runs one subcommand on one scenario and writes `<name>.<subcommand>.json`
/// plus any geometry exports into `out_dir`. Never throws for scenario
/// problems; the failure is recorded in the returned report.
RunReport run(const RunOptions& options);

/// Timings are kept out of this document so that repeated runs are
/// byte-identical.
nlohmann::json to_json(const RunReport& report);

} // namespace rotbonnet
