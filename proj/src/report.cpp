#include "rotbonnet/report.hpp"

#include "rotbonnet/errors.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace rotbonnet {

bool ResidualReport::pass() const
{
    for (const auto& e : entries)
        if (!e.pass) return false;
    return true;
}

const ResidualEntry& ResidualReport::entry(const std::string& name) const
{
    for (const auto& e : entries)
        if (e.name == name) return e;
    fail(ErrorCode::ConfigError, "report '" + stage + "' has no entry '" + name + "'");
}

double ResidualReport::max_residual() const
{
    double m = 0.0;
    for (const auto& e : entries) m = std::max(m, e.max_residual);
    return m;
}

ResidualEntry& ResidualReport::add(const std::string& name, double max_residual, double mean_residual,
                                   double tolerance)
{
    ResidualEntry e;
    e.name = name;
    e.max_residual = max_residual;
    e.mean_residual = mean_residual;
    e.tolerance = tolerance;
    e.pass = std::isfinite(max_residual) && max_residual <= tolerance;
    entries.push_back(e);
    return entries.back();
}

void to_json(nlohmann::json& j, const ResidualReport& report)
{
    j = nlohmann::json::object();
    j["stage"] = report.stage;
    j["pass"] = report.pass();
    auto& entries = j["entries"] = nlohmann::json::array();
    for (const auto& e : report.entries) {
        entries.push_back({{"name", e.name},
                           {"max_residual", e.max_residual},
                           {"mean_residual", e.mean_residual},
                           {"tolerance", e.tolerance},
                           {"pass", e.pass}});
    }
    j["info"] = report.info;
}

std::string format_table(const ResidualReport& report)
{
    std::ostringstream os;
    char line[160];
    std::snprintf(line, sizeof line, "[%s] %s\n", report.stage.c_str(), report.pass() ? "PASS" : "FAIL");
    os << line;
    for (const auto& e : report.entries) {
        std::snprintf(line, sizeof line, "  %-28s max %.3e  mean %.3e  tol %.1e  %s\n", e.name.c_str(),
                      e.max_residual, e.mean_residual, e.tolerance, e.pass ? "ok" : "FAIL");
        os << line;
    }
    for (const auto& [k, v] : report.info) {
        std::snprintf(line, sizeof line, "  %-28s %.12g\n", k.c_str(), v);
        os << line;
    }
    return os.str();
}

} // namespace rotbonnet
