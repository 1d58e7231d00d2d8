#pragma once

#include "json.hpp"

#include <algorithm>
#include <map>
#include <string>
#include <vector>

namespace rotbonnet {

struct ResidualEntry {
    std::string name;
    double max_residual = 0.0;
    double mean_residual = 0.0;
    double tolerance = 0.0;
    bool pass = true;
};

/// Per-equation residual summary for one pipeline stage.
struct ResidualReport {
    std::string stage;
    std::vector<ResidualEntry> entries;
    /// Extra named observations (e.g. a recovered sectional curvature).
    std::map<std::string, double> info;

    bool pass() const;
    const ResidualEntry& entry(const std::string& name) const;
    double max_residual() const;

    /// Adds an entry, deriving the verdict from max <= tolerance.
    ResidualEntry& add(const std::string& name, double max_residual, double mean_residual, double tolerance);
};

/// Running max/mean accumulator.
class ResidualAccumulator {
public:
    void add(double value)
    {
        max_ = std::max(max_, value);
        sum_ += value;
        ++count_;
    }
    double max() const noexcept { return max_; }
    double mean() const noexcept { return count_ ? sum_ / static_cast<double>(count_) : 0.0; }
    std::size_t count() const noexcept { return count_; }

private:
    double max_ = 0.0;
    double sum_ = 0.0;
    std::size_t count_ = 0;
};

void to_json(nlohmann::json& j, const ResidualReport& report);
std::string format_table(const ResidualReport& report);

} // namespace rotbonnet
