#include "rotbonnet/tolerances.hpp"

#include "rotbonnet/errors.hpp"

#include <string>
#include <utility>
#include <vector>

namespace rotbonnet {

namespace {

std::vector<std::pair<const char*, double Tolerances::*>> fields()
{
    return {
        {"compat", &Tolerances::compat},
        {"flat", &Tolerances::flat},
        {"whitney", &Tolerances::whitney},
        {"curvature_abort", &Tolerances::curvature_abort},
        {"path", &Tolerances::path},
        {"gram_report", &Tolerances::gram_report},
        {"gram_abort", &Tolerances::gram_abort},
        {"position", &Tolerances::position},
        {"spread", &Tolerances::spread},
        {"spread_abort", &Tolerances::spread_abort},
        {"straightness", &Tolerances::straightness},
        {"distance", &Tolerances::distance},
        {"sphere", &Tolerances::sphere},
        {"sphere_abort", &Tolerances::sphere_abort},
        {"last_coordinate", &Tolerances::last_coordinate},
        {"frame", &Tolerances::frame},
        {"dt_decomposition", &Tolerances::dt_decomposition},
        {"warped_metric", &Tolerances::warped_metric},
        {"submersion", &Tolerances::submersion},
    };
}

} // namespace

Tolerances Tolerances::scaled(double factor) const
{
    Tolerances out = *this;
    for (const auto& [name, member] : fields())
        if (member != &Tolerances::submersion) out.*member *= factor;
    return out;
}

void apply_overrides(Tolerances& tol, const nlohmann::json& j)
{
    if (!j.is_object()) fail(ErrorCode::ConfigError, "tolerances: expected an object");
    const auto table = fields();
    for (const auto& [key, value] : j.items()) {
        bool found = false;
        for (const auto& [name, member] : table) {
            if (key != name) continue;
            if (!value.is_number() || value.get<double>() <= 0)
                fail(ErrorCode::ConfigError, "tolerances." + key + ": expected a positive number");
            tol.*member = value.get<double>();
            found = true;
        }
        if (!found) fail(ErrorCode::ConfigError, "tolerances." + key + ": unknown tolerance");
    }
}

nlohmann::json to_json(const Tolerances& tol)
{
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [name, member] : fields()) j[name] = tol.*member;
    return j;
}

} // namespace rotbonnet
