#include "rotbonnet/export.hpp"

#include "rotbonnet/errors.hpp"

#include <fstream>
#include <iomanip>
#include <cmath>

namespace rotbonnet {

nlohmann::json matrix_json(const Mat& m)
{
    auto j = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        auto row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        j.push_back(row);
    }
    return j;
}

nlohmann::json vector_json(const Vec& v)
{
    auto j = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v[i]);
    return j;
}

namespace {

std::ofstream open(const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) fail(ErrorCode::ConfigError, "cannot write '" + path.string() + "'");
    out << std::setprecision(17);
    return out;
}

} // namespace

void write_csv(const std::filesystem::path& path, const Chart& chart, const ReconstructionResult& result)
{
    auto out = open(path);
    const int k = chart.dim();
    const auto dim = result.states.empty() ? 0 : result.states.front().position.size();
    out << "node";
    for (int i = 1; i <= k; ++i) out << ",u" << i;
    for (Eigen::Index a = 1; a <= dim; ++a) out << ",x" << a;
    for (Eigen::Index a = 1; a <= dim; ++a) out << ",y" << a;
    out << ",t";
    for (Eigen::Index a = 1; a < dim; ++a) out << ",omega" << a;
    out << '\n';
    for (std::size_t node = 0; node < chart.node_count(); ++node) {
        const Vec u = chart.node(node);
        const Vec& x = result.states[node].position;
        const Vec y = result.tau(x);
        out << node;
        for (int i = 0; i < k; ++i) out << ',' << u[i];
        for (Eigen::Index a = 0; a < dim; ++a) out << ',' << x[a];
        for (Eigen::Index a = 0; a < dim; ++a) out << ',' << y[a];
        out << ',' << result.warped[node].t;
        for (Eigen::Index a = 0; a < result.warped[node].omega.size(); ++a) out << ',' << result.warped[node].omega[a];
        out << '\n';
    }
}

void write_obj(const std::filesystem::path& path, const ProfileCurve& profile, const Chart& chart,
               const ReconstructionResult& result, int t_steps, int theta_steps)
{
    auto out = open(path);
    const Interval I = profile.interval();
    // stay clear of the endpoints, where f may vanish
    const double lo = I.lo + 1e-3 * (I.hi - I.lo), hi = I.hi - 1e-3 * (I.hi - I.lo);

    out << "o surface_of_revolution\n";
    for (int i = 0; i <= t_steps; ++i) {
        const double t = lo + (hi - lo) * i / t_steps;
        for (int j = 0; j < theta_steps; ++j) {
            const double th = 2 * M_PI * j / theta_steps;
            out << "v " << profile.f(t) * std::cos(th) << ' ' << profile.f(t) * std::sin(th) << ' ' << profile.h(t)
                << '\n';
        }
    }
    auto sv = [theta_steps](int i, int j) { return i * theta_steps + (j % theta_steps) + 1; };
    for (int i = 0; i < t_steps; ++i)
        for (int j = 0; j < theta_steps; ++j) {
            out << "f " << sv(i, j) << ' ' << sv(i + 1, j) << ' ' << sv(i + 1, j + 1) << '\n';
            out << "f " << sv(i, j) << ' ' << sv(i + 1, j + 1) << ' ' << sv(i, j + 1) << '\n';
        }

    const int base = (t_steps + 1) * theta_steps;
    out << "o reconstruction\n";
    for (std::size_t node = 0; node < chart.node_count(); ++node) {
        const Vec y = result.tau(result.states[node].position);
        out << "v " << y[0] << ' ' << y[1] << ' ' << y[2] << '\n';
    }
    if (chart.dim() == 1) {
        out << 'l';
        for (std::size_t node = 0; node < chart.node_count(); ++node) out << ' ' << base + static_cast<int>(node) + 1;
        out << '\n';
    } else if (chart.dim() == 2) {
        const auto& res = chart.resolution();
        auto cv = [&](int i, int j) { return base + static_cast<int>(chart.flat_index({i, j})) + 1; };
        for (int i = 0; i + 1 < res[0]; ++i)
            for (int j = 0; j + 1 < res[1]; ++j) {
                out << "f " << cv(i, j) << ' ' << cv(i + 1, j) << ' ' << cv(i + 1, j + 1) << '\n';
                out << "f " << cv(i, j) << ' ' << cv(i + 1, j + 1) << ' ' << cv(i, j + 1) << '\n';
            }
    }
}

} // namespace rotbonnet
