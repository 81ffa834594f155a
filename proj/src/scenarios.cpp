#include "stlgcp/scenarios.hpp"

#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace stlgcp {

namespace {

// Parameter values as written in the catalog grid: integers bare, fractional
// spatial scales with two decimals (0.05, 0.10, 0.25), others trimmed.
std::string format_id_part(double v) {
    std::ostringstream ss;
    if (v == static_cast<long long>(v))
        ss << static_cast<long long>(v);
    else if (v < 1.0)
        ss << std::fixed << std::setprecision(2) << v;
    else
        ss << v;
    std::string s = ss.str();
    if (s == "0.30") s = "0.3";  // Gneiting delta grid writes one decimal
    return s;
}

std::vector<Scenario> build_catalog() {
    const SpaceTimeWindow w{{0.0, 1.0}, {0.0, 1.0}, {0.0, 50.0}};
    const double baseline = 1000.0 / window_volume(w);  // 1000 expected points
    std::vector<Scenario> rows;
    for (double sigma2 : {5.0, 8.0})
        for (double alpha : {0.05, 0.10, 0.25})
            for (double beta : {2.0, 5.0, 10.0}) {
                Scenario s{"sep_" + format_id_part(sigma2) + "_" + format_id_part(alpha) + "_" +
                               format_id_part(beta),
                           CovarianceModel(SeparableExponentialParams{sigma2, alpha, beta}),
                           baseline, w};
                rows.push_back(std::move(s));
            }
    for (double sigma2 : {5.0, 8.0})
        for (double delta : {1.8, 0.3})
            for (auto [alpha, beta] : {std::pair{0.05, 2.0}, std::pair{0.10, 5.0}}) {
                Scenario s{"gne_" + format_id_part(sigma2) + "_" + format_id_part(alpha) + "_" +
                               format_id_part(beta) + "_" + format_id_part(delta),
                           CovarianceModel(GneitingParams{sigma2, alpha, beta, 1.0, 1.0, delta}),
                           baseline, w};
                rows.push_back(std::move(s));
            }
    return rows;
}

}  // namespace

const std::vector<Scenario>& scenario_catalog() {
    static const std::vector<Scenario> catalog = build_catalog();
    return catalog;
}

const Scenario& find_scenario(const std::string& id) {
    for (const auto& s : scenario_catalog())
        if (s.id == id) return s;
    std::ostringstream msg;
    msg << "unknown scenario id '" << id << "'; valid ids:";
    for (const auto& s : scenario_catalog()) msg << ' ' << s.id;
    throw std::invalid_argument(msg.str());
}

}  // namespace stlgcp
