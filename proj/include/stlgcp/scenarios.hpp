#pragma once

#include <string>
#include <vector>

#include "stlgcp/covariance.hpp"
#include "stlgcp/geometry.hpp"

namespace stlgcp {

/// One row of the built-in simulation study catalog: a covariance model plus
/// the constant baseline rate giving 1000 expected points on the unit square
/// over fifty time units.
struct Scenario {
    std::string id;
    CovarianceModel model;
    double baseline;
    SpaceTimeWindow window;
};

const std::vector<Scenario>& scenario_catalog();

/// Lookup by id; unknown ids raise an error listing every valid id.
const Scenario& find_scenario(const std::string& id);

}  // namespace stlgcp
