#pragma once

#include <string>
#include <vector>

#include "stlgcp/contrast.hpp"
#include "stlgcp/geometry.hpp"

namespace stlgcp {

/// Read a pattern from a CSV file with header "x,y,t". Malformed rows are
/// reported with their line number; points outside the window are collected
/// and reported together.
PointPattern read_pattern_csv(const std::string& path, const SpaceTimeWindow& window);

void write_pattern_csv(const PointPattern& p, const std::string& path);

/// Read per-point fitted models back from a local-fit CSV. The row count must
/// match the pattern the fit belongs to.
std::vector<CovarianceModel> read_local_fit_csv(const std::string& path,
                                                const std::string& family);

}  // namespace stlgcp
