#pragma once

#include <string>
#include <vector>

#include "scv/report.hpp"

namespace scv {

/// Ids of the scripted reproduction scenarios, in registry order.
const std::vector<std::string>& reproduction_ids();

/// Runs one scenario and returns its bundle:
///   {"id", "config": {...}, "rows": [...], "passed"}
/// Each row is {"label", "computed", "expected", "kind", "tol", "residual",
/// "pass"} with kind one of eq / ge / le / gt / lt. p_override > 0 replaces
/// a scenario's default exponent where one applies (currently prop-4.9).
/// Output is deterministic for a fixed config, independent of thread count.
nlohmann::json run_reproduction(const std::string& id, const RunConfig& cfg,
                                double p_override = 0.0);

bool bundle_passed(const nlohmann::json& bundle);

std::string render_bundle_table(const nlohmann::json& bundle);
std::string render_bundle_csv(const nlohmann::json& bundle);

}  // namespace scv
