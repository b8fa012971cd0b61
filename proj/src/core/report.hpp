#pragma once

#include <string>

#include <json.hpp>

namespace critloc {

// Orchestration entry points: config JSON in, report JSON out. Schema and
// defaults are documented in the README; determinism is guaranteed for a
// fixed config + seed when "canonical" is set (timings stripped).
nlohmann::json run_analyze(const nlohmann::json& config);
nlohmann::json run_sweep(const nlohmann::json& config);
nlohmann::json run_export(const nlohmann::json& config);

// 0 = all checks passed, 1 = some check failed.
int report_exit_code(const nlohmann::json& report);

} // namespace critloc
