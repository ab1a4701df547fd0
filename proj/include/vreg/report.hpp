#pragma once

#include <string>

#include <json.hpp>

#include "vreg/central.hpp"
#include "vreg/distributed.hpp"
#include "vreg/flow_geometry.hpp"
#include "vreg/network.hpp"
#include "vreg/scenario.hpp"

namespace vreg {

inline constexpr int kReportSchemaVersion = 1;

nlohmann::json condition_report_json(const NetworkTree& net,
                                     const ConditionReport& report);
nlohmann::json classification_json(const NetworkTree& net,
                                   const Classification& c);
nlohmann::json solve_report_json(const NetworkTree& net,
                                 const SolveReport& report);
nlohmann::json oracle_json(const NetworkTree& net, const OracleResult& result,
                           int grid_points);
nlohmann::json loss_experiment_json(const LossExperiment& exp);
nlohmann::json scenario_json(const ScenarioResult& result);

/// Delimited per-run rows: p seed iterations converged final_objective.
std::string loss_experiment_table(const LossExperiment& exp);

/// Delimited per-round rows: iteration objective dual max_mismatch.
std::string solve_trace_table(const SolveReport& report);

}  // namespace vreg
