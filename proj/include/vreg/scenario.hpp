#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vreg/distributed.hpp"
#include "vreg/network.hpp"

namespace vreg {

/// Minute-by-minute replay driven by an irradiance scale s(t) in [0, 1].
/// The nominal network encodes fixed loads (p_min == p_max <= 0 and
/// q_min == q_max off the feeder); each minute widens them: local
/// generation can offset up to pv_fraction of the nominal consumption, and
/// reactive injections may swing within q_flex times the nominal magnitude,
/// on the nominal side of zero.
struct Scenario {
  std::vector<double> irradiance;  // s(first_minute), s(first_minute+1), ...
  int first_minute = 0;
  int t_start = 0;  // inclusive horizon
  int t_end = 0;
  double pv_fraction = 0.20;
  double q_flex = 1.2;
};

/// Synthetic irradiance: a smooth daily arc with seeded cloud-edge jumps,
/// clamped to [0, 1].
std::vector<double> synthesize_irradiance(int count, uint64_t seed);

/// Two-column delimited text (minute, scale); '#' lines are comments.
std::vector<std::pair<int, double>> parse_irradiance(const std::string& text);
Scenario scenario_from_series(const std::vector<std::pair<int, double>>& rows,
                              int t_start, int t_end);

/// The per-minute widened network. Exposed for tests.
NetworkTree scenario_network_at(const NetworkTree& nominal,
                                const Scenario& scenario, int minute);

/// Validates the nominal-load encoding; throws std::invalid_argument
/// naming the offending bus.
void validate_scenario_network(const NetworkTree& nominal);

struct ScenarioMinute {
  int minute = 0;
  bool feasible = true;
  bool converged = false;
  bool hot_started = false;
  int iterations = 0;
  double objective = 0.0;   // distributed objective at termination
  double total_loss = 0.0;  // evaluated on the recovered voltages
  int infeasible_bus = 0;
};
struct ScenarioResult {
  std::vector<ScenarioMinute> minutes;
  int converged_minutes = 0;
  int infeasible_minutes = 0;
};

/// Runs the horizon minute by minute, chaining multipliers: each minute hot
/// starts from the previous one; the first minute (and any minute after an
/// infeasible one) cold starts from zero multipliers.
ScenarioResult run_scenario(const NetworkTree& nominal,
                            const Scenario& scenario, const RunConfig& cfg);

}  // namespace vreg
