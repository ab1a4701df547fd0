#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vreg/channel.hpp"
#include "vreg/network.hpp"
#include "vreg/sdp.hpp"

namespace vreg {

/// One complex multiplier per line, shared by the line's two endpoint
/// agents. The reverse-direction multiplier is the conjugate and is never
/// stored.
struct MultiplierState {
  std::vector<std::pair<int, int>> edges;  // canonical (from, to), line order
  std::vector<Complex> lambda;
  std::vector<int> last_update;  // iteration of the last applied update, -1 if none
};
MultiplierState zero_multipliers(const NetworkTree& net);

enum class StepMode { diminishing, constant };

struct RunConfig {
  double delta = 1e-4;  // consensus threshold on boundary entries
  int max_iters = 300;
  // The subproblem optima are unique, so the dual is differentiable and a
  // constant step converges linearly near the optimum; the diminishing
  // schedule is kept for the classic subgradient guarantee.
  double alpha0 = 0.5;
  StepMode step_mode = StepMode::constant;
  // Halve the effective step whenever the mismatch rebounds well above its
  // running minimum (the oscillation signature of a too-large step). A
  // genuine stall never triggers it, so infeasibility detection survives.
  bool adaptive_damping = true;
  bool direction_enhancement = false;
  bool leaf_fixing = false;
  double gamma = 1e-4;  // leaf-fixing window threshold
  int window = 10;      // T: history length for the window test
  int infeasibility_window = 50;   // K
  double infeasibility_decay = 0.99;
  double step_floor = 1e-3;        // suppress detection once steps are tiny
  int schedule_offset = 0;         // shifts the step-size schedule
  SdpOptions subproblem;           // per-agent solver settings
};

/// alpha[t] = alpha0 / sqrt(t + 1 + offset), or constant alpha0.
double step_size(int t, const RunConfig& cfg);

enum class AgentStatus { active, fixed, infeasible };

/// Per-bus state: the local clique, operator submatrices, the current local
/// solution and the injection history used by the leaf-fixing test.
struct BusAgent {
  int bus = 0;
  std::vector<int> scope;  // N_i: the bus and its neighbors, ascending
  Eigen::MatrixXcd active_op;    // A^(i)
  Eigen::MatrixXcd reactive_op;  // B^(i)
  struct EdgeOps {
    int line = -1;               // index into net.lines
    bool is_parent_side = false; // this agent is the line's from-endpoint
    Eigen::MatrixXcd own_flow;   // flow leaving this bus over the line
    double flow_limit = 0.0;     // effective |flow| limit (loss folded in)
  };
  std::vector<EdgeOps> edges;
  struct FixedEdge {
    int line = -1;
    Complex value;  // frozen boundary entry (canonical from-to orientation)
  };
  std::vector<FixedEdge> fixed_edges;
  Eigen::MatrixXcd solution;  // W^(i)
  bool has_solution = false;
  double last_objective = 0.0;  // g_i at the last solve
  std::vector<double> p_history, q_history;  // trailing window + 1 samples
  AgentStatus status = AgentStatus::active;

  int local_index(int bus_id) const;
};

std::vector<BusAgent> make_agents(const NetworkTree& net,
                                  const RunConfig& cfg);

/// The subproblem of one bus for the current multipliers: its augmented
/// objective over W^(i) plus the local constraint rows (and any equalities
/// inherited from fixed children).
SdpProblem build_subproblem(const BusAgent& agent, const NetworkTree& net,
                            const MultiplierState& multipliers,
                            const RunConfig& cfg);

/// Gradient-ascent multiplier update from the two local copies of the
/// boundary entry: lambda + alpha (W^(i)_ik - W^(k)_ik).
Complex update_multiplier(Complex lambda, Complex w_from_copy,
                          Complex w_to_copy, double alpha);

/// Replaces a two-sided flow interval with the directional one:
/// [0, limit] on the parent side, [-limit, 0] on the child side.
void apply_direction_enhancement(SdpProblem& subproblem, int interval_index,
                                 bool parent_side);

/// The net-consumer premise behind the directional flow constraints:
/// every non-feeder bus must have p_max <= 0. Returns the first violating
/// bus id, or 0 when the premise holds.
int direction_enhancement_violation(const NetworkTree& net);

/// Cumulative-relative-change window test on the trailing T+1 samples.
bool window_converged(const std::vector<double>& history, int window,
                      double gamma);

struct InfeasibilityVerdict {
  bool suspected = false;
  int line = -1;
  double ratio = 0.0;  // mismatch now vs. K rounds ago
};
/// Flags an edge whose mismatch has stopped shrinking while step sizes are
/// still meaningful. Advisory; a stuck mismatch is the distributed symptom
/// of an infeasible coupling.
InfeasibilityVerdict detect_global_infeasibility(
    const std::vector<std::vector<double>>& per_line_mismatch,
    const std::vector<double>& step_sizes, const RunConfig& cfg);

struct SolveReport {
  enum class Status { converged, iteration_limit, infeasible, failed };
  Status status = Status::failed;
  bool converged = false;
  int iterations = 0;
  double objective = std::numeric_limits<double>::quiet_NaN();
  double final_mismatch = std::numeric_limits<double>::infinity();
  // Sum of the subproblem optima per round: the value the algorithm drives
  // to the centralized optimum (a lower bound until consensus).
  std::vector<double> objective_trace;
  // Sum of the local injection estimates Tr(A^(i) W^(i)); diagnostic, it
  // trails the objective by O(mismatch).
  std::vector<double> injection_estimate_trace;
  std::vector<double> mismatch_trace;  // max edge mismatch per round
  std::vector<double> step_trace;      // effective multiplier step per round
  Eigen::VectorXcd voltages;
  Eigen::VectorXd p_injections, q_injections;
  int infeasible_bus = 0;
  bool infeasibility_suspected = false;
  int suspected_line = -1;
  std::vector<std::pair<int, int>> leaf_fixes;  // (iteration, bus)
  MultiplierState multipliers;
  std::string message;
};

/// Multipliers (and schedule tweaks) carried over from a previous solve of
/// the same topology.
struct HotStart {
  MultiplierState multipliers;
  int schedule_offset = 0;
  // Under the adaptive constant-step default the full step is safe to keep;
  // dial this down (e.g. 0.1) when running the plain diminishing schedule.
  double alpha_scale = 1.0;
};
/// Throws std::invalid_argument when the previous report's topology does
/// not match the network.
HotStart hot_start(const SolveReport& previous, const NetworkTree& net);

/// Round-synchronous dual decomposition. Each round solves every active
/// bus subproblem, exchanges boundary entries over the channel (one message
/// per edge direction), updates multipliers on edges where both messages
/// arrived, and stops once every boundary mismatch is at most delta.
SolveReport run_distributed(const NetworkTree& net, const RunConfig& cfg,
                            LossyChannel& channel,
                            const HotStart* hot = nullptr);

/// Statistics of repeated lossy runs.
struct LossRun {
  double p = 0.0;
  uint64_t seed = 0;
  int iterations = 0;
  bool converged = false;
  double objective = 0.0;
};
struct LossAggregate {
  double p = 0.0;
  int runs = 0;
  int converged_runs = 0;
  double mean_iterations = 0.0;
  double stddev_iterations = 0.0;
  double convergence_rate = 0.0;
};
struct LossExperiment {
  std::vector<LossRun> rows;
  std::vector<LossAggregate> aggregates;
};
LossExperiment run_loss_experiment(const NetworkTree& net,
                                   const RunConfig& cfg,
                                   const std::vector<double>& p_values,
                                   const std::vector<uint64_t>& seeds);

}  // namespace vreg
