#include "vreg/distributed.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "vreg/flow_geometry.hpp"

namespace vreg {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Effective |flow| limit of a line with the loss limit folded in: on the
// feasible arc the loss bound is an angle bound, hence a flow bound.
double effective_flow_limit(const Line& line) {
  double limit = line.p_flow_max;
  if (std::isfinite(line.loss_max)) {
    const double ratio = line.loss_max / (2.0 * line.g);
    if (ratio <= 2.0) {
      const double theta_l = std::acos(1.0 - ratio);
      const double theta_peak =
          3.14159265358979323846 - std::atan2(line.b, line.g);
      if (theta_l < theta_peak) {
        limit = std::min(limit,
                         line_flow(line.g, line.b, theta_l).p_fwd);
      }
    }
  }
  return limit;
}

// The multiplier enters both endpoint objectives through the Hermitian
// bump with entry (from, to) = lambda; plus for the from-side, minus for
// the to-side. Gradient ascent on lambda then uses the plain mismatch.
void add_multiplier_bump(Eigen::MatrixXcd& objective, int from_local,
                         int to_local, Complex lambda, double sign) {
  objective(from_local, to_local) += sign * lambda;
  objective(to_local, from_local) += sign * std::conj(lambda);
}

struct EdgeState {
  // Last boundary value delivered to each endpoint (from the other side).
  Complex recv_at_from{0.0, 0.0};
  Complex recv_at_to{0.0, 0.0};
  bool has_recv_at_from = false;
  bool has_recv_at_to = false;
  bool fresh_from_side = false;  // to-agent's value arrived at from-agent
  bool fresh_to_side = false;    // from-agent's value arrived at to-agent
  bool retired = false;
  Complex fixed_value{0.0, 0.0};
};

}  // namespace

MultiplierState zero_multipliers(const NetworkTree& net) {
  MultiplierState ms;
  for (const Line& l : net.lines) {
    ms.edges.push_back({l.from, l.to});
    ms.lambda.push_back(Complex(0.0, 0.0));
    ms.last_update.push_back(-1);
  }
  return ms;
}

double step_size(int t, const RunConfig& cfg) {
  if (t < 0) {
    throw std::invalid_argument("step_size: negative iteration index");
  }
  if (cfg.step_mode == StepMode::constant) {
    return cfg.alpha0;
  }
  return cfg.alpha0 / std::sqrt(static_cast<double>(t + cfg.schedule_offset) + 1.0);
}

int BusAgent::local_index(int bus_id) const {
  const auto it = std::find(scope.begin(), scope.end(), bus_id);
  return it == scope.end() ? -1 : static_cast<int>(it - scope.begin());
}

std::vector<BusAgent> make_agents(const NetworkTree& net,
                                  const RunConfig& cfg) {
  (void)cfg;
  std::vector<BusAgent> agents;
  agents.reserve(static_cast<size_t>(net.n()));
  for (int i = 1; i <= net.n(); ++i) {
    BusAgent agent;
    agent.bus = i;
    agent.scope = net.neighbors[static_cast<size_t>(i)];
    agent.scope.push_back(i);
    std::sort(agent.scope.begin(), agent.scope.end());

    std::vector<int> idx;
    idx.reserve(agent.scope.size());
    for (int b : agent.scope) {
      idx.push_back(b - 1);
    }
    const InjectionOperators ops = injection_operators(net, i);
    agent.active_op = ops.active(idx, idx);
    agent.reactive_op = ops.reactive(idx, idx);

    for (int k : net.neighbors[static_cast<size_t>(i)]) {
      BusAgent::EdgeOps eo;
      eo.line = net.line_between(i, k);
      const Line& line = net.lines[static_cast<size_t>(eo.line)];
      eo.is_parent_side = line.from == i;
      eo.own_flow = line_flow_operator(net, i, k)(idx, idx);
      eo.flow_limit = effective_flow_limit(line);
      agent.edges.push_back(std::move(eo));
    }
    agents.push_back(std::move(agent));
  }
  return agents;
}

SdpProblem build_subproblem(const BusAgent& agent, const NetworkTree& net,
                            const MultiplierState& multipliers,
                            const RunConfig& cfg) {
  const int dim = static_cast<int>(agent.scope.size());
  SdpProblem prob;
  prob.dim = dim;
  prob.objective = agent.active_op;

  for (const auto& eo : agent.edges) {
    const Line& line = net.lines[static_cast<size_t>(eo.line)];
    const int lf = agent.local_index(line.from);
    const int lt = agent.local_index(line.to);
    const double sign = eo.is_parent_side ? 1.0 : -1.0;
    add_multiplier_bump(prob.objective, lf, lt,
                        multipliers.lambda[static_cast<size_t>(eo.line)],
                        sign);
  }

  for (int m = 0; m < dim; ++m) {
    Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(dim, dim);
    e(m, m) = 1.0;
    const double vref = net.bus(agent.scope[static_cast<size_t>(m)]).v_ref;
    prob.equalities.push_back({e, vref * vref});
  }
  for (const auto& fe : agent.fixed_edges) {
    const Line& line = net.lines[static_cast<size_t>(fe.line)];
    const int lf = agent.local_index(line.from);
    const int lt = agent.local_index(line.to);
    Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(dim, dim);
    c(lf, lt) = 0.5;
    c(lt, lf) = 0.5;
    prob.equalities.push_back({c, fe.value.real()});
    Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(dim, dim);
    d(lf, lt) = Complex(0.0, 0.5);
    d(lt, lf) = Complex(0.0, -0.5);
    prob.equalities.push_back({d, fe.value.imag()});
  }

  const Bus& bus = net.bus(agent.bus);
  prob.intervals.push_back({agent.active_op, bus.p_min, bus.p_max});
  prob.intervals.push_back({agent.reactive_op, bus.q_min, bus.q_max});
  for (const auto& eo : agent.edges) {
    prob.intervals.push_back({eo.own_flow, -eo.flow_limit, eo.flow_limit});
    if (cfg.direction_enhancement) {
      apply_direction_enhancement(
          prob, static_cast<int>(prob.intervals.size()) - 1,
          eo.is_parent_side);
    }
  }
  return prob;
}

Complex update_multiplier(Complex lambda, Complex w_from_copy,
                          Complex w_to_copy, double alpha) {
  return lambda + alpha * (w_from_copy - w_to_copy);
}

void apply_direction_enhancement(SdpProblem& subproblem, int interval_index,
                                 bool parent_side) {
  auto& row = subproblem.intervals[static_cast<size_t>(interval_index)];
  if (parent_side) {
    row.lo = 0.0;  // flow leaves the parent toward the child
  } else {
    row.hi = 0.0;  // flow seen from the child is non-positive
  }
}

int direction_enhancement_violation(const NetworkTree& net) {
  for (int i = 2; i <= net.n(); ++i) {
    if (net.bus(i).p_max > 0.0) {
      return i;
    }
  }
  return 0;
}

bool window_converged(const std::vector<double>& history, int window,
                      double gamma) {
  if (static_cast<int>(history.size()) < window + 1) {
    return false;
  }
  const size_t start = history.size() - static_cast<size_t>(window) - 1;
  double cumulative = 0.0;
  for (int k = 0; k < window; ++k) {
    const double prev = history[start + static_cast<size_t>(k)];
    const double next = history[start + static_cast<size_t>(k) + 1];
    cumulative += std::abs(prev - next) / std::max(std::abs(prev), 1e-12);
  }
  return cumulative < gamma;
}

InfeasibilityVerdict detect_global_infeasibility(
    const std::vector<std::vector<double>>& per_line_mismatch,
    const std::vector<double>& step_sizes, const RunConfig& cfg) {
  InfeasibilityVerdict verdict;
  const int k = cfg.infeasibility_window;
  for (size_t l = 0; l < per_line_mismatch.size(); ++l) {
    const auto& hist = per_line_mismatch[l];
    if (static_cast<int>(hist.size()) < k + 1) {
      continue;
    }
    const double now = hist.back();
    const double then = hist[hist.size() - 1 - static_cast<size_t>(k)];
    if (!std::isfinite(now) || !std::isfinite(then) || then <= 0.0) {
      continue;
    }
    if (now <= cfg.delta) {
      continue;
    }
    const double alpha_now =
        step_sizes.empty() ? 0.0 : step_sizes.back();
    if (alpha_now < cfg.step_floor) {
      continue;
    }
    const double ratio = now / then;
    if (ratio > cfg.infeasibility_decay) {
      verdict.suspected = true;
      verdict.line = static_cast<int>(l);
      verdict.ratio = ratio;
      return verdict;
    }
  }
  return verdict;
}

HotStart hot_start(const SolveReport& previous, const NetworkTree& net) {
  if (previous.multipliers.edges.size() != net.lines.size()) {
    throw std::invalid_argument("hot_start: topology mismatch");
  }
  for (size_t l = 0; l < net.lines.size(); ++l) {
    if (previous.multipliers.edges[l] !=
        std::make_pair(net.lines[l].from, net.lines[l].to)) {
      throw std::invalid_argument("hot_start: topology mismatch");
    }
  }
  HotStart hs;
  hs.multipliers = previous.multipliers;
  return hs;
}

SolveReport run_distributed(const NetworkTree& net, const RunConfig& cfg,
                            LossyChannel& channel, const HotStart* hot) {
  if (!(cfg.delta > 0.0) || !(cfg.alpha0 > 0.0) || !(cfg.gamma > 0.0) ||
      cfg.max_iters < 1 || cfg.window < 1) {
    throw std::invalid_argument("run_distributed: bad configuration");
  }
  RunConfig run_cfg = cfg;
  MultiplierState multipliers = zero_multipliers(net);
  if (hot != nullptr) {
    // Validate against this topology; hot_start() built it from a matching
    // network but the caller may hand us anything.
    bool matches = hot->multipliers.edges.size() == net.lines.size();
    for (size_t l = 0; matches && l < net.lines.size(); ++l) {
      matches = hot->multipliers.edges[l] ==
                std::make_pair(net.lines[l].from, net.lines[l].to);
    }
    if (!matches) {
      throw std::invalid_argument("run_distributed: hot start topology mismatch");
    }
    multipliers = hot->multipliers;
    multipliers.last_update.assign(net.lines.size(), -1);
    run_cfg.alpha0 = cfg.alpha0 * hot->alpha_scale;
    run_cfg.schedule_offset = cfg.schedule_offset + hot->schedule_offset;
  }
  if (run_cfg.direction_enhancement) {
    const int violator = direction_enhancement_violation(net);
    if (violator != 0) {
      throw std::invalid_argument(
          "direction enhancement refused: bus " +
          std::to_string(net.bus(violator).label) +
          " can be a net producer (p_max > 0)");
    }
  }

  std::vector<BusAgent> agents = make_agents(net, run_cfg);
  std::vector<EdgeState> edges(net.lines.size());
  std::vector<std::vector<double>> mismatch_history(net.lines.size());
  std::vector<double> applied_steps;
  double damping = 1.0;
  std::vector<double> recent_mismatch;  // rolling window for the damping rule
  double block_min = kInf;              // progress gauge for step recovery
  double previous_block_min = kInf;
  int block_fill = 0;
  std::vector<Complex> previous_residual;

  SolveReport report;
  report.multipliers = multipliers;

  auto boundary_value = [&](const BusAgent& agent, int line) {
    const Line& l = net.lines[static_cast<size_t>(line)];
    return agent.solution(agent.local_index(l.from),
                          agent.local_index(l.to));
  };

  for (int t = 0; t < run_cfg.max_iters; ++t) {
    // Local optimization stage.
    for (BusAgent& agent : agents) {
      if (agent.status != AgentStatus::active) {
        continue;
      }
      const SdpProblem sub =
          build_subproblem(agent, net, multipliers, run_cfg);
      const SdpSolution sol =
          agent.has_solution
              ? solve_sdp(sub, run_cfg.subproblem, agent.solution)
              : solve_sdp(sub, run_cfg.subproblem);
      if (sol.status == SdpStatus::infeasible) {
        agent.status = AgentStatus::infeasible;
        report.status = SolveReport::Status::infeasible;
        report.infeasible_bus = agent.bus;
        report.iterations = t + 1;
        report.message = "subproblem of bus " +
                         std::to_string(net.bus(agent.bus).label) +
                         " is infeasible";
        report.multipliers = multipliers;
        return report;
      }
      if (sol.status == SdpStatus::numerical_failure) {
        report.status = SolveReport::Status::failed;
        report.iterations = t + 1;
        report.message = "subproblem of bus " +
                         std::to_string(net.bus(agent.bus).label) +
                         " failed: " + sol.message;
        report.multipliers = multipliers;
        return report;
      }
      agent.solution = sol.W;
      agent.has_solution = true;
      agent.last_objective = sol.objective;

      const double p = (agent.active_op * agent.solution).trace().real();
      const double q = (agent.reactive_op * agent.solution).trace().real();
      agent.p_history.push_back(p);
      agent.q_history.push_back(q);
      const size_t keep = static_cast<size_t>(run_cfg.window) + 1;
      if (agent.p_history.size() > keep) {
        agent.p_history.erase(agent.p_history.begin());
        agent.q_history.erase(agent.q_history.begin());
      }
    }

    // Consensus stage: boundary entries cross the channel, one message per
    // direction per live edge, drawn in a fixed order.
    for (size_t l = 0; l < net.lines.size(); ++l) {
      EdgeState& es = edges[l];
      es.fresh_from_side = false;
      es.fresh_to_side = false;
      if (es.retired) {
        continue;
      }
      const Line& line = net.lines[l];
      const Complex wf =
          boundary_value(agents[static_cast<size_t>(line.from - 1)],
                         static_cast<int>(l));
      const Complex wt =
          boundary_value(agents[static_cast<size_t>(line.to - 1)],
                         static_cast<int>(l));
      if (channel.deliver()) {  // from-side value reaches the to-agent
        es.recv_at_to = wf;
        es.has_recv_at_to = true;
        es.fresh_to_side = true;
      }
      if (channel.deliver()) {  // to-side value reaches the from-agent
        es.recv_at_from = wt;
        es.has_recv_at_from = true;
        es.fresh_from_side = true;
      }
    }

    // Multiplier stage: update only where both endpoints saw this round's
    // values; a lost message leaves the stale multiplier in place.
    const double alpha = step_size(t, run_cfg) * damping;
    applied_steps.push_back(alpha);
    for (size_t l = 0; l < net.lines.size(); ++l) {
      EdgeState& es = edges[l];
      if (es.retired || !(es.fresh_from_side && es.fresh_to_side)) {
        continue;
      }
      const Line& line = net.lines[l];
      const Complex wf =
          boundary_value(agents[static_cast<size_t>(line.from - 1)],
                         static_cast<int>(l));
      const Complex wt =
          boundary_value(agents[static_cast<size_t>(line.to - 1)],
                         static_cast<int>(l));
      multipliers.lambda[l] = update_multiplier(multipliers.lambda[l], wf, wt, alpha);
      multipliers.last_update[l] = t;
    }

    // Mismatch as each endpoint sees it through its last-delivered view.
    double max_mismatch = 0.0;
    std::vector<Complex> residual(net.lines.size(), Complex(0.0, 0.0));
    for (size_t l = 0; l < net.lines.size(); ++l) {
      const EdgeState& es = edges[l];
      const Line& line = net.lines[l];
      double m;
      if (es.retired) {
        const Complex parent_copy = boundary_value(
            agents[static_cast<size_t>(line.from - 1)], static_cast<int>(l));
        m = std::abs(parent_copy - es.fixed_value);
      } else {
        const Complex wf = boundary_value(
            agents[static_cast<size_t>(line.from - 1)], static_cast<int>(l));
        const Complex wt = boundary_value(
            agents[static_cast<size_t>(line.to - 1)], static_cast<int>(l));
        const double view_from =
            es.has_recv_at_from ? std::abs(wf - es.recv_at_from) : kInf;
        const double view_to =
            es.has_recv_at_to ? std::abs(wt - es.recv_at_to) : kInf;
        m = std::max(view_from, view_to);
        residual[l] = wf - wt;
      }
      mismatch_history[l].push_back(m);
      max_mismatch = std::max(max_mismatch, m);
    }

    if (run_cfg.adaptive_damping) {
      // Sign-flipping residuals are the other oscillation signature: the
      // magnitude can sit flat while the consensus error swaps sides.
      bool anticorrelated = false;
      if (t >= 3 && !previous_residual.empty()) {
        double inner = 0.0, na = 0.0, nb = 0.0;
        for (size_t l = 0; l < residual.size(); ++l) {
          inner += (residual[l] * std::conj(previous_residual[l])).real();
          na += std::norm(residual[l]);
          nb += std::norm(previous_residual[l]);
        }
        anticorrelated =
            na > 0.0 && nb > 0.0 && inner < -0.5 * std::sqrt(na * nb);
      }
      previous_residual = residual;

      double reference = kInf;
      for (double m : recent_mismatch) {
        reference = std::min(reference, m);
      }
      const bool rebound = std::isfinite(reference) &&
                           recent_mismatch.size() >= 4 &&
                           max_mismatch > 2.0 * reference;
      if ((rebound || anticorrelated) && damping > 1.0 / 1024.0) {
        damping *= 0.5;
        recent_mismatch.clear();
        block_min = kInf;
        previous_block_min = kInf;
        block_fill = 0;
      } else if (std::isfinite(max_mismatch)) {
        // Steady block-over-block progress earns the step back; jitter
        // within a block does not matter.
        block_min = std::min(block_min, max_mismatch);
        if (++block_fill == 10) {
          if (damping < 1.0 && block_min < 0.9 * previous_block_min) {
            damping = std::min(1.0, damping * 2.0);
          }
          previous_block_min = block_min;
          block_min = kInf;
          block_fill = 0;
        }
      }
      recent_mismatch.push_back(max_mismatch);
      if (recent_mismatch.size() > 10) {
        recent_mismatch.erase(recent_mismatch.begin());
      }
    }

    double injection_estimate = 0.0;
    double subproblem_sum = 0.0;
    for (const BusAgent& agent : agents) {
      if (agent.has_solution) {
        injection_estimate +=
            (agent.active_op * agent.solution).trace().real();
      }
      subproblem_sum += agent.last_objective;
    }
    report.objective_trace.push_back(subproblem_sum);
    report.injection_estimate_trace.push_back(injection_estimate);
    report.mismatch_trace.push_back(max_mismatch);

    if (!report.infeasibility_suspected) {
      const InfeasibilityVerdict verdict = detect_global_infeasibility(
          mismatch_history, applied_steps, run_cfg);
      if (verdict.suspected) {
        report.infeasibility_suspected = true;
        report.suspected_line = verdict.line;
      }
    }

    if (max_mismatch <= run_cfg.delta) {
      report.converged = true;
      report.iterations = t + 1;
      break;
    }

    // Feasible solution generation: freeze leaves whose injections have
    // settled, shrinking the live network toward the feeder.
    if (run_cfg.leaf_fixing) {
      for (BusAgent& agent : agents) {
        if (agent.status != AgentStatus::active || agent.bus == 1) {
          continue;
        }
        int live_line = -1;
        int live_count = 0;
        for (const auto& eo : agent.edges) {
          if (!edges[static_cast<size_t>(eo.line)].retired) {
            ++live_count;
            live_line = eo.line;
          }
        }
        if (live_count != 1) {
          continue;
        }
        if (!window_converged(agent.p_history, run_cfg.window, run_cfg.gamma) ||
            !window_converged(agent.q_history, run_cfg.window, run_cfg.gamma)) {
          continue;
        }
        Complex frozen = boundary_value(agent, live_line);
        // Rank-1 boundary entries sit at modulus vref*vref; pinning the
        // parent exactly onto the PSD boundary would leave its subproblem
        // without a strict interior. Nudge the frozen value inside.
        const Line& fixed_line = net.lines[static_cast<size_t>(live_line)];
        const double cap = net.bus(fixed_line.from).v_ref *
                           net.bus(fixed_line.to).v_ref * (1.0 - 1e-5);
        if (std::abs(frozen) > cap) {
          frozen *= cap / std::abs(frozen);
        }
        EdgeState& es = edges[static_cast<size_t>(live_line)];
        es.retired = true;
        es.fixed_value = frozen;
        agent.status = AgentStatus::fixed;
        report.leaf_fixes.push_back({t + 1, agent.bus});
        const Line& line = net.lines[static_cast<size_t>(live_line)];
        const int other = line.from == agent.bus ? line.to : line.from;
        agents[static_cast<size_t>(other - 1)].fixed_edges.push_back(
            {live_line, frozen});
        // The neighbor must re-enter the solve with the new equality even
        // if it was about to settle; clear its history.
        agents[static_cast<size_t>(other - 1)].p_history.clear();
        agents[static_cast<size_t>(other - 1)].q_history.clear();
        agents[static_cast<size_t>(other - 1)].has_solution = false;
      }
    }

    if (t + 1 == run_cfg.max_iters) {
      report.iterations = run_cfg.max_iters;
    }
  }
  if (report.iterations == 0) {
    report.iterations = run_cfg.max_iters;
  }
  report.status = report.converged ? SolveReport::Status::converged
                                   : SolveReport::Status::iteration_limit;
  report.final_mismatch =
      report.mismatch_trace.empty() ? kInf : report.mismatch_trace.back();
  report.objective =
      report.objective_trace.empty()
          ? std::numeric_limits<double>::quiet_NaN()
          : report.objective_trace.back();
  report.step_trace = applied_steps;
  report.multipliers = multipliers;

  // Stitch voltages: feeder phase zero, then walk the tree using the
  // consensus boundary entries (W[f,t] carries the angle difference).
  const int n = net.n();
  report.voltages.resize(n);
  std::vector<double> angle(static_cast<size_t>(n) + 1, 0.0);
  // Lines sorted by (from, to) put every parent before its children.
  for (size_t l = 0; l < net.lines.size(); ++l) {
    const Line& line = net.lines[l];
    Complex w;
    if (edges[l].retired) {
      w = edges[l].fixed_value;
    } else {
      const Complex wf = agents[static_cast<size_t>(line.from - 1)].has_solution
                             ? boundary_value(
                                   agents[static_cast<size_t>(line.from - 1)],
                                   static_cast<int>(l))
                             : Complex(1.0, 0.0);
      const Complex wt = agents[static_cast<size_t>(line.to - 1)].has_solution
                             ? boundary_value(
                                   agents[static_cast<size_t>(line.to - 1)],
                                   static_cast<int>(l))
                             : wf;
      w = 0.5 * (wf + wt);
    }
    angle[static_cast<size_t>(line.to)] =
        angle[static_cast<size_t>(line.from)] - std::arg(w);
  }
  for (int i = 1; i <= n; ++i) {
    report.voltages(i - 1) =
        std::polar(net.bus(i).v_ref, angle[static_cast<size_t>(i)]);
  }

  report.p_injections.resize(n);
  report.q_injections.resize(n);
  report.p_injections.setZero();
  report.q_injections.setZero();
  for (const BusAgent& agent : agents) {
    if (!agent.p_history.empty()) {
      report.p_injections(agent.bus - 1) = agent.p_history.back();
      report.q_injections(agent.bus - 1) = agent.q_history.back();
    }
  }
  return report;
}

LossExperiment run_loss_experiment(const NetworkTree& net,
                                   const RunConfig& cfg,
                                   const std::vector<double>& p_values,
                                   const std::vector<uint64_t>& seeds) {
  LossExperiment exp;
  for (double p : p_values) {
    LossAggregate agg;
    agg.p = p;
    std::vector<double> iters;
    for (uint64_t seed : seeds) {
      LossyChannel channel(p, seed);
      const SolveReport report = run_distributed(net, cfg, channel);
      LossRun row;
      row.p = p;
      row.seed = seed;
      row.iterations = report.iterations;
      row.converged = report.converged;
      row.objective = report.objective;
      exp.rows.push_back(row);
      ++agg.runs;
      if (report.converged) {
        ++agg.converged_runs;
        iters.push_back(static_cast<double>(report.iterations));
      }
    }
    if (!iters.empty()) {
      const double mean =
          std::accumulate(iters.begin(), iters.end(), 0.0) /
          static_cast<double>(iters.size());
      double var = 0.0;
      for (double v : iters) {
        var += (v - mean) * (v - mean);
      }
      var /= static_cast<double>(iters.size());
      agg.mean_iterations = mean;
      agg.stddev_iterations = std::sqrt(var);
    }
    agg.convergence_rate =
        agg.runs > 0 ? static_cast<double>(agg.converged_runs) / agg.runs : 0.0;
    exp.aggregates.push_back(agg);
  }
  return exp;
}

}  // namespace vreg
