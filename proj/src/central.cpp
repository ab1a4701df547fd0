#include "vreg/central.hpp"

#include <cmath>

namespace vreg {

SdpProblem assemble_relaxation(const NetworkTree& net,
                               const Eigen::MatrixXcd& objective) {
  SdpProblem prob = assemble_relaxation(net);
  if (objective.rows() != net.n() || objective.cols() != net.n() ||
      !is_hermitian(objective)) {
    throw std::invalid_argument(
        "assemble_relaxation: objective must be Hermitian of matching size");
  }
  prob.objective = objective;
  return prob;
}

SdpProblem assemble_relaxation(const NetworkTree& net) {
  const int n = net.n();
  SdpProblem prob;
  prob.dim = n;
  prob.objective = Eigen::MatrixXcd::Zero(n, n);

  std::vector<InjectionOperators> ops;
  ops.reserve(static_cast<size_t>(n));
  for (int i = 1; i <= n; ++i) {
    ops.push_back(injection_operators(net, i));
    prob.objective += ops.back().active;
  }

  for (int i = 1; i <= n; ++i) {
    Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(n, n);
    e(i - 1, i - 1) = 1.0;
    prob.equalities.push_back({e, net.bus(i).v_ref * net.bus(i).v_ref});
  }
  for (int i = 1; i <= n; ++i) {
    prob.intervals.push_back(
        {ops[static_cast<size_t>(i - 1)].active, net.bus(i).p_min,
         net.bus(i).p_max});
  }
  for (int i = 1; i <= n; ++i) {
    prob.intervals.push_back(
        {ops[static_cast<size_t>(i - 1)].reactive, net.bus(i).q_min,
         net.bus(i).q_max});
  }
  for (const Line& l : net.lines) {
    prob.intervals.push_back({line_loss_operator(net, l.from, l.to),
                              -kUnbounded, l.loss_max});
    prob.intervals.push_back({line_flow_operator(net, l.from, l.to),
                              -l.p_flow_max, l.p_flow_max});
  }
  return prob;
}

SolutionEvaluation evaluate_solution(const NetworkTree& net,
                                     const Eigen::VectorXcd& v) {
  constexpr double kTol = 1e-9;
  const int n = net.n();
  SolutionEvaluation ev;
  ev.p.resize(n);
  ev.q.resize(n);

  const Eigen::MatrixXcd y = admittance_matrix(net);
  const Eigen::VectorXcd s = v.cwiseProduct((y * v).conjugate());
  for (int i = 0; i < n; ++i) {
    ev.p(i) = s(i).real();
    ev.q(i) = s(i).imag();
  }

  ev.total_loss = 0.0;
  for (const Line& l : net.lines) {
    const Complex vi = v(l.from - 1);
    const Complex vk = v(l.to - 1);
    const Complex y_conj(l.g, l.b);  // conj of g - jb
    const Complex s_fwd = y_conj * (std::norm(vi) - vi * std::conj(vk));
    const Complex s_rev = y_conj * (std::norm(vk) - vk * std::conj(vi));
    ev.p_flow_fwd.push_back(s_fwd.real());
    ev.p_flow_rev.push_back(s_rev.real());
    ev.q_flow_fwd.push_back(s_fwd.imag());
    ev.q_flow_rev.push_back(s_rev.imag());
    ev.line_loss.push_back(s_fwd.real() + s_rev.real());
    ev.total_loss += ev.line_loss.back();
  }

  for (int i = 1; i <= n; ++i) {
    const Bus& bus = net.bus(i);
    if (ev.p(i - 1) < bus.p_min - kTol) {
      ev.violations.push_back({"p_min", i, 0, bus.p_min - ev.p(i - 1)});
    }
    if (ev.p(i - 1) > bus.p_max + kTol) {
      ev.violations.push_back({"p_max", i, 0, ev.p(i - 1) - bus.p_max});
    }
    if (ev.q(i - 1) < bus.q_min - kTol) {
      ev.violations.push_back({"q_min", i, 0, bus.q_min - ev.q(i - 1)});
    }
    if (ev.q(i - 1) > bus.q_max + kTol) {
      ev.violations.push_back({"q_max", i, 0, ev.q(i - 1) - bus.q_max});
    }
  }
  for (size_t l = 0; l < net.lines.size(); ++l) {
    const Line& line = net.lines[l];
    const double flow = std::abs(ev.p_flow_fwd[l]);
    if (flow > line.p_flow_max + kTol) {
      ev.violations.push_back(
          {"p_flow", line.from, line.to, flow - line.p_flow_max});
    }
    if (ev.line_loss[l] > line.loss_max + kTol) {
      ev.violations.push_back(
          {"loss", line.from, line.to, ev.line_loss[l] - line.loss_max});
    }
  }
  return ev;
}

Eigen::VectorXcd recover_voltages(const Eigen::MatrixXcd& W,
                                  const NetworkTree& net) {
  const RankFactor rf = rank_and_factor(W);
  if (rf.rank > 1) {
    throw std::domain_error(
        "recover_voltages: matrix has numeric rank above 1");
  }
  const double lmax = rf.eigenvalues(rf.eigenvalues.size() - 1);
  Eigen::VectorXcd v = std::sqrt(std::max(lmax, 0.0)) * rf.leading;
  if (std::abs(v(0)) > 0.0) {
    v *= std::conj(v(0)) / std::abs(v(0));  // feeder angle = 0
  }
  (void)net;
  return v;
}

Classification solve_and_classify(const NetworkTree& net,
                                  const SdpOptions& options) {
  Classification out;
  const ConditionReport conditions = check_exactness_conditions(net);
  out.conditions_pass = conditions.all_pass;
  if (!conditions.all_pass) {
    out.warning =
        "exactness conditions fail: the rank-based classification carries "
        "no guarantee";
  }

  out.sdp = solve_sdp(assemble_relaxation(net), options);
  switch (out.sdp.status) {
    case SdpStatus::numerical_failure:
      throw SolverFailure("relaxation solve failed: " + out.sdp.message);
    case SdpStatus::infeasible:
      out.kind = Classification::Kind::infeasible;
      return out;
    case SdpStatus::optimal:
      break;
  }
  out.relaxed_objective = out.sdp.objective;
  const RankFactor rf = rank_and_factor(out.sdp.W);
  out.rank = rf.rank;
  if (rf.rank > 1) {
    out.kind = Classification::Kind::relaxation_rank_high;
    return out;
  }
  out.kind = Classification::Kind::optimal;
  out.voltages = recover_voltages(out.sdp.W, net);
  out.evaluation = evaluate_solution(net, out.voltages);
  out.total_loss = out.evaluation.total_loss;
  return out;
}

}  // namespace vreg
