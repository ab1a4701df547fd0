#include "vreg/report.hpp"

#include <cmath>
#include <sstream>

namespace vreg {

using json = nlohmann::json;

namespace {

json header(const char* kind) {
  return json{{"schema_version", kReportSchemaVersion}, {"kind", kind}};
}

json voltages_json(const NetworkTree& net, const Eigen::VectorXcd& v) {
  json arr = json::array();
  for (int i = 0; i < v.size(); ++i) {
    arr.push_back({{"bus", net.bus(i + 1).label},
                   {"magnitude", std::abs(v(i))},
                   {"angle", std::arg(v(i))}});
  }
  return arr;
}

json injections_json(const NetworkTree& net, const Eigen::VectorXd& p,
                     const Eigen::VectorXd& q) {
  json arr = json::array();
  for (int i = 0; i < p.size(); ++i) {
    arr.push_back(
        {{"bus", net.bus(i + 1).label}, {"p", p(i)}, {"q", q(i)}});
  }
  return arr;
}

}  // namespace

json condition_report_json(const NetworkTree& net,
                           const ConditionReport& report) {
  json doc = header("condition_report");
  doc["buses"] = net.n();
  doc["all_pass"] = report.all_pass;
  doc["lines"] = json::array();
  for (const auto& lc : report.lines) {
    doc["lines"].push_back({{"from", net.bus(lc.from).label},
                            {"to", net.bus(lc.to).label},
                            {"theta_bar", lc.theta_bar},
                            {"angle_limit", lc.angle_limit},
                            {"pass", lc.pass}});
  }
  doc["bus_checks"] = json::array();
  for (const auto& bc : report.buses) {
    doc["bus_checks"].push_back({{"bus", net.bus(bc.bus).label},
                                 {"beta_children", bc.beta_children},
                                 {"beta_neighbors", bc.beta_neighbors},
                                 {"q_min", bc.q_min},
                                 {"pass", bc.pass}});
  }
  return doc;
}

json classification_json(const NetworkTree& net, const Classification& c) {
  json doc = header("centralized_solve");
  switch (c.kind) {
    case Classification::Kind::optimal:
      doc["outcome"] = "optimal";
      break;
    case Classification::Kind::relaxation_rank_high:
      doc["outcome"] = "relaxation_rank_high";
      break;
    case Classification::Kind::infeasible:
      doc["outcome"] = "infeasible";
      break;
  }
  doc["conditions_pass"] = c.conditions_pass;
  if (!c.warning.empty()) {
    doc["warning"] = c.warning;
  }
  if (std::isfinite(c.relaxed_objective)) {
    doc["relaxed_objective"] = c.relaxed_objective;
  }
  doc["rank"] = c.rank;
  if (c.kind == Classification::Kind::optimal) {
    doc["total_loss"] = c.total_loss;
    doc["voltages"] = voltages_json(net, c.voltages);
    doc["injections"] = injections_json(net, c.evaluation.p, c.evaluation.q);
    doc["violations"] = json::array();
    for (const auto& v : c.evaluation.violations) {
      doc["violations"].push_back({{"kind", v.kind},
                                   {"element_a", v.element_a},
                                   {"element_b", v.element_b},
                                   {"amount", v.amount}});
    }
  }
  return doc;
}

json solve_report_json(const NetworkTree& net, const SolveReport& report) {
  json doc = header("distributed_solve");
  switch (report.status) {
    case SolveReport::Status::converged:
      doc["status"] = "converged";
      break;
    case SolveReport::Status::iteration_limit:
      doc["status"] = "iteration_limit";
      break;
    case SolveReport::Status::infeasible:
      doc["status"] = "infeasible";
      break;
    case SolveReport::Status::failed:
      doc["status"] = "failed";
      break;
  }
  doc["converged"] = report.converged;
  doc["iterations"] = report.iterations;
  if (std::isfinite(report.objective)) {
    doc["objective"] = report.objective;
  }
  if (std::isfinite(report.final_mismatch)) {
    doc["final_mismatch"] = report.final_mismatch;
  }
  if (report.infeasible_bus != 0) {
    doc["infeasible_bus"] = net.bus(report.infeasible_bus).label;
  }
  doc["infeasibility_suspected"] = report.infeasibility_suspected;
  if (!report.message.empty()) {
    doc["message"] = report.message;
  }
  if (report.voltages.size() == net.n()) {
    doc["voltages"] = voltages_json(net, report.voltages);
    doc["injections"] =
        injections_json(net, report.p_injections, report.q_injections);
  }
  return doc;
}

json oracle_json(const NetworkTree& net, const OracleResult& result,
                 int grid_points) {
  json doc = header("oracle");
  doc["feasible"] = result.feasible;
  doc["grid_points_per_line"] = grid_points;
  if (result.feasible) {
    doc["best_loss"] = result.best_loss;
    doc["best_angles"] = json::array();
    for (size_t l = 0; l < net.lines.size(); ++l) {
      doc["best_angles"].push_back({{"from", net.bus(net.lines[l].from).label},
                                    {"to", net.bus(net.lines[l].to).label},
                                    {"theta", result.best_angles[l]}});
    }
  }
  return doc;
}

json loss_experiment_json(const LossExperiment& exp) {
  json doc = header("loss_experiment");
  doc["aggregates"] = json::array();
  for (const auto& a : exp.aggregates) {
    doc["aggregates"].push_back({{"p", a.p},
                                 {"runs", a.runs},
                                 {"converged_runs", a.converged_runs},
                                 {"mean_iterations", a.mean_iterations},
                                 {"stddev_iterations", a.stddev_iterations},
                                 {"convergence_rate", a.convergence_rate}});
  }
  doc["rows"] = json::array();
  for (const auto& r : exp.rows) {
    doc["rows"].push_back({{"p", r.p},
                           {"seed", r.seed},
                           {"iterations", r.iterations},
                           {"converged", r.converged},
                           {"final_objective", r.objective}});
  }
  return doc;
}

json scenario_json(const ScenarioResult& result) {
  json doc = header("scenario");
  doc["converged_minutes"] = result.converged_minutes;
  doc["infeasible_minutes"] = result.infeasible_minutes;
  doc["minutes"] = json::array();
  for (const auto& m : result.minutes) {
    json row = {{"minute", m.minute},       {"feasible", m.feasible},
                {"converged", m.converged}, {"hot_started", m.hot_started},
                {"iterations", m.iterations}};
    if (m.feasible) {
      row["objective"] = m.objective;
      row["total_loss"] = m.total_loss;
    } else {
      row["infeasible_bus"] = m.infeasible_bus;
    }
    doc["minutes"].push_back(row);
  }
  return doc;
}

std::string loss_experiment_table(const LossExperiment& exp) {
  std::ostringstream out;
  out << "p\tseed\titerations\tconverged\tfinal_objective\n";
  out.precision(12);
  for (const auto& r : exp.rows) {
    out << r.p << '\t' << r.seed << '\t' << r.iterations << '\t'
        << (r.converged ? 1 : 0) << '\t' << r.objective << '\n';
  }
  return out.str();
}

std::string solve_trace_table(const SolveReport& report) {
  std::ostringstream out;
  out << "iteration\tobjective\tmax_mismatch\n";
  out.precision(12);
  for (size_t t = 0; t < report.objective_trace.size(); ++t) {
    out << t + 1 << '\t' << report.objective_trace[t] << '\t'
        << report.mismatch_trace[t] << '\n';
  }
  return out.str();
}

}  // namespace vreg
