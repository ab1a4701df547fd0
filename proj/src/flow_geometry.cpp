#include "vreg/flow_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace vreg {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kAngleCapMargin = 1e-9;  // cap below atan(b/g)
constexpr double kBisectTol = 1e-10;      // radians
constexpr double kFeasSlack = 1e-12;

double bisect_increasing(const std::function<double(double)>& fn, double lo,
                         double hi, double tol) {
  double flo = fn(lo);
  if (flo > 0.0) {
    return lo;
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (fn(mid) >= 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

struct OracleWorkspace {
  const NetworkTree* net;
  std::vector<std::vector<int>> incident;  // per bus (1-based), line indices
  std::vector<double> q_shunt;             // constant reactive offsets
};

// Injections implied by an angle vector; returns feasibility and loss.
bool evaluate_point(const OracleWorkspace& ws, const std::vector<double>& theta,
                    double* loss_out) {
  const NetworkTree& net = *ws.net;
  const int n = net.n();
  double loss = 0.0;
  std::vector<double> p(n + 1, 0.0);
  std::vector<double> q(n + 1, 0.0);
  for (int i = 1; i <= n; ++i) {
    q[i] = ws.q_shunt[i];
  }
  for (size_t l = 0; l < net.lines.size(); ++l) {
    const Line& line = net.lines[l];
    const LineFlows f = line_flow(line.g, line.b, theta[l]);
    if (std::abs(f.p_fwd) > line.p_flow_max + kFeasSlack) {
      return false;
    }
    const double line_loss = f.p_fwd + f.p_rev;
    if (line_loss > line.loss_max + kFeasSlack) {
      return false;
    }
    p[line.from] += f.p_fwd;
    p[line.to] += f.p_rev;
    q[line.from] += f.q_fwd;
    q[line.to] += f.q_rev;
    loss += line_loss;
  }
  for (int i = 1; i <= n; ++i) {
    const Bus& bus = net.bus(i);
    if (p[i] < bus.p_min - kFeasSlack || p[i] > bus.p_max + kFeasSlack) {
      return false;
    }
    if (q[i] < bus.q_min - kFeasSlack || q[i] > bus.q_max + kFeasSlack) {
      return false;
    }
  }
  *loss_out = loss;
  return true;
}

// One golden-section pass over a single line's angle, feasibility-aware
// (infeasible probes count as +inf).
void golden_refine_coordinate(const OracleWorkspace& ws,
                              std::vector<double>& theta, size_t line,
                              double lo, double hi, double* best_loss) {
  const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
  auto probe = [&](double t) {
    const double saved = theta[line];
    theta[line] = t;
    double loss;
    const bool ok = evaluate_point(ws, theta, &loss);
    theta[line] = saved;
    return ok ? loss : std::numeric_limits<double>::infinity();
  };
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = probe(c), fd = probe(d);
  for (int it = 0; it < 60 && (b - a) > 1e-12; ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = probe(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = probe(d);
    }
  }
  const double cand = fc <= fd ? c : d;
  const double cand_loss = std::min(fc, fd);
  if (cand_loss < *best_loss) {
    theta[line] = cand;
    *best_loss = cand_loss;
  }
}

}  // namespace

LineFlows line_flow(double g, double b, double theta) {
  const double one_minus_cos = 1.0 - std::cos(theta);
  const double s = std::sin(theta);
  return LineFlows{g * one_minus_cos + b * s, g * one_minus_cos - b * s,
                   b * one_minus_cos - g * s, b * one_minus_cos + g * s};
}

double line_loss_at(double g, double theta) {
  return 2.0 * g * (1.0 - std::cos(theta));
}

Eigen::Matrix2d ellipse_map(double g, double b) {
  Eigen::Matrix2d h;
  const double diag = b * b - g * g;
  const double off = b * b + g * g;
  h << diag, off, off, diag;
  return h / (2.0 * b * g);
}

AngleBounds angle_bounds(double g, double b, double p_flow_max,
                         double loss_max) {
  if (!(g > 0.0) || !(b > 0.0)) {
    throw std::invalid_argument("angle_bounds: g and b must be positive");
  }
  AngleBounds out;

  const double loss_ratio = loss_max / (2.0 * g);
  out.theta_l =
      loss_ratio <= 2.0 ? std::acos(1.0 - loss_ratio) : kUnbounded;

  // p_fwd increases from 0 to g + sqrt(g^2+b^2) on [0, pi - atan(b/g)].
  const double theta_peak = kPi - std::atan2(b, g);
  const double p_peak = g * (1.0 - std::cos(theta_peak)) + b * std::sin(theta_peak);
  if (p_flow_max > p_peak) {
    out.theta_p = kUnbounded;
  } else {
    out.theta_p = bisect_increasing(
        [&](double t) {
          return g * (1.0 - std::cos(t)) + b * std::sin(t) - p_flow_max;
        },
        0.0, theta_peak, kBisectTol);
  }

  out.theta_bar = std::min(out.theta_p, out.theta_l);
  if (!std::isfinite(out.theta_bar)) {
    out.theta_bar = std::atan2(b, g) - kAngleCapMargin;
  }
  out.theta_tilde = std::min(std::atan2(g, b), out.theta_bar);
  return out;
}

std::vector<AngleBounds> network_angle_bounds(const NetworkTree& net) {
  std::vector<AngleBounds> out;
  out.reserve(net.lines.size());
  for (const Line& l : net.lines) {
    out.push_back(angle_bounds(l.g, l.b, l.p_flow_max, l.loss_max));
  }
  return out;
}

namespace {
double beta_sum(const NetworkTree& net, int bus, const std::vector<int>& over,
                const std::vector<AngleBounds>& line_bounds) {
  double sum = 0.0;
  for (int k : over) {
    const int l = net.line_between(bus, k);
    const Line& line = net.lines[static_cast<size_t>(l)];
    const double tt = line_bounds[static_cast<size_t>(l)].theta_tilde;
    sum += line.b - line.g * std::sin(tt) - line.b * std::cos(tt);
  }
  return sum;
}
}  // namespace

double beta(const NetworkTree& net, int bus,
            const std::vector<AngleBounds>& line_bounds) {
  return beta_sum(net, bus, net.children[static_cast<size_t>(bus)],
                  line_bounds);
}

double beta_over_neighbors(const NetworkTree& net, int bus,
                           const std::vector<AngleBounds>& line_bounds) {
  return beta_sum(net, bus, net.neighbors[static_cast<size_t>(bus)],
                  line_bounds);
}

ConditionReport check_exactness_conditions(const NetworkTree& net) {
  ConditionReport report;
  const auto bounds = network_angle_bounds(net);
  report.all_pass = true;
  for (size_t l = 0; l < net.lines.size(); ++l) {
    const Line& line = net.lines[l];
    ConditionReport::LineCheck check;
    check.from = line.from;
    check.to = line.to;
    check.theta_bar = bounds[l].theta_bar;
    check.angle_limit = std::atan2(line.b, line.g);
    check.pass = check.theta_bar < check.angle_limit;
    report.all_pass = report.all_pass && check.pass;
    report.lines.push_back(check);
  }
  for (int i = 2; i <= net.n(); ++i) {
    ConditionReport::BusCheck check;
    check.bus = i;
    check.beta_children = beta(net, i, bounds);
    check.beta_neighbors = beta_over_neighbors(net, i, bounds);
    check.q_min = net.bus(i).q_min;
    check.pass = check.q_min < check.beta_children;
    report.all_pass = report.all_pass && check.pass;
    report.buses.push_back(check);
  }
  return report;
}

OracleResult brute_force_oracle(const NetworkTree& net,
                                int grid_points_per_line) {
  if (net.n() > 5) {
    throw std::invalid_argument(
        "brute_force_oracle: network too large for exhaustive search");
  }
  if (grid_points_per_line < 3) {
    throw std::invalid_argument("brute_force_oracle: grid too coarse");
  }
  for (const Bus& b : net.buses) {
    if (std::abs(b.v_ref - 1.0) > 1e-12) {
      throw std::invalid_argument(
          "brute_force_oracle: requires unit voltage references");
    }
  }

  OracleWorkspace ws;
  ws.net = &net;
  ws.q_shunt.assign(static_cast<size_t>(net.n()) + 1, 0.0);
  for (int i = 1; i <= net.n(); ++i) {
    ws.q_shunt[static_cast<size_t>(i)] = -net.bus(i).shunt_b;
  }

  const size_t m = net.lines.size();
  const auto bounds = network_angle_bounds(net);
  std::vector<std::vector<double>> grids(m);
  for (size_t l = 0; l < m; ++l) {
    const double tb = bounds[l].theta_bar;
    grids[l].resize(static_cast<size_t>(grid_points_per_line));
    for (int j = 0; j < grid_points_per_line; ++j) {
      grids[l][static_cast<size_t>(j)] =
          -tb + 2.0 * tb * j / (grid_points_per_line - 1);
    }
  }

  OracleResult result;
  result.best_angles.assign(m, 0.0);
  if (m == 0) {
    // Single-bus network: feasibility is just the bus bounds at v = v_ref.
    double loss = 0.0;
    std::vector<double> empty;
    result.feasible = evaluate_point(ws, empty, &loss);
    result.best_loss = result.feasible ? loss : kUnbounded;
    return result;
  }

  std::vector<size_t> idx(m, 0);
  std::vector<double> theta(m, 0.0);
  bool done = false;
  while (!done) {
    for (size_t l = 0; l < m; ++l) {
      theta[l] = grids[l][idx[l]];
    }
    double loss;
    if (evaluate_point(ws, theta, &loss)) {
      // Ties resolve toward the lexicographically smaller angle vector so
      // the search order never changes the reported optimum.
      if (!result.feasible || loss < result.best_loss - 1e-15 ||
          (std::abs(loss - result.best_loss) <= 1e-15 &&
           theta < result.best_angles)) {
        result.feasible = true;
        result.best_loss = loss;
        result.best_angles = theta;
      }
    }
    size_t carry = 0;
    while (carry < m) {
      if (++idx[carry] < grids[carry].size()) {
        break;
      }
      idx[carry] = 0;
      ++carry;
    }
    done = carry == m;
  }

  if (result.feasible) {
    std::vector<double> theta_best = result.best_angles;
    for (int sweep = 0; sweep < 2; ++sweep) {
      for (size_t l = 0; l < m; ++l) {
        const double tb = bounds[l].theta_bar;
        const double cell = 2.0 * tb / (grid_points_per_line - 1);
        const double lo = std::max(-tb, theta_best[l] - cell);
        const double hi = std::min(tb, theta_best[l] + cell);
        golden_refine_coordinate(ws, theta_best, l, lo, hi,
                                 &result.best_loss);
      }
    }
    result.best_angles = theta_best;
  }
  return result;
}

double oracle_resolution_bound(const NetworkTree& net,
                               int grid_points_per_line) {
  const auto bounds = network_angle_bounds(net);
  double total = 0.0;
  for (size_t l = 0; l < net.lines.size(); ++l) {
    const double tb = bounds[l].theta_bar;
    const double cell = 2.0 * tb / (grid_points_per_line - 1);
    total += 2.0 * net.lines[l].g * std::sin(std::min(tb, kPi / 2)) *
             (cell / 2.0);
  }
  return total;
}

}  // namespace vreg
