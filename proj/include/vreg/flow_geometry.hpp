#pragma once

#include <vector>

#include <Eigen/Dense>

#include "vreg/network.hpp"

namespace vreg {

/// Power flows across one line at |V| = 1 on both ends, as a function of
/// the angle difference theta = theta_from - theta_to.
struct LineFlows {
  double p_fwd;  // g(1-cos) + b sin
  double p_rev;  // g(1-cos) - b sin
  double q_fwd;  // b(1-cos) - g sin
  double q_rev;  // b(1-cos) + g sin
};
LineFlows line_flow(double g, double b, double theta);

/// Line loss at angle theta: p_fwd + p_rev = 2g(1-cos theta).
double line_loss_at(double g, double theta);

/// The 2x2 map taking active flow pairs (p_fwd, p_rev) on the flow ellipse
/// to the reactive pairs (q_fwd, q_rev):
///   H = 1/(2bg) [[b^2-g^2, b^2+g^2], [b^2+g^2, b^2-g^2]].
Eigen::Matrix2d ellipse_map(double g, double b);

/// Angle limits implied by the flow and loss limits of a line. Entries are
/// +infinity when the corresponding limit can never bind. theta_bar of a
/// line with both limits unbounded is capped just below atan(b/g) so the
/// exactness angle condition holds by construction.
struct AngleBounds {
  double theta_p;      // smallest positive root of p_fwd(theta) = p_flow_max
  double theta_l;      // acos(1 - loss_max/(2g)), or +inf
  double theta_bar;    // min of the two (capped when both infinite)
  double theta_tilde;  // min(atan(g/b), theta_bar)
};
AngleBounds angle_bounds(double g, double b, double p_flow_max,
                         double loss_max);

/// Per-line angle bounds in line order.
std::vector<AngleBounds> network_angle_bounds(const NetworkTree& net);

/// Reactive-injection lower envelope of a bus, summed over its children:
/// beta_i = sum_k b_ik - g_ik sin(theta~_ik) - b_ik cos(theta~_ik).
double beta(const NetworkTree& net, int bus,
            const std::vector<AngleBounds>& line_bounds);

/// Same sum taken over all neighbors (parent line included); surfaced in
/// the condition report because the two readings differ for mid-tree buses.
double beta_over_neighbors(const NetworkTree& net, int bus,
                           const std::vector<AngleBounds>& line_bounds);

/// Exactness conditions for the convex relaxation: per line, the implied
/// angle bound must stay below atan(b/g); per non-root bus, the reactive
/// lower bound must stay strictly below beta_i.
struct ConditionReport {
  struct LineCheck {
    int from = 0, to = 0;
    double theta_bar = 0.0;
    double angle_limit = 0.0;  // atan(b/g)
    bool pass = false;
  };
  struct BusCheck {
    int bus = 0;
    double beta_children = 0.0;
    double beta_neighbors = 0.0;
    double q_min = 0.0;
    bool pass = false;
  };
  std::vector<LineCheck> lines;
  std::vector<BusCheck> buses;  // buses 2..n
  bool all_pass = false;
};
ConditionReport check_exactness_conditions(const NetworkTree& net);

/// Exhaustive grid search over per-line angles; the independent reference
/// for feasibility and minimum loss on desk-size networks (n <= 5). The
/// grid covers [-theta_bar, theta_bar] per line and is locally refined by
/// golden-section sweeps around the best cell.
struct OracleResult {
  bool feasible = false;
  double best_loss = std::numeric_limits<double>::infinity();
  std::vector<double> best_angles;  // per line, theta_from - theta_to
};
OracleResult brute_force_oracle(const NetworkTree& net,
                                int grid_points_per_line = 2001);

/// Loss error bound of the oracle grid: sum over lines of the maximum loss
/// slope times half a grid cell. `brute_force_oracle` results are within
/// this much of the continuum optimum.
double oracle_resolution_bound(const NetworkTree& net,
                               int grid_points_per_line);

}  // namespace vreg
