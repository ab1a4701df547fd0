#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "vreg/flow_geometry.hpp"
#include "vreg/network.hpp"

namespace vreg::testsupport {

inline double unit_draw(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * unit_draw(rng);
}

inline Bus make_bus(int id, double p_min, double p_max, double q_min,
                    double q_max) {
  Bus b;
  b.id = id;
  b.label = id;
  b.p_min = p_min;
  b.p_max = p_max;
  b.q_min = q_min;
  b.q_max = q_max;
  return b;
}

inline Line make_line(int from, int to, double g, double b,
                      double p_flow_max = kUnbounded,
                      double loss_max = kUnbounded) {
  Line l;
  l.from = from;
  l.to = to;
  l.g = g;
  l.b = b;
  l.p_flow_max = p_flow_max;
  l.loss_max = loss_max;
  return l;
}

/// The bundled two-bus instance: wide feeder, bus 2 consumes between 0.5
/// and 1.0 per-unit of active power.
inline NetworkTree two_bus_consumer() {
  std::vector<Bus> buses = {make_bus(1, -5.0, 5.0, -5.0, 5.0),
                            make_bus(2, -1.0, -0.5, -1.0, 1.0)};
  std::vector<Line> lines = {make_line(1, 2, 1.0, 2.0, 3.0, 1.0)};
  return make_network(buses, lines);
}

inline std::string bundled_path(const char* name) {
  return std::string(VREG_DATA_DIR) + "/" + name;
}

inline NetworkTree load_bundled(const char* name) {
  return load_network_file(bundled_path(name));
}

/// Random feeder tree with a planted interior operating point, so the
/// instance is feasible with margins and satisfies the exactness
/// conditions. Angle bounds enter through the loss limits (and flow limits
/// on every other line).
inline NetworkTree random_conditioned_tree(std::mt19937_64& rng,
                                           int n_buses) {
  std::vector<Line> lines;
  std::vector<double> theta_star;
  for (int k = 2; k <= n_buses; ++k) {
    const int parent = 1 + static_cast<int>(unit_draw(rng) * (k - 1));
    const double g = uniform(rng, 0.5, 1.5);
    const double b = uniform(rng, 2.0, 3.0) * g;
    const double theta_cap = uniform(rng, 0.35, 0.6);
    const double loss_max = 2.0 * g * (1.0 - std::cos(theta_cap));
    double p_flow_max = kUnbounded;
    if (k % 2 == 0) {
      const auto f = line_flow(g, b, theta_cap);
      p_flow_max = f.p_fwd;
    }
    lines.push_back(make_line(std::min(parent, k), std::max(parent, k), g, b,
                              p_flow_max, loss_max));
    theta_star.push_back(uniform(rng, -0.25, 0.25));
  }

  // Injections at the planted angles.
  std::vector<double> p_star(static_cast<size_t>(n_buses) + 1, 0.0);
  std::vector<double> q_star(static_cast<size_t>(n_buses) + 1, 0.0);
  for (size_t l = 0; l < lines.size(); ++l) {
    const auto f = line_flow(lines[l].g, lines[l].b, theta_star[l]);
    p_star[static_cast<size_t>(lines[l].from)] += f.p_fwd;
    p_star[static_cast<size_t>(lines[l].to)] += f.p_rev;
    q_star[static_cast<size_t>(lines[l].from)] += f.q_fwd;
    q_star[static_cast<size_t>(lines[l].to)] += f.q_rev;
  }

  std::vector<Bus> buses;
  buses.push_back(make_bus(1, p_star[1] - 2.0, p_star[1] + 2.0,
                           q_star[1] - 2.0, q_star[1] + 2.0));
  for (int i = 2; i <= n_buses; ++i) {
    buses.push_back(make_bus(i, p_star[static_cast<size_t>(i)] - uniform(rng, 0.05, 0.3),
                             p_star[static_cast<size_t>(i)] + uniform(rng, 0.05, 0.3),
                             0.0, 0.0));
    buses.back().q_max = q_star[static_cast<size_t>(i)] + uniform(rng, 0.05, 0.3);
    buses.back().q_min = q_star[static_cast<size_t>(i)] - uniform(rng, 0.05, 0.3);
  }
  NetworkTree net = make_network(buses, lines);

  // Pull each reactive lower bound below the envelope beta_i so the
  // exactness conditions hold by construction.
  const auto bounds = network_angle_bounds(net);
  for (int i = 2; i <= net.n(); ++i) {
    Bus& bus = net.buses[static_cast<size_t>(i - 1)];
    const double envelope = beta(net, i, bounds);
    bus.q_min = std::min(bus.q_min, envelope - uniform(rng, 0.05, 0.2));
  }
  return net;
}

/// Random two-bus instance with both active lower bounds positive: the
/// relaxation stays feasible (the bounds sit inside the convex hull of the
/// flow arc) while no single operating point can hold both signs at once.
inline NetworkTree random_positive_lower_bound_pair(std::mt19937_64& rng) {
  const double g = uniform(rng, 0.5, 1.5);
  const double b = uniform(rng, 2.0, 3.0) * g;
  const double theta_cap = uniform(rng, 0.4, 0.7);
  const double loss_max = 2.0 * g * (1.0 - std::cos(theta_cap));
  const double p1 = uniform(rng, 0.05, 0.7) * loss_max / 2.0;
  const double p2 = uniform(rng, 0.05, 0.7) * loss_max / 2.0;
  std::vector<Bus> buses = {make_bus(1, p1, p1 + 1.0, -2.0, 2.0),
                            make_bus(2, p2, p2 + 1.0, -2.0, 2.0)};
  std::vector<Line> lines = {make_line(1, 2, g, b, kUnbounded, loss_max)};
  return make_network(buses, lines);
}

}  // namespace vreg::testsupport
