#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include "support/fixtures.hpp"
#include "vreg/flow_geometry.hpp"

using namespace vreg;
using vreg::testsupport::make_bus;
using vreg::testsupport::make_line;
using vreg::testsupport::uniform;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Test-side root finder, independent of the implementation under test.
double bisect_root(const std::function<double(double)>& fn, double lo,
                   double hi) {
  double flo = fn(lo);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = fn(mid);
    if ((flo <= 0.0) == (fm <= 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("line flows at the reference angles") {
  const LineFlows zero = line_flow(1.0, 2.0, 0.0);
  CHECK(zero.p_fwd == doctest::Approx(0.0));
  CHECK(zero.p_rev == doctest::Approx(0.0));
  CHECK(zero.q_fwd == doctest::Approx(0.0));
  CHECK(zero.q_rev == doctest::Approx(0.0));

  const LineFlows right = line_flow(1.0, 2.0, kPi / 2.0);
  CHECK(right.p_fwd == doctest::Approx(3.0));
  CHECK(right.p_rev == doctest::Approx(-1.0));
  CHECK(right.q_fwd == doctest::Approx(1.0));
  CHECK(right.q_rev == doctest::Approx(3.0));
}

TEST_CASE("loss identity over an angle sweep") {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 1000; ++k) {
    const double g = uniform(rng, 0.3, 2.0);
    const double b = uniform(rng, 2.0, 3.0) * g;
    const double theta = uniform(rng, -kPi, kPi);
    const LineFlows f = line_flow(g, b, theta);
    CHECK(f.p_fwd + f.p_rev ==
          doctest::Approx(2.0 * g * (1.0 - std::cos(theta))).epsilon(1e-12));
    CHECK(f.p_fwd + f.p_rev >= -1e-12);
  }
}

TEST_CASE("ellipse map fixes both distinguished points") {
  const Eigen::Matrix2d h = ellipse_map(1.0, 2.0);
  Eigen::Vector2d center(1.0, 1.0);
  Eigen::Vector2d mapped = h * center;
  CHECK(mapped(0) == doctest::Approx(2.0));
  CHECK(mapped(1) == doctest::Approx(2.0));
  CHECK((h * Eigen::Vector2d::Zero()).norm() == doctest::Approx(0.0));

  // At theta = pi/2 the active pair (3, -1) must map to the reactive (1, 3).
  Eigen::Vector2d active(3.0, -1.0);
  Eigen::Vector2d reactive = h * active;
  CHECK(reactive(0) == doctest::Approx(1.0));
  CHECK(reactive(1) == doctest::Approx(3.0));
}

TEST_CASE("flow points lie on the ellipse and map to the reactive pair") {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 10000; ++k) {
    const double g = uniform(rng, 0.3, 2.0);
    const double b = uniform(rng, 1.5, 4.0) * g;
    const double theta = uniform(rng, -kPi, kPi);
    const LineFlows f = line_flow(g, b, theta);
    const double u = 0.5 * (f.p_fwd + f.p_rev) - g;  // -g cos(theta)
    const double w = 0.5 * (f.p_fwd - f.p_rev);      // b sin(theta)
    const double residual = (u * u) / (g * g) + (w * w) / (b * b) - 1.0;
    CHECK(std::abs(residual) < 1e-9);

    const Eigen::Vector2d mapped =
        ellipse_map(g, b) * Eigen::Vector2d(f.p_fwd, f.p_rev);
    CHECK(std::abs(mapped(0) - f.q_fwd) < 1e-9);
    CHECK(std::abs(mapped(1) - f.q_rev) < 1e-9);
  }
}

TEST_CASE("angle bounds at the closed-form points") {
  SUBCASE("zero loss budget pins the angle to zero") {
    const AngleBounds ab = angle_bounds(1.0, 2.0, kUnbounded, 0.0);
    CHECK(ab.theta_l == doctest::Approx(0.0));
    CHECK(ab.theta_bar == doctest::Approx(0.0));
  }
  SUBCASE("loss budget 2g gives a right angle") {
    const AngleBounds ab = angle_bounds(1.0, 2.0, kUnbounded, 2.0);
    CHECK(ab.theta_l == doctest::Approx(kPi / 2.0));
  }
  SUBCASE("flow limit 3 on the unit line gives a right angle") {
    const AngleBounds ab = angle_bounds(1.0, 2.0, 3.0, kUnbounded);
    CHECK(ab.theta_p == doctest::Approx(kPi / 2.0).epsilon(1e-9));
    CHECK(ab.theta_bar == doctest::Approx(kPi / 2.0).epsilon(1e-9));
  }
  SUBCASE("unbounded pair is capped just below atan(b/g)") {
    const AngleBounds ab = angle_bounds(1.0, 2.0, kUnbounded, kUnbounded);
    CHECK(ab.theta_bar < std::atan2(2.0, 1.0));
    CHECK(ab.theta_bar == doctest::Approx(std::atan2(2.0, 1.0)).epsilon(1e-6));
  }
}

TEST_CASE("angle bound round-trips its defining equations") {
  std::mt19937_64 rng(13);
  for (int k = 0; k < 2000; ++k) {
    const double g = uniform(rng, 0.3, 2.0);
    const double b = uniform(rng, 1.5, 4.0) * g;
    const double p_cap = uniform(rng, 0.1, 0.9) * (g + std::hypot(g, b));
    const double l_cap = uniform(rng, 0.05, 3.9) * g;
    const AngleBounds ab = angle_bounds(g, b, p_cap, l_cap);
    if (std::isfinite(ab.theta_p)) {
      CHECK(std::abs(line_flow(g, b, ab.theta_p).p_fwd - p_cap) < 1e-9);
    }
    if (std::isfinite(ab.theta_l)) {
      CHECK(std::abs(2.0 * g * (1.0 - std::cos(ab.theta_l)) - l_cap) < 1e-9);
    }
    CHECK(ab.theta_bar == doctest::Approx(std::min(ab.theta_p, ab.theta_l)));
    CHECK(ab.theta_tilde <= std::atan2(g, b) + 1e-15);
  }
}

TEST_CASE("reactive envelope beta at the closed forms") {
  // One child, tiny angle budget: sin 0 = 0, cos 0 = 1 make the term vanish.
  {
    std::vector<Bus> buses = {make_bus(1, -1, 1, -1, 1),
                              make_bus(2, -1, 1, -1, 1)};
    // A vanishing loss budget pins theta~ to (numerically) zero.
    const NetworkTree net =
        make_network(buses, {make_line(1, 2, 1.0, 2.0, kUnbounded, 1e-12)});
    const auto bounds = network_angle_bounds(net);
    CHECK(beta(net, 1, bounds) == doctest::Approx(0.0).epsilon(1e-5));
    CHECK(beta(net, 2, bounds) == 0.0);  // leaf: empty children sum
  }
  // One child with a wide budget: minimum at theta~ = atan(g/b).
  {
    std::vector<Bus> buses = {make_bus(1, -1, 1, -1, 1),
                              make_bus(2, -1, 1, -1, 1)};
    const NetworkTree net = make_network(buses, {make_line(1, 2, 1.0, 2.0)});
    const auto bounds = network_angle_bounds(net);
    CHECK(beta(net, 1, bounds) ==
          doctest::Approx(2.0 - std::sqrt(5.0)).epsilon(1e-9));
    CHECK(beta(net, 1, bounds) == doctest::Approx(-0.23607).epsilon(1e-4));
  }
  // Two identical children double the envelope.
  {
    std::vector<Bus> buses = {make_bus(1, -1, 1, -1, 1),
                              make_bus(2, -1, 1, -1, 1),
                              make_bus(3, -1, 1, -1, 1)};
    const NetworkTree net = make_network(
        buses, {make_line(1, 2, 1.0, 2.0), make_line(1, 3, 1.0, 2.0)});
    const auto bounds = network_angle_bounds(net);
    CHECK(beta(net, 1, bounds) ==
          doctest::Approx(2.0 * (2.0 - std::sqrt(5.0))).epsilon(1e-9));
  }
}

TEST_CASE("exactness condition checks") {
  SUBCASE("a ten-degree bound passes against atan(2) = 63.4 degrees") {
    const double theta10 = 10.0 * kPi / 180.0;
    const double loss_cap = 2.0 * (1.0 - std::cos(theta10));  // g = 1
    std::vector<Bus> buses = {make_bus(1, -1, 1, -1, 1),
                              make_bus(2, -1, 1, -1, 1)};
    buses[1].q_min = -1.0;
    const NetworkTree net = make_network(
        buses, {make_line(1, 2, 1.0, 2.0, kUnbounded, loss_cap)});
    const ConditionReport report = check_exactness_conditions(net);
    REQUIRE(report.lines.size() == 1);
    CHECK(report.lines[0].pass);
    CHECK(report.lines[0].angle_limit == doctest::Approx(1.10714871779));
    CHECK(report.all_pass);
  }
  SUBCASE("a zero reactive lower bound fails against a negative envelope") {
    std::vector<Bus> buses = {make_bus(1, -1, 1, -1, 1),
                              make_bus(2, -1, 1, 0.0, 1),
                              make_bus(3, -1, 1, -1, 1)};
    const NetworkTree net = make_network(
        buses, {make_line(1, 2, 1.0, 2.0), make_line(2, 3, 1.0, 2.0)});
    const ConditionReport report = check_exactness_conditions(net);
    // Bus 2 has one child with envelope 2 - sqrt(5) < 0 and q_min = 0.
    REQUIRE(report.buses.size() == 2);
    CHECK(report.buses[0].bus == 2);
    CHECK(report.buses[0].beta_children ==
          doctest::Approx(2.0 - std::sqrt(5.0)));
    CHECK_FALSE(report.buses[0].pass);
    CHECK_FALSE(report.all_pass);
  }
  SUBCASE("a strictly negative reactive lower bound passes") {
    std::vector<Bus> buses = {make_bus(1, -1, 1, -1, 1),
                              make_bus(2, -1, 1, -1.0, 1),
                              make_bus(3, -1, 1, -1.0, 1)};
    const NetworkTree net = make_network(
        buses, {make_line(1, 2, 1.0, 2.0), make_line(2, 3, 1.0, 2.0)});
    CHECK(check_exactness_conditions(net).all_pass);
  }
}

TEST_CASE("oracle finds the zero-flow optimum when bounds are wide") {
  std::vector<Bus> buses = {make_bus(1, -5, 5, -5, 5),
                            make_bus(2, -5, 5, -5, 5)};
  const double loss_cap = 2.0 * (1.0 - std::cos(kPi / 3.0));  // theta = 60 deg
  const NetworkTree net =
      make_network(buses, {make_line(1, 2, 1.0, 2.0, kUnbounded, loss_cap)});
  const OracleResult res = brute_force_oracle(net, 2001);
  REQUIRE(res.feasible);
  CHECK(res.best_loss == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(std::abs(res.best_angles[0]) < 1e-6);
}

TEST_CASE("oracle pins the consumer optimum at the bound") {
  // Reference: the smallest |theta| with p_rev(theta) = -0.5 on g=1, b=2.
  const double theta_ref = bisect_root(
      [](double t) {
        return line_flow(1.0, 2.0, t).p_rev + 0.5;
      },
      0.0, 1.0);
  CHECK(theta_ref == doctest::Approx(0.2717).epsilon(1e-3));
  const double loss_ref = 2.0 * (1.0 - std::cos(theta_ref));
  CHECK(loss_ref == doctest::Approx(0.0734).epsilon(1e-2));

  const OracleResult res =
      brute_force_oracle(vreg::testsupport::two_bus_consumer(), 2001);
  REQUIRE(res.feasible);
  CHECK(res.best_loss == doctest::Approx(loss_ref).epsilon(1e-6));
  CHECK(res.best_angles[0] == doctest::Approx(theta_ref).epsilon(1e-4));
}

TEST_CASE("oracle reports infeasibility when both lower bounds are positive") {
  std::mt19937_64 rng(17);
  for (int k = 0; k < 20; ++k) {
    const NetworkTree net =
        vreg::testsupport::random_positive_lower_bound_pair(rng);
    const OracleResult res = brute_force_oracle(net, 2001);
    CHECK_FALSE(res.feasible);
  }
}

TEST_CASE("oracle rejects oversized networks") {
  std::mt19937_64 rng(19);
  const NetworkTree net = vreg::testsupport::random_conditioned_tree(rng, 6);
  CHECK_THROWS_AS(brute_force_oracle(net, 11), std::invalid_argument);
}

TEST_CASE("sampled reactive injections never drop below beta") {
  std::mt19937_64 rng(23);
  int samples = 0;
  while (samples < 100000) {
    // A bus with one parent line and 1..3 child lines, random admittances.
    const int n_children = 1 + static_cast<int>(uniform(rng, 0.0, 3.0));
    const double g_up = uniform(rng, 0.3, 2.0);
    const double b_up = uniform(rng, 1.5, 4.0) * g_up;
    std::vector<double> g_dn, b_dn, tilde_dn;
    const AngleBounds up =
        angle_bounds(g_up, b_up, kUnbounded, uniform(rng, 0.1, 3.9) * g_up);
    for (int c = 0; c < n_children; ++c) {
      g_dn.push_back(uniform(rng, 0.3, 2.0));
      b_dn.push_back(uniform(rng, 1.5, 4.0) * g_dn.back());
      const AngleBounds ab = angle_bounds(
          g_dn.back(), b_dn.back(), kUnbounded,
          uniform(rng, 0.1, 3.9) * g_dn.back());
      tilde_dn.push_back(ab.theta_tilde);
    }
    double envelope = 0.0;
    for (int c = 0; c < n_children; ++c) {
      envelope += b_dn[static_cast<size_t>(c)] -
                  g_dn[static_cast<size_t>(c)] *
                      std::sin(tilde_dn[static_cast<size_t>(c)]) -
                  b_dn[static_cast<size_t>(c)] *
                      std::cos(tilde_dn[static_cast<size_t>(c)]);
    }
    for (int rep = 0; rep < 20; ++rep) {
      const double theta_up = uniform(rng, 0.0, up.theta_tilde);
      // Reactive flow toward the parent: the reverse flow of the parent line.
      double q = line_flow(g_up, b_up, theta_up).q_rev;
      for (int c = 0; c < n_children; ++c) {
        const double theta = uniform(rng, -tilde_dn[static_cast<size_t>(c)],
                                     tilde_dn[static_cast<size_t>(c)]);
        q += line_flow(g_dn[static_cast<size_t>(c)],
                       b_dn[static_cast<size_t>(c)], theta)
                 .q_fwd;
      }
      CHECK(q >= envelope - 1e-12);
      ++samples;
    }
  }
}
