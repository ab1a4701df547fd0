#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "support/fixtures.hpp"
#include "vreg/network.hpp"

using namespace vreg;
using vreg::testsupport::make_bus;
using vreg::testsupport::make_line;
using vreg::testsupport::uniform;

namespace {

const char* kTwoBusDoc = R"({
  "version": 1,
  "buses": [
    {"id": 1, "p_min": -5.0, "p_max": 5.0, "q_min": -5.0, "q_max": 5.0},
    {"id": 2, "p_min": -1.0, "p_max": -0.5, "q_min": -1.0, "q_max": 1.0}
  ],
  "lines": [
    {"from": 1, "to": 2, "g": 1.0, "b": 2.0, "p_flow_max": 3.0, "loss_max": 1.0}
  ]
})";

Eigen::VectorXcd random_unit_voltages(std::mt19937_64& rng, int n) {
  Eigen::VectorXcd v(n);
  for (int i = 0; i < n; ++i) {
    v(i) = std::polar(1.0, uniform(rng, -0.5, 0.5));
  }
  return v;
}

}  // namespace

TEST_CASE("five-bus document loads with the feeder bounds") {
  const NetworkTree net = vreg::testsupport::load_bundled("fivebus.json");
  CHECK(net.n() == 5);
  CHECK(net.bus(1).p_max == doctest::Approx(5.2844));
  CHECK(net.bus(1).p_min == doctest::Approx(-5.4692));
  CHECK(net.bus(1).q_max == doctest::Approx(5.5798));
  CHECK(net.bus(1).q_min == doctest::Approx(-5.7604));
  CHECK(net.bus(1).v_bar == doctest::Approx(1.2247));  // metadata only
  CHECK(net.parent[2] == 1);
  CHECK(net.parent[5] == 4);
}

TEST_CASE("two-bus document yields root and leaf") {
  const NetworkTree net = load_network(kTwoBusDoc);
  CHECK(net.n() == 2);
  CHECK(net.lines.size() == 1);
  CHECK(net.lines[0].from == 1);
  CHECK(net.lines[0].to == 2);
  CHECK(net.parent[2] == 1);
  CHECK(net.children[1] == std::vector<int>{2});
}

TEST_CASE("a three-cycle is rejected") {
  const char* doc = R"({
    "version": 1,
    "buses": [
      {"id": 1, "p_min": 0, "p_max": 0, "q_min": 0, "q_max": 0},
      {"id": 2, "p_min": 0, "p_max": 0, "q_min": 0, "q_max": 0},
      {"id": 3, "p_min": 0, "p_max": 0, "q_min": 0, "q_max": 0}
    ],
    "lines": [
      {"from": 1, "to": 2, "g": 1, "b": 2},
      {"from": 2, "to": 3, "g": 1, "b": 2},
      {"from": 3, "to": 1, "g": 1, "b": 2}
    ]
  })";
  CHECK_THROWS_WITH_AS(load_network(doc),
                       doctest::Contains("cycle detected"), NetworkError);
}

TEST_CASE("validation errors name the offending element") {
  SUBCASE("disconnected graph") {
    std::vector<Bus> buses = {make_bus(1, 0, 0, 0, 0), make_bus(2, 0, 0, 0, 0),
                              make_bus(3, 0, 0, 0, 0)};
    std::vector<Line> lines = {make_line(1, 2, 1.0, 2.0)};
    CHECK_THROWS_WITH_AS(make_network(buses, lines),
                         doctest::Contains("disconnected"), NetworkError);
  }
  SUBCASE("b must exceed g") {
    std::vector<Bus> buses = {make_bus(1, 0, 0, 0, 0), make_bus(2, 0, 0, 0, 0)};
    std::vector<Line> lines = {make_line(1, 2, 2.0, 1.0)};
    CHECK_THROWS_WITH_AS(make_network(buses, lines),
                         doctest::Contains("(1,2)"), NetworkError);
  }
  SUBCASE("duplicate line") {
    std::vector<Bus> buses = {make_bus(1, 0, 0, 0, 0), make_bus(2, 0, 0, 0, 0),
                              make_bus(3, 0, 0, 0, 0)};
    std::vector<Line> lines = {make_line(1, 2, 1.0, 2.0),
                               make_line(2, 1, 1.0, 2.0)};
    CHECK_THROWS_WITH_AS(make_network(buses, lines),
                         doctest::Contains("duplicate line"), NetworkError);
  }
  SUBCASE("bad bounds ordering") {
    std::vector<Bus> buses = {make_bus(1, 0, 0, 0, 0),
                              make_bus(2, 0.5, -0.5, 0, 0)};
    std::vector<Line> lines = {make_line(1, 2, 1.0, 2.0)};
    CHECK_THROWS_WITH_AS(make_network(buses, lines), doctest::Contains("bus 2"),
                         NetworkError);
  }
}

TEST_CASE("ids are normalized breadth-first with labels kept") {
  // Document order: feeder first, then children hang off bus 9.
  std::vector<Bus> buses = {make_bus(7, -1, 1, -1, 1), make_bus(9, -1, 1, -1, 1),
                            make_bus(3, -1, 1, -1, 1)};
  std::vector<Line> lines = {make_line(7, 9, 1.0, 2.0),
                             make_line(9, 3, 1.0, 2.0)};
  const NetworkTree net = make_network(buses, lines);
  CHECK(net.bus(1).label == 7);
  CHECK(net.bus(2).label == 9);
  CHECK(net.bus(3).label == 3);
  for (const Line& l : net.lines) {
    CHECK(l.from < l.to);
  }
}

TEST_CASE("admittance matrix of the two-bus line") {
  std::vector<Bus> buses = {make_bus(1, -1, 1, -1, 1), make_bus(2, -1, 1, -1, 1)};
  std::vector<Line> lines = {make_line(1, 2, 1.0, 2.0)};
  const NetworkTree net = make_network(buses, lines);
  const Eigen::MatrixXcd y = admittance_matrix(net);
  CHECK(y(0, 0) == Complex(1.0, -2.0));
  CHECK(y(1, 1) == Complex(1.0, -2.0));
  CHECK(y(0, 1) == Complex(-1.0, 2.0));
  CHECK(y(1, 0) == Complex(-1.0, 2.0));
}

TEST_CASE("shunt-only bus produces a pure imaginary diagonal") {
  std::vector<Bus> buses = {make_bus(1, -1, 1, -1, 1)};
  buses[0].shunt_b = 0.5;
  const NetworkTree net = make_network(buses, {});
  const Eigen::MatrixXcd y = admittance_matrix(net);
  REQUIRE(y.rows() == 1);
  CHECK(y(0, 0) == Complex(0.0, 0.5));
}

TEST_CASE("admittance sparsity matches adjacency on the five-bus example") {
  const NetworkTree net = vreg::testsupport::load_bundled("fivebus.json");
  const Eigen::MatrixXcd y = admittance_matrix(net);
  CHECK((y - y.transpose()).cwiseAbs().maxCoeff() < 1e-14);
  for (int i = 1; i <= 5; ++i) {
    for (int k = i + 1; k <= 5; ++k) {
      const bool adjacent = net.line_between(i, k) >= 0;
      CHECK((std::abs(y(i - 1, k - 1)) > 0) == adjacent);
    }
  }
}

TEST_CASE("flow operator matches the closed form at right angles") {
  std::vector<Bus> buses = {make_bus(1, -5, 5, -5, 5), make_bus(2, -5, 5, -5, 5)};
  std::vector<Line> lines = {make_line(1, 2, 1.0, 2.0)};
  const NetworkTree net = make_network(buses, lines);
  const Eigen::MatrixXcd a12 = line_flow_operator(net, 1, 2);

  Eigen::VectorXcd v(2);
  v << 1.0, 1.0;
  CHECK((a12 * (v * v.adjoint())).trace().real() == doctest::Approx(0.0));

  v(1) = std::polar(1.0, -3.14159265358979323846 / 2.0);
  const Eigen::MatrixXcd w = v * v.adjoint();
  CHECK((a12 * w).trace().real() == doctest::Approx(3.0));  // g(1-cos)+b sin
  CHECK((line_loss_operator(net, 1, 2) * w).trace().real() ==
        doctest::Approx(2.0));  // 2g(1-cos)
}

TEST_CASE("injection operators are Hermitian and reproduce the power flow") {
  std::mt19937_64 rng(41);
  const NetworkTree net = vreg::testsupport::load_bundled("fivebus.json");
  const Eigen::MatrixXcd y = admittance_matrix(net);
  for (int trial = 0; trial < 25; ++trial) {
    const Eigen::VectorXcd v = random_unit_voltages(rng, net.n());
    const Eigen::VectorXcd s = v.cwiseProduct((y * v).conjugate());
    for (int i = 1; i <= net.n(); ++i) {
      const InjectionOperators ops = injection_operators(net, i);
      CHECK((ops.active - ops.active.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
      CHECK((ops.reactive - ops.reactive.adjoint()).cwiseAbs().maxCoeff() <
            1e-14);
      const Eigen::MatrixXcd w = v * v.adjoint();
      CHECK((ops.active * w).trace().real() ==
            doctest::Approx(s(i - 1).real()).epsilon(1e-12));
      CHECK((ops.reactive * w).trace().real() ==
            doctest::Approx(s(i - 1).imag()).epsilon(1e-12));
    }
  }
}

TEST_CASE("injection identity holds at non-unit reference magnitudes") {
  std::mt19937_64 rng(53);
  std::vector<Bus> buses = {make_bus(1, -5, 5, -5, 5),
                            make_bus(2, -5, 5, -5, 5),
                            make_bus(3, -5, 5, -5, 5)};
  buses[0].v_ref = 1.03;
  buses[1].v_ref = 0.97;
  buses[2].v_ref = 1.01;
  const NetworkTree net = make_network(
      buses, {make_line(1, 2, 1.0, 2.0), make_line(2, 3, 0.8, 2.4)});
  const Eigen::MatrixXcd y = admittance_matrix(net);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXcd v(3);
    for (int i = 0; i < 3; ++i) {
      v(i) = std::polar(net.bus(i + 1).v_ref, uniform(rng, -0.5, 0.5));
    }
    const Eigen::VectorXcd s = v.cwiseProduct((y * v).conjugate());
    const Eigen::MatrixXcd w = v * v.adjoint();
    for (int i = 1; i <= 3; ++i) {
      const InjectionOperators ops = injection_operators(net, i);
      const Complex via_ops((ops.active * w).trace().real(),
                            (ops.reactive * w).trace().real());
      CHECK(std::abs(via_ops - s(i - 1)) < 1e-12);
    }
  }
}

TEST_CASE("injections balance against line flows on random trees") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(vreg::testsupport::unit_draw(rng) * 4);
    const NetworkTree net = vreg::testsupport::random_conditioned_tree(rng, n);
    const Eigen::VectorXcd v = random_unit_voltages(rng, n);
    const Eigen::MatrixXcd w = v * v.adjoint();

    double injections = 0.0;
    for (int i = 1; i <= n; ++i) {
      injections += (injection_operators(net, i).active * w).trace().real();
    }
    double losses = 0.0;
    for (const Line& l : net.lines) {
      losses += (line_loss_operator(net, l.from, l.to) * w).trace().real();
    }
    CHECK(injections == doctest::Approx(losses).epsilon(1e-10));
    CHECK(losses >= -1e-12);
  }
}

TEST_CASE("incidence matrix of the two-bus network is the identity") {
  std::vector<Bus> buses = {make_bus(1, -1, 1, -1, 1), make_bus(2, -1, 1, -1, 1)};
  std::vector<Line> lines = {make_line(1, 2, 1.0, 2.0)};
  const NetworkTree net = make_network(buses, lines);
  const Eigen::MatrixXd m = incidence_matrix(net);
  CHECK(m.rows() == 2);
  CHECK(m.cols() == 2);
  CHECK(m(0, 0) == 1.0);
  CHECK(m(1, 1) == 1.0);
  CHECK(m(0, 1) == 0.0);
  CHECK(m(1, 0) == 0.0);
}

TEST_CASE("incidence rows select the flows leaving each bus") {
  std::vector<Bus> buses = {make_bus(1, -1, 1, -1, 1), make_bus(2, -1, 1, -1, 1),
                            make_bus(3, -1, 1, -1, 1)};
  std::vector<Line> lines = {make_line(1, 2, 1.0, 2.0),
                             make_line(2, 3, 1.0, 2.0)};
  const NetworkTree net = make_network(buses, lines);
  const Eigen::MatrixXd m = incidence_matrix(net);
  // Columns: (1,2), (2,1), (2,3), (3,2). Row 2 selects (2,1) and (2,3).
  CHECK(m(1, 1) == 1.0);
  CHECK(m(1, 2) == 1.0);
  CHECK(m(1, 0) == 0.0);
  CHECK(m(1, 3) == 0.0);
}

TEST_CASE("p = M f reproduces the operator injections on random trees") {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(vreg::testsupport::unit_draw(rng) * 4);
    const NetworkTree net = vreg::testsupport::random_conditioned_tree(rng, n);
    const Eigen::VectorXcd v = random_unit_voltages(rng, n);
    const Eigen::MatrixXcd w = v * v.adjoint();

    Eigen::VectorXd f(2 * (n - 1));
    for (size_t l = 0; l < net.lines.size(); ++l) {
      const Line& line = net.lines[l];
      f(static_cast<int>(2 * l)) =
          (line_flow_operator(net, line.from, line.to) * w).trace().real();
      f(static_cast<int>(2 * l + 1)) =
          (line_flow_operator(net, line.to, line.from) * w).trace().real();
    }
    const Eigen::VectorXd p = incidence_matrix(net) * f;
    for (int i = 1; i <= n; ++i) {
      const double pi =
          (injection_operators(net, i).active * w).trace().real();
      CHECK(p(i - 1) == doctest::Approx(pi).epsilon(1e-10));
    }
  }
}

TEST_CASE("network JSON round-trips") {
  const NetworkTree net = vreg::testsupport::load_bundled("fivebus.json");
  const NetworkTree again = load_network(network_to_json(net));
  CHECK(again.n() == net.n());
  for (int i = 1; i <= net.n(); ++i) {
    CHECK(again.bus(i).p_min == doctest::Approx(net.bus(i).p_min));
    CHECK(again.bus(i).q_max == doctest::Approx(net.bus(i).q_max));
  }
  for (size_t l = 0; l < net.lines.size(); ++l) {
    CHECK(again.lines[l].from == net.lines[l].from);
    CHECK(again.lines[l].g == doctest::Approx(net.lines[l].g));
  }
}
