#include "vreg/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "vreg/central.hpp"

namespace vreg {
namespace {

double unit_draw(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

std::vector<double> synthesize_irradiance(int count, uint64_t seed) {
  if (count <= 0) {
    throw std::invalid_argument("synthesize_irradiance: count must be positive");
  }
  std::mt19937_64 rng(seed);
  std::vector<double> s(static_cast<size_t>(count));
  // Smooth daily arc with abrupt multiplicative cloud dips that persist for
  // a geometric number of minutes.
  double cloud = 1.0;
  int cloud_left = 0;
  for (int t = 0; t < count; ++t) {
    const double x = (t + 0.5) / count;
    const double base = std::sin(3.14159265358979323846 * x);
    if (cloud_left > 0) {
      --cloud_left;
    } else if (unit_draw(rng) < 0.08) {
      cloud = 0.15 + 0.6 * unit_draw(rng);
      cloud_left = 1 + static_cast<int>(unit_draw(rng) * 12.0);
    } else {
      cloud = std::min(1.0, cloud + 0.25);
    }
    const double jitter = 0.05 * (unit_draw(rng) - 0.5);
    s[static_cast<size_t>(t)] =
        std::clamp(base * cloud + jitter, 0.0, 1.0);
  }
  return s;
}

std::vector<std::pair<int, double>> parse_irradiance(const std::string& text) {
  std::vector<std::pair<int, double>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') {
      continue;
    }
    std::istringstream fields(line);
    int minute;
    double scale;
    if (!(fields >> minute >> scale)) {
      throw std::invalid_argument("irradiance file: bad row: " + line);
    }
    if (scale < 0.0 || scale > 1.0) {
      throw std::invalid_argument("irradiance file: scale outside [0,1]");
    }
    if (!rows.empty() && minute != rows.back().first + 1) {
      throw std::invalid_argument("irradiance file: minutes must be contiguous");
    }
    rows.push_back({minute, scale});
  }
  if (rows.empty()) {
    throw std::invalid_argument("irradiance file: no rows");
  }
  return rows;
}

Scenario scenario_from_series(const std::vector<std::pair<int, double>>& rows,
                              int t_start, int t_end) {
  Scenario sc;
  sc.first_minute = rows.front().first;
  for (const auto& [minute, scale] : rows) {
    sc.irradiance.push_back(scale);
  }
  sc.t_start = t_start;
  sc.t_end = t_end;
  const int last = sc.first_minute + static_cast<int>(sc.irradiance.size()) - 1;
  if (t_start > t_end || t_start < sc.first_minute || t_end > last) {
    throw std::invalid_argument("scenario horizon outside the series");
  }
  return sc;
}

void validate_scenario_network(const NetworkTree& nominal) {
  for (int i = 2; i <= nominal.n(); ++i) {
    const Bus& bus = nominal.bus(i);
    if (std::abs(bus.p_max - bus.p_min) > 1e-12) {
      throw std::invalid_argument(
          "scenario network: bus " + std::to_string(bus.label) +
          " must encode a fixed nominal load (p_min == p_max)");
    }
    if (bus.p_max > 0.0) {
      throw std::invalid_argument("scenario network: bus " +
                                  std::to_string(bus.label) +
                                  " nominal load must be non-positive");
    }
    if (std::abs(bus.q_max - bus.q_min) > 1e-12) {
      throw std::invalid_argument(
          "scenario network: bus " + std::to_string(bus.label) +
          " must encode a fixed nominal reactive injection (q_min == q_max)");
    }
  }
}

NetworkTree scenario_network_at(const NetworkTree& nominal,
                                const Scenario& scenario, int minute) {
  const int idx = minute - scenario.first_minute;
  if (idx < 0 || idx >= static_cast<int>(scenario.irradiance.size())) {
    throw std::invalid_argument("scenario minute outside the series");
  }
  const double s = scenario.irradiance[static_cast<size_t>(idx)];
  NetworkTree net = nominal;
  for (int i = 2; i <= net.n(); ++i) {
    Bus& bus = net.buses[static_cast<size_t>(i - 1)];
    const double nominal_p = bus.p_min;  // == p_max by validation
    const double nominal_q = bus.q_min;
    bus.p_min = nominal_p;
    bus.p_max = nominal_p + s * scenario.pv_fraction * std::abs(nominal_p);
    if (nominal_q >= 0.0) {
      bus.q_min = 0.0;
      bus.q_max = scenario.q_flex * nominal_q;
    } else {
      bus.q_min = -scenario.q_flex * std::abs(nominal_q);
      bus.q_max = 0.0;
    }
  }
  return net;
}

ScenarioResult run_scenario(const NetworkTree& nominal,
                            const Scenario& scenario, const RunConfig& cfg) {
  validate_scenario_network(nominal);
  ScenarioResult result;
  bool have_previous = false;
  SolveReport previous;
  for (int minute = scenario.t_start; minute <= scenario.t_end; ++minute) {
    const NetworkTree net = scenario_network_at(nominal, scenario, minute);
    LossyChannel channel;  // the replay itself runs over a perfect channel
    ScenarioMinute row;
    row.minute = minute;
    SolveReport report;
    if (have_previous) {
      const HotStart hs = hot_start(previous, net);
      row.hot_started = true;
      report = run_distributed(net, cfg, channel, &hs);
    } else {
      report = run_distributed(net, cfg, channel);
    }
    row.iterations = report.iterations;
    row.converged = report.converged;
    if (report.status == SolveReport::Status::infeasible) {
      row.feasible = false;
      row.infeasible_bus = report.infeasible_bus;
      ++result.infeasible_minutes;
      have_previous = false;  // chain restarts cold after a failed minute
    } else {
      row.objective = report.objective;
      row.total_loss = evaluate_solution(net, report.voltages).total_loss;
      if (report.converged) {
        ++result.converged_minutes;
      }
      previous = report;
      have_previous = true;
    }
    result.minutes.push_back(row);
  }
  return result;
}

}  // namespace vreg
