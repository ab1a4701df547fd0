#include "vreg/network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <queue>
#include <sstream>

#include <json.hpp>

namespace vreg {
namespace {

using json = nlohmann::json;

std::string pair_str(int a, int b) {
  return "(" + std::to_string(a) + "," + std::to_string(b) + ")";
}

void validate_bus_fields(const Bus& bus) {
  const std::string who = "bus " + std::to_string(bus.label);
  if (!(bus.p_min <= bus.p_max)) {
    throw NetworkError(who + ": bad bounds ordering, p_min > p_max");
  }
  if (!(bus.q_min <= bus.q_max)) {
    throw NetworkError(who + ": bad bounds ordering, q_min > q_max");
  }
  if (!(bus.v_ref > 0.0)) {
    throw NetworkError(who + ": v_ref must be positive");
  }
  if (!std::isfinite(bus.p_min) || !std::isfinite(bus.p_max) ||
      !std::isfinite(bus.q_min) || !std::isfinite(bus.q_max)) {
    throw NetworkError(who + ": injection bounds must be finite");
  }
}

void validate_line_fields(const Line& line) {
  const std::string who = "line " + pair_str(line.from, line.to);
  if (line.from == line.to) {
    throw NetworkError(who + ": self loop");
  }
  if (!(line.g > 0.0) || !(line.b > line.g)) {
    throw NetworkError(who + ": requires b > g > 0");
  }
  if (!(line.p_flow_max > 0.0)) {
    throw NetworkError(who + ": p_flow_max must be positive");
  }
  if (!(line.loss_max > 0.0)) {
    throw NetworkError(who + ": loss_max must be positive");
  }
}

}  // namespace

int NetworkTree::line_between(int i, int k) const {
  for (size_t l = 0; l < lines.size(); ++l) {
    if ((lines[l].from == i && lines[l].to == k) ||
        (lines[l].from == k && lines[l].to == i)) {
      return static_cast<int>(l);
    }
  }
  return -1;
}

NetworkTree make_network(std::vector<Bus> buses, std::vector<Line> lines) {
  if (buses.empty()) {
    throw NetworkError("document has no buses");
  }
  const int n = static_cast<int>(buses.size());
  if (static_cast<int>(lines.size()) != n - 1) {
    if (static_cast<int>(lines.size()) > n - 1) {
      throw NetworkError("cycle detected: " + std::to_string(lines.size()) +
                         " lines for " + std::to_string(n) + " buses");
    }
    throw NetworkError("disconnected graph: " + std::to_string(lines.size()) +
                       " lines for " + std::to_string(n) + " buses");
  }

  std::map<int, int> pos_of_label;  // document id -> position in `buses`
  for (int i = 0; i < n; ++i) {
    buses[i].label = buses[i].label != 0 ? buses[i].label : buses[i].id;
    validate_bus_fields(buses[i]);
    if (!pos_of_label.emplace(buses[i].label, i).second) {
      throw NetworkError("duplicate bus id " + std::to_string(buses[i].label));
    }
  }

  std::vector<std::vector<std::pair<int, int>>> adj(n);  // (bus pos, line idx)
  std::map<std::pair<int, int>, int> seen_pairs;
  for (size_t l = 0; l < lines.size(); ++l) {
    validate_line_fields(lines[l]);
    auto from_it = pos_of_label.find(lines[l].from);
    auto to_it = pos_of_label.find(lines[l].to);
    if (from_it == pos_of_label.end() || to_it == pos_of_label.end()) {
      throw NetworkError("line " + pair_str(lines[l].from, lines[l].to) +
                         ": unknown bus id");
    }
    auto key = std::minmax(lines[l].from, lines[l].to);
    if (!seen_pairs.emplace(key, static_cast<int>(l)).second) {
      throw NetworkError("duplicate line " + pair_str(key.first, key.second));
    }
    adj[from_it->second].push_back({to_it->second, static_cast<int>(l)});
    adj[to_it->second].push_back({from_it->second, static_cast<int>(l)});
  }
  for (auto& a : adj) {
    std::sort(a.begin(), a.end(), [&](const auto& x, const auto& y) {
      return buses[x.first].label < buses[y.first].label;
    });
  }

  // Breadth-first relabel from the feeder (first listed bus). BFS order
  // guarantees parent id < child id after normalization.
  std::vector<int> order;          // position -> visit rank
  std::vector<int> norm_id(n, 0);  // position -> normalized id
  std::vector<int> parent_pos(n, -1);
  std::vector<int> parent_line(n, -1);
  std::queue<int> frontier;
  frontier.push(0);
  norm_id[0] = 1;
  order.push_back(0);
  while (!frontier.empty()) {
    int at = frontier.front();
    frontier.pop();
    for (const auto& [next, line_idx] : adj[at]) {
      if (line_idx == parent_line[at]) {
        continue;
      }
      if (norm_id[next] != 0) {
        throw NetworkError("cycle detected at line " +
                           pair_str(buses[at].label, buses[next].label));
      }
      norm_id[next] = static_cast<int>(order.size()) + 1;
      order.push_back(next);
      parent_pos[next] = at;
      parent_line[next] = line_idx;
      frontier.push(next);
    }
  }
  if (static_cast<int>(order.size()) != n) {
    for (int i = 0; i < n; ++i) {
      if (norm_id[i] == 0) {
        throw NetworkError("disconnected graph: bus " +
                           std::to_string(buses[i].label) +
                           " unreachable from bus " +
                           std::to_string(buses[0].label));
      }
    }
  }

  NetworkTree net;
  net.buses.resize(n);
  for (int pos = 0; pos < n; ++pos) {
    Bus b = buses[pos];
    b.id = norm_id[pos];
    net.buses[norm_id[pos] - 1] = b;
  }
  net.lines.clear();
  net.lines.reserve(lines.size());
  for (int pos = 0; pos < n; ++pos) {
    if (parent_pos[pos] < 0) {
      continue;
    }
    Line l = lines[parent_line[pos]];
    l.from = norm_id[parent_pos[pos]];
    l.to = norm_id[pos];
    net.lines.push_back(l);
  }
  std::sort(net.lines.begin(), net.lines.end(),
            [](const Line& a, const Line& b) {
              return std::make_pair(a.from, a.to) < std::make_pair(b.from, b.to);
            });

  net.parent.assign(n + 1, 0);
  net.children.assign(n + 1, {});
  net.neighbors.assign(n + 1, {});
  for (const Line& l : net.lines) {
    net.parent[l.to] = l.from;
    net.children[l.from].push_back(l.to);
    net.neighbors[l.from].push_back(l.to);
    net.neighbors[l.to].push_back(l.from);
  }
  for (int i = 1; i <= n; ++i) {
    std::sort(net.children[i].begin(), net.children[i].end());
    std::sort(net.neighbors[i].begin(), net.neighbors[i].end());
  }
  return net;
}

NetworkTree load_network(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw NetworkError(std::string("cannot parse network document: ") +
                       e.what());
  }
  if (!doc.is_object() || !doc.contains("version")) {
    throw NetworkError("network document must carry a version field");
  }
  if (doc["version"].get<int>() != 1) {
    throw NetworkError("unsupported network document version");
  }
  if (!doc.contains("buses") || !doc.contains("lines")) {
    throw NetworkError("network document needs buses and lines arrays");
  }

  std::vector<Bus> buses;
  for (const auto& jb : doc["buses"]) {
    Bus b;
    try {
      b.label = jb.at("id").get<int>();
      b.p_min = jb.at("p_min").get<double>();
      b.p_max = jb.at("p_max").get<double>();
      b.q_min = jb.at("q_min").get<double>();
      b.q_max = jb.at("q_max").get<double>();
      b.v_ref = jb.value("v_ref", 1.0);
      b.shunt_b = jb.value("shunt_b", 0.0);
      b.v_bar = jb.value("v_bar", std::numeric_limits<double>::quiet_NaN());
    } catch (const json::exception& e) {
      throw NetworkError(std::string("bad bus record: ") + e.what());
    }
    buses.push_back(b);
  }
  std::vector<Line> lines;
  for (const auto& jl : doc["lines"]) {
    Line l;
    try {
      l.from = jl.at("from").get<int>();
      l.to = jl.at("to").get<int>();
      l.g = jl.at("g").get<double>();
      l.b = jl.at("b").get<double>();
      l.p_flow_max = jl.value("p_flow_max", kUnbounded);
      l.loss_max = jl.value("loss_max", kUnbounded);
    } catch (const json::exception& e) {
      throw NetworkError(std::string("bad line record: ") + e.what());
    }
    lines.push_back(l);
  }
  return make_network(std::move(buses), std::move(lines));
}

NetworkTree load_network_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw NetworkError("cannot open network file: " + path);
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return load_network(buf.str());
}

std::string network_to_json(const NetworkTree& net) {
  json doc;
  doc["version"] = 1;
  doc["buses"] = json::array();
  for (const Bus& b : net.buses) {
    json jb = {{"id", b.id},       {"p_min", b.p_min}, {"p_max", b.p_max},
               {"q_min", b.q_min}, {"q_max", b.q_max}, {"v_ref", b.v_ref},
               {"shunt_b", b.shunt_b}};
    if (std::isfinite(b.v_bar)) {
      jb["v_bar"] = b.v_bar;
    }
    if (b.label != b.id) {
      jb["source_id"] = b.label;
    }
    doc["buses"].push_back(jb);
  }
  doc["lines"] = json::array();
  for (const Line& l : net.lines) {
    json jl = {{"from", l.from}, {"to", l.to}, {"g", l.g}, {"b", l.b}};
    if (std::isfinite(l.p_flow_max)) {
      jl["p_flow_max"] = l.p_flow_max;
    }
    if (std::isfinite(l.loss_max)) {
      jl["loss_max"] = l.loss_max;
    }
    doc["lines"].push_back(jl);
  }
  return doc.dump(2);
}

Eigen::MatrixXcd admittance_matrix(const NetworkTree& net) {
  const int n = net.n();
  Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 1; i <= n; ++i) {
    y(i - 1, i - 1) = Complex(0.0, net.bus(i).shunt_b);
  }
  for (const Line& l : net.lines) {
    const Complex y_line(l.g, -l.b);
    y(l.from - 1, l.to - 1) = -y_line;
    y(l.to - 1, l.from - 1) = -y_line;
    y(l.from - 1, l.from - 1) += y_line;
    y(l.to - 1, l.to - 1) += y_line;
  }
  return y;
}

InjectionOperators injection_operators(const NetworkTree& net, int bus) {
  const int n = net.n();
  if (bus < 1 || bus > n) {
    throw NetworkError("injection_operators: bus " + std::to_string(bus) +
                       " out of range");
  }
  const Eigen::MatrixXcd y = admittance_matrix(net);
  Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(n, n);
  e(bus - 1, bus - 1) = 1.0;
  InjectionOperators ops;
  ops.active = 0.5 * (y.adjoint() * e + e * y);
  ops.reactive = (y.adjoint() * e - e * y) / Complex(0.0, 2.0);
  return ops;
}

Eigen::MatrixXcd line_flow_operator(const NetworkTree& net, int i, int k) {
  const int l = net.line_between(i, k);
  if (l < 0) {
    throw NetworkError("line " + pair_str(i, k) + " does not exist");
  }
  const Line& line = net.lines[static_cast<size_t>(l)];
  const Complex y_line(line.g, -line.b);
  Eigen::MatrixXcd op = Eigen::MatrixXcd::Zero(net.n(), net.n());
  op(i - 1, i - 1) = line.g;
  op(i - 1, k - 1) = -y_line / 2.0;
  op(k - 1, i - 1) = -std::conj(y_line) / 2.0;
  return op;
}

Eigen::MatrixXcd line_loss_operator(const NetworkTree& net, int i, int k) {
  return line_flow_operator(net, i, k) + line_flow_operator(net, k, i);
}

Eigen::MatrixXd incidence_matrix(const NetworkTree& net) {
  const int n = net.n();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, 2 * (n - 1));
  for (size_t l = 0; l < net.lines.size(); ++l) {
    m(net.lines[l].from - 1, static_cast<int>(2 * l)) = 1.0;
    m(net.lines[l].to - 1, static_cast<int>(2 * l + 1)) = 1.0;
  }
  return m;
}

}  // namespace vreg
