#pragma once

#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace vreg {

using Complex = std::complex<double>;

/// Sentinel for "no limit" on line flow / line loss.
inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

/// Validation or parse failure; the message names the offending element.
class NetworkError : public std::runtime_error {
 public:
  explicit NetworkError(const std::string& what) : std::runtime_error(what) {}
};

/// One bus of a radial feeder. Quantities are per-unit. A fixed
/// (uncontrollable) injection is encoded as p_min == p_max and/or
/// q_min == q_max.
struct Bus {
  int id = 0;     // normalized index, 1-based; bus 1 is the feeder
  int label = 0;  // id as written in the source document
  double p_min = 0.0;
  double p_max = 0.0;
  double q_min = 0.0;
  double q_max = 0.0;
  double v_ref = 1.0;    // voltage magnitude reference
  double shunt_b = 0.0;  // shunt susceptance b_ii
  // Informational only; some datasets carry a voltage cap that the
  // formulation does not use (|V_i| is pinned to v_ref).
  double v_bar = std::numeric_limits<double>::quiet_NaN();
};

/// One line. Admittance convention: y = g - jb with b > g > 0.
struct Line {
  int from = 0;  // parent side after canonical orientation (from < to)
  int to = 0;
  double g = 0.0;
  double b = 0.0;
  double p_flow_max = kUnbounded;  // |P_fwd| limit
  double loss_max = kUnbounded;    // P_fwd + P_rev limit
};

/// A validated radial network: n buses, n-1 lines, bus 1 is the root.
/// Ids are normalized so that every parent precedes its children; the
/// original document ids are kept in Bus::label. Immutable after
/// construction, so concurrent reads are safe.
struct NetworkTree {
  std::vector<Bus> buses;   // buses[i].id == i + 1
  std::vector<Line> lines;  // sorted by (from, to)

  // Derived adjacency, 1-based (index 0 unused).
  std::vector<int> parent;                  // parent[1] == 0
  std::vector<std::vector<int>> children;   // ascending
  std::vector<std::vector<int>> neighbors;  // ascending

  int n() const { return static_cast<int>(buses.size()); }
  const Bus& bus(int id) const { return buses[static_cast<size_t>(id - 1)]; }

  /// Index into `lines` of the line between i and k (either order), or -1.
  int line_between(int i, int k) const;
};

/// Validates, roots at the first listed bus, relabels ids breadth-first and
/// reorients every line parent->child. Throws NetworkError (cycle,
/// disconnected graph, b <= g, duplicate line, bad bounds ordering, ...),
/// naming elements by their document ids.
NetworkTree make_network(std::vector<Bus> buses, std::vector<Line> lines);

/// Parses the canonical JSON network document (see docs/network_format.md)
/// and runs make_network on it.
NetworkTree load_network(const std::string& text);
NetworkTree load_network_file(const std::string& path);

/// Serializes back to the canonical document (normalized ids).
std::string network_to_json(const NetworkTree& net);

/// Bus admittance matrix: Y[i,k] = -y_ik for adjacent pairs,
/// Y[i,i] = sum of incident y_ik plus j*shunt_b_i.
Eigen::MatrixXcd admittance_matrix(const NetworkTree& net);

/// Injection operators of one bus: P_i = Tr(active * v v^H),
/// Q_i = Tr(reactive * v v^H). Both Hermitian.
struct InjectionOperators {
  Eigen::MatrixXcd active;    // A_i
  Eigen::MatrixXcd reactive;  // B_i
};
InjectionOperators injection_operators(const NetworkTree& net, int bus);

/// Flow operator of the (i,k) line seen from i: P_ik = Tr(op * v v^H).
/// Throws NetworkError when (i,k) is not a line.
Eigen::MatrixXcd line_flow_operator(const NetworkTree& net, int i, int k);

/// Loss operator of a line: L_ik = Tr(op * v v^H) = P_ik + P_ki.
Eigen::MatrixXcd line_loss_operator(const NetworkTree& net, int i, int k);

/// Bus-to-directed-edge incidence matrix M, n x 2(n-1). Columns come in
/// line order as (from,to) then (to,from); M[i, (k,l)] = 1 iff i == k, so
/// that p = M f reproduces P_i = sum of the flows leaving bus i.
Eigen::MatrixXd incidence_matrix(const NetworkTree& net);

}  // namespace vreg
