#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vreg/flow_geometry.hpp"
#include "vreg/network.hpp"
#include "vreg/sdp.hpp"

namespace vreg {

/// The convex relaxation of the loss-minimization problem:
/// min sum_i Tr(A_i W) over W >= 0 with W[i,i] = v_ref_i^2, injection
/// intervals per bus and one loss row plus one flow row per line.
SdpProblem assemble_relaxation(const NetworkTree& net);

/// Same constraint set under a caller-supplied objective matrix. The
/// guarantees of the rank classification assume an objective strictly
/// increasing in the injections; total loss (the default) is the one the
/// test suite pins down.
SdpProblem assemble_relaxation(const NetworkTree& net,
                               const Eigen::MatrixXcd& objective);

/// A bound violated by a candidate operating point.
struct Violation {
  std::string kind;  // "p_min", "p_max", "q_min", "q_max", "p_flow", "loss"
  int element_a = 0;
  int element_b = 0;  // second bus for line violations, else 0
  double amount = 0.0;
};

/// Physical quantities implied by a voltage vector.
struct SolutionEvaluation {
  Eigen::VectorXd p, q;            // injections per bus
  std::vector<double> p_flow_fwd;  // per line, from -> to
  std::vector<double> p_flow_rev;
  std::vector<double> q_flow_fwd;
  std::vector<double> q_flow_rev;
  std::vector<double> line_loss;
  double total_loss = 0.0;
  std::vector<Violation> violations;
};
SolutionEvaluation evaluate_solution(const NetworkTree& net,
                                     const Eigen::VectorXcd& v);

/// Rank-1 voltage recovery: v = sqrt(lambda_max) * u with the feeder angle
/// pinned to zero. Throws std::domain_error when the numeric rank exceeds 1.
Eigen::VectorXcd recover_voltages(const Eigen::MatrixXcd& W,
                                  const NetworkTree& net);

/// Outcome of the relaxation: a rank-1 optimum solves the original problem
/// exactly; a higher-rank optimum or an infeasible relaxation certifies the
/// original problem infeasible (under the exactness conditions).
struct Classification {
  enum class Kind { optimal, relaxation_rank_high, infeasible };
  Kind kind = Kind::infeasible;
  double relaxed_objective = std::numeric_limits<double>::quiet_NaN();
  int rank = 0;
  Eigen::VectorXcd voltages;       // optimal only
  double total_loss = std::numeric_limits<double>::quiet_NaN();
  SolutionEvaluation evaluation;   // optimal only
  bool conditions_pass = false;
  std::string warning;             // set when the exactness conditions fail
  SdpSolution sdp;
};

/// Solve the relaxation and classify per the exactness dichotomy. When the
/// angle / reactive-bound conditions fail we still solve and report, with
/// the classification marked as carrying no guarantee. Numerical failures
/// propagate as SolverFailure.
Classification solve_and_classify(const NetworkTree& net,
                                  const SdpOptions& options = {});

}  // namespace vreg
