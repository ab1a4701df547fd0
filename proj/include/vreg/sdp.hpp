#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace vreg {

/// Dense complex Hermitian matrix value.
using HermitianMatrix = Eigen::MatrixXcd;

bool is_hermitian(const Eigen::MatrixXcd& m, double rel_tol = 1e-12);

/// Thrown when a solve cannot be completed and the caller asked for
/// propagation instead of a status code.
class SolverFailure : public std::runtime_error {
 public:
  explicit SolverFailure(const std::string& what) : std::runtime_error(what) {}
};

/// min Tr(C W)  s.t.  Tr(A_j W) = b_j,  lo_j <= Tr(B_j W) <= hi_j,  W >= 0,
/// over Hermitian W. Interval sides may be +-infinity (one-sided rows); an
/// interval with lo == hi is treated as an equality.
struct SdpProblem {
  int dim = 0;
  Eigen::MatrixXcd objective;

  struct Equality {
    Eigen::MatrixXcd mat;
    double rhs = 0.0;
  };
  struct Interval {
    Eigen::MatrixXcd mat;
    double lo = 0.0;
    double hi = 0.0;
  };
  std::vector<Equality> equalities;
  std::vector<Interval> intervals;

  /// Throws std::invalid_argument on dimension mismatches, non-Hermitian
  /// constraint matrices or lo > hi.
  void validate() const;
};

enum class SdpStatus { optimal, infeasible, numerical_failure };

struct SdpOptions {
  double gap_tol = 1e-8;  // stop when gap estimate <= gap_tol * (1 + |obj|)
  double infeasibility_threshold = 1e-6;
  double t_initial = 1.0;
  double t_scale = 20.0;
  int max_outer = 64;
  int max_newton_per_center = 100;
  int max_newton_total = 6000;
  bool record_trace = false;
};

struct SdpIterate {
  double primal = 0.0;
  double dual_bound = 0.0;  // central-path lower estimate, always < primal
};

struct SdpSolution {
  SdpStatus status = SdpStatus::numerical_failure;
  Eigen::MatrixXcd W;
  double objective = std::numeric_limits<double>::quiet_NaN();
  double dual_bound = std::numeric_limits<double>::quiet_NaN();
  double gap_estimate = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;  // Newton steps, both phases
  double max_equality_residual = 0.0;
  double max_interval_violation = 0.0;
  double min_eigenvalue = 0.0;
  double infeasibility = 0.0;  // measured violation when infeasible
  std::string message;
  std::vector<SdpIterate> trace;  // filled when record_trace is set
};

/// Barrier interior-point solve. A feasibility phase (per-constraint slacks
/// plus a spectral shift, all driven to zero) either finds a strictly
/// feasible start or certifies infeasibility; the main phase follows the
/// central path of the log-det barrier with damped Newton steps and a 0.95
/// fraction-to-boundary rule. Deterministic for fixed inputs.
SdpSolution solve_sdp(const SdpProblem& problem, const SdpOptions& options = {});

/// Same, seeded with a candidate W. When the candidate is strictly feasible
/// the feasibility phase is skipped entirely.
SdpSolution solve_sdp(const SdpProblem& problem, const SdpOptions& options,
                      const Eigen::MatrixXcd& warm_start);

/// Eigenstructure of a PSD matrix: numeric rank against rank_tol * lambda_max
/// and the leading eigenvector, scaled so its first nonzero component is
/// real positive. Throws std::domain_error when W is not PSD to tolerance.
struct RankFactor {
  int rank = 0;
  Eigen::VectorXd eigenvalues;  // ascending
  Eigen::VectorXcd leading;     // unit length
};
RankFactor rank_and_factor(const Eigen::MatrixXcd& W, double rank_tol = 1e-5);

/// The real coordinate chart over Hermitian matrices the solver works in
/// (diagonal first, then re/im pairs of the upper triangle). Lossless.
Eigen::VectorXd hermitian_coordinates(const Eigen::MatrixXcd& w);
Eigen::MatrixXcd hermitian_from_coordinates(int dim, const Eigen::VectorXd& x);

}  // namespace vreg
