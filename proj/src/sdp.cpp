#include "vreg/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace vreg {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kFractionToBoundary = 0.95;
constexpr double kEqualityDropTol = 1e-10;   // rank-revealing pivot threshold
constexpr double kDegenerateInterval = 1e-12;
constexpr double kNewtonTargetDec = 1e-9;    // decrement^2 / 2 at a center
constexpr double kNewtonAcceptDec = 1e-5;    // good enough to move on

// ---------------------------------------------------------------------------
// Real coordinates over Hermitian matrices: n diagonal entries followed by
// (re, im) pairs of the strict upper triangle in lexicographic order.
// ---------------------------------------------------------------------------
struct Vectorizer {
  int n = 0;
  int nx = 0;
  std::vector<std::pair<int, int>> pairs;

  explicit Vectorizer(int dim) : n(dim), nx(dim * dim) {
    pairs.reserve(static_cast<size_t>(n) * (n - 1) / 2);
    for (int i = 0; i < n; ++i) {
      for (int k = i + 1; k < n; ++k) {
        pairs.push_back({i, k});
      }
    }
  }
  int re_index(size_t p) const { return n + 2 * static_cast<int>(p); }
  int im_index(size_t p) const { return n + 2 * static_cast<int>(p) + 1; }

  // Row r with Tr(A W) = r . coords(W) for Hermitian A.
  Eigen::VectorXd trace_row(const Eigen::MatrixXcd& a) const {
    Eigen::VectorXd row(nx);
    for (int d = 0; d < n; ++d) {
      row(d) = a(d, d).real();
    }
    for (size_t p = 0; p < pairs.size(); ++p) {
      const auto [i, k] = pairs[p];
      row(re_index(p)) = 2.0 * a(i, k).real();
      row(im_index(p)) = 2.0 * a(i, k).imag();
    }
    return row;
  }

  Eigen::VectorXd coords(const Eigen::MatrixXcd& w) const {
    Eigen::VectorXd x(nx);
    for (int d = 0; d < n; ++d) {
      x(d) = w(d, d).real();
    }
    for (size_t p = 0; p < pairs.size(); ++p) {
      const auto [i, k] = pairs[p];
      x(re_index(p)) = w(i, k).real();
      x(im_index(p)) = w(i, k).imag();
    }
    return x;
  }

  Eigen::MatrixXcd matrix(const Eigen::VectorXd& x) const {
    Eigen::MatrixXcd w = Eigen::MatrixXcd::Zero(n, n);
    for (int d = 0; d < n; ++d) {
      w(d, d) = x(d);
    }
    for (size_t p = 0; p < pairs.size(); ++p) {
      const auto [i, k] = pairs[p];
      const std::complex<double> v(x(re_index(p)), x(im_index(p)));
      w(i, k) = v;
      w(k, i) = std::conj(v);
    }
    return w;
  }
};

// ---------------------------------------------------------------------------
// Equality pre-reduction: rank-revealing Gauss-Jordan with full pivoting.
// Produces x = x_particular + N z with z free, or an inconsistency verdict.
// ---------------------------------------------------------------------------
struct ReducedSpace {
  bool inconsistent = false;
  double inconsistency = 0.0;
  int nx = 0;
  int nz = 0;
  Eigen::VectorXd x_particular;
  Eigen::MatrixXd null_basis;  // nx x nz
  std::vector<int> free_coords;
};

ReducedSpace reduce_equalities(Eigen::MatrixXd e, Eigen::VectorXd b) {
  ReducedSpace rs;
  rs.nx = static_cast<int>(e.cols());
  const int ne = static_cast<int>(e.rows());
  const double rhs_scale = ne > 0 ? std::max(1.0, b.cwiseAbs().maxCoeff()) : 1.0;
  const double mat_scale =
      ne > 0 ? std::max(1.0, e.cwiseAbs().maxCoeff()) : 1.0;
  const double pivot_tol = kEqualityDropTol * mat_scale;

  std::vector<char> row_used(static_cast<size_t>(ne), 0);
  std::vector<char> col_used(static_cast<size_t>(rs.nx), 0);
  std::vector<int> pivot_rows, pivot_cols;
  for (;;) {
    int bi = -1, bj = -1;
    double best = pivot_tol;
    for (int r = 0; r < ne; ++r) {
      if (row_used[static_cast<size_t>(r)]) continue;
      for (int c = 0; c < rs.nx; ++c) {
        if (col_used[static_cast<size_t>(c)]) continue;
        const double v = std::abs(e(r, c));
        if (v > best) {
          best = v;
          bi = r;
          bj = c;
        }
      }
    }
    if (bi < 0) break;
    const double piv = e(bi, bj);
    e.row(bi) /= piv;
    b(bi) /= piv;
    for (int r = 0; r < ne; ++r) {
      if (r == bi) continue;
      const double factor = e(r, bj);
      if (factor != 0.0) {
        e.row(r) -= factor * e.row(bi);
        b(r) -= factor * b(bi);
      }
    }
    row_used[static_cast<size_t>(bi)] = 1;
    col_used[static_cast<size_t>(bj)] = 1;
    pivot_rows.push_back(bi);
    pivot_cols.push_back(bj);
  }

  for (int r = 0; r < ne; ++r) {
    if (!row_used[static_cast<size_t>(r)] &&
        std::abs(b(r)) > 1e-8 * rhs_scale) {
      rs.inconsistent = true;
      rs.inconsistency = std::max(rs.inconsistency, std::abs(b(r)));
    }
  }
  if (rs.inconsistent) return rs;

  for (int c = 0; c < rs.nx; ++c) {
    if (!col_used[static_cast<size_t>(c)]) rs.free_coords.push_back(c);
  }
  rs.nz = static_cast<int>(rs.free_coords.size());
  rs.x_particular = Eigen::VectorXd::Zero(rs.nx);
  for (size_t t = 0; t < pivot_rows.size(); ++t) {
    rs.x_particular(pivot_cols[t]) = b(pivot_rows[t]);
  }
  rs.null_basis = Eigen::MatrixXd::Zero(rs.nx, rs.nz);
  for (int f = 0; f < rs.nz; ++f) {
    const int fc = rs.free_coords[static_cast<size_t>(f)];
    rs.null_basis(fc, f) = 1.0;
    for (size_t t = 0; t < pivot_rows.size(); ++t) {
      rs.null_basis(pivot_cols[t], f) = -e(pivot_rows[t], fc);
    }
  }
  return rs;
}

// value = a0 + a . z must stay strictly positive.
struct Side {
  Eigen::VectorXd a;
  double a0 = 0.0;
};

struct Workspace {
  int n = 0;
  int nz = 0;
  Eigen::MatrixXcd w_offset;
  std::vector<Eigen::MatrixXcd> basis;  // Hermitian, one per z coordinate
  Eigen::VectorXd c_z;
  double c0 = 0.0;
  std::vector<Side> sides;
  double nu = 0.0;  // barrier parameter of the main phase

  Eigen::MatrixXcd w_at(const Eigen::VectorXd& z) const {
    Eigen::MatrixXcd w = w_offset;
    for (int f = 0; f < nz; ++f) {
      w += z(f) * basis[f];
    }
    return w;
  }
  Eigen::MatrixXcd delta_w(const Eigen::VectorXd& dz) const {
    Eigen::MatrixXcd w = Eigen::MatrixXcd::Zero(n, n);
    for (int f = 0; f < nz; ++f) {
      w += dz(f) * basis[f];
    }
    return w;
  }
  double objective(const Eigen::VectorXd& z) const { return c0 + c_z.dot(z); }
  double side_value(size_t j, const Eigen::VectorXd& z) const {
    return sides[j].a0 + sides[j].a.dot(z);
  }
};

double trace_product(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  return a.transpose().cwiseProduct(b).sum().real();
}

double log_det_psd(const Eigen::LLT<Eigen::MatrixXcd>& llt, int n) {
  double v = 0.0;
  const auto& l = llt.matrixLLT();
  for (int i = 0; i < n; ++i) {
    v += std::log(l(i, i).real());
  }
  return 2.0 * v;
}

// Largest step keeping W + alpha dW strictly PD, via the whitened spectrum.
double psd_step_limit(const Eigen::LLT<Eigen::MatrixXcd>& llt,
                      const Eigen::MatrixXcd& dw) {
  const Eigen::MatrixXcd x =
      llt.matrixL().solve(dw);  // L^-1 dW
  const Eigen::MatrixXcd white =
      llt.matrixL().solve(x.adjoint()).adjoint();  // L^-1 dW L^-H
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
      0.5 * (white + white.adjoint()), Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues()(0);
  return lmin < 0.0 ? -1.0 / lmin : kInf;
}

double min_eigenvalue(const Eigen::MatrixXcd& w) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
      0.5 * (w + w.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

bool solve_newton_system(Eigen::MatrixXd h, const Eigen::VectorXd& rhs,
                         Eigen::VectorXd* out) {
  const double base = 1.0 + h.diagonal().cwiseAbs().maxCoeff() /
                                std::max(1, static_cast<int>(h.rows()));
  double ridge = 0.0;
  for (int attempt = 0; attempt < 4; ++attempt) {
    Eigen::MatrixXd hr = h;
    if (ridge > 0.0) {
      hr.diagonal().array() += ridge;
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(hr);
    if (ldlt.info() == Eigen::Success) {
      Eigen::VectorXd d = ldlt.solve(rhs);
      if (d.allFinite()) {
        *out = d;
        return true;
      }
    }
    ridge = ridge == 0.0 ? 1e-13 * base : ridge * 1e3;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Main phase: minimize t c(z) - sum log f_j(z) - logdet W(z).
// ---------------------------------------------------------------------------
struct CenterOutcome {
  bool ok = false;
  bool stalled = false;
  int steps = 0;
  std::string message;
};

class MainPhase {
 public:
  MainPhase(const Workspace& ws, const SdpOptions& opt, SdpSolution* sol)
      : ws_(ws), opt_(opt), sol_(sol) {}

  double phi(double t, const Eigen::VectorXd& z) const {
    double val = t * ws_.objective(z);
    for (size_t j = 0; j < ws_.sides.size(); ++j) {
      const double f = ws_.side_value(j, z);
      if (f <= 0.0) return kInf;
      val -= std::log(f);
    }
    const Eigen::MatrixXcd w = ws_.w_at(z);
    Eigen::LLT<Eigen::MatrixXcd> llt(w);
    if (llt.info() != Eigen::Success) return kInf;
    val -= log_det_psd(llt, ws_.n);
    return val;
  }

  CenterOutcome center(double t, Eigen::VectorXd& z) {
    CenterOutcome out;
    for (int it = 0; it < opt_.max_newton_per_center; ++it) {
      if (sol_->iterations >= opt_.max_newton_total) {
        out.message = "newton budget exhausted";
        return out;
      }
      const Eigen::MatrixXcd w = ws_.w_at(z);
      Eigen::LLT<Eigen::MatrixXcd> llt(w);
      if (llt.info() != Eigen::Success) {
        out.message = "iterate left the PSD cone";
        return out;
      }
      const Eigen::MatrixXcd identity =
          Eigen::MatrixXcd::Identity(ws_.n, ws_.n);
      const Eigen::MatrixXcd s = llt.solve(identity);

      Eigen::VectorXd grad = t * ws_.c_z;
      Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(ws_.nz, ws_.nz);
      for (size_t j = 0; j < ws_.sides.size(); ++j) {
        const double f = ws_.side_value(j, z);
        grad -= ws_.sides[j].a / f;
        hess += (ws_.sides[j].a * ws_.sides[j].a.transpose()) / (f * f);
      }
      std::vector<Eigen::MatrixXcd> m(static_cast<size_t>(ws_.nz));
      for (int f = 0; f < ws_.nz; ++f) {
        m[static_cast<size_t>(f)] = s * ws_.basis[f];
        grad(f) -= m[static_cast<size_t>(f)].trace().real();
      }
      for (int f = 0; f < ws_.nz; ++f) {
        for (int g = f; g < ws_.nz; ++g) {
          const double v = trace_product(m[static_cast<size_t>(f)],
                                         m[static_cast<size_t>(g)]);
          hess(f, g) += v;
          if (g != f) hess(g, f) += v;
        }
      }

      Eigen::VectorXd dz;
      if (!solve_newton_system(hess, -grad, &dz)) {
        out.message = "newton system is numerically singular";
        return out;
      }
      const double dec2 = -grad.dot(dz);
      if (opt_.record_trace) {
        const double primal = ws_.objective(z);
        sol_->trace.push_back({primal, primal - ws_.nu / t});
      }
      ++sol_->iterations;
      ++out.steps;
      if (dec2 * 0.5 <= kNewtonTargetDec) {
        out.ok = true;
        return out;
      }

      double alpha_max = kInf;
      for (size_t j = 0; j < ws_.sides.size(); ++j) {
        const double slope = ws_.sides[j].a.dot(dz);
        if (slope < 0.0) {
          alpha_max = std::min(alpha_max, -ws_.side_value(j, z) / slope);
        }
      }
      alpha_max = std::min(alpha_max, psd_step_limit(llt, ws_.delta_w(dz)));
      double alpha = std::min(1.0, kFractionToBoundary * alpha_max);

      const double phi0 = phi(t, z);
      const double slope = grad.dot(dz);
      bool accepted = false;
      for (int ls = 0; ls < 60; ++ls) {
        const double phi1 = phi(t, z + alpha * dz);
        if (phi1 <= phi0 + 1e-4 * alpha * slope) {
          z += alpha * dz;
          accepted = true;
          break;
        }
        alpha *= 0.5;
        if (alpha < 1e-16) break;
      }
      if (!accepted) {
        out.ok = dec2 * 0.5 <= kNewtonAcceptDec;
        out.stalled = !out.ok;
        out.message = out.ok ? "" : "line search stalled";
        return out;
      }
    }
    // Centering budget ran out; accept if the last decrement was small.
    const double phi_now = phi(t, z);
    (void)phi_now;
    out.ok = true;
    out.message = "centering budget reached";
    return out;
  }

 private:
  const Workspace& ws_;
  const SdpOptions& opt_;
  SdpSolution* sol_;
};

// ---------------------------------------------------------------------------
// Feasibility phase: minimize sum(s) + sigma with slacks on every scalar
// side and a spectral shift sigma on the PSD cone. Exits early the moment a
// strictly feasible point appears; a positive certified lower bound on the
// optimum certifies infeasibility.
// ---------------------------------------------------------------------------
struct Phase1Result {
  enum class Kind { strictly_feasible, infeasible, failure } kind;
  Eigen::VectorXd z;
  double violation = 0.0;
  std::string message;
};

class FeasibilityPhase {
 public:
  FeasibilityPhase(const Workspace& ws, const SdpOptions& opt,
                   SdpSolution* sol)
      : ws_(ws), opt_(opt), sol_(sol) {
    ms_ = static_cast<int>(ws.sides.size());
    ny_ = ws.nz + ms_ + 1;
    nu_ = ws.n + 1 + 2 * ms_;
  }

  Phase1Result run(const Eigen::VectorXd& z_init) {
    Eigen::VectorXd z = z_init;
    const Eigen::MatrixXcd w0 = ws_.w_at(z);
    const double lmin0 = min_eigenvalue(w0);
    double sigma = std::max(1.0, -1.5 * lmin0);
    Eigen::VectorXd s(ms_);
    for (int j = 0; j < ms_; ++j) {
      const double f = ws_.side_value(static_cast<size_t>(j), z);
      s(j) = std::max(0.0, -f) + std::max(1.0, 0.1 * std::abs(f));
    }

    double t = 1.0;
    for (int outer = 0; outer < opt_.max_outer; ++outer) {
      for (int it = 0; it < opt_.max_newton_per_center; ++it) {
        if (sol_->iterations >= opt_.max_newton_total) {
          return finish(z, s, sigma, t, "newton budget exhausted");
        }
        if (strictly_feasible(z)) {
          Phase1Result res;
          res.kind = Phase1Result::Kind::strictly_feasible;
          res.z = z;
          return res;
        }
        if (!newton_step(t, z, s, sigma)) {
          return finish(z, s, sigma, t, "feasibility phase stalled");
        }
        ++sol_->iterations;
        if (last_dec2_ * 0.5 <= kNewtonTargetDec) break;
      }
      const double value = s.sum() + sigma;
      const double lower = value - nu_ / t;
      if (lower > opt_.infeasibility_threshold) {
        Phase1Result res;
        res.kind = Phase1Result::Kind::infeasible;
        res.z = z;
        res.violation = measured_violation(z);
        std::ostringstream msg;
        msg << "infeasible: minimum constraint violation >= " << lower;
        res.message = msg.str();
        return res;
      }
      if (nu_ / t < 0.1 * opt_.infeasibility_threshold) {
        return finish(z, s, sigma, t, "no strict interior found");
      }
      t *= opt_.t_scale;
    }
    return finish(z, s, sigma, t, "feasibility phase ran out of iterations");
  }

 private:
  Phase1Result finish(const Eigen::VectorXd& z, const Eigen::VectorXd& s,
                      double sigma, double t, const std::string& why) {
    // One last chance: the point may already be usable.
    if (strictly_feasible(z)) {
      Phase1Result res;
      res.kind = Phase1Result::Kind::strictly_feasible;
      res.z = z;
      return res;
    }
    const double value = s.sum() + sigma;
    Phase1Result res;
    res.z = z;
    res.violation = measured_violation(z);
    if (value - nu_ / t > opt_.infeasibility_threshold) {
      res.kind = Phase1Result::Kind::infeasible;
      res.message = "infeasible: " + why;
    } else {
      res.kind = Phase1Result::Kind::failure;
      res.message = "feasibility phase failed: " + why;
    }
    return res;
  }

  double measured_violation(const Eigen::VectorXd& z) const {
    double total = std::max(0.0, -min_eigenvalue(ws_.w_at(z)));
    for (size_t j = 0; j < ws_.sides.size(); ++j) {
      total += std::max(0.0, -ws_.side_value(j, z));
    }
    return total;
  }

  bool strictly_feasible(const Eigen::VectorXd& z) const {
    for (size_t j = 0; j < ws_.sides.size(); ++j) {
      const double margin = 1e-7 * std::max(1.0, std::abs(ws_.sides[j].a0));
      if (ws_.side_value(j, z) <= margin) return false;
    }
    Eigen::MatrixXcd w = ws_.w_at(z);
    const double diag_scale =
        std::max(1.0, w.diagonal().real().cwiseAbs().maxCoeff());
    w -= 1e-7 * diag_scale * Eigen::MatrixXcd::Identity(ws_.n, ws_.n);
    Eigen::LLT<Eigen::MatrixXcd> llt(w);
    return llt.info() == Eigen::Success;
  }

  double phi(double t, const Eigen::VectorXd& z, const Eigen::VectorXd& s,
             double sigma) const {
    if (sigma <= 0.0) return kInf;
    double val = t * (s.sum() + sigma) - std::log(sigma);
    for (int j = 0; j < ms_; ++j) {
      const double u = ws_.side_value(static_cast<size_t>(j), z) + s(j);
      if (u <= 0.0 || s(j) <= 0.0) return kInf;
      val -= std::log(u) + std::log(s(j));
    }
    Eigen::MatrixXcd w = ws_.w_at(z);
    w += sigma * Eigen::MatrixXcd::Identity(ws_.n, ws_.n);
    Eigen::LLT<Eigen::MatrixXcd> llt(w);
    if (llt.info() != Eigen::Success) return kInf;
    val -= log_det_psd(llt, ws_.n);
    return val;
  }

  bool newton_step(double t, Eigen::VectorXd& z, Eigen::VectorXd& s,
                   double& sigma) {
    const int nz = ws_.nz;
    Eigen::MatrixXcd w = ws_.w_at(z);
    w += sigma * Eigen::MatrixXcd::Identity(ws_.n, ws_.n);
    Eigen::LLT<Eigen::MatrixXcd> llt(w);
    if (llt.info() != Eigen::Success) return false;
    const Eigen::MatrixXcd identity = Eigen::MatrixXcd::Identity(ws_.n, ws_.n);
    const Eigen::MatrixXcd sh = llt.solve(identity);
    const Eigen::MatrixXcd sh2 = sh * sh;

    Eigen::VectorXd grad = Eigen::VectorXd::Zero(ny_);
    Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(ny_, ny_);

    std::vector<Eigen::MatrixXcd> m(static_cast<size_t>(nz));
    for (int f = 0; f < nz; ++f) {
      m[static_cast<size_t>(f)] = sh * ws_.basis[f];
      grad(f) -= m[static_cast<size_t>(f)].trace().real();
    }
    for (int f = 0; f < nz; ++f) {
      for (int g = f; g < nz; ++g) {
        const double v = trace_product(m[static_cast<size_t>(f)],
                                       m[static_cast<size_t>(g)]);
        hess(f, g) += v;
        if (g != f) hess(g, f) += v;
      }
    }
    const int i_sigma = nz + ms_;
    for (int f = 0; f < nz; ++f) {
      const double v = trace_product(sh2, ws_.basis[f]);
      hess(f, i_sigma) += v;
      hess(i_sigma, f) += v;
    }
    grad(i_sigma) = t - sh.trace().real() - 1.0 / sigma;
    hess(i_sigma, i_sigma) = trace_product(sh, sh) + 1.0 / (sigma * sigma);

    for (int j = 0; j < ms_; ++j) {
      const auto& side = ws_.sides[static_cast<size_t>(j)];
      const double u = ws_.side_value(static_cast<size_t>(j), z) + s(j);
      grad.head(nz) -= side.a / u;
      grad(nz + j) = t - 1.0 / u - 1.0 / s(j);
      hess.topLeftCorner(nz, nz) += (side.a * side.a.transpose()) / (u * u);
      hess.block(0, nz + j, nz, 1) += side.a / (u * u);
      hess.block(nz + j, 0, 1, nz) += side.a.transpose() / (u * u);
      hess(nz + j, nz + j) = 1.0 / (u * u) + 1.0 / (s(j) * s(j));
    }

    Eigen::VectorXd dy;
    if (!solve_newton_system(hess, -grad, &dy)) return false;
    last_dec2_ = -grad.dot(dy);

    const Eigen::VectorXd dz = dy.head(nz);
    const Eigen::VectorXd ds = dy.segment(nz, ms_);
    const double dsigma = dy(i_sigma);

    double alpha_max = kInf;
    for (int j = 0; j < ms_; ++j) {
      const double u = ws_.side_value(static_cast<size_t>(j), z) + s(j);
      const double du = ws_.sides[static_cast<size_t>(j)].a.dot(dz) + ds(j);
      if (du < 0.0) alpha_max = std::min(alpha_max, -u / du);
      if (ds(j) < 0.0) alpha_max = std::min(alpha_max, -s(j) / ds(j));
    }
    if (dsigma < 0.0) alpha_max = std::min(alpha_max, -sigma / dsigma);
    Eigen::MatrixXcd dwm = ws_.delta_w(dz);
    dwm += dsigma * Eigen::MatrixXcd::Identity(ws_.n, ws_.n);
    alpha_max = std::min(alpha_max, psd_step_limit(llt, dwm));

    double alpha = std::min(1.0, kFractionToBoundary * alpha_max);
    const double phi0 = phi(t, z, s, sigma);
    const double slope = grad.dot(dy);
    for (int ls = 0; ls < 60; ++ls) {
      const double phi1 =
          phi(t, z + alpha * dz, s + alpha * ds, sigma + alpha * dsigma);
      if (phi1 <= phi0 + 1e-4 * alpha * slope) {
        z += alpha * dz;
        s += alpha * ds;
        sigma += alpha * dsigma;
        return true;
      }
      alpha *= 0.5;
      if (alpha < 1e-16) break;
    }
    return false;
  }

  const Workspace& ws_;
  const SdpOptions& opt_;
  SdpSolution* sol_;
  int ms_ = 0;
  int ny_ = 0;
  double nu_ = 0.0;
  double last_dec2_ = kInf;
};

void fill_residuals(const SdpProblem& prob, SdpSolution* sol) {
  if (sol->W.size() == 0) return;
  double eq_res = 0.0;
  for (const auto& eq : prob.equalities) {
    eq_res = std::max(
        eq_res, std::abs((eq.mat * sol->W).trace().real() - eq.rhs));
  }
  double iv = 0.0;
  for (const auto& in : prob.intervals) {
    const double v = (in.mat * sol->W).trace().real();
    if (std::isfinite(in.lo)) iv = std::max(iv, in.lo - v);
    if (std::isfinite(in.hi)) iv = std::max(iv, v - in.hi);
  }
  sol->max_equality_residual = eq_res;
  sol->max_interval_violation = std::max(0.0, iv);
  sol->min_eigenvalue = min_eigenvalue(sol->W);
}

SdpSolution solve_impl(const SdpProblem& prob, const SdpOptions& opt,
                       const Eigen::MatrixXcd* warm) {
  prob.validate();
  SdpSolution sol;
  const int n = prob.dim;
  Vectorizer vec(n);

  // Assemble equality rows; degenerate intervals become equalities.
  std::vector<Eigen::VectorXd> eq_rows;
  std::vector<double> eq_rhs;
  for (const auto& eq : prob.equalities) {
    eq_rows.push_back(vec.trace_row(eq.mat));
    eq_rhs.push_back(eq.rhs);
  }
  std::vector<const SdpProblem::Interval*> live_intervals;
  for (const auto& in : prob.intervals) {
    if (!std::isfinite(in.lo) && !std::isfinite(in.hi)) continue;
    if (std::isfinite(in.lo) && std::isfinite(in.hi) &&
        in.hi - in.lo <= kDegenerateInterval * (1.0 + std::abs(in.hi))) {
      eq_rows.push_back(vec.trace_row(in.mat));
      eq_rhs.push_back(0.5 * (in.lo + in.hi));
      continue;
    }
    live_intervals.push_back(&in);
  }

  Eigen::MatrixXd e(eq_rows.size(), vec.nx);
  Eigen::VectorXd b(eq_rows.size());
  for (size_t r = 0; r < eq_rows.size(); ++r) {
    e.row(static_cast<int>(r)) = eq_rows[r];
    b(static_cast<int>(r)) = eq_rhs[r];
  }
  ReducedSpace rs = reduce_equalities(e, b);
  if (rs.inconsistent) {
    sol.status = SdpStatus::infeasible;
    sol.infeasibility = rs.inconsistency;
    sol.message = "equality constraints are inconsistent";
    return sol;
  }

  Workspace ws;
  ws.n = n;
  ws.nz = rs.nz;
  ws.w_offset = vec.matrix(rs.x_particular);
  ws.basis.reserve(static_cast<size_t>(rs.nz));
  for (int f = 0; f < rs.nz; ++f) {
    ws.basis.push_back(vec.matrix(rs.null_basis.col(f)));
  }
  const Eigen::VectorXd c_x = vec.trace_row(prob.objective);
  ws.c_z = rs.null_basis.transpose() * c_x;
  ws.c0 = c_x.dot(rs.x_particular);
  int finite_sides = 0;
  for (const auto* in : live_intervals) {
    const Eigen::VectorXd row_x = vec.trace_row(in->mat);
    const Eigen::VectorXd row_z = rs.null_basis.transpose() * row_x;
    const double r0 = row_x.dot(rs.x_particular);
    if (std::isfinite(in->hi)) {
      ws.sides.push_back({-row_z, in->hi - r0});
      ++finite_sides;
    }
    if (std::isfinite(in->lo)) {
      ws.sides.push_back({row_z, r0 - in->lo});
      ++finite_sides;
    }
  }
  ws.nu = n + finite_sides;

  // Everything pinned by the equalities: feasibility is a direct check.
  if (ws.nz == 0) {
    const Eigen::MatrixXcd w = ws.w_offset;
    double violation = std::max(0.0, -min_eigenvalue(w));
    for (size_t j = 0; j < ws.sides.size(); ++j) {
      violation += std::max(0.0, -ws.side_value(j, Eigen::VectorXd()));
    }
    if (violation > opt.infeasibility_threshold) {
      sol.status = SdpStatus::infeasible;
      sol.infeasibility = violation;
      sol.message = "constraints pin an infeasible point";
      return sol;
    }
    sol.status = SdpStatus::optimal;
    sol.W = w;
    sol.objective = ws.c0;
    sol.dual_bound = ws.c0;
    sol.gap_estimate = 0.0;
    fill_residuals(prob, &sol);
    return sol;
  }

  // Starting point: warm candidate if strictly usable, else feasibility
  // phase seeded from the identity-like completion.
  Eigen::VectorXd z0 = Eigen::VectorXd::Zero(ws.nz);
  {
    Eigen::VectorXd x_seed = vec.coords(Eigen::MatrixXcd::Identity(n, n));
    for (int f = 0; f < ws.nz; ++f) {
      z0(f) = x_seed(rs.free_coords[static_cast<size_t>(f)]);
    }
  }
  bool have_strict = false;
  if (warm != nullptr && warm->rows() == n && warm->cols() == n) {
    const Eigen::VectorXd x_warm = vec.coords(*warm);
    Eigen::VectorXd z_warm(ws.nz);
    for (int f = 0; f < ws.nz; ++f) {
      z_warm(f) = x_warm(rs.free_coords[static_cast<size_t>(f)]);
    }
    const Eigen::VectorXd x_back = rs.x_particular + rs.null_basis * z_warm;
    bool usable = (x_back - x_warm).cwiseAbs().maxCoeff() < 1e-7;
    for (size_t j = 0; usable && j < ws.sides.size(); ++j) {
      usable = ws.side_value(j, z_warm) >
               1e-9 * std::max(1.0, std::abs(ws.sides[j].a0));
    }
    if (usable) {
      Eigen::MatrixXcd w = ws.w_at(z_warm);
      w -= 1e-9 * Eigen::MatrixXcd::Identity(n, n);
      Eigen::LLT<Eigen::MatrixXcd> llt(w);
      usable = llt.info() == Eigen::Success;
    }
    if (usable) {
      z0 = z_warm;
      have_strict = true;
    } else {
      z0 = z_warm;  // still a better seed than the identity completion
    }
  }

  if (!have_strict) {
    FeasibilityPhase phase1(ws, opt, &sol);
    Phase1Result res = phase1.run(z0);
    switch (res.kind) {
      case Phase1Result::Kind::strictly_feasible:
        z0 = res.z;
        break;
      case Phase1Result::Kind::infeasible:
        sol.status = SdpStatus::infeasible;
        sol.infeasibility = res.violation;
        sol.message = res.message;
        sol.W = ws.w_at(res.z);
        return sol;
      case Phase1Result::Kind::failure:
        sol.status = SdpStatus::numerical_failure;
        sol.infeasibility = res.violation;
        sol.message = res.message;
        return sol;
    }
  }

  MainPhase main_phase(ws, opt, &sol);
  double t = opt.t_initial;
  if (have_strict) {
    // A usable warm point is assumed near-optimal; rejoin the central path
    // at a modest gap instead of walking back to the analytic center.
    t = std::max(t, ws.nu / (1e-2 * (1.0 + std::abs(ws.objective(z0)))));
  }
  Eigen::VectorXd z = z0;
  for (int outer = 0; outer < opt.max_outer; ++outer) {
    CenterOutcome oc = main_phase.center(t, z);
    if (!oc.ok) {
      sol.status = SdpStatus::numerical_failure;
      sol.message = "newton steps stalled: " + oc.message;
      sol.W = ws.w_at(z);
      sol.objective = ws.objective(z);
      return sol;
    }
    const double primal = ws.objective(z);
    if (primal < -1e12 * (1.0 + std::abs(ws.c0))) {
      sol.status = SdpStatus::numerical_failure;
      sol.message = "objective appears unbounded below";
      return sol;
    }
    const double gap = ws.nu / t;
    if (gap <= opt.gap_tol * (1.0 + std::abs(primal))) {
      sol.status = SdpStatus::optimal;
      sol.W = ws.w_at(z);
      sol.objective = primal;
      sol.dual_bound = primal - gap;
      sol.gap_estimate = gap;
      fill_residuals(prob, &sol);
      return sol;
    }
    // Cheap centerings mean the iterate is hugging the path; ramp harder.
    t *= oc.steps <= 2 ? opt.t_scale * opt.t_scale : opt.t_scale;
  }
  sol.status = SdpStatus::numerical_failure;
  sol.message = "outer iteration limit reached";
  sol.W = ws.w_at(z);
  sol.objective = ws.objective(z);
  return sol;
}

}  // namespace

bool is_hermitian(const Eigen::MatrixXcd& m, double rel_tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

void SdpProblem::validate() const {
  if (dim <= 0) {
    throw std::invalid_argument("SdpProblem: dimension must be positive");
  }
  auto check = [&](const Eigen::MatrixXcd& m, const char* what) {
    if (m.rows() != dim || m.cols() != dim) {
      throw std::invalid_argument(std::string("SdpProblem: ") + what +
                                  " has wrong dimensions");
    }
    if (!is_hermitian(m)) {
      throw std::invalid_argument(std::string("SdpProblem: ") + what +
                                  " is not Hermitian");
    }
  };
  check(objective, "objective");
  for (const auto& eq : equalities) {
    check(eq.mat, "equality matrix");
    if (!std::isfinite(eq.rhs)) {
      throw std::invalid_argument("SdpProblem: equality rhs not finite");
    }
  }
  for (const auto& in : intervals) {
    check(in.mat, "interval matrix");
    if (!(in.lo <= in.hi)) {
      throw std::invalid_argument("SdpProblem: interval with lo > hi");
    }
  }
}

SdpSolution solve_sdp(const SdpProblem& problem, const SdpOptions& options) {
  return solve_impl(problem, options, nullptr);
}

SdpSolution solve_sdp(const SdpProblem& problem, const SdpOptions& options,
                      const Eigen::MatrixXcd& warm_start) {
  return solve_impl(problem, options, &warm_start);
}

Eigen::VectorXd hermitian_coordinates(const Eigen::MatrixXcd& w) {
  if (w.rows() != w.cols()) {
    throw std::invalid_argument("hermitian_coordinates: matrix must be square");
  }
  return Vectorizer(static_cast<int>(w.rows())).coords(w);
}

Eigen::MatrixXcd hermitian_from_coordinates(int dim,
                                            const Eigen::VectorXd& x) {
  if (dim <= 0 || x.size() != dim * dim) {
    throw std::invalid_argument(
        "hermitian_from_coordinates: need dim*dim coordinates");
  }
  return Vectorizer(dim).matrix(x);
}

RankFactor rank_and_factor(const Eigen::MatrixXcd& W, double rank_tol) {
  if (W.rows() != W.cols() || W.rows() == 0) {
    throw std::invalid_argument("rank_and_factor: matrix must be square");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 *
                                                     (W + W.adjoint()));
  if (es.info() != Eigen::Success) {
    throw std::domain_error("rank_and_factor: eigendecomposition failed");
  }
  RankFactor out;
  out.eigenvalues = es.eigenvalues();
  const int n = static_cast<int>(W.rows());
  const double lmax = out.eigenvalues(n - 1);
  const double scale = std::max(lmax, 1e-300);
  if (out.eigenvalues(0) < -1e-6 * scale) {
    throw std::domain_error("rank_and_factor: matrix is not PSD");
  }
  out.rank = 0;
  for (int i = 0; i < n; ++i) {
    if (out.eigenvalues(i) > rank_tol * scale && out.eigenvalues(i) > 0.0) {
      ++out.rank;
    }
  }
  Eigen::VectorXcd u = es.eigenvectors().col(n - 1);
  for (int i = 0; i < n; ++i) {
    if (std::abs(u(i)) > 1e-12) {
      u *= std::conj(u(i)) / std::abs(u(i));
      break;
    }
  }
  out.leading = u;
  return out;
}

}  // namespace vreg
