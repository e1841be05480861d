#pragma once

// Exact decision backend: for each sign vector z the constraints
// z(m) h_m^T w >= 1 are linear, so min ||w||^2 is a strictly convex QP.
// Solving all 2^M of them and keeping the best gives the global optimum v*.

#include <cstdint>
#include <vector>

#include "bf/instance.hpp"

namespace bf {

inline constexpr std::size_t kMaxEnumUsers = 20;

// min w^T A w + c^T w  s.t.  D w >= b, with A = I, b = 1, c = 0 as built by
// build_qp. qp_solve accepts any b > 0 but requires A = I and c = 0.
struct QpProblem {
  MatrixD a_tilde;             // N x N
  MatrixD d_tilde;             // M x N, row m = z(m) h_m^T
  std::vector<double> b_tilde;  // M
  std::vector<double> c_tilde;  // N

  std::size_t n_vars() const { return d_tilde.cols(); }
  std::size_t n_constraints() const { return d_tilde.rows(); }
};

struct QpSolution {
  enum class Status { Optimal, Infeasible };

  Status status = Status::Infeasible;
  std::vector<double> w_star;
  double objective = 0.0;  // ||w_star||^2
  std::vector<std::size_t> active_set;
  std::vector<double> duals;  // aligned with active_set; w_star = sum duals[i] d_{active_set[i]}

  bool optimal() const { return status == Status::Optimal; }
};

QpProblem build_qp(const BFInstance& inst, const SignVector& z);
QpProblem build_qp(const MatrixD& channels, const SignVector& z);

// KKT active-subset enumeration in increasing subset size. Throws
// SizeLimitExceeded for more than kMaxEnumUsers constraints and
// NumericalFailure if the enumeration misses a point the feasibility
// sweep proves exists.
QpSolution qp_solve(const QpProblem& prob);

// Stationarity, primal feasibility, dual sign and complementary slackness,
// each within tol.
bool verify_kkt(const QpProblem& prob, const QpSolution& sol, double tol = 1e-8);

struct SignLogEntry {
  SignVector z;
  QpSolution::Status status;
  double objective;
};

struct EnumerationResult {
  double v_star = 0.0;
  std::vector<double> w_star;
  SignVector z_star;
  std::vector<SignLogEntry> per_sign_log;  // indexed by z.index()
};

// Minimum over all sign vectors; ties go to the lowest z index. Sign
// vectors are evaluated on up to `threads` workers (0 = hardware default).
EnumerationResult enumerate_optimal(const BFInstance& inst, unsigned threads = 0);
EnumerationResult enumerate_optimal(const MatrixD& channels, unsigned threads = 0);

struct EnumDecision {
  bool member = false;
  double v_star = 0.0;
  Witness witness;  // w* and z*; a witness when member, the minimizer otherwise
};

// Member iff v* <= kappa.
EnumDecision decide_enum(const BFInstance& inst, unsigned threads = 0);

}  // namespace bf
