#include "bf/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <thread>

namespace bf {

namespace {

constexpr double kDualTol = 1e-9;
constexpr double kPrimalTol = 1e-9;
constexpr double kPivotTol = 1e-12;
constexpr int kSweepStarts = 32;
constexpr int kSweepIters = 400;

double dot_row(const MatrixD& d, std::size_t row, const std::vector<double>& w) {
  double s = 0.0;
  for (std::size_t n = 0; n < d.cols(); ++n) s += d(row, n) * w[n];
  return s;
}

// Solves the symmetric positive-definite system g x = rhs in place by
// Cholesky; nullopt when a pivot drops below kPivotTol relative to the
// largest diagonal entry.
std::optional<std::vector<double>> solve_gram(MatrixD g, std::vector<double> rhs) {
  const std::size_t k = g.rows();
  double scale = 0.0;
  for (std::size_t i = 0; i < k; ++i) scale = std::max(scale, g(i, i));
  if (scale <= 0.0) return std::nullopt;
  for (std::size_t j = 0; j < k; ++j) {
    double pivot = g(j, j);
    for (std::size_t p = 0; p < j; ++p) pivot -= g(j, p) * g(j, p);
    if (pivot <= kPivotTol * scale) return std::nullopt;
    const double d = std::sqrt(pivot);
    g(j, j) = d;
    for (std::size_t i = j + 1; i < k; ++i) {
      double s = g(i, j);
      for (std::size_t p = 0; p < j; ++p) s -= g(i, p) * g(j, p);
      g(i, j) = s / d;
    }
  }
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t p = 0; p < i; ++p) rhs[i] -= g(i, p) * rhs[p];
    rhs[i] /= g(i, i);
  }
  for (std::size_t i = k; i-- > 0;) {
    for (std::size_t p = i + 1; p < k; ++p) rhs[i] -= g(p, i) * rhs[p];
    rhs[i] /= g(i, i);
  }
  return rhs;
}

// Candidate KKT point with constraints `subset` active.
std::optional<QpSolution> try_subset(const QpProblem& prob, const std::vector<std::size_t>& subset) {
  const MatrixD& d = prob.d_tilde;
  const std::size_t k = subset.size();
  const std::size_t n = prob.n_vars();
  std::vector<double> w(n, 0.0);
  std::vector<double> lambda;
  if (k > 0) {
    MatrixD g(k, k);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j <= i; ++j) {
        double s = 0.0;
        for (std::size_t c = 0; c < n; ++c) s += d(subset[i], c) * d(subset[j], c);
        g(i, j) = g(j, i) = s;
      }
    std::vector<double> rhs(k);
    for (std::size_t i = 0; i < k; ++i) rhs[i] = prob.b_tilde[subset[i]];
    auto solved = solve_gram(std::move(g), std::move(rhs));
    if (!solved) return std::nullopt;
    lambda = std::move(*solved);
    for (double l : lambda)
      if (l < -kDualTol) return std::nullopt;
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t c = 0; c < n; ++c) w[c] += lambda[i] * d(subset[i], c);
  }
  for (std::size_t m = 0; m < prob.n_constraints(); ++m)
    if (dot_row(d, m, w) < prob.b_tilde[m] - kPrimalTol) return std::nullopt;

  QpSolution sol;
  sol.status = QpSolution::Status::Optimal;
  sol.objective = 0.0;
  for (double x : w) sol.objective += x * x;
  sol.w_star = std::move(w);
  sol.active_set = subset;
  sol.duals = std::move(lambda);
  return sol;
}

// Maximizes min_m (d_m^T u) / b_m over the unit ball by projected
// subgradient ascent. A positive value t means w = u / t is feasible.
double best_normalized_slack(const QpProblem& prob) {
  const MatrixD& d = prob.d_tilde;
  const std::size_t n = prob.n_vars();
  std::vector<double> row_norm(prob.n_constraints());
  for (std::size_t m = 0; m < row_norm.size(); ++m) {
    double s = 0.0;
    for (std::size_t c = 0; c < n; ++c) s += d(m, c) * d(m, c);
    row_norm[m] = std::sqrt(s);
  }
  auto slack = [&](const std::vector<double>& u, std::size_t& argmin) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < prob.n_constraints(); ++m) {
      double s = dot_row(d, m, u) / prob.b_tilde[m];
      if (s < best) {
        best = s;
        argmin = m;
      }
    }
    return best;
  };
  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> normal;
  double best = -std::numeric_limits<double>::infinity();
  for (int start = 0; start < kSweepStarts; ++start) {
    std::vector<double> u(n);
    double len = 0.0;
    for (double& x : u) {
      x = normal(rng);
      len += x * x;
    }
    len = std::sqrt(len);
    for (double& x : u) x /= len;
    for (int it = 1; it <= kSweepIters; ++it) {
      std::size_t argmin = 0;
      best = std::max(best, slack(u, argmin));
      if (row_norm[argmin] == 0.0) break;
      const double step = 0.5 / std::sqrt(static_cast<double>(it));
      len = 0.0;
      for (std::size_t c = 0; c < n; ++c) {
        u[c] += step * d(argmin, c) / row_norm[argmin];
        len += u[c] * u[c];
      }
      len = std::sqrt(len);
      if (len > 1.0)
        for (double& x : u) x /= len;
    }
    std::size_t argmin = 0;
    best = std::max(best, slack(u, argmin));
  }
  return best;
}

void validate(const QpProblem& prob) {
  const std::size_t n = prob.n_vars();
  const std::size_t m = prob.n_constraints();
  if (prob.a_tilde.rows() != n || prob.a_tilde.cols() != n || prob.b_tilde.size() != m || prob.c_tilde.size() != n)
    throw DimensionMismatch("QP blocks have inconsistent sizes");
  if (prob.a_tilde != MatrixD::identity(n)) throw InvalidParameter("qp_solve requires A = I");
  for (double c : prob.c_tilde)
    if (c != 0.0) throw InvalidParameter("qp_solve requires c = 0");
  for (double b : prob.b_tilde)
    if (!(b > 0.0)) throw InvalidParameter("qp_solve requires b > 0");
  check_finite(prob.d_tilde);
}

bool next_combination(std::vector<std::size_t>& idx, std::size_t n) {
  const std::size_t k = idx.size();
  for (std::size_t i = k; i-- > 0;) {
    if (idx[i] < n - k + i) {
      ++idx[i];
      for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace

QpProblem build_qp(const MatrixD& channels, const SignVector& z) {
  const std::size_t n = channels.rows();
  const std::size_t m = channels.cols();
  if (z.size() != m) throw DimensionMismatch("sign vector length differs from the number of users");
  QpProblem prob{MatrixD::identity(n), MatrixD(m, n), std::vector<double>(m, 1.0), std::vector<double>(n, 0.0)};
  for (std::size_t user = 0; user < m; ++user)
    for (std::size_t ant = 0; ant < n; ++ant) prob.d_tilde(user, ant) = z[user] * channels(ant, user);
  return prob;
}

QpProblem build_qp(const BFInstance& inst, const SignVector& z) { return build_qp(inst.channels_double(), z); }

QpSolution qp_solve(const QpProblem& prob) {
  validate(prob);
  const std::size_t m = prob.n_constraints();
  if (m > kMaxEnumUsers) throw SizeLimitExceeded("qp_solve handles at most 20 constraints");
  const std::size_t max_k = std::min(m, prob.n_vars());
  for (std::size_t k = 0; k <= max_k; ++k) {
    std::vector<std::size_t> subset(k);
    for (std::size_t i = 0; i < k; ++i) subset[i] = i;
    do {
      if (auto sol = try_subset(prob, subset)) return *sol;
    } while (k > 0 && next_combination(subset, m));
  }
  if (best_normalized_slack(prob) > 1e-12)
    throw NumericalFailure("KKT enumeration found no optimum but the feasibility sweep found a feasible point");
  QpSolution none;
  none.status = QpSolution::Status::Infeasible;
  return none;
}

bool verify_kkt(const QpProblem& prob, const QpSolution& sol, double tol) {
  if (!sol.optimal()) return false;
  const std::size_t n = prob.n_vars();
  const std::size_t m = prob.n_constraints();
  if (sol.w_star.size() != n || sol.duals.size() != sol.active_set.size()) return false;

  // Stationarity: w = sum lambda_i d_i.
  std::vector<double> combo(n, 0.0);
  for (std::size_t i = 0; i < sol.active_set.size(); ++i) {
    if (sol.active_set[i] >= m) return false;
    for (std::size_t c = 0; c < n; ++c) combo[c] += sol.duals[i] * prob.d_tilde(sol.active_set[i], c);
  }
  for (std::size_t c = 0; c < n; ++c)
    if (std::abs(combo[c] - sol.w_star[c]) > tol) return false;

  for (std::size_t row = 0; row < m; ++row)
    if (dot_row(prob.d_tilde, row, sol.w_star) < prob.b_tilde[row] - tol) return false;

  for (std::size_t i = 0; i < sol.active_set.size(); ++i) {
    if (sol.duals[i] < -tol) return false;
    const double gap = dot_row(prob.d_tilde, sol.active_set[i], sol.w_star) - prob.b_tilde[sol.active_set[i]];
    if (std::abs(sol.duals[i] * gap) > tol) return false;
  }

  double obj = 0.0;
  for (double x : sol.w_star) obj += x * x;
  return std::abs(obj - sol.objective) <= tol * std::max(1.0, obj);
}

EnumerationResult enumerate_optimal(const MatrixD& channels, unsigned threads) {
  const std::size_t m = channels.cols();
  if (m > kMaxEnumUsers) throw SizeLimitExceeded("enumeration handles at most 20 users");
  const std::uint64_t count = std::uint64_t{1} << m;

  std::vector<QpSolution> solutions(count);
  auto work = [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t idx = begin; idx < end; ++idx)
      solutions[idx] = qp_solve(build_qp(channels, SignVector::from_index(idx, m)));
  };
  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  const auto workers = static_cast<unsigned>(std::min<std::uint64_t>(threads, count / 64 + 1));
  if (workers <= 1) {
    work(0, count);
  } else {
    std::vector<std::jthread> pool;
    const std::uint64_t chunk = (count + workers - 1) / workers;
    for (unsigned t = 0; t < workers; ++t)
      pool.emplace_back(work, std::min(count, t * chunk), std::min(count, (t + 1) * chunk));
  }

  EnumerationResult result;
  result.per_sign_log.reserve(count);
  std::optional<std::uint64_t> best;
  for (std::uint64_t idx = 0; idx < count; ++idx) {
    const QpSolution& sol = solutions[idx];
    result.per_sign_log.push_back({SignVector::from_index(idx, m), sol.status, sol.objective});
    if (sol.optimal() && (!best || sol.objective < solutions[*best].objective)) best = idx;
  }
  if (!best) throw NumericalFailure("no sign vector produced a feasible QP");
  result.v_star = solutions[*best].objective;
  result.w_star = solutions[*best].w_star;
  result.z_star = SignVector::from_index(*best, m);
  return result;
}

EnumerationResult enumerate_optimal(const BFInstance& inst, unsigned threads) {
  return enumerate_optimal(inst.channels_double(), threads);
}

EnumDecision decide_enum(const BFInstance& inst, unsigned threads) {
  EnumerationResult res = enumerate_optimal(inst, threads);
  EnumDecision out;
  out.v_star = res.v_star;
  out.member = res.v_star <= inst.kappa().to_double();
  out.witness.w = res.w_star;
  out.witness.z = res.z_star;
  return out;
}

}  // namespace bf
