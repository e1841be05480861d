#pragma once

// Conflict-driven clause-learning SAT solver: two watched literals,
// first-UIP learning, VSIDS branching, Luby restarts, LBD-based learned
// clause deletion and phase saving.

#include <chrono>
#include <cstdint>
#include <vector>

#include "bf/cnf.hpp"

namespace bf {

struct SolverOptions {
  std::chrono::duration<double> time_limit = std::chrono::seconds(300);
  // Nonzero seeds perturb the initial variable order.
  std::uint64_t seed = 0;
  double var_decay = 0.95;
  int restart_base = 64;
  // Learned clauses are reduced once they exceed this multiple of the input size.
  double learnt_ratio = 4.0;
  // Keep a copy of every learned clause in SolverResult::learnts.
  bool record_learnts = false;
};

struct SolverStats {
  std::uint64_t conflicts = 0;
  std::uint64_t decisions = 0;
  std::uint64_t propagations = 0;
  std::uint64_t restarts = 0;
  std::uint64_t deleted_learnts = 0;
  double wall_ms = 0.0;
};

struct SolverResult {
  enum class Status { Sat, Unsat, TimedOut };

  Status status = Status::TimedOut;
  std::vector<bool> assignment;  // indexed by variable, slot 0 unused; Sat only
  SolverStats stats;
  std::vector<Clause> learnts;
};

// Sat results are re-verified against every input clause before returning.
SolverResult solve(const CnfFormula& formula, const SolverOptions& options = {});

const char* to_string(SolverResult::Status status);

}  // namespace bf
