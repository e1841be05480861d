#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bf/numerics.hpp"

namespace bf {

// DIMACS-style literal: +v / -v for variable v >= 1.
using Lit = int;
using Clause = std::vector<Lit>;

// Where the semantic variables of an encoded instance live. Copy 0 of w is
// the primary copy; duplicated-mode encodings add one copy per inequality.
struct VarMap {
  std::size_t n_antennas = 0;
  std::size_t n_users = 0;
  FixedPointFormat fmt;
  std::vector<std::vector<std::vector<int>>> w;  // [copy][antenna][bit], LSB first
  std::vector<int> z;                            // [user]; true means z(m) = -1

  int w_var(std::size_t antenna, std::size_t bit, std::size_t copy = 0) const { return w.at(copy).at(antenna).at(bit); }
  int z_var(std::size_t user) const { return z.at(user); }
  std::size_t copies() const { return w.size(); }
};

// Clause counts per part of an encoded instance.
struct EncodingInfo {
  std::size_t norm_clauses = 0;         // sum of squares <= kappa
  std::size_t user_clauses = 0;         // all |h_m^T w| >= 1 constraints
  std::size_t consistency_clauses = 0;  // duplicated-mode copy links
};

struct CnfFormula {
  int num_vars = 0;
  std::vector<Clause> clauses;
  std::optional<VarMap> var_map;
  std::optional<EncodingInfo> info;

  std::size_t num_clauses() const { return clauses.size(); }
  // Throws InvalidParameter for an empty clause or an undeclared variable.
  void validate() const;
};

// "p cnf V C" followed by zero-terminated clause lines.
std::string export_dimacs(const CnfFormula& formula);
// Accepts comment lines and clauses spanning lines. Empty clauses are kept
// (a DIMACS file may legitimately contain one); the result is not validated.
CnfFormula parse_dimacs(std::string_view text);

// True iff assignment (indexed by variable, slot 0 unused) satisfies every clause.
bool satisfies(const CnfFormula& formula, const std::vector<bool>& assignment);

}  // namespace bf
