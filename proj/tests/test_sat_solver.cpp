#include <doctest.h>

#include <random>

#include "bf/sat_solver.hpp"

using namespace bf;

namespace {

CnfFormula random_3cnf(std::mt19937_64& rng, int vars, int clauses) {
  std::uniform_int_distribution<int> var(1, vars), coin(0, 1);
  CnfFormula f;
  f.num_vars = vars;
  for (int i = 0; i < clauses; ++i) {
    Clause c;
    while (c.size() < 3) {
      const int v = var(rng);
      bool dup = false;
      for (Lit l : c) dup = dup || std::abs(l) == v;
      if (!dup) c.push_back(coin(rng) ? v : -v);
    }
    f.clauses.push_back(c);
  }
  return f;
}

std::vector<bool> assignment_of(std::uint32_t bits, int vars) {
  std::vector<bool> a(static_cast<std::size_t>(vars) + 1, false);
  for (int v = 1; v <= vars; ++v) a[static_cast<std::size_t>(v)] = (bits >> (v - 1)) & 1U;
  return a;
}

// Every model of f, as bit masks.
std::vector<std::uint32_t> models(const CnfFormula& f) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t bits = 0; bits < (1U << f.num_vars); ++bits)
    if (satisfies(f, assignment_of(bits, f.num_vars))) out.push_back(bits);
  return out;
}

// Plain recursive DPLL with unit propagation, as an independent reference.
bool dpll(std::vector<Clause> clauses, std::vector<int>& value) {
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& c : clauses) {
      int unassigned = 0, last = 0;
      bool satisfied = false;
      for (Lit l : c) {
        const int v = value[static_cast<std::size_t>(std::abs(l))];
        if (v == 0) {
          ++unassigned;
          last = l;
        } else if ((v > 0) == (l > 0)) {
          satisfied = true;
          break;
        }
      }
      if (satisfied) continue;
      if (unassigned == 0) return false;
      if (unassigned == 1) {
        value[static_cast<std::size_t>(std::abs(last))] = last > 0 ? 1 : -1;
        changed = true;
      }
    }
  }
  for (std::size_t v = 1; v < value.size(); ++v) {
    if (value[v] != 0) continue;
    for (int s : {1, -1}) {
      std::vector<int> copy = value;
      copy[v] = s;
      if (dpll(clauses, copy)) {
        value = copy;
        return true;
      }
    }
    return false;
  }
  return true;
}

}  // namespace

TEST_SUITE("sat_solver") {

TEST_CASE("trivial formulas") {
  CnfFormula contradiction;
  contradiction.num_vars = 1;
  contradiction.clauses = {{1}, {-1}};
  CHECK(solve(contradiction).status == SolverResult::Status::Unsat);

  CnfFormula empty;
  const SolverResult r = solve(empty);
  CHECK(r.status == SolverResult::Status::Sat);
  CHECK(r.assignment.size() <= 1);

  CnfFormula with_empty_clause;
  with_empty_clause.num_vars = 2;
  with_empty_clause.clauses = {{1, 2}, {}};
  CHECK(solve(with_empty_clause).status == SolverResult::Status::Unsat);

  CnfFormula dup;
  dup.num_vars = 2;
  dup.clauses = {{1, 1, -2}, {2, -2}, {2}};
  const SolverResult d = solve(dup);
  REQUIRE(d.status == SolverResult::Status::Sat);
  CHECK(d.assignment[1]);
  CHECK(d.assignment[2]);
}

TEST_CASE("random 3-CNF matches the truth table") {
  std::mt19937_64 rng(2024);
  int sat_count = 0;
  for (int i = 0; i < 200; ++i) {
    const int vars = 5 + i % 16;
    const int clauses = static_cast<int>(std::lround(vars * (3.0 + (i % 5) * 0.5)));
    const CnfFormula f = random_3cnf(rng, vars, clauses);
    const bool expected = !models(f).empty();
    const SolverResult r = solve(f);
    CHECK((r.status == SolverResult::Status::Sat) == expected);
    if (r.status == SolverResult::Status::Sat) {
      ++sat_count;
      CHECK(satisfies(f, r.assignment));
    }
  }
  CHECK(sat_count > 20);
  CHECK(sat_count < 180);
}

TEST_CASE("random 3-CNF at 50 variables matches a DPLL reference") {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 200; ++i) {
    const CnfFormula f = random_3cnf(rng, 50, 150 + (i % 4) * 35);
    std::vector<int> value(51, 0);
    const bool expected = dpll(f.clauses, value);
    const SolverResult r = solve(f);
    CHECK((r.status == SolverResult::Status::Sat) == expected);
    if (r.status == SolverResult::Status::Sat) CHECK(satisfies(f, r.assignment));
  }
}

TEST_CASE("learned clauses are implied by the formula") {
  std::mt19937_64 rng(7);
  std::size_t checked = 0;
  for (int i = 0; i < 60; ++i) {
    const CnfFormula f = random_3cnf(rng, 14 + i % 7, 90 + i % 7 * 6);
    SolverOptions o;
    o.record_learnts = true;
    const SolverResult r = solve(f, o);
    const auto ms = models(f);
    for (const Clause& c : r.learnts) {
      CnfFormula single;
      single.num_vars = f.num_vars;
      single.clauses = {c};
      for (std::uint32_t m : ms) CHECK(satisfies(single, assignment_of(m, f.num_vars)));
      ++checked;
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("deterministic under a fixed seed") {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 20; ++i) {
    const CnfFormula f = random_3cnf(rng, 60, 250);
    for (std::uint64_t seed : {0ULL, 5ULL}) {
      SolverOptions o;
      o.seed = seed;
      const SolverResult a = solve(f, o), b = solve(f, o);
      CHECK(a.status == b.status);
      CHECK(a.assignment == b.assignment);
      CHECK(a.stats.decisions == b.stats.decisions);
      CHECK(a.stats.conflicts == b.stats.conflicts);
    }
  }
}

TEST_CASE("pigeonhole formulas are unsatisfiable and time limits are honored") {
  auto php = [](int holes) {
    CnfFormula f;
    const int pigeons = holes + 1;
    auto var = [&](int p, int h) { return p * holes + h + 1; };
    f.num_vars = pigeons * holes;
    for (int p = 0; p < pigeons; ++p) {
      Clause c;
      for (int h = 0; h < holes; ++h) c.push_back(var(p, h));
      f.clauses.push_back(c);
    }
    for (int h = 0; h < holes; ++h)
      for (int p = 0; p < pigeons; ++p)
        for (int q = p + 1; q < pigeons; ++q) f.clauses.push_back({-var(p, h), -var(q, h)});
    return f;
  };
  CHECK(solve(php(5)).status == SolverResult::Status::Unsat);
  SolverOptions o;
  o.time_limit = std::chrono::milliseconds(50);
  const SolverResult r = solve(php(11), o);
  CHECK(r.status == SolverResult::Status::TimedOut);
  CHECK(r.stats.wall_ms < 2000.0);
}

TEST_CASE("status names") {
  CHECK(std::string(to_string(SolverResult::Status::Sat)) == "sat");
  CHECK(std::string(to_string(SolverResult::Status::Unsat)) == "unsat");
  CHECK(std::string(to_string(SolverResult::Status::TimedOut)) == "timeout");
}

}
