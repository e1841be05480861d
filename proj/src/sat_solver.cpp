#include "bf/sat_solver.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <random>
#include <stdexcept>

namespace bf {

namespace {

using ILit = std::uint32_t;  // 2 * var + negated, var 0-based
using CRef = std::uint32_t;

constexpr CRef kNoReason = std::numeric_limits<CRef>::max();

inline ILit make_lit(std::uint32_t var, bool negated) { return 2 * var + (negated ? 1U : 0U); }
inline std::uint32_t var_of(ILit l) { return l >> 1; }
inline ILit neg(ILit l) { return l ^ 1U; }
inline ILit from_dimacs(Lit l) { return make_lit(static_cast<std::uint32_t>(std::abs(l) - 1), l < 0); }
inline Lit to_dimacs(ILit l) {
  const int v = static_cast<int>(var_of(l)) + 1;
  return (l & 1U) ? -v : v;
}

double luby(double y, int x) {
  int size = 1, seq = 0;
  while (size < x + 1) {
    ++seq;
    size = 2 * size + 1;
  }
  while (size - 1 != x) {
    size = (size - 1) >> 1;
    --seq;
    x = x % size;
  }
  double r = 1.0;
  for (int i = 0; i < seq; ++i) r *= y;
  return r;
}

// Max-heap of variables ordered by activity; ties go to the lower index.
class VarHeap {
 public:
  explicit VarHeap(const std::vector<double>& activity) : act_(activity) {}

  void reserve(std::size_t n) { pos_.assign(n, -1); }
  bool contains(std::uint32_t v) const { return pos_[v] >= 0; }
  bool empty() const { return heap_.empty(); }

  void insert(std::uint32_t v) {
    if (contains(v)) return;
    pos_[v] = static_cast<int>(heap_.size());
    heap_.push_back(v);
    up(heap_.size() - 1);
  }

  void increased(std::uint32_t v) {
    if (contains(v)) up(static_cast<std::size_t>(pos_[v]));
  }

  std::uint32_t pop() {
    const std::uint32_t top = heap_.front();
    heap_.front() = heap_.back();
    pos_[heap_.front()] = 0;
    heap_.pop_back();
    pos_[top] = -1;
    if (!heap_.empty()) down(0);
    return top;
  }

 private:
  bool before(std::uint32_t a, std::uint32_t b) const {
    return act_[a] > act_[b] || (act_[a] == act_[b] && a < b);
  }

  void up(std::size_t i) {
    const std::uint32_t v = heap_[i];
    while (i > 0) {
      const std::size_t parent = (i - 1) / 2;
      if (!before(v, heap_[parent])) break;
      heap_[i] = heap_[parent];
      pos_[heap_[i]] = static_cast<int>(i);
      i = parent;
    }
    heap_[i] = v;
    pos_[v] = static_cast<int>(i);
  }

  void down(std::size_t i) {
    const std::uint32_t v = heap_[i];
    for (;;) {
      std::size_t child = 2 * i + 1;
      if (child >= heap_.size()) break;
      if (child + 1 < heap_.size() && before(heap_[child + 1], heap_[child])) ++child;
      if (!before(heap_[child], v)) break;
      heap_[i] = heap_[child];
      pos_[heap_[i]] = static_cast<int>(i);
      i = child;
    }
    heap_[i] = v;
    pos_[v] = static_cast<int>(i);
  }

  const std::vector<double>& act_;
  std::vector<std::uint32_t> heap_;
  std::vector<int> pos_;
};

class Cdcl {
 public:
  Cdcl(const CnfFormula& formula, const SolverOptions& options)
      : formula_(formula), opts_(options), heap_(activity_), start_(std::chrono::steady_clock::now()) {}

  SolverResult run();

 private:
  struct ClauseRec {
    std::vector<ILit> lits;
    bool learnt = false;
    bool deleted = false;
    std::uint32_t lbd = 0;
  };
  struct Watcher {
    CRef cref;
    ILit blocker;
  };

  // value of a literal: 1 true, -1 false, 0 unassigned
  int value(ILit l) const {
    const int v = assigns_[var_of(l)];
    return (l & 1U) ? -v : v;
  }
  int decision_level() const { return static_cast<int>(trail_lim_.size()); }

  bool add_input_clause(const Clause& clause);
  CRef attach(std::vector<ILit> lits, bool learnt, std::uint32_t lbd);
  void enqueue(ILit l, CRef reason);
  CRef propagate();
  void analyze(CRef confl, std::vector<ILit>& learnt, int& backtrack_level, std::uint32_t& lbd);
  bool redundant(ILit l) const;
  void backtrack(int level);
  void bump(std::uint32_t v);
  void reduce_db();
  bool locked(CRef c) const;
  bool out_of_time() const;
  SolverResult finish(SolverResult::Status status);

  const CnfFormula& formula_;
  SolverOptions opts_;

  std::uint32_t num_vars_ = 0;
  std::vector<ClauseRec> db_;
  std::vector<CRef> learnts_;
  std::vector<std::vector<Watcher>> watches_;
  std::vector<int> assigns_;
  std::vector<int> level_;
  std::vector<CRef> reason_;
  std::vector<bool> saved_phase_;
  std::vector<char> seen_;
  std::vector<ILit> trail_;
  std::vector<std::size_t> trail_lim_;
  std::size_t qhead_ = 0;

  std::vector<double> activity_;
  double var_inc_ = 1.0;
  VarHeap heap_;

  std::size_t n_original_ = 0;
  double max_learnts_ = 0.0;
  SolverResult result_;
  std::chrono::steady_clock::time_point start_;
};

bool Cdcl::add_input_clause(const Clause& clause) {
  std::vector<ILit> lits;
  lits.reserve(clause.size());
  for (Lit l : clause) {
    if (l == 0 || std::abs(l) > formula_.num_vars) throw InvalidParameter("literal out of range: " + std::to_string(l));
    lits.push_back(from_dimacs(l));
  }
  std::sort(lits.begin(), lits.end());
  lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
  std::vector<ILit> kept;
  for (std::size_t i = 0; i < lits.size(); ++i) {
    if (i + 1 < lits.size() && lits[i + 1] == neg(lits[i])) return true;  // tautology
    const int v = value(lits[i]);
    if (v > 0) return true;
    if (v == 0) kept.push_back(lits[i]);
  }
  if (kept.empty()) return false;
  if (kept.size() == 1) {
    enqueue(kept[0], kNoReason);
    return true;
  }
  attach(std::move(kept), false, 0);
  ++n_original_;
  return true;
}

CRef Cdcl::attach(std::vector<ILit> lits, bool learnt, std::uint32_t lbd) {
  const auto cref = static_cast<CRef>(db_.size());
  watches_[neg(lits[0])].push_back({cref, lits[1]});
  watches_[neg(lits[1])].push_back({cref, lits[0]});
  db_.push_back({std::move(lits), learnt, false, lbd});
  if (learnt) learnts_.push_back(cref);
  return cref;
}

void Cdcl::enqueue(ILit l, CRef reason) {
  const std::uint32_t v = var_of(l);
  assigns_[v] = (l & 1U) ? -1 : 1;
  level_[v] = decision_level();
  reason_[v] = reason;
  trail_.push_back(l);
}

CRef Cdcl::propagate() {
  CRef confl = kNoReason;
  while (qhead_ < trail_.size()) {
    const ILit p = trail_[qhead_++];
    const ILit false_lit = neg(p);
    std::vector<Watcher>& ws = watches_[p];
    ++result_.stats.propagations;
    std::size_t i = 0, j = 0;
    const std::size_t end = ws.size();
    while (i < end) {
      const Watcher w = ws[i];
      if (value(w.blocker) > 0) {
        ws[j++] = ws[i++];
        continue;
      }
      ClauseRec& c = db_[w.cref];
      if (c.deleted) {
        ++i;
        continue;
      }
      if (c.lits[0] == false_lit) std::swap(c.lits[0], c.lits[1]);
      ++i;
      const ILit first = c.lits[0];
      if (first != w.blocker && value(first) > 0) {
        ws[j++] = {w.cref, first};
        continue;
      }
      bool moved = false;
      for (std::size_t k = 2; k < c.lits.size(); ++k) {
        if (value(c.lits[k]) >= 0) {
          std::swap(c.lits[1], c.lits[k]);
          watches_[neg(c.lits[1])].push_back({w.cref, first});
          moved = true;
          break;
        }
      }
      if (moved) continue;
      ws[j++] = {w.cref, first};
      if (value(first) < 0) {
        confl = w.cref;
        qhead_ = trail_.size();
        while (i < end) ws[j++] = ws[i++];
      } else {
        enqueue(first, w.cref);
      }
    }
    ws.resize(j);
    if (confl != kNoReason) break;
  }
  return confl;
}

void Cdcl::bump(std::uint32_t v) {
  activity_[v] += var_inc_;
  if (activity_[v] > 1e100) {
    for (double& a : activity_) a *= 1e-100;
    var_inc_ *= 1e-100;
  }
  heap_.increased(v);
}

bool Cdcl::redundant(ILit l) const {
  const CRef r = reason_[var_of(l)];
  if (r == kNoReason) return false;
  const ClauseRec& c = db_[r];
  for (std::size_t k = 1; k < c.lits.size(); ++k) {
    const std::uint32_t v = var_of(c.lits[k]);
    if (!seen_[v] && level_[v] > 0) return false;
  }
  return true;
}

void Cdcl::analyze(CRef confl, std::vector<ILit>& learnt, int& backtrack_level, std::uint32_t& lbd) {
  learnt.assign(1, 0);
  int path = 0;
  bool have_p = false;
  ILit p = 0;
  std::size_t index = trail_.size();
  do {
    const ClauseRec& c = db_[confl];
    for (std::size_t k = have_p ? 1 : 0; k < c.lits.size(); ++k) {
      const ILit q = c.lits[k];
      const std::uint32_t v = var_of(q);
      if (seen_[v] || level_[v] == 0) continue;
      seen_[v] = 1;
      bump(v);
      if (level_[v] >= decision_level()) {
        ++path;
      } else {
        learnt.push_back(q);
      }
    }
    while (!seen_[var_of(trail_[--index])]) {
    }
    p = trail_[index];
    have_p = true;
    confl = reason_[var_of(p)];
    seen_[var_of(p)] = 0;
    --path;
  } while (path > 0);
  learnt[0] = neg(p);

  // Drop literals implied by the rest of the clause through their reason.
  std::vector<ILit> all = learnt;
  std::size_t keep = 1;
  for (std::size_t k = 1; k < learnt.size(); ++k)
    if (!redundant(learnt[k])) learnt[keep++] = learnt[k];
  learnt.resize(keep);
  for (ILit l : all) seen_[var_of(l)] = 0;

  backtrack_level = 0;
  if (learnt.size() > 1) {
    std::size_t max_i = 1;
    for (std::size_t k = 2; k < learnt.size(); ++k)
      if (level_[var_of(learnt[k])] > level_[var_of(learnt[max_i])]) max_i = k;
    std::swap(learnt[1], learnt[max_i]);
    backtrack_level = level_[var_of(learnt[1])];
  }

  std::vector<int> levels;
  for (ILit l : learnt) levels.push_back(level_[var_of(l)]);
  std::sort(levels.begin(), levels.end());
  lbd = static_cast<std::uint32_t>(std::unique(levels.begin(), levels.end()) - levels.begin());
}

void Cdcl::backtrack(int level) {
  if (decision_level() <= level) return;
  const std::size_t stop = trail_lim_[static_cast<std::size_t>(level)];
  for (std::size_t k = trail_.size(); k-- > stop;) {
    const std::uint32_t v = var_of(trail_[k]);
    saved_phase_[v] = assigns_[v] > 0;
    assigns_[v] = 0;
    reason_[v] = kNoReason;
    heap_.insert(v);
  }
  trail_.resize(stop);
  trail_lim_.resize(static_cast<std::size_t>(level));
  qhead_ = stop;
}

bool Cdcl::locked(CRef c) const {
  const ILit first = db_[c].lits[0];
  return value(first) > 0 && reason_[var_of(first)] == c;
}

void Cdcl::reduce_db() {
  std::vector<CRef> candidates;
  for (CRef c : learnts_)
    if (!db_[c].deleted && db_[c].lbd > 2 && !locked(c)) candidates.push_back(c);
  // Worst LBD first, older first among equals.
  std::sort(candidates.begin(), candidates.end(), [&](CRef a, CRef b) {
    return db_[a].lbd != db_[b].lbd ? db_[a].lbd > db_[b].lbd : a < b;
  });
  const std::size_t remove = candidates.size() / 2;
  for (std::size_t k = 0; k < remove; ++k) {
    ClauseRec& c = db_[candidates[k]];
    c.deleted = true;
    c.lits.clear();
    c.lits.shrink_to_fit();
    ++result_.stats.deleted_learnts;
  }
  std::erase_if(learnts_, [&](CRef c) { return db_[c].deleted; });
  // Watchers of deleted clauses are dropped lazily during propagation.
}

bool Cdcl::out_of_time() const {
  return std::chrono::steady_clock::now() - start_ > opts_.time_limit;
}

SolverResult Cdcl::finish(SolverResult::Status status) {
  result_.status = status;
  if (status == SolverResult::Status::Sat) {
    result_.assignment.assign(static_cast<std::size_t>(num_vars_) + 1, false);
    for (std::uint32_t v = 0; v < num_vars_; ++v) result_.assignment[v + 1] = assigns_[v] > 0;
    if (!satisfies(formula_, result_.assignment))
      throw std::logic_error("CDCL produced an assignment that violates an input clause");
  }
  result_.stats.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  return std::move(result_);
}

SolverResult Cdcl::run() {
  num_vars_ = static_cast<std::uint32_t>(std::max(0, formula_.num_vars));
  watches_.resize(2 * static_cast<std::size_t>(num_vars_));
  assigns_.assign(num_vars_, 0);
  level_.assign(num_vars_, 0);
  reason_.assign(num_vars_, kNoReason);
  saved_phase_.assign(num_vars_, false);
  seen_.assign(num_vars_, 0);
  activity_.assign(num_vars_, 0.0);
  if (opts_.seed != 0) {
    std::mt19937_64 rng(opts_.seed);
    std::uniform_real_distribution<double> jitter(0.0, 1e-5);
    for (double& a : activity_) a = jitter(rng);
  }
  heap_.reserve(num_vars_);
  for (std::uint32_t v = 0; v < num_vars_; ++v) heap_.insert(v);

  for (const Clause& c : formula_.clauses)
    if (!add_input_clause(c)) return finish(SolverResult::Status::Unsat);
  if (propagate() != kNoReason) return finish(SolverResult::Status::Unsat);

  max_learnts_ = opts_.learnt_ratio * static_cast<double>(std::max<std::size_t>(n_original_, 1));
  std::vector<ILit> learnt;
  std::uint64_t conflicts_this_restart = 0;
  int restart_index = 0;
  double restart_limit = luby(2.0, restart_index) * opts_.restart_base;

  for (;;) {
    const CRef confl = propagate();
    if (confl != kNoReason) {
      ++result_.stats.conflicts;
      ++conflicts_this_restart;
      if (decision_level() == 0) return finish(SolverResult::Status::Unsat);
      int bt_level = 0;
      std::uint32_t lbd = 0;
      analyze(confl, learnt, bt_level, lbd);
      if (opts_.record_learnts) {
        Clause copy;
        for (ILit l : learnt) copy.push_back(to_dimacs(l));
        result_.learnts.push_back(std::move(copy));
      }
      backtrack(bt_level);
      if (learnt.size() == 1) {
        enqueue(learnt[0], kNoReason);
      } else {
        const CRef cref = attach(learnt, true, lbd);
        enqueue(learnt[0], cref);
      }
      var_inc_ /= opts_.var_decay;
      if (out_of_time()) return finish(SolverResult::Status::TimedOut);
      continue;
    }

    if (conflicts_this_restart >= restart_limit) {
      backtrack(0);
      conflicts_this_restart = 0;
      ++result_.stats.restarts;
      restart_limit = luby(2.0, ++restart_index) * opts_.restart_base;
      continue;
    }
    if (static_cast<double>(learnts_.size()) > max_learnts_) {
      reduce_db();
      max_learnts_ *= 1.1;
    }

    std::uint32_t next = num_vars_;
    while (!heap_.empty()) {
      const std::uint32_t v = heap_.pop();
      if (assigns_[v] == 0) {
        next = v;
        break;
      }
    }
    if (next == num_vars_) return finish(SolverResult::Status::Sat);
    ++result_.stats.decisions;
    if ((result_.stats.decisions & 1023U) == 0 && out_of_time()) return finish(SolverResult::Status::TimedOut);
    trail_lim_.push_back(trail_.size());
    enqueue(make_lit(next, !saved_phase_[next]), kNoReason);
  }
}

}  // namespace

SolverResult solve(const CnfFormula& formula, const SolverOptions& options) {
  Cdcl solver(formula, options);
  return solver.run();
}

const char* to_string(SolverResult::Status status) {
  switch (status) {
    case SolverResult::Status::Sat: return "sat";
    case SolverResult::Status::Unsat: return "unsat";
    case SolverResult::Status::TimedOut: return "timeout";
  }
  return "?";
}

}  // namespace bf
