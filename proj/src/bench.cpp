#include "bf/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <numeric>
#include <thread>

#include "bf/oracle.hpp"

namespace bf {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

double squared_norm(const std::vector<double>& w) {
  double s = 0.0;
  for (double x : w) s += x * x;
  return s;
}

std::string fmt_double(double x, const char* spec) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, x);
  return buf;
}

std::string fmt_opt(const std::optional<double>& x) { return x ? fmt_double(*x, "%.9g") : std::string(); }

}  // namespace

const char* to_string(Backend backend) { return backend == Backend::Sat ? "sat" : "enum"; }

const char* to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::Member: return "member";
    case Verdict::Nonmember: return "nonmember";
    case Verdict::Timeout: return "timeout";
  }
  return "?";
}

const char* to_string(SweepAxis axis) { return axis == SweepAxis::Antennas ? "antennas" : "users"; }

RunResult run_sat(const BFInstance& inst, const SatRunOptions& options) {
  RunResult out;
  auto start = Clock::now();
  const CnfFormula formula = encode_instance(inst, options.fmt, options.mode);
  out.encode_ms = ms_since(start);
  out.vars = static_cast<std::uint64_t>(formula.num_vars);
  out.clauses = formula.num_clauses();

  SolverOptions so;
  so.time_limit = options.timeout;
  so.seed = options.seed;
  start = Clock::now();
  SolverResult r = solve(formula, so);
  out.wall_ms = ms_since(start);
  out.stats = r.stats;

  switch (r.status) {
    case SolverResult::Status::TimedOut:
      out.verdict = Verdict::Timeout;
      break;
    case SolverResult::Status::Unsat:
      out.verdict = Verdict::Nonmember;
      break;
    case SolverResult::Status::Sat: {
      Witness w = decode_witness(formula, r.assignment);
      CheckResult check = check_witness(inst, w);
      if (!check.accepted()) throw NumericalFailure("decoded SAT witness rejected: " + check.reason);
      out.verdict = Verdict::Member;
      out.objective = squared_norm(w.as_double());
      out.witness = std::move(w);
      break;
    }
  }
  return out;
}

RunResult run_enum(const BFInstance& inst, unsigned threads) {
  RunResult out;
  const auto start = Clock::now();
  EnumDecision d = decide_enum(inst, threads);
  out.wall_ms = ms_since(start);
  out.v_star = d.v_star;
  out.verdict = d.member ? Verdict::Member : Verdict::Nonmember;
  if (d.member) {
    out.objective = d.v_star;
    out.witness = std::move(d.witness);
  }
  return out;
}

std::vector<BenchRecord> cmd_sanity(const BFInstance& inst, std::uint64_t seed, const SanityOptions& options) {
  const EnumerationResult opt = enumerate_optimal(inst, options.enum_threads);
  const FixedPointFormat fmt = options.sat.fmt;
  const Rational step = fmt.step();

  std::vector<BenchRecord> out;
  for (double mult : options.multipliers) {
    if (!(mult >= 0.0) || !std::isfinite(mult)) throw InvalidParameter("ladder multipliers must be finite and >= 0");
    Rational kappa = grid_ceil(mult * opt.v_star, fmt.frac_bits);
    if (options.widen_boundary && std::abs(mult - 1.0) <= 0.01 + 1e-12) {
      if (mult < 1.0) {
        kappa = kappa > step ? kappa - step : Rational(0);
      } else {
        double pushed = 0.0;
        for (double x : opt.w_star) pushed += (std::abs(x) + step.to_double()) * (std::abs(x) + step.to_double());
        kappa = std::max(kappa, grid_ceil(pushed, fmt.frac_bits));
      }
    }
    RunResult r = run_sat(inst.with_kappa(kappa), options.sat);
    BenchRecord rec;
    rec.axis = "-";
    rec.n_antennas = inst.n_antennas();
    rec.n_users = inst.n_users();
    rec.q_bits = fmt.total_bits;
    rec.f_bits = fmt.frac_bits;
    rec.kappa_multiplier = mult;
    rec.backend = Backend::Sat;
    rec.seed = seed;
    rec.verdict = r.verdict;
    rec.objective = r.objective;
    rec.v_star = opt.v_star;
    rec.wall_ms = r.wall_ms;
    rec.encode_ms = r.encode_ms;
    rec.vars = r.vars;
    rec.clauses = r.clauses;
    rec.kappa = kappa;
    out.push_back(std::move(rec));
  }
  return out;
}

std::uint64_t sweep_seed(std::uint64_t base_seed, std::size_t size, std::size_t trial) {
  return base_seed + 1000 * static_cast<std::uint64_t>(size) + static_cast<std::uint64_t>(trial);
}

unsigned worker_count(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("BF_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

std::vector<BenchRecord> cmd_sweep(const SweepOptions& options) {
  if (options.trials == 0) throw InvalidParameter("sweep needs at least one trial");
  if (options.fixed_other == 0) throw InvalidParameter("sweep needs fixed_other >= 1");
  for (std::size_t s : options.range)
    if (s == 0) throw InvalidParameter("sweep sizes must be >= 1");
  if (!(options.kappa_multiplier > 0.0)) throw InvalidParameter("kappa multiplier must be positive");
  options.sat.fmt.validate();

  const std::size_t n_jobs = options.range.size() * options.trials;
  std::vector<BenchRecord> records(n_jobs);
  std::vector<std::exception_ptr> errors(n_jobs);
  std::atomic<std::size_t> next{0};

  auto work = [&] {
    for (std::size_t job; (job = next.fetch_add(1)) < n_jobs;) {
      try {
        const std::size_t size = options.range[job / options.trials];
        const std::size_t trial = job % options.trials;
        const std::size_t n = options.axis == SweepAxis::Antennas ? size : options.fixed_other;
        const std::size_t m = options.axis == SweepAxis::Antennas ? options.fixed_other : size;
        const std::uint64_t seed = sweep_seed(options.base_seed, size, trial);
        const FixedPointFormat fmt = options.sat.fmt;

        BFInstance inst = generate(n, m, seed, fmt);
        const double v_star = enumerate_optimal(inst, 1).v_star;
        const Rational kappa = grid_ceil(options.kappa_multiplier * v_star, fmt.frac_bits);
        SatRunOptions so = options.sat;
        so.seed = seed;
        RunResult r = run_sat(inst.with_kappa(kappa), so);

        BenchRecord& rec = records[job];
        rec.axis = to_string(options.axis);
        rec.n_antennas = n;
        rec.n_users = m;
        rec.q_bits = fmt.total_bits;
        rec.f_bits = fmt.frac_bits;
        rec.kappa_multiplier = options.kappa_multiplier;
        rec.backend = Backend::Sat;
        rec.seed = seed;
        rec.verdict = r.verdict;
        rec.objective = r.objective;
        rec.v_star = v_star;
        rec.wall_ms = r.wall_ms;
        rec.encode_ms = r.encode_ms;
        rec.vars = r.vars;
        rec.clauses = r.clauses;
        rec.kappa = kappa;
      } catch (...) {
        errors[job] = std::current_exception();
      }
    }
  };

  const unsigned n_workers = std::min<unsigned>(worker_count(options.threads), static_cast<unsigned>(n_jobs));
  {
    std::vector<std::jthread> pool;
    for (unsigned i = 1; i < n_workers; ++i) pool.emplace_back(work);
    work();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return records;
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t k = values.size() / 2;
  return values.size() % 2 ? values[k] : 0.5 * (values[k - 1] + values[k]);
}

std::string csv_row(const BenchRecord& r, bool with_timing) {
  std::string row = r.axis + "," + std::to_string(r.n_antennas) + "," + std::to_string(r.n_users) + "," +
                    std::to_string(r.q_bits) + "," + std::to_string(r.f_bits) + "," +
                    fmt_double(r.kappa_multiplier, "%g") + "," + to_string(r.backend) + "," + std::to_string(r.seed) +
                    "," + to_string(r.verdict) + "," + fmt_opt(r.objective) + "," + fmt_opt(r.v_star) + ",";
  if (with_timing) row += fmt_double(r.wall_ms, "%.3f") + "," + fmt_double(r.encode_ms, "%.3f");
  else row += ",";
  return row + "," + std::to_string(r.vars) + "," + std::to_string(r.clauses);
}

void write_csv(std::ostream& out, const std::vector<BenchRecord>& records, bool with_summary) {
  out << "# " << kCsvVersion << "\n" << kCsvHeader << "\n";
  for (const auto& r : records) out << csv_row(r) << "\n";
  if (!with_summary) return;

  // Groups keep first-appearance order.
  std::vector<std::tuple<std::string, std::size_t, std::size_t>> order;
  std::map<std::tuple<std::string, std::size_t, std::size_t>, std::vector<const BenchRecord*>> groups;
  for (const auto& r : records) {
    auto key = std::make_tuple(r.axis, r.n_antennas, r.n_users);
    auto& g = groups[key];
    if (g.empty()) order.push_back(key);
    g.push_back(&r);
  }
  for (const auto& key : order) {
    const auto& g = groups[key];
    std::vector<double> wall, enc;
    for (const auto* r : g) {
      wall.push_back(r->wall_ms);
      enc.push_back(r->encode_ms);
    }
    const BenchRecord& first = *g.front();
    const std::string prefix = first.axis + "," + std::to_string(first.n_antennas) + "," +
                               std::to_string(first.n_users) + "," + std::to_string(first.q_bits) + "," +
                               std::to_string(first.f_bits) + "," + fmt_double(first.kappa_multiplier, "%g") + "," +
                               to_string(first.backend) + ",";
    const double n = static_cast<double>(g.size());
    out << prefix << "median,,,," << fmt_double(median(wall), "%.3f") << "," << fmt_double(median(enc), "%.3f")
        << ",,\n";
    out << prefix << "mean,,,," << fmt_double(std::accumulate(wall.begin(), wall.end(), 0.0) / n, "%.3f") << ","
        << fmt_double(std::accumulate(enc.begin(), enc.end(), 0.0) / n, "%.3f") << ",,\n";
  }
}

}  // namespace bf
