// bf: command-line front end.
//
// Exit codes: 0 success or member/sat, 1 nonmember/unsat or rejected
// witness, 2 usage or input error, 3 timeout.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "bf/bench.hpp"
#include "bf/encoder.hpp"
#include "bf/oracle.hpp"
#include "bf/reduction.hpp"
#include "bf/sat_solver.hpp"

namespace {

using namespace bf;

constexpr int kExitOk = 0;
constexpr int kExitNo = 1;
constexpr int kExitUsage = 2;
constexpr int kExitTimeout = 3;

struct Common {
  std::size_t antennas = 2;
  std::size_t users = 2;
  int bits = 0;  // 0: use the instance's or command's default
  int frac_bits = 0;
  std::string kappa;
  double kappa_mult = 0.0;
  std::uint64_t seed = 1;
  std::string backend = "sat";
  std::string mode = "shared";
  double timeout_s = 300.0;
  std::size_t trials = 15;
  std::string out;
  std::string format;
};

FixedPointFormat pick_format(const Common& c, FixedPointFormat fallback) {
  FixedPointFormat fmt = fallback;
  if (c.bits) fmt.total_bits = c.bits;
  if (c.frac_bits) fmt.frac_bits = c.frac_bits;
  else if (c.bits) fmt.frac_bits = c.bits / 2;
  fmt.validate();
  return fmt;
}

EncodingMode pick_mode(const std::string& s) { return s == "duplicated" ? EncodingMode::Duplicated : EncodingMode::Shared; }

std::string fmt_num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

// Writes to --out, or stdout when it is empty or "-".
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot write " + path);
  f << text;
}

// --kappa wins over --kappa-mult; with neither the instance keeps its own.
BFInstance apply_kappa(const BFInstance& inst, const Common& c, unsigned threads = 0) {
  if (!c.kappa.empty()) return inst.with_kappa(Rational::parse(c.kappa));
  if (c.kappa_mult > 0.0) {
    const double v_star = enumerate_optimal(inst, threads).v_star;
    return inst.with_kappa(grid_ceil(c.kappa_mult * v_star, inst.format().frac_bits));
  }
  return inst;
}

int verdict_exit(Verdict v) {
  switch (v) {
    case Verdict::Member: return kExitOk;
    case Verdict::Nonmember: return kExitNo;
    case Verdict::Timeout: return kExitTimeout;
  }
  return kExitUsage;
}

SatRunOptions sat_options(const Common& c, FixedPointFormat fmt) {
  SatRunOptions so;
  so.fmt = fmt;
  so.mode = pick_mode(c.mode);
  so.timeout = std::chrono::duration<double>(c.timeout_s);
  so.seed = c.seed;
  return so;
}

int cmd_gen(const Common& c) {
  const FixedPointFormat fmt = pick_format(c, kTestFormat);
  BFInstance inst = generate(c.antennas, c.users, c.seed, fmt);
  inst = inst.with_provenance("generated n=" + std::to_string(c.antennas) + " m=" + std::to_string(c.users) +
                              " seed=" + std::to_string(c.seed));
  emit(c.out, serialize(apply_kappa(inst, c)));
  return kExitOk;
}

int cmd_solve(const Common& c, const std::string& path) {
  BFInstance inst = apply_kappa(read_instance_file(path), c);
  RunResult r;
  if (c.backend == "enum") {
    r = run_enum(inst);
  } else {
    r = run_sat(inst, sat_options(c, pick_format(c, inst.format())));
  }
  std::cout << to_string(r.verdict) << "\n";
  std::cout << "kappa=" << inst.kappa().to_string() << "\n";
  if (r.v_star) std::cout << "v_star=" << fmt_num(*r.v_star) << "\n";
  if (r.objective) std::cout << "objective=" << fmt_num(*r.objective) << "\n";
  if (c.backend != "enum") std::cout << "vars=" << r.vars << " clauses=" << r.clauses << "\n";
  std::cout << "wall_ms=" << fmt_num(r.wall_ms) << "\n";
  if (r.witness) {
    if (c.out.empty()) std::cout << serialize(*r.witness);
    else emit(c.out, serialize(*r.witness));
  }
  return verdict_exit(r.verdict);
}

int cmd_check(const std::string& inst_path, const std::string& witness_path) {
  const BFInstance inst = read_instance_file(inst_path);
  std::ifstream in(witness_path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + witness_path);
  std::stringstream ss;
  ss << in.rdbuf();
  // Exact grid witnesses are checked exactly; anything else as doubles.
  Witness w;
  try {
    w = parse_witness(ss.str(), inst.format());
  } catch (const ParseError&) {
    w = parse_witness(ss.str(), std::nullopt);
  }
  const CheckResult r = check_witness(inst, w);
  if (r.accepted()) {
    std::cout << "accepted\n";
    return kExitOk;
  }
  std::cout << "rejected: " << r.reason << "\n";
  return kExitNo;
}

int cmd_reduce(const Common& c, const std::vector<std::int64_t>& values, bool decide) {
  PartitionInstance p{values};
  const FixedPointFormat fmt = pick_format(c, kReductionFormat);
  const BFInstance inst = reduce(p, fmt);
  emit(c.out, serialize(inst));
  if (!decide) return kExitOk;
  const double v_star = enumerate_optimal(inst).v_star;
  const bool member = reduced_member(v_star, values.size());
  std::cerr << (member ? "member" : "nonmember") << " v_star=" << fmt_num(v_star) << " partition="
            << (brute_force_partition(p).yes ? "yes" : "no") << "\n";
  return member ? kExitOk : kExitNo;
}

int cmd_estimate(const Common& c) {
  const FixedPointFormat fmt = pick_format(c, kTestFormat);
  const BlockCounts k = count_blocks(c.antennas, c.users);
  const BlockCosts costs = measure_block_costs(fmt);
  std::cout << "blocks mult=" << k.mult << " sum=" << k.sum << " comp=" << k.comp << " sign=" << k.sign
            << " consist=" << k.consist << "\n";
  std::cout << "costs mult=" << costs.c_mult << " sum=" << costs.c_sum << " comp=" << costs.c_comp
            << " sign=" << costs.c_sign << " consist=" << costs.c_consist << "\n";
  std::cout << "C_total=" << estimate_size(c.antennas, c.users, costs) << "\n";
  const BFInstance inst = generate(c.antennas, c.users, c.seed, fmt).with_kappa(Rational(1));
  const CnfFormula f = encode_instance(inst, fmt, EncodingMode::Duplicated);
  std::cout << "measured vars=" << f.num_vars << " clauses=" << f.num_clauses() << " (seed " << c.seed
            << ", duplicated)\n";
  return kExitOk;
}

int cmd_export(const Common& c, const std::string& path) {
  const BFInstance inst = apply_kappa(read_instance_file(path), c);
  const FixedPointFormat fmt = pick_format(c, inst.format());
  if (c.format == "smtlib") {
    emit(c.out, export_smtlib(inst, fmt));
  } else {
    emit(c.out, export_dimacs(encode_instance(inst, fmt, pick_mode(c.mode))));
  }
  return kExitOk;
}

int cmd_sat(const Common& c, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const CnfFormula f = parse_dimacs(ss.str());
  SolverOptions so;
  so.time_limit = std::chrono::duration<double>(c.timeout_s);
  so.seed = c.seed;
  const SolverResult r = solve(f, so);
  std::cout << "c conflicts " << r.stats.conflicts << " decisions " << r.stats.decisions << " wall_ms "
            << fmt_num(r.stats.wall_ms) << "\n";
  switch (r.status) {
    case SolverResult::Status::Sat: {
      std::cout << "s SATISFIABLE\nv";
      for (int v = 1; v <= f.num_vars; ++v) std::cout << ' ' << (r.assignment[static_cast<std::size_t>(v)] ? v : -v);
      std::cout << " 0\n";
      return kExitOk;
    }
    case SolverResult::Status::Unsat:
      std::cout << "s UNSATISFIABLE\n";
      return kExitNo;
    case SolverResult::Status::TimedOut:
      std::cout << "s UNKNOWN\n";
      return kExitTimeout;
  }
  return kExitUsage;
}

void print_records(const Common& c, const std::vector<BenchRecord>& records, bool summary) {
  std::ostringstream os;
  write_csv(os, records, summary);
  emit(c.out, os.str());
}

int cmd_sanity(const Common& c, const std::string& path, const std::vector<double>& ladder, bool widen) {
  SanityOptions o;
  o.multipliers = ladder;
  o.widen_boundary = widen;
  BFInstance inst = path.empty() ? generate(c.antennas, c.users, c.seed, pick_format(c, FixedPointFormat{10, 5}))
                                 : read_instance_file(path);
  o.sat = sat_options(c, pick_format(c, inst.format()));
  const auto records = bf::cmd_sanity(inst, c.seed, o);
  print_records(c, records, false);
  for (const auto& r : records)
    if (r.verdict == Verdict::Timeout) return kExitTimeout;
  return kExitOk;
}

int cmd_sweep(const Common& c, const std::string& axis, std::size_t fixed, const std::vector<std::size_t>& range,
              unsigned threads) {
  SweepOptions o;
  o.axis = axis == "users" ? SweepAxis::Users : SweepAxis::Antennas;
  o.fixed_other = fixed;
  o.range = range;
  o.trials = c.trials;
  if (c.kappa_mult > 0.0) o.kappa_multiplier = c.kappa_mult;
  o.base_seed = c.seed;
  o.sat = sat_options(c, pick_format(c, kBenchFormat));
  o.threads = threads;
  print_records(c, bf::cmd_sweep(o), true);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multicast beamforming feasibility: generation, SAT and enumeration backends, benchmarks"};
  app.require_subcommand(1);
  Common c;

  auto add_size = [&](CLI::App* sub) {
    sub->add_option("-n,--antennas", c.antennas, "number of antennas N")->check(CLI::PositiveNumber);
    sub->add_option("-m,--users", c.users, "number of users M")->check(CLI::PositiveNumber);
  };
  auto add_format = [&](CLI::App* sub) {
    sub->add_option("-q,--bits", c.bits, "fixed-point total bits Q")->check(CLI::Range(3, 64));
    sub->add_option("-f,--frac-bits", c.frac_bits, "fixed-point fractional bits F (default Q/2)")
        ->check(CLI::Range(2, 63));
  };
  auto add_kappa = [&](CLI::App* sub) {
    sub->add_option("--kappa", c.kappa, "squared-norm budget (decimal or p/q)");
    sub->add_option("--kappa-mult", c.kappa_mult, "set kappa to this multiple of v*, rounded up to the grid")
        ->check(CLI::PositiveNumber);
  };
  auto add_solver = [&](CLI::App* sub) {
    sub->add_option("--mode", c.mode, "encoding mode")->check(CLI::IsMember({"shared", "duplicated"}));
    sub->add_option("--timeout-s", c.timeout_s, "SAT time limit in seconds")->check(CLI::PositiveNumber);
  };
  auto add_out = [&](CLI::App* sub) { sub->add_option("--out", c.out, "output path (default stdout)"); };

  auto* gen = app.add_subcommand("gen", "generate a seeded Rayleigh instance");
  add_size(gen);
  add_format(gen);
  add_kappa(gen);
  gen->add_option("--seed", c.seed, "generator seed");
  add_out(gen);

  std::string inst_path, witness_path;
  auto* solve = app.add_subcommand("solve", "decide membership of an instance");
  solve->add_option("instance", inst_path, "instance file")->required();
  solve->add_option("--backend", c.backend, "decision backend")->check(CLI::IsMember({"sat", "enum"}));
  add_format(solve);
  add_kappa(solve);
  add_solver(solve);
  solve->add_option("--seed", c.seed, "SAT solver seed");
  solve->add_option("--out", c.out, "write the witness here instead of stdout");

  auto* check = app.add_subcommand("check", "verify a witness against an instance");
  check->add_option("instance", inst_path, "instance file")->required();
  check->add_option("witness", witness_path, "witness file")->required();

  std::vector<std::int64_t> values;
  bool decide = false;
  auto* red = app.add_subcommand("reduce", "map a PARTITION instance to a BF instance");
  red->add_option("values", values, "PARTITION integers")->required();
  red->add_flag("--decide", decide, "also decide the reduced instance by enumeration");
  add_format(red);
  add_out(red);

  auto* est = app.add_subcommand("estimate", "block counts and CNF size model");
  add_size(est);
  add_format(est);
  est->add_option("--seed", c.seed, "seed of the instance whose encoding is measured");

  auto* exp = app.add_subcommand("export", "write the CNF (DIMACS) or SMT-LIB encoding");
  exp->add_option("instance", inst_path, "instance file")->required();
  exp->add_option("--format", c.format, "output format")->check(CLI::IsMember({"dimacs", "smtlib"}));
  add_format(exp);
  add_kappa(exp);
  add_solver(exp);
  add_out(exp);

  std::string cnf_path;
  auto* sat = app.add_subcommand("sat", "solve a DIMACS CNF file");
  sat->add_option("cnf", cnf_path, "DIMACS file")->required();
  sat->add_option("--timeout-s", c.timeout_s, "time limit in seconds")->check(CLI::PositiveNumber);
  sat->add_option("--seed", c.seed, "solver seed");

  std::vector<double> ladder = kDefaultLadder;
  bool widen = false;
  auto* san = app.add_subcommand("sanity", "SAT verdicts on a kappa ladder around v*");
  san->add_option("instance", inst_path, "instance file (default: generate from --seed)");
  add_size(san);
  add_format(san);
  add_solver(san);
  san->add_option("--seed", c.seed, "instance and solver seed");
  san->add_option("--ladder", ladder, "kappa multipliers")->delimiter(',');
  san->add_flag("--widen", widen, "move the rungs next to v* one grid step away from it");
  san->add_option("--format", c.format, "output format")->check(CLI::IsMember({"csv"}));
  add_out(san);

  std::string axis = "antennas";
  std::size_t fixed = 4;
  std::vector<std::size_t> range = {1, 2, 3, 4};
  unsigned threads = 0;
  auto* sweep = app.add_subcommand("sweep", "runtime sweep over N or M at kappa = mult * v*");
  sweep->add_option("--axis", axis, "swept dimension")->check(CLI::IsMember({"antennas", "users"}));
  sweep->add_option("--fixed", fixed, "size of the other dimension")->check(CLI::PositiveNumber);
  sweep->add_option("--range", range, "swept sizes")->delimiter(',');
  sweep->add_option("--trials", c.trials, "instances per size")->check(CLI::PositiveNumber);
  sweep->add_option("--kappa-mult", c.kappa_mult, "kappa multiple of v* (default 100)")->check(CLI::PositiveNumber);
  sweep->add_option("--threads", threads, "worker threads (default BF_THREADS or all cores)");
  sweep->add_option("--seed", c.seed, "base seed");
  sweep->add_option("--format", c.format, "output format")->check(CLI::IsMember({"csv"}));
  add_format(sweep);
  add_solver(sweep);
  add_out(sweep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen) return cmd_gen(c);
    if (*solve) return cmd_solve(c, inst_path);
    if (*check) return cmd_check(inst_path, witness_path);
    if (*red) return cmd_reduce(c, values, decide);
    if (*est) return cmd_estimate(c);
    if (*exp) return cmd_export(c, inst_path);
    if (*sat) return cmd_sat(c, cnf_path);
    if (*san) return cmd_sanity(c, inst_path, ladder, widen);
    if (*sweep) return cmd_sweep(c, axis, fixed, range, threads);
  } catch (const bf::Error& e) {
    std::cerr << "bf: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
