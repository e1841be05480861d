#pragma once

// Backend runners and the two experiment drivers: the kappa ladder around
// v* for one instance, and runtime sweeps over N or M with CSV output.

#include <chrono>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "bf/encoder.hpp"
#include "bf/instance.hpp"
#include "bf/sat_solver.hpp"

namespace bf {

enum class Backend { Sat, Enum };
enum class Verdict { Member, Nonmember, Timeout };

const char* to_string(Backend backend);
const char* to_string(Verdict verdict);

struct RunResult {
  Verdict verdict = Verdict::Timeout;
  std::optional<Witness> witness;  // member verdicts only
  std::optional<double> objective;  // ||w||^2 of the witness
  std::optional<double> v_star;     // enum backend only
  double wall_ms = 0.0;
  double encode_ms = 0.0;
  std::uint64_t vars = 0;
  std::uint64_t clauses = 0;
  SolverStats stats;
};

struct SatRunOptions {
  FixedPointFormat fmt = kTestFormat;
  EncodingMode mode = EncodingMode::Shared;
  std::chrono::duration<double> timeout = std::chrono::seconds(300);
  std::uint64_t seed = 0;
};

// Encodes, solves and decodes. A decoded witness that fails the exact
// check_witness is a bug and raises NumericalFailure. wall_ms covers the
// solver call only.
RunResult run_sat(const BFInstance& inst, const SatRunOptions& options);

RunResult run_enum(const BFInstance& inst, unsigned threads = 0);

struct BenchRecord {
  std::string axis;  // "antennas", "users", or "-" outside sweeps
  std::size_t n_antennas = 0;
  std::size_t n_users = 0;
  int q_bits = 0;
  int f_bits = 0;
  double kappa_multiplier = 0.0;
  Backend backend = Backend::Sat;
  std::uint64_t seed = 0;
  Verdict verdict = Verdict::Timeout;
  std::optional<double> objective;
  std::optional<double> v_star;
  double wall_ms = 0.0;
  double encode_ms = 0.0;
  std::uint64_t vars = 0;
  std::uint64_t clauses = 0;
  Rational kappa;  // the budget actually used (not a CSV column)
};

inline const std::vector<double> kDefaultLadder = {0.5, 0.99, 1.0, 1.1, 1.5, 2.0};

struct SanityOptions {
  std::vector<double> multipliers = kDefaultLadder;
  SatRunOptions sat;
  // Move rungs within 1% of v* away from it: rungs below v* drop one
  // 2^-F step, the v* rung rises to the squared norm of w* pushed one
  // witness grid step outward in every coordinate.
  bool widen_boundary = false;
  unsigned enum_threads = 0;
};

// v* by enumeration, then the SAT backend at kappa = multiplier * v*
// rounded up to the 2^-F grid.
std::vector<BenchRecord> cmd_sanity(const BFInstance& inst, std::uint64_t seed, const SanityOptions& options);

enum class SweepAxis { Antennas, Users };

const char* to_string(SweepAxis axis);

struct SweepOptions {
  SweepAxis axis = SweepAxis::Antennas;
  std::size_t fixed_other = 4;
  std::vector<std::size_t> range = {1, 2, 3, 4};
  std::size_t trials = 15;
  double kappa_multiplier = 100.0;
  std::uint64_t base_seed = 1;
  SatRunOptions sat{kBenchFormat};
  // 0 = BF_THREADS if set, else hardware concurrency.
  unsigned threads = 0;
};

// Seed of trial t at size s in a sweep.
std::uint64_t sweep_seed(std::uint64_t base_seed, std::size_t size, std::size_t trial);

// Records in (size, trial) order regardless of worker scheduling.
std::vector<BenchRecord> cmd_sweep(const SweepOptions& options);

unsigned worker_count(unsigned requested);

inline constexpr const char* kCsvVersion = "bf-bench-csv v1";
inline constexpr const char* kCsvHeader =
    "axis,n,m,q,f,kappa_mult,backend,seed,verdict,objective,v_star,wall_ms,encode_ms,vars,clauses";

// Version comment, header, one row per record, then median and mean rows
// (seed column "median"/"mean") for every (axis, n, m) group when
// with_summary is set.
void write_csv(std::ostream& out, const std::vector<BenchRecord>& records, bool with_summary);

// Same row without the timing columns, for reproducibility comparisons.
std::string csv_row(const BenchRecord& record, bool with_timing = true);

double median(std::vector<double> values);

}  // namespace bf
