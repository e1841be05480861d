#pragma once

// Bit-blasts a BF instance into CNF over a fixed-point witness domain:
//
//   sum_n w(n)^2 <= kappa                      (one norm inequality)
//   (-1)^b_m * sum_n w(n) h_m(n) >= 1          (one per user, b_m = [z(m) = -1])
//
// Products keep all 2F fractional bits and sums carry guard bits, so the
// CNF is satisfiable exactly when some w on the Q-bit grid satisfies the
// inequalities in exact arithmetic. Overflow flags are still constrained
// to zero.

#include <cstdint>
#include <string>

#include "bf/circuit.hpp"
#include "bf/cnf.hpp"
#include "bf/instance.hpp"

namespace bf {

enum class EncodingMode {
  Shared,      // every inequality reads the same w variables
  Duplicated,  // each inequality gets its own copy of w, tied by consistency clauses
};

const char* to_string(EncodingMode mode);

// Throws UnrepresentableConstant if an entry of H is not exactly
// representable in fmt, or kappa is negative or off the 2^-F grid. kappa
// may exceed the format's range: it is compared at accumulator width.
CnfFormula encode_instance(const BFInstance& inst, FixedPointFormat fmt, EncodingMode mode);

// Circuit blocks needed by N antennas and M users.
struct BlockCounts {
  std::uint64_t mult = 0;
  std::uint64_t sum = 0;
  std::uint64_t comp = 0;
  std::uint64_t sign = 0;
  std::uint64_t consist = 0;

  friend bool operator==(const BlockCounts&, const BlockCounts&) = default;
};

BlockCounts count_blocks(std::uint64_t n_antennas, std::uint64_t n_users);

// Clause counts of one Q-bit block of each kind.
struct BlockCosts {
  std::uint64_t c_sum = 0;
  std::uint64_t c_mult = 0;
  std::uint64_t c_comp = 0;
  std::uint64_t c_sign = 0;
  std::uint64_t c_consist = 0;
};

// Measured from the standalone block library at fmt.
BlockCosts measure_block_costs(FixedPointFormat fmt);

// (NM + N) C_mult + (N-1)(M+1) C_sum + (M+1) C_comp + M C_sign + (M-1) C_consist.
std::uint64_t estimate_size(std::uint64_t n_antennas, std::uint64_t n_users, const BlockCosts& costs);

// Reads w (copy 0) and z out of a satisfying assignment. Throws
// InconsistentAssignment when duplicated copies of w disagree and
// InvalidParameter when the formula carries no variable map.
Witness decode_witness(const CnfFormula& formula, const std::vector<bool>& assignment);

// QF_NRA script asserting the norm and sign-selected user inequalities
// over real w, with one Boolean per user choosing the polarity.
std::string export_smtlib(const BFInstance& inst, FixedPointFormat fmt);

}  // namespace bf
