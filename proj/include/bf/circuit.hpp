#pragma once

// Gate-level circuits over Boolean literals with on-the-fly Tseitin
// conversion. Constants are folded while building, so multiplying by a
// known channel coefficient only emits the adders its set bits need.

#include <cstdint>
#include <limits>
#include <unordered_map>
#include <vector>

#include "bf/cnf.hpp"

namespace bf::circuit {

inline constexpr Lit kTrue = std::numeric_limits<int>::max();
inline constexpr Lit kFalse = -kTrue;

inline bool is_const(Lit l) { return l == kTrue || l == kFalse; }
inline Lit from_bool(bool b) { return b ? kTrue : kFalse; }

enum class GateKind { And, Or, Xor };

struct Gate {
  GateKind kind;
  Lit a;
  Lit b;
  int out;  // output variable
};

// Two's-complement bit vector, LSB first.
using Bits = std::vector<Lit>;

class CircuitBuilder {
 public:
  int new_var() { return ++num_vars_; }
  Bits new_vars(std::size_t count);

  Lit land(Lit a, Lit b);
  Lit lor(Lit a, Lit b);
  Lit lxor(Lit a, Lit b);
  Lit mux(Lit sel, Lit if_true, Lit if_false);

  // Adds a clause after dropping false constants; a clause that becomes
  // empty marks the formula contradictory (see contradictory()).
  void add_clause(Clause clause);
  void require(Lit a) { add_clause({a}); }
  void require_equal(Lit a, Lit b);

  int num_vars() const { return num_vars_; }
  const std::vector<Clause>& clauses() const { return clauses_; }
  const std::vector<Gate>& gates() const { return gates_; }
  bool contradictory() const { return contradictory_; }

  // Moves the clauses out. A contradictory builder yields (x)(-x) on a
  // fresh variable so the result never contains an empty clause.
  CnfFormula take_formula();

 private:
  Lit make_gate(GateKind kind, Lit a, Lit b);

  int num_vars_ = 0;
  bool contradictory_ = false;
  std::vector<Clause> clauses_;
  std::vector<Gate> gates_;
  struct GateKey {
    GateKind kind;
    Lit a;
    Lit b;
    friend bool operator==(const GateKey&, const GateKey&) = default;
  };
  struct GateKeyHash {
    std::size_t operator()(const GateKey& k) const {
      const auto packed = static_cast<std::uint64_t>(static_cast<std::uint32_t>(k.a)) << 32 | static_cast<std::uint32_t>(k.b);
      return std::hash<std::uint64_t>{}(packed * 3 + static_cast<std::uint64_t>(k.kind));
    }
  };

  std::unordered_map<GateKey, int, GateKeyHash> cache_;
};

// Arithmetic on signed bit vectors.
Bits constant(const BigInt& value, std::size_t width);
Bits sign_extend(const Bits& a, std::size_t width);

struct AddResult {
  Bits sum;
  Lit carry_out;
  Lit overflow;  // signed overflow
};

// a + b + carry_in over equal widths, wrapping modulo 2^width.
AddResult add(CircuitBuilder& cb, const Bits& a, const Bits& b, Lit carry_in = kFalse);
// a - b over equal widths.
AddResult subtract(CircuitBuilder& cb, const Bits& a, const Bits& b);

struct NegateResult {
  Bits value;
  Lit overflow;  // control set and input is the most negative value
};

// control ? -x : x.
NegateResult conditional_negate(CircuitBuilder& cb, const Bits& x, Lit control);

// Signed shift-and-add product of a and b, modulo 2^width. Exact whenever
// width >= |a| + |b|.
Bits multiply(CircuitBuilder& cb, const Bits& a, const Bits& b, std::size_t width);

// Signed a >= b over equal widths.
Lit greater_equal(CircuitBuilder& cb, const Bits& a, const Bits& b);

// Evaluates gates in creation order. `values` is indexed by variable and
// must hold the inputs; gate outputs are filled in.
void simulate(const std::vector<Gate>& gates, std::vector<bool>& values);
bool value_of(Lit l, const std::vector<bool>& values);
BigInt value_of(const Bits& bits, const std::vector<bool>& values, bool is_signed = true);

// Standalone Q-bit blocks over fresh input variables.
enum class BlockKind { Sum, Mult, ExactMult, Comp, SignFlip, Consist };

struct CircuitBlock {
  BlockKind kind;
  FixedPointFormat fmt;
  std::vector<Bits> inputs;
  std::vector<Bits> outputs;
  std::vector<Gate> gates;
  CnfFormula cnf;
};

// Sum: inputs a, b; outputs sum (Q bits), overflow.
CircuitBlock build_sum(FixedPointFormat fmt);
// Mult: inputs a, b; outputs floor(a*b / 2^F) as Q bits, overflow.
CircuitBlock build_mult(FixedPointFormat fmt);
// ExactMult: inputs a, b; outputs the full 2Q-bit product (2F fraction bits).
CircuitBlock build_exact_mult(FixedPointFormat fmt);
// Comp: inputs a, b; output a >= b.
CircuitBlock build_comp(FixedPointFormat fmt);
// SignFlip: inputs x, control (1 bit); outputs control ? -x : x, overflow.
CircuitBlock build_signflip(FixedPointFormat fmt);
// Consist: inputs x, y; no outputs, clauses force x == y bitwise.
CircuitBlock build_consist(FixedPointFormat fmt);

}  // namespace bf::circuit
