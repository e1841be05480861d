#include "bf/circuit.hpp"

#include <algorithm>
#include <cstdlib>

namespace bf::circuit {

Bits CircuitBuilder::new_vars(std::size_t count) {
  Bits out(count);
  for (auto& l : out) l = new_var();
  return out;
}

Lit CircuitBuilder::land(Lit a, Lit b) {
  if (a == kFalse || b == kFalse || a == -b) return kFalse;
  if (a == kTrue) return b;
  if (b == kTrue || a == b) return a;
  return make_gate(GateKind::And, a, b);
}

Lit CircuitBuilder::lor(Lit a, Lit b) {
  if (a == kTrue || b == kTrue || a == -b) return kTrue;
  if (a == kFalse) return b;
  if (b == kFalse || a == b) return a;
  return make_gate(GateKind::Or, a, b);
}

Lit CircuitBuilder::lxor(Lit a, Lit b) {
  if (a == kFalse) return b;
  if (b == kFalse) return a;
  if (a == kTrue) return -b;
  if (b == kTrue) return -a;
  if (a == b) return kFalse;
  if (a == -b) return kTrue;
  // Gates only ever see positive XOR inputs; polarity moves to the output.
  bool flip = false;
  if (a < 0) {
    a = -a;
    flip = !flip;
  }
  if (b < 0) {
    b = -b;
    flip = !flip;
  }
  Lit out = make_gate(GateKind::Xor, a, b);
  return flip ? -out : out;
}

Lit CircuitBuilder::mux(Lit sel, Lit if_true, Lit if_false) {
  if (sel == kTrue) return if_true;
  if (sel == kFalse) return if_false;
  if (if_true == if_false) return if_true;
  return lor(land(sel, if_true), land(-sel, if_false));
}

Lit CircuitBuilder::make_gate(GateKind kind, Lit a, Lit b) {
  if (a > b) std::swap(a, b);
  const GateKey key{kind, a, b};
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  const int y = new_var();
  switch (kind) {
    case GateKind::And:
      clauses_.push_back({-y, a});
      clauses_.push_back({-y, b});
      clauses_.push_back({y, -a, -b});
      break;
    case GateKind::Or:
      clauses_.push_back({y, -a});
      clauses_.push_back({y, -b});
      clauses_.push_back({-y, a, b});
      break;
    case GateKind::Xor:
      clauses_.push_back({-y, a, b});
      clauses_.push_back({-y, -a, -b});
      clauses_.push_back({y, -a, b});
      clauses_.push_back({y, a, -b});
      break;
  }
  cache_.emplace(key, y);
  gates_.push_back({kind, a, b, y});
  return y;
}

void CircuitBuilder::add_clause(Clause clause) {
  Clause kept;
  for (Lit l : clause) {
    if (l == kTrue) return;
    if (l == kFalse) continue;
    if (std::find(kept.begin(), kept.end(), -l) != kept.end()) return;
    if (std::find(kept.begin(), kept.end(), l) == kept.end()) kept.push_back(l);
  }
  if (kept.empty()) {
    contradictory_ = true;
    return;
  }
  clauses_.push_back(std::move(kept));
}

void CircuitBuilder::require_equal(Lit a, Lit b) {
  add_clause({a, -b});
  add_clause({-a, b});
}

CnfFormula CircuitBuilder::take_formula() {
  CnfFormula f;
  if (contradictory_) {
    const int x = new_var();
    clauses_.push_back({x});
    clauses_.push_back({-x});
    contradictory_ = false;
  }
  f.num_vars = num_vars_;
  f.clauses = std::move(clauses_);
  clauses_.clear();
  return f;
}

// ---------------------------------------------------------------------------

Bits constant(const BigInt& value, std::size_t width) {
  const BigInt modulus = BigInt(1) << width;
  BigInt v = value % modulus;
  if (v < 0) v += modulus;
  Bits out(width);
  for (std::size_t i = 0; i < width; ++i) out[i] = from_bool(boost::multiprecision::bit_test(v, static_cast<unsigned>(i)));
  return out;
}

Bits sign_extend(const Bits& a, std::size_t width) {
  Bits out = a;
  if (out.size() > width) {
    out.resize(width);
  } else {
    out.resize(width, a.empty() ? kFalse : a.back());
  }
  return out;
}

AddResult add(CircuitBuilder& cb, const Bits& a, const Bits& b, Lit carry_in) {
  if (a.size() != b.size() || a.empty()) throw DimensionMismatch("adder operands must have equal, nonzero width");
  AddResult r;
  r.sum.resize(a.size());
  Lit carry = carry_in;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Lit t = cb.lxor(a[i], b[i]);
    r.sum[i] = cb.lxor(t, carry);
    carry = cb.lor(cb.land(a[i], b[i]), cb.land(carry, t));
  }
  r.carry_out = carry;
  const Lit sa = a.back(), sb = b.back(), ss = r.sum.back();
  r.overflow = cb.land(-cb.lxor(sa, sb), cb.lxor(ss, sa));
  return r;
}

AddResult subtract(CircuitBuilder& cb, const Bits& a, const Bits& b) {
  Bits nb(b.size());
  std::transform(b.begin(), b.end(), nb.begin(), [](Lit l) { return -l; });
  return add(cb, a, nb, kTrue);
}

NegateResult conditional_negate(CircuitBuilder& cb, const Bits& x, Lit control) {
  if (x.empty()) throw DimensionMismatch("empty operand");
  Bits flipped(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) flipped[i] = cb.lxor(x[i], control);
  // (x xor c) + c, carried through a half-adder chain.
  NegateResult r;
  r.value.resize(x.size());
  Lit carry = control;
  for (std::size_t i = 0; i < x.size(); ++i) {
    r.value[i] = cb.lxor(flipped[i], carry);
    carry = cb.land(flipped[i], carry);
  }
  r.overflow = cb.land(control, cb.land(x.back(), r.value.back()));
  return r;
}

Bits multiply(CircuitBuilder& cb, const Bits& a, const Bits& b, std::size_t width) {
  if (a.empty() || b.empty()) throw DimensionMismatch("empty operand");
  // a * b = sum_{i < k-1} b_i (a << i)  -  b_{k-1} (a << (k-1)),  k = |b|.
  const Bits ax = sign_extend(a, width);
  Bits acc(width, kFalse);
  const std::size_t k = b.size();
  for (std::size_t i = 0; i < k && i < width; ++i) {
    Bits pp(width, kFalse);
    for (std::size_t j = i; j < width; ++j) pp[j] = cb.land(ax[j - i], b[i]);
    if (std::all_of(pp.begin(), pp.end(), [](Lit l) { return l == kFalse; })) continue;
    acc = (i + 1 < k) ? add(cb, acc, pp).sum : subtract(cb, acc, pp).sum;
  }
  return acc;
}

Lit greater_equal(CircuitBuilder& cb, const Bits& a, const Bits& b) {
  if (a.size() != b.size() || a.empty()) throw DimensionMismatch("comparator operands must have equal, nonzero width");
  // Carry chain of a + ~b + 1 on one extra sign bit; only the final sign is kept.
  Lit carry = kTrue;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Lit x = a[i], y = -b[i];
    carry = cb.lor(cb.land(x, y), cb.land(carry, cb.lor(x, y)));
  }
  const Lit sign = cb.lxor(cb.lxor(a.back(), -b.back()), carry);
  return -sign;
}

// ---------------------------------------------------------------------------

bool value_of(Lit l, const std::vector<bool>& values) {
  if (l == kTrue) return true;
  if (l == kFalse) return false;
  const bool v = values[static_cast<std::size_t>(std::abs(l))];
  return l > 0 ? v : !v;
}

BigInt value_of(const Bits& bits, const std::vector<bool>& values, bool is_signed) {
  BigInt v = 0;
  for (std::size_t i = 0; i < bits.size(); ++i)
    if (value_of(bits[i], values)) v |= BigInt(1) << i;
  if (is_signed && !bits.empty() && value_of(bits.back(), values)) v -= BigInt(1) << bits.size();
  return v;
}

void simulate(const std::vector<Gate>& gates, std::vector<bool>& values) {
  for (const Gate& g : gates) {
    const bool a = value_of(g.a, values), b = value_of(g.b, values);
    bool y = false;
    switch (g.kind) {
      case GateKind::And: y = a && b; break;
      case GateKind::Or: y = a || b; break;
      case GateKind::Xor: y = a != b; break;
    }
    values[static_cast<std::size_t>(g.out)] = y;
  }
}

namespace {

CircuitBlock finish(BlockKind kind, FixedPointFormat fmt, CircuitBuilder& cb, std::vector<Bits> inputs,
                    std::vector<Bits> outputs) {
  CircuitBlock block{kind, fmt, std::move(inputs), std::move(outputs), cb.gates(), {}};
  block.cnf = cb.take_formula();
  return block;
}

}  // namespace

CircuitBlock build_sum(FixedPointFormat fmt) {
  fmt.validate();
  CircuitBuilder cb;
  const auto q = static_cast<std::size_t>(fmt.total_bits);
  Bits a = cb.new_vars(q), b = cb.new_vars(q);
  AddResult r = add(cb, a, b);
  return finish(BlockKind::Sum, fmt, cb, {a, b}, {r.sum, {r.overflow}});
}

CircuitBlock build_mult(FixedPointFormat fmt) {
  fmt.validate();
  CircuitBuilder cb;
  const auto q = static_cast<std::size_t>(fmt.total_bits);
  const auto f = static_cast<std::size_t>(fmt.frac_bits);
  Bits a = cb.new_vars(q), b = cb.new_vars(q);
  Bits full = multiply(cb, a, b, 2 * q);
  Bits result(full.begin() + static_cast<std::ptrdiff_t>(f), full.begin() + static_cast<std::ptrdiff_t>(f + q));
  // Overflow iff a discarded high bit differs from the result's sign bit.
  Lit overflow = kFalse;
  for (std::size_t j = f + q; j < 2 * q; ++j) overflow = cb.lor(overflow, cb.lxor(full[j], result.back()));
  return finish(BlockKind::Mult, fmt, cb, {a, b}, {result, {overflow}});
}

CircuitBlock build_exact_mult(FixedPointFormat fmt) {
  fmt.validate();
  CircuitBuilder cb;
  const auto q = static_cast<std::size_t>(fmt.total_bits);
  Bits a = cb.new_vars(q), b = cb.new_vars(q);
  Bits full = multiply(cb, a, b, 2 * q);
  return finish(BlockKind::ExactMult, fmt, cb, {a, b}, {full});
}

CircuitBlock build_comp(FixedPointFormat fmt) {
  fmt.validate();
  CircuitBuilder cb;
  const auto q = static_cast<std::size_t>(fmt.total_bits);
  Bits a = cb.new_vars(q), b = cb.new_vars(q);
  Lit ge = greater_equal(cb, a, b);
  return finish(BlockKind::Comp, fmt, cb, {a, b}, {{ge}});
}

CircuitBlock build_signflip(FixedPointFormat fmt) {
  fmt.validate();
  CircuitBuilder cb;
  const auto q = static_cast<std::size_t>(fmt.total_bits);
  Bits x = cb.new_vars(q);
  Lit control = cb.new_var();
  NegateResult r = conditional_negate(cb, x, control);
  return finish(BlockKind::SignFlip, fmt, cb, {x, {control}}, {r.value, {r.overflow}});
}

CircuitBlock build_consist(FixedPointFormat fmt) {
  fmt.validate();
  CircuitBuilder cb;
  const auto q = static_cast<std::size_t>(fmt.total_bits);
  Bits x = cb.new_vars(q), y = cb.new_vars(q);
  for (std::size_t i = 0; i < q; ++i) cb.require_equal(x[i], y[i]);
  return finish(BlockKind::Consist, fmt, cb, {x, y}, {});
}

}  // namespace bf::circuit
