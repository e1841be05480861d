#include "bf/encoder.hpp"

#include <sstream>

namespace bf {

using circuit::Bits;
using circuit::CircuitBuilder;

namespace {

std::size_t ceil_log2(std::size_t n) {
  std::size_t bits = 0;
  while ((std::size_t{1} << bits) < n) ++bits;
  return bits;
}

Bits sum_checked(CircuitBuilder& cb, const Bits& a, const Bits& b) {
  circuit::AddResult r = circuit::add(cb, a, b);
  cb.require(-r.overflow);
  return r.sum;
}

std::string smt_number(const Rational& r) {
  std::string body;
  const Rational mag = r.abs();
  try {
    body = mag.to_decimal();
    if (body.find('.') == std::string::npos) body += ".0";
  } catch (const InvalidParameter&) {
    body = "(/ " + mag.numerator().str() + ".0 " + mag.denominator().str() + ".0)";
  }
  return r.sign() < 0 ? "(- " + body + ")" : body;
}

std::string smt_sum(const std::vector<std::string>& terms) {
  if (terms.empty()) return "0.0";
  if (terms.size() == 1) return terms[0];
  std::string s = "(+";
  for (const auto& t : terms) s += " " + t;
  return s + ")";
}

}  // namespace

const char* to_string(EncodingMode mode) { return mode == EncodingMode::Shared ? "shared" : "duplicated"; }

CnfFormula encode_instance(const BFInstance& inst, FixedPointFormat fmt, EncodingMode mode) {
  fmt.validate();
  const std::size_t n_ant = inst.n_antennas();
  const std::size_t n_users = inst.n_users();
  const auto q = static_cast<std::size_t>(fmt.total_bits);
  const int f = fmt.frac_bits;

  std::vector<std::vector<BigInt>> h_raw(n_users, std::vector<BigInt>(n_ant));
  for (std::size_t m = 0; m < n_users; ++m)
    for (std::size_t n = 0; n < n_ant; ++n) {
      const Rational& h = inst.channel(n, m);
      if (!on_grid(h, f) || h < fmt.min_value() || h > fmt.max_value())
        throw UnrepresentableConstant("h(" + std::to_string(n) + "," + std::to_string(m) + ") = " + h.to_string() +
                                      " is not representable with Q=" + std::to_string(fmt.total_bits) +
                                      " F=" + std::to_string(f));
      h_raw[m][n] = h.floor_scaled(f);
    }
  if (!on_grid(inst.kappa(), f))
    throw UnrepresentableConstant("kappa " + inst.kappa().to_string() + " is off the 2^-" + std::to_string(f) + " grid");

  const std::size_t prod_width = 2 * q;
  const std::size_t acc_width = 2 * q + ceil_log2(n_ant) + 1;

  CircuitBuilder cb;
  VarMap vm;
  vm.n_antennas = n_ant;
  vm.n_users = n_users;
  vm.fmt = fmt;
  auto fresh_copy = [&] {
    std::vector<Bits> copy(n_ant);
    for (auto& bits : copy) bits = cb.new_vars(q);
    return copy;
  };
  const std::vector<Bits> primary = fresh_copy();
  const Bits z = cb.new_vars(n_users);
  auto record_copy = [&](const std::vector<Bits>& copy) {
    std::vector<std::vector<int>> vars(n_ant);
    for (std::size_t n = 0; n < n_ant; ++n) vars[n].assign(copy[n].begin(), copy[n].end());
    vm.w.push_back(std::move(vars));
  };
  record_copy(primary);
  vm.z.assign(z.begin(), z.end());

  EncodingInfo info;

  // Norm inequality; always reads the primary copy.
  std::size_t mark = cb.clauses().size();
  {
    Bits acc;
    for (std::size_t n = 0; n < n_ant; ++n) {
      Bits sq = circuit::sign_extend(circuit::multiply(cb, primary[n], primary[n], prod_width), acc_width);
      acc = acc.empty() ? sq : sum_checked(cb, acc, sq);
    }
    // Beyond N * 2^(2Q-2) the budget can never bind.
    const BigInt max_norm = BigInt(n_ant) << (2 * q - 2);
    const BigInt kappa_scaled = inst.kappa().floor_scaled(2 * f);
    if (kappa_scaled < max_norm)
      cb.require(circuit::greater_equal(cb, circuit::constant(kappa_scaled, acc_width), acc));
  }
  info.norm_clauses = cb.clauses().size() - mark;

  const Bits one = circuit::constant(BigInt(1) << (2 * f), acc_width);
  for (std::size_t m = 0; m < n_users; ++m) {
    const std::vector<Bits>* w = &primary;
    std::vector<Bits> copy;
    if (mode == EncodingMode::Duplicated) {
      copy = fresh_copy();
      record_copy(copy);
      mark = cb.clauses().size();
      for (std::size_t n = 0; n < n_ant; ++n)
        for (std::size_t bit = 0; bit < q; ++bit) cb.require_equal(primary[n][bit], copy[n][bit]);
      info.consistency_clauses += cb.clauses().size() - mark;
      w = &copy;
    }
    mark = cb.clauses().size();
    Bits acc;
    for (std::size_t n = 0; n < n_ant; ++n) {
      Bits prod = circuit::sign_extend(
          circuit::multiply(cb, (*w)[n], circuit::constant(h_raw[m][n], q), prod_width), acc_width);
      acc = acc.empty() ? prod : sum_checked(cb, acc, prod);
    }
    circuit::NegateResult signed_acc = circuit::conditional_negate(cb, acc, z[m]);
    cb.require(-signed_acc.overflow);
    cb.require(circuit::greater_equal(cb, signed_acc.value, one));
    info.user_clauses += cb.clauses().size() - mark;
  }

  CnfFormula formula = cb.take_formula();
  formula.var_map = std::move(vm);
  formula.info = info;
  return formula;
}

BlockCounts count_blocks(std::uint64_t n_antennas, std::uint64_t n_users) {
  if (n_antennas == 0 || n_users == 0) throw InvalidParameter("count_blocks needs N >= 1 and M >= 1");
  const std::uint64_t n = n_antennas, m = n_users;
  return {n * m + n, (n - 1) * (m + 1), m + 1, m, m - 1};
}

BlockCosts measure_block_costs(FixedPointFormat fmt) {
  return {circuit::build_sum(fmt).cnf.num_clauses(), circuit::build_mult(fmt).cnf.num_clauses(),
          circuit::build_comp(fmt).cnf.num_clauses(), circuit::build_signflip(fmt).cnf.num_clauses(),
          circuit::build_consist(fmt).cnf.num_clauses()};
}

std::uint64_t estimate_size(std::uint64_t n_antennas, std::uint64_t n_users, const BlockCosts& costs) {
  const BlockCounts k = count_blocks(n_antennas, n_users);
  return k.mult * costs.c_mult + k.sum * costs.c_sum + k.comp * costs.c_comp + k.sign * costs.c_sign +
         k.consist * costs.c_consist;
}

Witness decode_witness(const CnfFormula& formula, const std::vector<bool>& assignment) {
  if (!formula.var_map) throw InvalidParameter("formula has no variable map");
  const VarMap& vm = *formula.var_map;
  if (assignment.size() < static_cast<std::size_t>(formula.num_vars) + 1)
    throw DimensionMismatch("assignment shorter than the formula's variable count");
  const auto q = static_cast<std::size_t>(vm.fmt.total_bits);
  auto read = [&](std::size_t copy, std::size_t n) {
    std::vector<bool> bits(q);
    for (std::size_t b = 0; b < q; ++b) bits[b] = assignment[static_cast<std::size_t>(vm.w_var(n, b, copy))];
    return FixedPointValue::from_bits(bits, vm.fmt);
  };
  std::vector<FixedPointValue> w;
  for (std::size_t n = 0; n < vm.n_antennas; ++n) {
    w.push_back(read(0, n));
    for (std::size_t copy = 1; copy < vm.copies(); ++copy)
      if (read(copy, n) != w.back())
        throw InconsistentAssignment("copy " + std::to_string(copy) + " of w(" + std::to_string(n) +
                                     ") disagrees with the primary copy");
  }
  std::vector<int> signs(vm.n_users);
  for (std::size_t m = 0; m < vm.n_users; ++m) signs[m] = assignment[static_cast<std::size_t>(vm.z_var(m))] ? -1 : 1;
  Witness out;
  out.w = std::move(w);
  out.z = SignVector(std::move(signs));
  return out;
}

std::string export_smtlib(const BFInstance& inst, FixedPointFormat fmt) {
  const std::size_t n_ant = inst.n_antennas();
  const std::size_t n_users = inst.n_users();
  std::ostringstream out;
  out << "; bf-instance N=" << n_ant << " M=" << n_users << " kappa=" << inst.kappa().to_string()
      << " (squared-norm budget); fixed-point witness format Q=" << fmt.total_bits << " F=" << fmt.frac_bits << "\n";
  out << "; z_m true means user m uses the constraint -h_m^T w >= 1\n";
  out << "(set-logic QF_NRA)\n";
  for (std::size_t n = 0; n < n_ant; ++n) out << "(declare-const w" << n + 1 << " Real)\n";
  for (std::size_t m = 0; m < n_users; ++m) out << "(declare-const z" << m + 1 << " Bool)\n";

  std::vector<std::string> squares;
  for (std::size_t n = 0; n < n_ant; ++n) squares.push_back("(* w" + std::to_string(n + 1) + " w" + std::to_string(n + 1) + ")");
  out << "(assert (<= " << smt_sum(squares) << " " << smt_number(inst.kappa()) << "))\n";

  for (std::size_t m = 0; m < n_users; ++m) {
    std::vector<std::string> terms;
    for (std::size_t n = 0; n < n_ant; ++n) {
      const Rational& h = inst.channel(n, m);
      if (h.is_zero()) continue;
      terms.push_back("(* " + smt_number(h) + " w" + std::to_string(n + 1) + ")");
    }
    const std::string s = smt_sum(terms);
    out << "(assert (>= (ite z" << m + 1 << " (- " << s << ") " << s << ") 1.0))\n";
  }
  out << "(check-sat)\n(get-model)\n";
  return out.str();
}

}  // namespace bf
