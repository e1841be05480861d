#include "bf/cnf.hpp"

#include <cstdlib>
#include <sstream>

namespace bf {

void CnfFormula::validate() const {
  for (std::size_t i = 0; i < clauses.size(); ++i) {
    if (clauses[i].empty()) throw InvalidParameter("clause " + std::to_string(i) + " is empty");
    for (Lit l : clauses[i])
      if (l == 0 || std::abs(l) > num_vars)
        throw InvalidParameter("clause " + std::to_string(i) + " references undeclared variable " + std::to_string(l));
  }
}

std::string export_dimacs(const CnfFormula& formula) {
  std::string out;
  out.reserve(formula.clauses.size() * 16 + 64);
  if (formula.var_map) {
    const VarMap& vm = *formula.var_map;
    const std::size_t nq = vm.n_antennas * static_cast<std::size_t>(vm.fmt.total_bits);
    out += "c bf-encoding w vars 1.." + std::to_string(nq) + " (antenna-major, LSB first, Q=" +
           std::to_string(vm.fmt.total_bits) + " F=" + std::to_string(vm.fmt.frac_bits) + ")\n";
    out += "c bf-encoding z vars " + std::to_string(nq + 1) + ".." + std::to_string(nq + vm.n_users) +
           " (true = negative sign)\n";
  }
  out += "p cnf " + std::to_string(formula.num_vars) + " " + std::to_string(formula.clauses.size()) + "\n";
  for (const Clause& c : formula.clauses) {
    for (Lit l : c) {
      out += std::to_string(l);
      out += ' ';
    }
    out += "0\n";
  }
  return out;
}

CnfFormula parse_dimacs(std::string_view text) {
  CnfFormula f;
  std::istringstream in{std::string(text)};
  std::string line;
  bool header = false;
  std::size_t declared_clauses = 0;
  Clause current;
  while (std::getline(in, line)) {
    std::size_t pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos || line[pos] == 'c' || line[pos] == '%') continue;
    std::istringstream ls(line);
    if (line[pos] == 'p') {
      std::string p, cnf;
      long long v = -1, c = -1;
      ls >> p >> cnf >> v >> c;
      if (cnf != "cnf" || v < 0 || c < 0) throw ParseError("bad DIMACS header: " + line);
      f.num_vars = static_cast<int>(v);
      declared_clauses = static_cast<std::size_t>(c);
      header = true;
      continue;
    }
    if (!header) throw ParseError("clause before 'p cnf' header");
    long long lit = 0;
    while (ls >> lit) {
      if (lit == 0) {
        f.clauses.push_back(std::move(current));
        current.clear();
      } else {
        if (std::llabs(lit) > f.num_vars) throw ParseError("literal " + std::to_string(lit) + " exceeds declared variables");
        current.push_back(static_cast<Lit>(lit));
      }
    }
    if (!ls.eof()) throw ParseError("bad token in DIMACS line: " + line);
  }
  if (!header) throw ParseError("missing 'p cnf' header");
  if (!current.empty()) f.clauses.push_back(std::move(current));
  if (f.clauses.size() != declared_clauses)
    throw ParseError("header declares " + std::to_string(declared_clauses) + " clauses, found " +
                     std::to_string(f.clauses.size()));
  return f;
}

bool satisfies(const CnfFormula& formula, const std::vector<bool>& assignment) {
  if (assignment.size() < static_cast<std::size_t>(formula.num_vars) + 1) return false;
  for (const Clause& c : formula.clauses) {
    bool sat = false;
    for (Lit l : c) {
      if (assignment[static_cast<std::size_t>(std::abs(l))] == (l > 0)) {
        sat = true;
        break;
      }
    }
    if (!sat) return false;
  }
  return true;
}

}  // namespace bf
