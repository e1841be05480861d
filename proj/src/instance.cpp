#include "bf/instance.hpp"

#include <charconv>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace bf {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    out.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

std::string_view strip_comment(std::string_view line) {
  if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
  return line;
}

std::size_t parse_count(std::string_view token) {
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size())
    throw ParseError("expected a count, got '" + std::string(token) + "'");
  return value;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

constexpr std::string_view kProvenancePrefix = "# provenance: ";

}  // namespace

SignVector::SignVector(std::vector<int> signs) : signs_(std::move(signs)) {
  for (int s : signs_)
    if (s != 1 && s != -1) throw InvalidParameter("sign vector entries must be +1 or -1");
}

SignVector SignVector::from_index(std::uint64_t index, std::size_t n_users) {
  if (n_users > 63) throw SizeLimitExceeded("sign vector longer than 63 entries");
  std::vector<int> signs(n_users);
  for (std::size_t m = 0; m < n_users; ++m) signs[m] = ((index >> m) & 1U) ? -1 : 1;
  return SignVector(std::move(signs));
}

std::uint64_t SignVector::index() const {
  std::uint64_t idx = 0;
  for (std::size_t m = 0; m < signs_.size(); ++m)
    if (signs_[m] < 0) idx |= std::uint64_t{1} << m;
  return idx;
}

std::string SignVector::to_string() const {
  std::string s;
  for (int v : signs_) s += v > 0 ? '+' : '-';
  return s;
}

BFInstance::BFInstance(MatrixQ channels, Rational kappa, FixedPointFormat format, std::string provenance)
    : channels_(std::move(channels)), kappa_(std::move(kappa)), format_(format), provenance_(std::move(provenance)) {
  format_.validate();
  if (channels_.rows() == 0 || channels_.cols() == 0) throw InvalidParameter("instance needs N >= 1 and M >= 1");
  if (kappa_.sign() < 0) throw InvalidParameter("kappa must be nonnegative");
  if (provenance_.find('\n') != std::string::npos) throw InvalidParameter("provenance must be a single line");
  for (std::size_t m = 0; m < channels_.cols(); ++m) {
    bool zero = true;
    for (std::size_t n = 0; n < channels_.rows() && zero; ++n) zero = channels_(n, m).is_zero();
    if (zero) throw ZeroChannel("channel of user " + std::to_string(m) + " is the zero vector");
  }
}

BFInstance BFInstance::with_kappa(Rational kappa) const {
  return BFInstance(channels_, std::move(kappa), format_, provenance_);
}

BFInstance BFInstance::with_provenance(std::string provenance) const {
  return BFInstance(channels_, kappa_, format_, std::move(provenance));
}

MatrixQ normalize(const RawQoSInstance& raw) {
  const std::size_t m_users = raw.channels.cols();
  if (raw.noise_vars.size() != m_users || raw.snr_targets.size() != m_users)
    throw DimensionMismatch("noise_vars and snr_targets must have one entry per user");
  MatrixQ out = raw.channels;
  for (std::size_t m = 0; m < m_users; ++m) {
    if (raw.noise_vars[m].sign() <= 0) throw InvalidParameter("noise variance must be positive");
    if (raw.snr_targets[m].sign() <= 0) throw InvalidParameter("SNR target must be positive");
    const Rational scale = raw.snr_targets[m] * raw.noise_vars[m];
    for (std::size_t n = 0; n < out.rows(); ++n) out(n, m) /= scale;
  }
  return out;
}

BFInstance generate(std::size_t n_antennas, std::size_t n_users, std::uint64_t seed, FixedPointFormat fmt) {
  fmt.validate();
  if (n_antennas == 0 || n_users == 0) throw InvalidParameter("generate needs N >= 1 and M >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double lo = fmt.min_value().to_double();
  const double hi = fmt.max_value().to_double();
  auto draw = [&] {
    for (;;) {
      double x = normal(rng);
      if (x >= lo && x <= hi) return quantize(x, fmt);
    }
  };
  MatrixQ h(n_antennas, n_users);
  for (std::size_t m = 0; m < n_users; ++m) {
    bool zero = true;
    while (zero) {
      for (std::size_t n = 0; n < n_antennas; ++n) {
        FixedPointValue v = draw();
        zero = zero && v.raw() == 0;
        h(n, m) = v.value();
      }
    }
  }
  return BFInstance(std::move(h), Rational(0), fmt);
}

std::size_t Witness::size() const {
  return std::visit([](const auto& v) { return v.size(); }, w);
}

std::vector<double> Witness::as_double() const {
  if (const auto* d = std::get_if<std::vector<double>>(&w)) return *d;
  std::vector<double> out;
  for (const auto& v : std::get<std::vector<FixedPointValue>>(w)) out.push_back(v.to_double());
  return out;
}

CheckResult check_witness(const BFInstance& inst, const Witness& witness) {
  const std::size_t n_ant = inst.n_antennas();
  const std::size_t n_users = inst.n_users();
  if (witness.size() != n_ant)
    throw DimensionMismatch("witness has " + std::to_string(witness.size()) + " entries, expected " +
                            std::to_string(n_ant));
  if (witness.z && witness.z->size() != n_users) throw DimensionMismatch("sign vector length differs from M");

  if (const auto* exact = std::get_if<std::vector<FixedPointValue>>(&witness.w)) {
    std::vector<Rational> w;
    for (const auto& v : *exact) w.push_back(v.value());
    Rational norm2;
    for (const auto& x : w) norm2 += x * x;
    if (norm2 > inst.kappa())
      return {CheckResult::Violation::Norm, 0, "squared norm " + norm2.to_string() + " exceeds kappa"};
    for (std::size_t m = 0; m < n_users; ++m) {
      Rational dot;
      for (std::size_t n = 0; n < n_ant; ++n) dot += inst.channel(n, m) * w[n];
      if (dot.abs() < Rational(1))
        return {CheckResult::Violation::User, m, "|h_" + std::to_string(m) + "^T w| = " + dot.abs().to_string() + " < 1"};
    }
    return {};
  }

  const auto& w = std::get<std::vector<double>>(witness.w);
  const MatrixD h = inst.channels_double();
  double norm2 = 0.0;
  for (double x : w) norm2 += x * x;
  if (norm2 > inst.kappa().to_double() + kWitnessTolerance)
    return {CheckResult::Violation::Norm, 0, "squared norm " + std::to_string(norm2) + " exceeds kappa"};
  for (std::size_t m = 0; m < n_users; ++m) {
    double dot = 0.0;
    for (std::size_t n = 0; n < n_ant; ++n) dot += h(n, m) * w[n];
    if (std::abs(dot) < 1.0 - kWitnessTolerance)
      return {CheckResult::Violation::User, m, "|h_" + std::to_string(m) + "^T w| = " + std::to_string(std::abs(dot)) + " < 1"};
  }
  return {};
}

// ---------------------------------------------------------------------------

std::string serialize(const BFInstance& inst) {
  std::ostringstream out;
  out << "bf-instance v1\n";
  if (!inst.provenance().empty()) out << kProvenancePrefix << inst.provenance() << '\n';
  out << "n " << inst.n_antennas() << '\n';
  out << "m " << inst.n_users() << '\n';
  out << "kappa " << inst.kappa().to_decimal() << '\n';
  out << "format " << inst.format().total_bits << ' ' << inst.format().frac_bits << '\n';
  for (std::size_t m = 0; m < inst.n_users(); ++m) {
    out << "row";
    for (std::size_t n = 0; n < inst.n_antennas(); ++n) out << ' ' << inst.channel(n, m).to_decimal();
    out << '\n';
  }
  return out.str();
}

BFInstance parse_instance(std::string_view text) {
  auto lines = lines_of(text);
  std::size_t idx = 0;
  std::string provenance;
  // Next non-blank, non-comment line, split into tokens.
  auto next = [&]() -> std::vector<std::string_view> {
    while (idx < lines.size()) {
      std::string_view raw = lines[idx++];
      if (raw.substr(0, kProvenancePrefix.size()) == kProvenancePrefix) {
        provenance = std::string(raw.substr(kProvenancePrefix.size()));
        while (!provenance.empty() && provenance.back() == '\r') provenance.pop_back();
        continue;
      }
      auto tokens = split_ws(strip_comment(raw));
      if (!tokens.empty()) return tokens;
    }
    throw ParseError("unexpected end of instance file");
  };
  auto expect = [&](std::string_view key, std::size_t n_values) {
    auto tokens = next();
    if (tokens[0] != key || tokens.size() != n_values + 1)
      throw ParseError("expected '" + std::string(key) + "' with " + std::to_string(n_values) + " value(s)");
    return tokens;
  };

  auto header = next();
  if (header.size() != 2 || header[0] != "bf-instance" || header[1] != "v1")
    throw ParseError("missing 'bf-instance v1' header");
  const std::size_t n = parse_count(expect("n", 1)[1]);
  const std::size_t m = parse_count(expect("m", 1)[1]);
  if (n == 0 || m == 0) throw ParseError("n and m must be positive");
  const Rational kappa = Rational::parse(expect("kappa", 1)[1]);
  auto fmt_tokens = expect("format", 2);
  FixedPointFormat fmt;
  try {
    fmt = FixedPointFormat::make(static_cast<int>(parse_count(fmt_tokens[1])),
                                 static_cast<int>(parse_count(fmt_tokens[2])));
  } catch (const InvalidParameter& e) {
    throw ParseError(e.what());
  }
  if (!on_grid(kappa, fmt.frac_bits)) throw ParseError("kappa " + kappa.to_string() + " is off the format grid");

  MatrixQ h(n, m);
  for (std::size_t user = 0; user < m; ++user) {
    auto row = expect("row", n);
    for (std::size_t ant = 0; ant < n; ++ant) {
      Rational v = Rational::parse(row[ant + 1]);
      try {
        (void)FixedPointValue::from_rational(v, fmt);
      } catch (const OutOfRange& e) {
        throw ParseError(std::string("channel entry not representable: ") + e.what());
      }
      h(ant, user) = std::move(v);
    }
  }
  while (idx < lines.size())
    if (!split_ws(strip_comment(lines[idx++])).empty()) throw ParseError("trailing content after last row");
  return BFInstance(std::move(h), kappa, fmt, std::move(provenance));
}

BFInstance read_instance_file(const std::string& path) { return parse_instance(slurp(path)); }

void write_instance_file(const BFInstance& inst, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidParameter("cannot write " + path);
  out << serialize(inst);
}

std::string serialize(const Witness& witness) {
  std::ostringstream out;
  out << "bf-witness v1\nw";
  if (const auto* exact = std::get_if<std::vector<FixedPointValue>>(&witness.w)) {
    for (const auto& v : *exact) out << ' ' << v.value().to_decimal();
  } else {
    char buf[64];
    for (double v : std::get<std::vector<double>>(witness.w)) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out << ' ' << buf;
    }
  }
  out << '\n';
  if (witness.z) {
    out << 'z';
    for (int s : witness.z->signs()) out << (s > 0 ? " +1" : " -1");
    out << '\n';
  }
  return out.str();
}

Witness parse_witness(std::string_view text, std::optional<FixedPointFormat> fmt) {
  Witness witness;
  bool header = false, have_w = false;
  for (std::string_view line : lines_of(text)) {
    auto tokens = split_ws(strip_comment(line));
    if (tokens.empty()) continue;
    if (!header) {
      if (tokens.size() != 2 || tokens[0] != "bf-witness" || tokens[1] != "v1")
        throw ParseError("missing 'bf-witness v1' header");
      header = true;
    } else if (tokens[0] == "w") {
      if (fmt) {
        std::vector<FixedPointValue> w;
        for (std::size_t i = 1; i < tokens.size(); ++i) {
          try {
            w.push_back(FixedPointValue::from_rational(Rational::parse(tokens[i]), *fmt));
          } catch (const OutOfRange& e) {
            throw ParseError(e.what());
          }
        }
        witness.w = std::move(w);
      } else {
        std::vector<double> w;
        for (std::size_t i = 1; i < tokens.size(); ++i) {
          const std::string tok(tokens[i]);
          std::size_t used = 0;
          double x = 0.0;
          try {
            x = std::stod(tok, &used);
          } catch (const std::exception&) {
            used = 0;
          }
          if (used != tok.size() || !std::isfinite(x)) throw ParseError("bad witness entry '" + tok + "'");
          w.push_back(x);
        }
        witness.w = std::move(w);
      }
      have_w = true;
    } else if (tokens[0] == "z") {
      std::vector<int> signs;
      for (std::size_t i = 1; i < tokens.size(); ++i) {
        if (tokens[i] == "+1" || tokens[i] == "1") signs.push_back(1);
        else if (tokens[i] == "-1") signs.push_back(-1);
        else throw ParseError("sign entries must be +1 or -1");
      }
      witness.z = SignVector(std::move(signs));
    } else {
      throw ParseError("unknown witness line '" + std::string(tokens[0]) + "'");
    }
  }
  if (!header || !have_w) throw ParseError("witness needs a header and a 'w' line");
  return witness;
}

}  // namespace bf
