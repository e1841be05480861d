#pragma once

// The BF data model: a real channel matrix H (N antennas x M users) and a
// budget kappa on the squared beamformer norm. (H, kappa) is a member when
// some w has sum_n w(n)^2 <= kappa and |h_m^T w| >= 1 for every user m.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "bf/numerics.hpp"

namespace bf {

// z in {+1,-1}^M. Bit i of the integer encoding is user i, bit 0 meaning +1.
class SignVector {
 public:
  SignVector() = default;
  explicit SignVector(std::vector<int> signs);
  static SignVector from_index(std::uint64_t index, std::size_t n_users);
  static SignVector all_positive(std::size_t n_users) { return from_index(0, n_users); }

  std::uint64_t index() const;
  std::size_t size() const { return signs_.size(); }
  int operator[](std::size_t m) const { return signs_[m]; }
  const std::vector<int>& signs() const { return signs_; }
  std::string to_string() const;

  friend bool operator==(const SignVector&, const SignVector&) = default;

 private:
  std::vector<int> signs_;
};

class BFInstance {
 public:
  // channels is N x M; column m is h_m. Throws ZeroChannel for an all-zero
  // column and InvalidParameter for empty dimensions or negative kappa.
  BFInstance(MatrixQ channels, Rational kappa, FixedPointFormat format = kTestFormat,
             std::string provenance = {});

  std::size_t n_antennas() const { return channels_.rows(); }
  std::size_t n_users() const { return channels_.cols(); }
  const MatrixQ& channels() const { return channels_; }
  const Rational& channel(std::size_t antenna, std::size_t user) const { return channels_(antenna, user); }
  const Rational& kappa() const { return kappa_; }
  FixedPointFormat format() const { return format_; }
  // Free-form origin note, serialized as a comment line.
  const std::string& provenance() const { return provenance_; }

  MatrixD channels_double() const { return to_double(channels_); }

  BFInstance with_kappa(Rational kappa) const;
  BFInstance with_provenance(std::string provenance) const;

  friend bool operator==(const BFInstance&, const BFInstance&) = default;

 private:
  MatrixQ channels_;
  Rational kappa_;
  FixedPointFormat format_;
  std::string provenance_;
};

// QoS data before normalization: per-user noise variance and SNR target.
struct RawQoSInstance {
  MatrixQ channels;  // N x M
  std::vector<Rational> noise_vars;
  std::vector<Rational> snr_targets;
};

// Column m scaled by 1 / (gamma_m sigma_m^2), which turns each SNR
// constraint into |h_m^T w| >= 1.
MatrixQ normalize(const RawQoSInstance& raw);

// I.i.d. standard normal entries quantized to fmt. Draws that fall outside
// the representable range and columns that quantize to zero are redrawn.
// kappa is left at 0; callers set it with with_kappa.
BFInstance generate(std::size_t n_antennas, std::size_t n_users, std::uint64_t seed,
                    FixedPointFormat fmt = kTestFormat);

struct Witness {
  std::variant<std::vector<FixedPointValue>, std::vector<double>> w;
  std::optional<SignVector> z;

  std::size_t size() const;
  bool is_exact() const { return std::holds_alternative<std::vector<FixedPointValue>>(w); }
  std::vector<double> as_double() const;
};

struct CheckResult {
  enum class Violation { None, Norm, User };

  Violation violation = Violation::None;
  std::size_t user = 0;  // meaningful when violation == User
  std::string reason;

  bool accepted() const { return violation == Violation::None; }
};

// Fixed-point witnesses are checked in exact rational arithmetic; double
// witnesses with absolute tolerance kWitnessTolerance. Throws
// DimensionMismatch on size errors.
inline constexpr double kWitnessTolerance = 1e-9;
CheckResult check_witness(const BFInstance& inst, const Witness& witness);

// Canonical text format ("bf-instance v1"). serialize throws
// InvalidParameter for entries without a finite decimal expansion.
std::string serialize(const BFInstance& inst);
BFInstance parse_instance(std::string_view text);
BFInstance read_instance_file(const std::string& path);
void write_instance_file(const BFInstance& inst, const std::string& path);

// "bf-witness v1" text: a "w" line of decimals, optional "z" line of +1/-1.
std::string serialize(const Witness& witness);
Witness parse_witness(std::string_view text, std::optional<FixedPointFormat> fmt);

}  // namespace bf
