#include "bf/reduction.hpp"

#include <cstdio>
#include <limits>

namespace bf {

void PartitionInstance::validate() const {
  if (values.empty()) throw InvalidParameter("partition instance needs at least one value");
  for (std::int64_t a : values) {
    if (a == 0) throw InvalidParameter("partition values must be nonzero");
    if (a < std::numeric_limits<std::int32_t>::min() || a > std::numeric_limits<std::int32_t>::max())
      throw InvalidParameter("partition value " + std::to_string(a) + " does not fit in 32 bits");
  }
}

ReductionMatrices reduction_matrices(const PartitionInstance& p) {
  p.validate();
  const std::size_t n = p.values.size();
  MatrixD q = MatrixD::identity(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) q(i, j) += static_cast<double>(p.values[i]) * static_cast<double>(p.values[j]);
  MatrixD v;
  try {
    v = sqrt_decompose(q);
  } catch (const NotPositiveDefinite& e) {
    // I + a a^T has every eigenvalue >= 1; reaching this is a bug.
    throw NumericalFailure(std::string("I + aa^T reported indefinite: ") + e.what());
  }
  MatrixD v_inv = invert(v);
  return {std::move(q), std::move(v), std::move(v_inv)};
}

BFInstance reduce(const PartitionInstance& p, FixedPointFormat fmt, double epsilon) {
  const ReductionMatrices mats = reduction_matrices(p);
  const std::size_t n = p.values.size();
  // Column n of H is row n of V^{-1}.
  MatrixQ h(n, n);
  for (std::size_t user = 0; user < n; ++user)
    for (std::size_t ant = 0; ant < n; ++ant) h(ant, user) = quantize(mats.v_inv(user, ant), fmt).value();

  std::string note = "reduced from partition a=";
  for (std::size_t i = 0; i < n; ++i) note += (i ? "," : "") + std::to_string(p.values[i]);
  char eps[32];
  std::snprintf(eps, sizeof eps, "%g", epsilon);
  note += " epsilon=";
  note += eps;
  return BFInstance(std::move(h), Rational(static_cast<std::int64_t>(n)), fmt, std::move(note));
}

double eval_partition_objective(const PartitionInstance& p, const std::vector<double>& point) {
  if (point.size() != p.values.size()) throw DimensionMismatch("point length differs from the number of values");
  double squares = 0.0, linear = 0.0;
  for (std::size_t i = 0; i < point.size(); ++i) {
    squares += point[i] * point[i];
    linear += point[i] * static_cast<double>(p.values[i]);
  }
  return squares + linear * linear;
}

PartitionAnswer brute_force_partition(const PartitionInstance& p) {
  p.validate();
  const std::size_t n = p.values.size();
  if (n > kMaxBruteForcePartition) throw SizeLimitExceeded("brute-force partition handles at most 24 values");
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    std::int64_t total = 0;
    for (std::size_t i = 0; i < n; ++i) total += ((mask >> i) & 1U) ? -p.values[i] : p.values[i];
    if (total == 0) {
      PartitionAnswer yes{true, std::vector<int>(n)};
      for (std::size_t i = 0; i < n; ++i) yes.signs[i] = ((mask >> i) & 1U) ? -1 : 1;
      return yes;
    }
  }
  return {};
}

}  // namespace bf
