#pragma once

// PARTITION -> BF. With Q = I + a a^T = V^T V, the PARTITION objective
// p^T Q p becomes ||V p||^2 and the constraints p_n^2 >= 1 become
// |row n of V^{-1} applied to w|| >= 1, so a splits into equal halves iff
// ((V^{-1})^T, N) is a yes instance under the squared-norm budget.

#include <cstdint>
#include <vector>

#include "bf/instance.hpp"

namespace bf {

struct PartitionInstance {
  std::vector<std::int64_t> values;

  // Throws InvalidParameter unless non-empty, nonzero and within 32 bits.
  void validate() const;
};

// Reduced channel entries lie in [-1, 1]; 24 fractional bits keep the
// quantization error far below the membership tolerance.
inline constexpr FixedPointFormat kReductionFormat{32, 24};
inline constexpr double kReductionEpsilon = 1e-3;

struct ReductionMatrices {
  MatrixD q;      // I + a a^T
  MatrixD v;      // upper triangular, V^T V = q
  MatrixD v_inv;  // V^{-1}
};

ReductionMatrices reduction_matrices(const PartitionInstance& p);

// N antennas, N users, H = (V^{-1})^T quantized to fmt, kappa = N. The
// provenance line records a and epsilon.
BFInstance reduce(const PartitionInstance& p, FixedPointFormat fmt = kReductionFormat,
                  double epsilon = kReductionEpsilon);

// sum p_n^2 + (sum p_n a_n)^2.
double eval_partition_objective(const PartitionInstance& p, const std::vector<double>& point);

struct PartitionAnswer {
  bool yes = false;
  std::vector<int> signs;  // certificate when yes: sum signs[n] a_n == 0
};

inline constexpr std::size_t kMaxBruteForcePartition = 24;

// Exhaustive over all 2^N sign vectors. Throws SizeLimitExceeded for N > 24.
PartitionAnswer brute_force_partition(const PartitionInstance& p);

// Membership of a reduced instance with tolerance: v* <= N + epsilon.
inline bool reduced_member(double v_star, std::size_t n, double epsilon = kReductionEpsilon) {
  return v_star <= static_cast<double>(n) + epsilon;
}

}  // namespace bf
