#include <doctest.h>

#include <cmath>
#include <random>

#include "bf/oracle.hpp"
#include "bf/reduction.hpp"

using namespace bf;

TEST_SUITE("reduction") {

TEST_CASE("small reductions") {
  CHECK(std::abs(enumerate_optimal(reduce({{1, 1}})).v_star - 2.0) <= 1e-4);
  CHECK(enumerate_optimal(reduce({{1, 2}})).v_star > 2.0 + 1e-4);
  CHECK(std::abs(enumerate_optimal(reduce({{3, 5, 8}})).v_star - 3.0) <= 1e-4);
  const BFInstance inst = reduce({{3, 5, 8}});
  CHECK(inst.n_antennas() == 3);
  CHECK(inst.n_users() == 3);
  CHECK(inst.kappa() == Rational(3));
  CHECK(inst.format() == kReductionFormat);
  CHECK(inst.provenance() == "reduced from partition a=3,5,8 epsilon=0.001");
  CHECK(parse_instance(serialize(inst)).provenance() == inst.provenance());
}

TEST_CASE("partition objective") {
  CHECK(eval_partition_objective({{1, 1}}, {1, -1}) == 2.0);
  CHECK(eval_partition_objective({{2, 3, 4}}, {1, 1, 1}) == 3.0 + 81.0);
  CHECK_THROWS_AS(eval_partition_objective({{1, 1}}, {1}), DimensionMismatch);
}

TEST_CASE("change of variables") {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> g;
  std::uniform_int_distribution<std::int64_t> val(1, 9);
  for (int t = 0; t < 100; ++t) {
    PartitionInstance p;
    for (int i = 0; i < 1 + t % 6; ++i) p.values.push_back(val(rng));
    const ReductionMatrices mats = reduction_matrices(p);
    const std::size_t n = p.values.size();
    std::vector<double> x(n);
    for (auto& v : x) v = g(rng);
    std::vector<double> vx(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) vx[i] += mats.v(i, j) * x[j];
    double norm = 0.0;
    for (double v : vx) norm += v * v;
    const double obj = eval_partition_objective(p, x);
    CHECK(std::abs(norm - obj) <= 1e-8 * std::max(1.0, obj));
    // Row n of V^{-1} applied to Vx recovers x_n.
    for (std::size_t r = 0; r < n; ++r) {
      double back = 0.0;
      for (std::size_t j = 0; j < n; ++j) back += mats.v_inv(r, j) * vx[j];
      CHECK(std::abs(back - x[r]) <= 1e-8);
    }
  }
}

TEST_CASE("brute force partition") {
  CHECK(brute_force_partition({{1, 1}}).yes);
  CHECK_FALSE(brute_force_partition({{1}}).yes);
  // The total 30 would need two halves of 15, which even numbers cannot make.
  CHECK_FALSE(brute_force_partition({{2, 4, 6, 8, 10}}).yes);
  const std::vector<std::int64_t> vals{2, 4, 6, 8, 12};
  const PartitionAnswer a = brute_force_partition({vals});
  REQUIRE(a.yes);
  std::int64_t s = 0;
  for (std::size_t i = 0; i < 5; ++i) s += a.signs[i] * vals[i];
  CHECK(s == 0);
  CHECK_THROWS_AS(brute_force_partition({std::vector<std::int64_t>(25, 1)}), SizeLimitExceeded);
}

TEST_CASE("invalid partition instances") {
  CHECK_THROWS_AS(reduce({{}}), InvalidParameter);
  CHECK_THROWS_AS(reduce({{1, 0}}), InvalidParameter);
  CHECK_THROWS_AS(reduce({{std::int64_t{1} << 40}}), InvalidParameter);
}

TEST_CASE("reduction agrees with brute force up to N=4, entries 1..6") {
  int mismatches = 0, total = 0;
  for (std::size_t n = 1; n <= 4; ++n) {
    std::vector<std::int64_t> a(n, 1);
    for (;;) {
      const PartitionInstance p{a};
      const double v = enumerate_optimal(reduce(p), 1).v_star;
      if (brute_force_partition(p).yes != reduced_member(v, n)) {
        ++mismatches;
        CHECK(std::abs(v - static_cast<double>(n)) <= 1e-2);
      }
      ++total;
      std::size_t k = 0;
      while (k < n && a[k] == 6) a[k++] = 1;
      if (k == n) break;
      ++a[k];
    }
  }
  CHECK(total == 6 + 36 + 216 + 1296);
  CHECK(mismatches == 0);
}

}
