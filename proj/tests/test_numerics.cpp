#include <doctest.h>

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <random>

#include "bf/numerics.hpp"

using namespace bf;

namespace {

double max_abs_diff(const MatrixD& a, const MatrixD& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) d = std::max(d, std::abs(a.data()[i] - b.data()[i]));
  return d;
}

MatrixD random_spd(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g;
  MatrixD b(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) b(i, j) = g(rng);
  MatrixD q = b.transpose() * b;
  for (std::size_t i = 0; i < n; ++i) q(i, i) += 0.5;
  return q;
}

}  // namespace

TEST_SUITE("numerics") {

TEST_CASE("rational parsing and normal form") {
  CHECK(Rational::parse("-12") == Rational(-12));
  CHECK(Rational::parse("3.0625") == Rational(49, 16));
  CHECK(Rational::parse("1/3") == Rational(1, 3));
  CHECK(Rational::parse("-0.125") == Rational(-1, 8));
  CHECK(Rational::parse("007.50") == Rational(15, 2));
  CHECK(Rational::parse("4/010") == Rational(2, 5));
  CHECK(Rational(6, -4).numerator() == -3);
  CHECK(Rational(6, -4).denominator() == 2);
  CHECK(Rational(0, 7).denominator() == 1);
  CHECK_THROWS_AS(Rational::parse("1.2.3"), ParseError);
  CHECK_THROWS_AS(Rational::parse(""), ParseError);
  CHECK_THROWS_AS(Rational::parse("1/0"), ParseError);
  CHECK_THROWS_AS(Rational::parse("abc"), ParseError);
  CHECK_THROWS_AS(Rational(1, 0), InvalidParameter);
}

TEST_CASE("rational decimal output") {
  CHECK(Rational(49, 16).to_decimal() == "3.0625");
  CHECK(Rational(-1, 8).to_decimal() == "-0.125");
  CHECK(Rational(5).to_decimal() == "5");
  CHECK(Rational(1, 5).to_decimal() == "0.2");
  CHECK_THROWS_AS(Rational(1, 3).to_decimal(), InvalidParameter);
  for (const char* s : {"0.0625", "-7.5", "123", "-0.001"}) CHECK(Rational::parse(Rational::parse(s).to_decimal()) == Rational::parse(s));
}

TEST_CASE("rational arithmetic agrees with an independent big-rational type") {
  using Ref = boost::multiprecision::cpp_rational;
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::int64_t> num(-1000000, 1000000), den(1, 1000000);
  for (int i = 0; i < 1000; ++i) {
    const std::int64_t a = num(rng), b = den(rng), c = num(rng), d = den(rng);
    const Rational x(a, b), y(c, d);
    const Ref rx(a, b), ry(c, d);
    auto same = [](const Rational& r, const Ref& ref) {
      return r.numerator() == boost::multiprecision::numerator(ref) &&
             r.denominator() == boost::multiprecision::denominator(ref);
    };
    CHECK(same(x + y, rx + ry));
    CHECK(same(x - y, rx - ry));
    CHECK(same(x * y, rx * ry));
    if (c != 0) CHECK(same(x / y, rx / ry));
    CHECK((x < y) == (rx < ry));
    // Cross-multiplication definition of the sum.
    CHECK(x + y == Rational(BigInt(a) * d + BigInt(c) * b, BigInt(b) * d));
    CHECK(boost::multiprecision::gcd((x + y).numerator(), (x + y).denominator()) == 1);
    CHECK((x + y).denominator() > 0);
  }
}

TEST_CASE("from_double is exact") {
  CHECK(Rational::from_double(0.1) == Rational(BigInt(3602879701896397), BigInt(1) << 55));
  CHECK(Rational::from_double(-2.5) == Rational(-5, 2));
  CHECK(Rational::from_double(0.0) == Rational(0));
  CHECK_THROWS_AS(Rational::from_double(NAN), InvalidParameter);
}

TEST_CASE("fixed-point format range") {
  CHECK(kTestFormat.min_value() == Rational(-8));
  CHECK(kTestFormat.max_value() == Rational(127, 16));
  CHECK(kTestFormat.step() == Rational(1, 16));
  CHECK_THROWS_AS(FixedPointFormat::make(8, 8), InvalidParameter);
  CHECK_THROWS_AS(FixedPointFormat::make(8, 1), InvalidParameter);
  CHECK_THROWS_AS(FixedPointFormat::make(65, 4), InvalidParameter);
  CHECK_NOTHROW(FixedPointFormat::make(64, 32));
}

TEST_CASE("quantize") {
  CHECK(quantize(0.0, kTestFormat).raw() == 0);
  CHECK(quantize(0.0, FixedPointFormat{16, 8}).raw() == 0);
  CHECK(quantize(1.0, kTestFormat).raw() == 16);
  // Neighbors of 0.1 are 1/16 and 2/16; 2/16 is closer.
  CHECK(quantize(0.1, kTestFormat).raw() == 2);
  CHECK(quantize(0.1, kTestFormat).to_double() == 0.125);
  // Ties go to the even raw value.
  CHECK(quantize(1.5 / 16, kTestFormat).raw() == 2);
  CHECK(quantize(2.5 / 16, kTestFormat).raw() == 2);
  CHECK(quantize(-2.5 / 16, kTestFormat).raw() == -2);
  CHECK_THROWS_AS(quantize(8.0, kTestFormat), OutOfRange);
  CHECK_THROWS_AS(quantize(-8.1, kTestFormat), OutOfRange);
  CHECK(quantize(-8.0, kTestFormat).raw() == -128);
}

TEST_CASE("quantize is idempotent on the grid and round-trips through Rational") {
  for (FixedPointFormat fmt : {kTestFormat, FixedPointFormat{6, 3}, FixedPointFormat{10, 5}}) {
    for (std::int64_t raw = fmt.min_raw(); raw <= fmt.max_raw(); ++raw) {
      const FixedPointValue v(fmt, raw);
      CHECK(quantize(v.to_double(), fmt) == v);
      CHECK(FixedPointValue::from_rational(v.value(), fmt) == v);
      CHECK(FixedPointValue::from_bits(v.bits(), fmt) == v);
    }
  }
  CHECK_THROWS_AS(FixedPointValue::from_rational(Rational(1, 3), kTestFormat), OutOfRange);
  CHECK_THROWS_AS(FixedPointValue::from_rational(Rational(8), kTestFormat), OutOfRange);
  CHECK_THROWS_AS(FixedPointValue(kTestFormat, 128), OutOfRange);
}

TEST_CASE("grid snapping") {
  CHECK(grid_ceil(0.1, 4) == Rational(2, 16));
  CHECK(grid_floor(0.1, 4) == Rational(1, 16));
  CHECK(grid_ceil(-0.1, 4) == Rational(-1, 16));
  CHECK(grid_floor(-0.1, 4) == Rational(-2, 16));
  CHECK(grid_ceil(0.25, 4) == Rational(1, 4));
  CHECK(grid_floor(Rational(1, 3), 2) == Rational(1, 4));
  CHECK(grid_ceil(Rational(1, 3), 2) == Rational(1, 2));
  CHECK(on_grid(Rational(3, 8), 3));
  CHECK_FALSE(on_grid(Rational(3, 8), 2));
}

TEST_CASE("sqrt_decompose") {
  CHECK(sqrt_decompose(MatrixD::identity(2)) == MatrixD::identity(2));
  MatrixD v = sqrt_decompose(MatrixD(1, 1, {5.0}));
  CHECK(std::abs(v(0, 0) * v(0, 0) - 5.0) <= 1e-10);
  const MatrixD q(2, 2, {2, 1, 1, 2});
  v = sqrt_decompose(q);
  CHECK(max_abs_diff(v.transpose() * v, q) <= 1e-10);
  CHECK(v(1, 0) == 0.0);

  std::mt19937_64 rng(3);
  for (int t = 0; t < 50; ++t) {
    const MatrixD a = random_spd(rng, 1 + t % 6);
    const MatrixD r = sqrt_decompose(a);
    CHECK(norm_inf(r.transpose() * r - a) <= 1e-10 * norm_inf(a));
  }
  CHECK_THROWS_AS(sqrt_decompose(MatrixD(2, 2, {1, 2, 2, 1})), NotPositiveDefinite);
  CHECK_THROWS_AS(sqrt_decompose(MatrixD(2, 2, {1, 0.5, 0.2, 1})), InvalidParameter);
  CHECK_THROWS_AS(sqrt_decompose(MatrixD(2, 3)), DimensionMismatch);
}

TEST_CASE("invert") {
  CHECK(invert(MatrixD::identity(3)) == MatrixD::identity(3));
  CHECK(invert(MatrixD(2, 2, {2, 0, 0, 4})) == MatrixD(2, 2, {0.5, 0, 0, 0.25}));
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (int t = 0; t < 20; ++t) {
    MatrixD a(4, 4);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) a(i, j) = g(rng) + (i == j ? 4.0 : 0.0);
    CHECK(max_abs_diff(a * invert(a), MatrixD::identity(4)) <= 1e-10);
  }
  CHECK_THROWS_AS(invert(MatrixD(2, 2, {1, 2, 2, 4})), Singular);
  CHECK_THROWS_AS(invert(MatrixD(2, 2, {1, 0, 0, 1e-14})), Singular);
}

TEST_CASE("non-finite entries are rejected") {
  CHECK_THROWS_AS(check_finite(MatrixD(1, 2, {1.0, INFINITY})), InvalidParameter);
  CHECK_THROWS_AS(sqrt_decompose(MatrixD(1, 1, {NAN})), InvalidParameter);
}

}
