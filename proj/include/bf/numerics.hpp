#pragma once

// Scalar and small dense-matrix kernel shared by every other module:
// exact rationals for instance data, Q-bit fixed-point values for the
// bit-level witness domain, and a double-precision matrix with Cholesky
// and Gauss-Jordan inversion for the reduction path.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "bf/error.hpp"

namespace bf {

using BigInt = boost::multiprecision::cpp_int;

// Exact fraction, always in lowest terms with a positive denominator.
class Rational {
 public:
  Rational() = default;
  Rational(BigInt num, BigInt den);
  explicit Rational(BigInt value) : num_(std::move(value)) {}
  Rational(std::int64_t value) : num_(value) {}  // NOLINT(google-explicit-constructor)

  // Parses "-12", "3.0625", "1/3". Throws ParseError on anything else.
  static Rational parse(std::string_view text);
  // Exact value of a finite double (every double is a dyadic rational).
  static Rational from_double(double value);

  const BigInt& numerator() const { return num_; }
  const BigInt& denominator() const { return den_; }

  double to_double() const;
  // Exact decimal expansion; throws InvalidParameter when the denominator
  // has a prime factor other than 2 or 5.
  std::string to_decimal() const;
  std::string to_string() const;

  int sign() const { return num_.sign(); }
  bool is_zero() const { return num_.is_zero(); }
  bool is_integer() const { return den_ == 1; }
  Rational abs() const { return Rational(num_ < 0 ? BigInt(-num_) : num_, den_); }

  // floor / ceil of value * 2^frac_bits, as integers.
  BigInt floor_scaled(int frac_bits) const;
  BigInt ceil_scaled(int frac_bits) const;

  Rational operator-() const { return Rational(-num_, den_); }
  Rational& operator+=(const Rational& rhs);
  Rational& operator-=(const Rational& rhs);
  Rational& operator*=(const Rational& rhs);
  Rational& operator/=(const Rational& rhs);

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

 private:
  void normalize();

  BigInt num_{0};
  BigInt den_{1};
};

// Q-bit two's-complement format with F fractional bits.
struct FixedPointFormat {
  int total_bits = 8;
  int frac_bits = 4;

  // Throws InvalidParameter unless 2 <= F < Q <= 64.
  static FixedPointFormat make(int total_bits, int frac_bits);
  void validate() const;

  std::int64_t min_raw() const;
  std::int64_t max_raw() const;
  bool contains_raw(std::int64_t raw) const { return raw >= min_raw() && raw <= max_raw(); }
  Rational min_value() const;
  Rational max_value() const;
  Rational step() const;

  friend bool operator==(const FixedPointFormat&, const FixedPointFormat&) = default;
};

inline constexpr FixedPointFormat kTestFormat{8, 4};
inline constexpr FixedPointFormat kBenchFormat{16, 8};

class FixedPointValue {
 public:
  FixedPointValue(FixedPointFormat fmt, std::int64_t raw);

  // Exact conversion; throws OutOfRange when off the grid or out of range.
  static FixedPointValue from_rational(const Rational& value, FixedPointFormat fmt);

  FixedPointFormat format() const { return fmt_; }
  std::int64_t raw() const { return raw_; }
  Rational value() const;
  double to_double() const;

  // Raw bits, LSB first, Q entries.
  std::vector<bool> bits() const;
  static FixedPointValue from_bits(const std::vector<bool>& bits, FixedPointFormat fmt);

  friend bool operator==(const FixedPointValue&, const FixedPointValue&) = default;

 private:
  FixedPointFormat fmt_;
  std::int64_t raw_;
};

// Round to nearest grid point, ties to even. Throws OutOfRange when x lies
// outside [min_value, max_value]; there is no saturation.
FixedPointValue quantize(double x, FixedPointFormat fmt);

// Smallest / largest multiple of 2^-frac_bits that is >= / <= x.
Rational grid_ceil(double x, int frac_bits);
Rational grid_floor(double x, int frac_bits);
Rational grid_ceil(const Rational& x, int frac_bits);
Rational grid_floor(const Rational& x, int frac_bits);
bool on_grid(const Rational& x, int frac_bits);

// Dense row-major matrix.
template <typename T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<T> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) throw DimensionMismatch("matrix data length");
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  const std::vector<T>& data() const { return data_; }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw DimensionMismatch("matrix product");
    Matrix p(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k)
        for (std::size_t j = 0; j < b.cols_; ++j) p(i, j) += a(i, k) * b(k, j);
    return p;
  }

  friend Matrix operator-(const Matrix& a, const Matrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw DimensionMismatch("matrix difference");
    Matrix d = a;
    for (std::size_t i = 0; i < d.data_.size(); ++i) d.data_[i] -= b.data_[i];
    return d;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using MatrixD = Matrix<double>;
using MatrixQ = Matrix<Rational>;

// Induced infinity norm (max absolute row sum).
double norm_inf(const MatrixD& a);
// Throws InvalidParameter on NaN/Inf entries.
void check_finite(const MatrixD& a);
MatrixD to_double(const MatrixQ& a);

// Upper-triangular V with V^T V = q (Cholesky). Throws NotPositiveDefinite
// when a pivot is <= 1e-12 and InvalidParameter when q is not symmetric.
MatrixD sqrt_decompose(const MatrixD& q);

// Gauss-Jordan with partial pivoting. Throws Singular when a pivot falls
// below 1e-12 or the infinity-norm condition estimate exceeds 1e12.
MatrixD invert(const MatrixD& a);

}  // namespace bf
