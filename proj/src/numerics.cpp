#include "bf/numerics.hpp"

#include <algorithm>
#include <cfenv>
#include <cmath>
#include <limits>

namespace bf {

namespace {

BigInt floor_div(const BigInt& a, const BigInt& b) {
  // b > 0
  BigInt q = a / b;
  if (a % b != 0 && a < 0) q -= 1;
  return q;
}

BigInt pow2(int e) { return BigInt(1) << e; }

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

}  // namespace

Rational::Rational(BigInt num, BigInt den) : num_(std::move(num)), den_(std::move(den)) {
  if (den_.is_zero()) throw InvalidParameter("zero denominator");
  normalize();
}

void Rational::normalize() {
  if (den_ < 0) {
    num_ = -num_;
    den_ = -den_;
  }
  if (num_.is_zero()) {
    den_ = 1;
    return;
  }
  BigInt g = boost::multiprecision::gcd(num_, den_);
  if (g != 1) {
    num_ /= g;
    den_ /= g;
  }
}

Rational Rational::parse(std::string_view text) {
  const std::string original(text);
  if (text.empty()) throw ParseError("empty number");
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    Rational n = parse(text.substr(0, slash));
    std::string_view d = text.substr(slash + 1);
    if (!n.is_integer() || !all_digits(d)) throw ParseError("bad fraction '" + original + "'");
    std::string den_digits(d);
    den_digits.erase(0, std::min(den_digits.find_first_not_of('0'), den_digits.size() - 1));
    BigInt den{den_digits};
    if (den.is_zero()) throw ParseError("zero denominator in '" + original + "'");
    return Rational(n.numerator(), den);
  }
  bool negative = false;
  if (text.front() == '-' || text.front() == '+') {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  std::string_view int_part = text;
  std::string_view frac_part;
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    int_part = text.substr(0, dot);
    frac_part = text.substr(dot + 1);
    if (!frac_part.empty() && !all_digits(frac_part)) throw ParseError("bad number '" + original + "'");
    if (int_part.empty() && frac_part.empty()) throw ParseError("bad number '" + original + "'");
  }
  if (!int_part.empty() && !all_digits(int_part)) throw ParseError("bad number '" + original + "'");
  std::string digits = std::string(int_part) + std::string(frac_part);
  if (digits.empty()) throw ParseError("bad number '" + original + "'");
  // A leading zero would make cpp_int read the digits as octal.
  digits.erase(0, std::min(digits.find_first_not_of('0'), digits.size() - 1));
  BigInt num(digits);
  BigInt den = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(frac_part.size()));
  if (negative) num = -num;
  return Rational(num, den);
}

Rational Rational::from_double(double value) {
  if (!std::isfinite(value)) throw InvalidParameter("non-finite double");
  if (value == 0.0) return Rational();
  int exp = 0;
  double mant = std::frexp(value, &exp);  // value = mant * 2^exp, |mant| in [0.5, 1)
  auto scaled = static_cast<std::int64_t>(std::ldexp(mant, 53));
  exp -= 53;
  if (exp >= 0) return Rational(BigInt(scaled) << exp);
  return Rational(BigInt(scaled), pow2(-exp));
}

double Rational::to_double() const {
  // Both parts can exceed double range individually; scale first.
  return boost::multiprecision::cpp_rational(num_, den_).convert_to<double>();
}

std::string Rational::to_decimal() const {
  BigInt d = den_;
  unsigned twos = 0, fives = 0;
  while (d % 2 == 0) {
    d /= 2;
    ++twos;
  }
  while (d % 5 == 0) {
    d /= 5;
    ++fives;
  }
  if (d != 1) throw InvalidParameter("no finite decimal expansion for " + to_string());
  unsigned digits = std::max(twos, fives);
  BigInt scaled = num_ * (boost::multiprecision::pow(BigInt(10), digits) / den_);
  bool negative = scaled < 0;
  std::string s = (negative ? BigInt(-scaled) : scaled).str();
  if (digits > 0) {
    if (s.size() <= digits) s.insert(0, digits - s.size() + 1, '0');
    s.insert(s.size() - digits, ".");
  }
  return negative ? "-" + s : s;
}

std::string Rational::to_string() const {
  return den_ == 1 ? num_.str() : num_.str() + "/" + den_.str();
}

BigInt Rational::floor_scaled(int frac_bits) const { return floor_div(num_ << frac_bits, den_); }

BigInt Rational::ceil_scaled(int frac_bits) const { return -floor_div(-(num_ << frac_bits), den_); }

Rational& Rational::operator+=(const Rational& rhs) {
  num_ = num_ * rhs.den_ + rhs.num_ * den_;
  den_ *= rhs.den_;
  normalize();
  return *this;
}

Rational& Rational::operator-=(const Rational& rhs) { return *this += -rhs; }

Rational& Rational::operator*=(const Rational& rhs) {
  num_ *= rhs.num_;
  den_ *= rhs.den_;
  normalize();
  return *this;
}

Rational& Rational::operator/=(const Rational& rhs) {
  if (rhs.is_zero()) throw InvalidParameter("division by zero");
  num_ *= rhs.den_;
  den_ *= rhs.num_;
  normalize();
  return *this;
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  BigInt lhs = a.num_ * b.den_;
  BigInt rhs = b.num_ * a.den_;
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

// ---------------------------------------------------------------------------

FixedPointFormat FixedPointFormat::make(int total_bits, int frac_bits) {
  FixedPointFormat fmt{total_bits, frac_bits};
  fmt.validate();
  return fmt;
}

void FixedPointFormat::validate() const {
  if (frac_bits < 2 || frac_bits >= total_bits || total_bits > 64)
    throw InvalidParameter("fixed-point format needs 2 <= F < Q <= 64, got Q=" +
                           std::to_string(total_bits) + " F=" + std::to_string(frac_bits));
}

std::int64_t FixedPointFormat::min_raw() const {
  if (total_bits == 64) return std::numeric_limits<std::int64_t>::min();
  return -(std::int64_t{1} << (total_bits - 1));
}

std::int64_t FixedPointFormat::max_raw() const {
  if (total_bits == 64) return std::numeric_limits<std::int64_t>::max();
  return (std::int64_t{1} << (total_bits - 1)) - 1;
}

Rational FixedPointFormat::min_value() const { return Rational(BigInt(min_raw()), pow2(frac_bits)); }
Rational FixedPointFormat::max_value() const { return Rational(BigInt(max_raw()), pow2(frac_bits)); }
Rational FixedPointFormat::step() const { return Rational(BigInt(1), pow2(frac_bits)); }

FixedPointValue::FixedPointValue(FixedPointFormat fmt, std::int64_t raw) : fmt_(fmt), raw_(raw) {
  fmt_.validate();
  if (!fmt_.contains_raw(raw)) throw OutOfRange("raw value " + std::to_string(raw) + " exceeds format");
}

FixedPointValue FixedPointValue::from_rational(const Rational& value, FixedPointFormat fmt) {
  fmt.validate();
  if (!on_grid(value, fmt.frac_bits))
    throw OutOfRange(value.to_string() + " is not a multiple of 2^-" + std::to_string(fmt.frac_bits));
  BigInt raw = value.floor_scaled(fmt.frac_bits);
  if (raw < fmt.min_raw() || raw > fmt.max_raw())
    throw OutOfRange(value.to_string() + " outside the representable range");
  return FixedPointValue(fmt, raw.convert_to<std::int64_t>());
}

Rational FixedPointValue::value() const { return Rational(BigInt(raw_), pow2(fmt_.frac_bits)); }

double FixedPointValue::to_double() const { return std::ldexp(static_cast<double>(raw_), -fmt_.frac_bits); }

std::vector<bool> FixedPointValue::bits() const {
  std::vector<bool> out(static_cast<std::size_t>(fmt_.total_bits));
  auto u = static_cast<std::uint64_t>(raw_);
  for (int i = 0; i < fmt_.total_bits; ++i) out[static_cast<std::size_t>(i)] = ((u >> i) & 1U) != 0;
  return out;
}

FixedPointValue FixedPointValue::from_bits(const std::vector<bool>& bits, FixedPointFormat fmt) {
  if (bits.size() != static_cast<std::size_t>(fmt.total_bits)) throw DimensionMismatch("bit count");
  std::uint64_t u = 0;
  for (int i = 0; i < fmt.total_bits; ++i)
    if (bits[static_cast<std::size_t>(i)]) u |= std::uint64_t{1} << i;
  if (fmt.total_bits < 64 && bits.back()) u |= ~std::uint64_t{0} << fmt.total_bits;  // sign-extend
  return FixedPointValue(fmt, static_cast<std::int64_t>(u));
}

FixedPointValue quantize(double x, FixedPointFormat fmt) {
  fmt.validate();
  if (!std::isfinite(x)) throw OutOfRange("non-finite input");
  const long double scaled = std::ldexp(static_cast<long double>(x), fmt.frac_bits);
  const auto lo = static_cast<long double>(fmt.min_raw());
  const auto hi = static_cast<long double>(fmt.max_raw());
  if (scaled < lo || scaled > hi) throw OutOfRange(std::to_string(x) + " outside the representable range");
  const int saved = std::fegetround();
  std::fesetround(FE_TONEAREST);
  const long double rounded = std::nearbyint(scaled);
  std::fesetround(saved);
  return FixedPointValue(fmt, static_cast<std::int64_t>(rounded));
}

Rational grid_ceil(const Rational& x, int frac_bits) { return Rational(x.ceil_scaled(frac_bits), pow2(frac_bits)); }
Rational grid_floor(const Rational& x, int frac_bits) { return Rational(x.floor_scaled(frac_bits), pow2(frac_bits)); }
Rational grid_ceil(double x, int frac_bits) { return grid_ceil(Rational::from_double(x), frac_bits); }
Rational grid_floor(double x, int frac_bits) { return grid_floor(Rational::from_double(x), frac_bits); }

bool on_grid(const Rational& x, int frac_bits) {
  return BigInt((x.numerator() << frac_bits) % x.denominator()).is_zero();
}

// ---------------------------------------------------------------------------

double norm_inf(const MatrixD& a) {
  double best = 0.0;
  for (std::size_t r = 0; r < a.rows(); ++r) {
    double row = 0.0;
    for (std::size_t c = 0; c < a.cols(); ++c) row += std::abs(a(r, c));
    best = std::max(best, row);
  }
  return best;
}

void check_finite(const MatrixD& a) {
  for (double v : a.data())
    if (!std::isfinite(v)) throw InvalidParameter("matrix contains NaN or Inf");
}

MatrixD to_double(const MatrixQ& a) {
  MatrixD out(a.rows(), a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) out(r, c) = a(r, c).to_double();
  return out;
}

MatrixD sqrt_decompose(const MatrixD& q) {
  if (!q.square()) throw DimensionMismatch("sqrt_decompose needs a square matrix");
  check_finite(q);
  const std::size_t n = q.rows();
  const double scale = std::max(1.0, norm_inf(q));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(q(i, j) - q(j, i)) > 1e-12 * scale) throw InvalidParameter("matrix is not symmetric");

  // q = L L^T, returned as V = L^T.
  MatrixD v(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double pivot = q(j, j);
    for (std::size_t k = 0; k < j; ++k) pivot -= v(k, j) * v(k, j);
    if (pivot <= 1e-12) throw NotPositiveDefinite("pivot " + std::to_string(pivot) + " at row " + std::to_string(j));
    const double d = std::sqrt(pivot);
    v(j, j) = d;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = q(j, i);
      for (std::size_t k = 0; k < j; ++k) s -= v(k, j) * v(k, i);
      v(j, i) = s / d;
    }
  }
  return v;
}

MatrixD invert(const MatrixD& a) {
  if (!a.square()) throw DimensionMismatch("invert needs a square matrix");
  check_finite(a);
  const std::size_t n = a.rows();
  MatrixD work = a;
  MatrixD inv = MatrixD::identity(n);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot_row = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(work(r, col)) > std::abs(work(pivot_row, col))) pivot_row = r;
    const double pivot = work(pivot_row, col);
    if (std::abs(pivot) < 1e-12) throw Singular("pivot magnitude below 1e-12 in column " + std::to_string(col));
    if (pivot_row != col) {
      for (std::size_t c = 0; c < n; ++c) {
        std::swap(work(col, c), work(pivot_row, c));
        std::swap(inv(col, c), inv(pivot_row, c));
      }
    }
    for (std::size_t c = 0; c < n; ++c) {
      work(col, c) /= pivot;
      inv(col, c) /= pivot;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = work(r, col);
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < n; ++c) {
        work(r, c) -= f * work(col, c);
        inv(r, c) -= f * inv(col, c);
      }
    }
  }
  if (norm_inf(a) * norm_inf(inv) > 1e12) throw Singular("condition estimate exceeds 1e12");
  return inv;
}

}  // namespace bf
