#pragma once

// Exact arithmetic substrate: rationals, dyadic rationals, finite binary
// strings and closed intervals. Everything here is immutable after
// construction.

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace speedlab {

class Rational {
 public:
  Rational() = default;
  Rational(long value) : value_(value) {}  // NOLINT(google-explicit-constructor)
  Rational(long num, long den);
  explicit Rational(mpq_class value);
  Rational(const mpz_class& num, const mpz_class& den);

  /// Accepts "p", "p/q", "-p/q", "n/2^k" and finite decimals such as "0.375".
  static Rational parse(std::string_view text);

  const mpq_class& raw() const { return value_; }
  mpz_class numerator() const { return value_.get_num(); }
  mpz_class denominator() const { return value_.get_den(); }

  int sign() const { return sgn(value_); }
  bool is_zero() const { return sign() == 0; }
  bool is_integer() const { return value_.get_den() == 1; }

  /// True iff the reduced denominator is a power of two.
  bool is_dyadic() const;

  /// Canonical "p/q" text ("p" when the denominator is 1).
  std::string str() const;

  Rational& operator+=(const Rational& o);
  Rational& operator-=(const Rational& o);
  Rational& operator*=(const Rational& o);
  Rational& operator/=(const Rational& o);

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  friend Rational operator-(const Rational& a) { return Rational(mpq_class(-a.value_)); }

  friend bool operator==(const Rational& a, const Rational& b) { return a.value_ == b.value_; }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    int c = cmp(a.value_, b.value_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

 private:
  mpq_class value_;
};

std::ostream& operator<<(std::ostream& os, const Rational& r);

Rational abs(const Rational& r);
const Rational& min(const Rational& a, const Rational& b);
const Rational& max(const Rational& a, const Rational& b);
Rational clamp_unit(const Rational& r);

/// 2^k for any integer k.
Rational pow2(long k);

/// floor(x * 2^k) as an integer, k >= 0.
mpz_class floor_scaled(const Rational& x, unsigned long k);

/// Exact rational of the form numerator / 2^exponent, kept in lowest terms.
class Dyadic {
 public:
  Dyadic() = default;
  Dyadic(mpz_class numerator, std::uint64_t exponent);

  /// Throws Errc::invalid_argument when `r` is not dyadic.
  static Dyadic from_rational(const Rational& r);
  /// Parses "n/2^k", "n" or any dyadic "p/q".
  static Dyadic parse(std::string_view text);

  const mpz_class& numerator() const { return num_; }
  std::uint64_t exponent() const { return exp_; }
  Rational value() const;

  /// "n/2^k"; integers print as "n/2^0".
  std::string str() const;
  /// Exact decimal expansion, e.g. "0.6875".
  std::string decimal() const;

  friend bool operator==(const Dyadic& a, const Dyadic& b) {
    return a.exp_ == b.exp_ && a.num_ == b.num_;
  }
  friend std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b) {
    return a.value() <=> b.value();
  }

 private:
  mpz_class num_ = 0;
  std::uint64_t exp_ = 0;
};

/// Finite binary string over {0,1}.
class BitString {
 public:
  BitString() = default;
  explicit BitString(std::string bits);

  /// The canonical string of a dyadic in [0,1): 0.sigma with no trailing zeros.
  static BitString from_dyadic(const Dyadic& d);
  /// First `length` bits of the binary expansion of x in [0,1]. Dyadic x use
  /// the expansion ending in zeros.
  static BitString expansion(const Rational& x, std::size_t length);

  const std::string& str() const { return bits_; }
  std::size_t size() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }
  char operator[](std::size_t i) const { return bits_[i]; }

  /// sigma is a (not necessarily proper) prefix of other.
  bool is_prefix_of(const BitString& other) const;
  /// True iff x lies in the cylinder of this string, using the zero-tailed
  /// expansion for dyadic x.
  bool is_prefix_of_real(const Rational& x) const;

  /// Measure of the cylinder, 2^-|sigma|.
  Dyadic measure() const;
  /// The dyadic 0.sigma.
  Dyadic to_dyadic() const;
  /// All extensions of this string of total length `length` (>= size()),
  /// in lexicographic order.
  std::vector<BitString> extensions(std::size_t length) const;

  friend bool operator==(const BitString&, const BitString&) = default;
  friend auto operator<=>(const BitString&, const BitString&) = default;

 private:
  std::string bits_;
};

/// Closed interval [left, right]; construction enforces left <= right.
class Interval {
 public:
  Interval(Rational left, Rational right);

  const Rational& left() const { return left_; }
  const Rational& right() const { return right_; }
  Rational length() const { return right_ - left_; }
  bool contains(const Rational& x) const { return left_ <= x && x <= right_; }

  friend bool operator==(const Interval&, const Interval&) = default;

 private:
  Rational left_;
  Rational right_;
};

/// Smallest position h >= 1 at which the binary expansions of a and b in
/// [0,1) differ. Position 1 is the first bit after the point.
std::size_t msb_diff(const Dyadic& a, const Dyadic& b);

/// True iff no element is a prefix of another. Repeated elements count as a
/// violation.
bool is_prefix_free(std::span<const BitString> strings);

/// Sum of 2^-|sigma|; throws Errc::not_prefix_free unless the set is
/// prefix-free.
Dyadic string_set_measure(std::span<const BitString> strings);

}  // namespace speedlab
