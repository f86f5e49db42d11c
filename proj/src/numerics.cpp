#include "speedlab/numerics.hpp"

#include <algorithm>
#include <ostream>
#include <string>

#include "speedlab/error.hpp"

namespace speedlab {

namespace {

mpz_class parse_integer(std::string_view text, std::string_view whole) {
  if (text.empty()) {
    throw Error(Errc::malformed_input, "empty number in '" + std::string(whole) + "'");
  }
  std::size_t start = (text[0] == '-' || text[0] == '+') ? 1 : 0;
  if (start == text.size()) {
    throw Error(Errc::malformed_input, "bad number '" + std::string(whole) + "'");
  }
  for (std::size_t i = start; i < text.size(); ++i) {
    if (text[i] < '0' || text[i] > '9') {
      throw Error(Errc::malformed_input, "bad number '" + std::string(whole) + "'");
    }
  }
  std::string digits(text[0] == '+' ? text.substr(1) : text);
  return mpz_class(digits, 10);
}

mpz_class pow2z(unsigned long k) {
  mpz_class r = 1;
  mpz_mul_2exp(r.get_mpz_t(), r.get_mpz_t(), k);
  return r;
}

}  // namespace

// ---------------------------------------------------------------- Rational

Rational::Rational(long num, long den) : value_(num, den) {
  if (den == 0) throw Error(Errc::invalid_argument, "zero denominator");
  value_.canonicalize();
}

Rational::Rational(mpq_class value) : value_(std::move(value)) { value_.canonicalize(); }

Rational::Rational(const mpz_class& num, const mpz_class& den) : value_(num, den) {
  if (den == 0) throw Error(Errc::invalid_argument, "zero denominator");
  value_.canonicalize();
}

Rational Rational::parse(std::string_view text) {
  if (text.empty()) throw Error(Errc::malformed_input, "empty rational");
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    mpz_class num = parse_integer(text.substr(0, slash), text);
    std::string_view rest = text.substr(slash + 1);
    mpz_class den;
    if (rest.size() > 2 && rest[0] == '2' && rest[1] == '^') {
      mpz_class k = parse_integer(rest.substr(2), text);
      if (k < 0 || !k.fits_ulong_p()) {
        throw Error(Errc::malformed_input, "bad exponent in '" + std::string(text) + "'");
      }
      den = pow2z(k.get_ui());
    } else {
      den = parse_integer(rest, text);
    }
    if (den == 0) throw Error(Errc::malformed_input, "zero denominator in '" + std::string(text) + "'");
    return Rational(num, den);
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view int_part = text.substr(0, dot);
    std::string_view frac = text.substr(dot + 1);
    bool negative = !int_part.empty() && int_part[0] == '-';
    mpz_class whole = (int_part.empty() || int_part == "-") ? mpz_class(0)
                                                           : parse_integer(int_part, text);
    if (whole < 0) whole = -whole;
    mpz_class frac_num = frac.empty() ? mpz_class(0) : parse_integer(frac, text);
    if (!frac.empty() && (frac[0] == '-' || frac[0] == '+')) {
      throw Error(Errc::malformed_input, "bad decimal '" + std::string(text) + "'");
    }
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac.size());
    Rational r(mpz_class(whole * scale + frac_num), scale);
    return negative ? -r : r;
  }
  return Rational(parse_integer(text, text), mpz_class(1));
}

bool Rational::is_dyadic() const {
  const mpz_class& den = value_.get_den();
  return mpz_popcount(den.get_mpz_t()) == 1;
}

std::string Rational::str() const { return value_.get_str(); }

Rational& Rational::operator+=(const Rational& o) {
  value_ += o.value_;
  return *this;
}
Rational& Rational::operator-=(const Rational& o) {
  value_ -= o.value_;
  return *this;
}
Rational& Rational::operator*=(const Rational& o) {
  value_ *= o.value_;
  return *this;
}
Rational& Rational::operator/=(const Rational& o) {
  if (o.is_zero()) throw Error(Errc::invalid_argument, "division by zero");
  value_ /= o.value_;
  return *this;
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

Rational abs(const Rational& r) { return r.sign() < 0 ? -r : r; }
const Rational& min(const Rational& a, const Rational& b) { return b < a ? b : a; }
const Rational& max(const Rational& a, const Rational& b) { return a < b ? b : a; }

Rational clamp_unit(const Rational& r) {
  if (r.sign() < 0) return Rational(0);
  if (r > Rational(1)) return Rational(1);
  return r;
}

Rational pow2(long k) {
  if (k >= 0) return Rational(pow2z(static_cast<unsigned long>(k)), mpz_class(1));
  return Rational(mpz_class(1), pow2z(static_cast<unsigned long>(-k)));
}

mpz_class floor_scaled(const Rational& x, unsigned long k) {
  mpz_class scaled = x.numerator();
  mpz_mul_2exp(scaled.get_mpz_t(), scaled.get_mpz_t(), k);
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), scaled.get_mpz_t(), x.denominator().get_mpz_t());
  return q;
}

// ------------------------------------------------------------------ Dyadic

Dyadic::Dyadic(mpz_class numerator, std::uint64_t exponent)
    : num_(std::move(numerator)), exp_(exponent) {
  if (num_ == 0) {
    exp_ = 0;
    return;
  }
  auto twos = static_cast<std::uint64_t>(mpz_scan1(num_.get_mpz_t(), 0));
  auto shift = std::min(twos, exp_);
  if (shift > 0) {
    mpz_fdiv_q_2exp(num_.get_mpz_t(), num_.get_mpz_t(), shift);
    exp_ -= shift;
  }
}

Dyadic Dyadic::from_rational(const Rational& r) {
  if (!r.is_dyadic()) {
    throw Error(Errc::invalid_argument, "not a dyadic rational: " + r.str());
  }
  auto k = static_cast<std::uint64_t>(mpz_scan1(r.denominator().get_mpz_t(), 0));
  return Dyadic(r.numerator(), k);
}

Dyadic Dyadic::parse(std::string_view text) { return from_rational(Rational::parse(text)); }

Rational Dyadic::value() const { return Rational(num_, pow2z(exp_)); }

std::string Dyadic::str() const { return num_.get_str() + "/2^" + std::to_string(exp_); }

std::string Dyadic::decimal() const {
  // n / 2^k = n * 5^k / 10^k
  mpz_class magnitude = num_ < 0 ? mpz_class(-num_) : num_;
  mpz_class five_k;
  mpz_ui_pow_ui(five_k.get_mpz_t(), 5, exp_);
  std::string digits = mpz_class(magnitude * five_k).get_str();
  if (digits.size() <= exp_) digits.insert(0, exp_ + 1 - digits.size(), '0');
  std::string out = num_ < 0 ? "-" : "";
  std::size_t int_len = digits.size() - exp_;
  out += digits.substr(0, int_len);
  if (exp_ > 0) out += "." + digits.substr(int_len);
  return out;
}

// --------------------------------------------------------------- BitString

BitString::BitString(std::string bits) : bits_(std::move(bits)) {
  for (char c : bits_) {
    if (c != '0' && c != '1') {
      throw Error(Errc::malformed_input, "binary string may only contain 0 and 1: '" + bits_ + "'");
    }
  }
}

BitString BitString::from_dyadic(const Dyadic& d) {
  if (d.numerator() < 0 || d.value() >= Rational(1)) {
    throw Error(Errc::invalid_argument, "canonical string needs a dyadic in [0,1): " + d.str());
  }
  if (d.numerator() == 0) return BitString();
  std::string raw = d.numerator().get_str(2);
  std::string bits(d.exponent() - raw.size(), '0');
  bits += raw;
  return BitString(std::move(bits));
}

BitString BitString::expansion(const Rational& x, std::size_t length) {
  if (x.sign() < 0 || x > Rational(1)) {
    throw Error(Errc::invalid_argument, "expansion needs x in [0,1]: " + x.str());
  }
  if (x == Rational(1)) return BitString(std::string(length, '1'));
  if (length == 0) return BitString();
  mpz_class head = floor_scaled(x, length);
  std::string raw = head == 0 ? std::string() : head.get_str(2);
  std::string bits(length - raw.size(), '0');
  bits += raw;
  return BitString(std::move(bits));
}

bool BitString::is_prefix_of(const BitString& other) const {
  return bits_.size() <= other.bits_.size() &&
         std::equal(bits_.begin(), bits_.end(), other.bits_.begin());
}

bool BitString::is_prefix_of_real(const Rational& x) const {
  return expansion(x, bits_.size()) == *this;
}

Dyadic BitString::measure() const { return Dyadic(1, bits_.size()); }

Dyadic BitString::to_dyadic() const {
  if (bits_.empty()) return Dyadic();
  return Dyadic(mpz_class(bits_, 2), bits_.size());
}

std::vector<BitString> BitString::extensions(std::size_t length) const {
  if (length < bits_.size()) {
    throw Error(Errc::invalid_argument, "extension length shorter than the string");
  }
  std::size_t extra = length - bits_.size();
  if (extra >= 63) throw Error(Errc::invalid_argument, "too many extensions requested");
  std::vector<BitString> out;
  out.reserve(std::size_t{1} << extra);
  for (std::uint64_t tail = 0; tail < (std::uint64_t{1} << extra); ++tail) {
    std::string s = bits_;
    for (std::size_t b = extra; b-- > 0;) s.push_back(((tail >> b) & 1U) ? '1' : '0');
    out.emplace_back(std::move(s));
  }
  return out;
}

// ---------------------------------------------------------------- Interval

Interval::Interval(Rational left, Rational right) : left_(std::move(left)), right_(std::move(right)) {
  if (right_ < left_) {
    throw Error(Errc::invalid_argument, "interval with left > right: [" + left_.str() + ", " +
                                            right_.str() + "]");
  }
}

// -------------------------------------------------------------- operations

std::size_t msb_diff(const Dyadic& a, const Dyadic& b) {
  for (const Dyadic* d : {&a, &b}) {
    if (d->numerator() < 0 || d->value() >= Rational(1)) {
      throw Error(Errc::invalid_argument, "msb_diff needs values in [0,1): " + d->str());
    }
  }
  if (a == b) throw Error(Errc::identical_values, "identical values: " + a.str());
  std::uint64_t e = std::max(a.exponent(), b.exponent());
  mpz_class x = a.numerator();
  mpz_class y = b.numerator();
  mpz_mul_2exp(x.get_mpz_t(), x.get_mpz_t(), e - a.exponent());
  mpz_mul_2exp(y.get_mpz_t(), y.get_mpz_t(), e - b.exponent());
  mpz_class diff = x ^ y;
  auto top = static_cast<std::uint64_t>(mpz_sizeinbase(diff.get_mpz_t(), 2)) - 1;
  return static_cast<std::size_t>(e - top);
}

bool is_prefix_free(std::span<const BitString> strings) {
  std::vector<BitString> sorted(strings.begin(), strings.end());
  std::sort(sorted.begin(), sorted.end());
  // In lexicographic order every extension of sigma directly follows a run
  // of strings that all extend sigma, so adjacent pairs suffice.
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i - 1].is_prefix_of(sorted[i])) return false;
  }
  return true;
}

Dyadic string_set_measure(std::span<const BitString> strings) {
  if (!is_prefix_free(strings)) throw Error(Errc::not_prefix_free, "not prefix-free");
  Rational total(0);
  for (const auto& s : strings) total += pow2(-static_cast<long>(s.size()));
  return Dyadic::from_rational(total);
}

}  // namespace speedlab
