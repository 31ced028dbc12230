#ifndef STRATDEF_NUMERIC_HPP
#define STRATDEF_NUMERIC_HPP

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace stratdef {

using Rational = mpq_class;
using Integer = mpz_class;

// Parses "p/q", integers, and decimal literals ("-0.011", "1e-3") exactly.
Rational parse_rational(std::string_view text);

// Canonical "p/q" (or "p" for integers).
std::string to_string(const Rational& q);

Integer floor(const Rational& q);
Integer ceil(const Rational& q);
Rational pow(const Rational& q, unsigned e);

// Error raised when a certified decision cannot be reached within the
// configured precision cap.
class UndecidedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bit precision policy for certified enclosures. Precision starts at
// `initial` and doubles until a decision is reached or `cap` is exceeded.
struct PrecisionPolicy {
  unsigned initial = 64;
  unsigned cap = 4096;
};

PrecisionPolicy& default_precision();

// Closed interval with exact rational endpoints. Degenerate intervals
// represent exact values.
class Interval {
 public:
  Interval() = default;
  explicit Interval(const Rational& v) : lo_(v), hi_(v) {}
  Interval(Rational lo, Rational hi);

  const Rational& lo() const { return lo_; }
  const Rational& hi() const { return hi_; }
  bool exact() const { return lo_ == hi_; }
  Rational width() const { return hi_ - lo_; }
  Rational midpoint() const { return (lo_ + hi_) / 2; }
  bool contains(const Rational& v) const { return lo_ <= v && v <= hi_; }

  // Sign of the enclosed value: +1 / -1 if certified, 0 if exactly zero,
  // empty optional-like code 2 when the enclosure straddles zero.
  int certified_sign() const;

  friend Interval operator+(const Interval& a, const Interval& b);
  friend Interval operator-(const Interval& a, const Interval& b);
  friend Interval operator*(const Interval& a, const Interval& b);
  friend Interval operator-(const Interval& a);

 private:
  Rational lo_{0};
  Rational hi_{0};
};

inline constexpr int kSignUnknown = 2;

// Certified enclosures computed with MPFR directed rounding at `bits` of
// precision. exp and log of exact zero/one collapse to exact values.
Interval exp_enclosure(const Interval& x, unsigned bits);
Interval log_enclosure(const Interval& x, unsigned bits);  // requires x > 0
Interval sqrt_enclosure(const Rational& c, unsigned bits); // requires c >= 0

// Integer square root test: returns the exact root when c is the square of a
// rational.
bool rational_sqrt(const Rational& c, Rational& root);

// Shortest round-trip decimal for doubles (used for JSON/CSV output).
std::string format_double(double v);

}  // namespace stratdef

#endif  // STRATDEF_NUMERIC_HPP
