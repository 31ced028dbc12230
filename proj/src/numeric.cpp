#include "stratdef/numeric.hpp"

#include <mpfr.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <utility>

namespace stratdef {

namespace {

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

[[noreturn]] void bad_literal(std::string_view text) {
  throw std::invalid_argument("malformed rational literal '" + std::string(text) + "'");
}

// RAII holder for an mpfr_t.
class Mpfr {
 public:
  explicit Mpfr(unsigned bits) { mpfr_init2(v_, static_cast<mpfr_prec_t>(bits)); }
  ~Mpfr() { mpfr_clear(v_); }
  Mpfr(const Mpfr&) = delete;
  Mpfr& operator=(const Mpfr&) = delete;
  mpfr_ptr get() { return v_; }

  Rational to_rational() {
    Rational q;
    mpfr_get_q(q.get_mpq_t(), v_);
    return q;
  }

 private:
  mpfr_t v_;
};

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.empty()) bad_literal(text);

  bool negative = false;
  if (s.front() == '-' || s.front() == '+') {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }

  Rational value;
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    auto num = s.substr(0, slash);
    auto den = s.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) bad_literal(text);
    Integer d(std::string(den), 10);
    if (d == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
    value = Rational(Integer(std::string(num), 10), d);
    value.canonicalize();
  } else {
    long exponent = 0;
    if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
      auto exp_text = s.substr(e + 1);
      bool exp_neg = false;
      if (!exp_text.empty() && (exp_text.front() == '-' || exp_text.front() == '+')) {
        exp_neg = exp_text.front() == '-';
        exp_text.remove_prefix(1);
      }
      if (!all_digits(exp_text) || exp_text.size() > 6) bad_literal(text);
      exponent = std::stol(std::string(exp_text));
      if (exp_neg) exponent = -exponent;
      s = s.substr(0, e);
    }
    std::string digits;
    auto dot = s.find('.');
    if (dot != std::string_view::npos) {
      auto int_part = s.substr(0, dot);
      auto frac_part = s.substr(dot + 1);
      if (int_part.empty() && frac_part.empty()) bad_literal(text);
      if ((!int_part.empty() && !all_digits(int_part)) || (!frac_part.empty() && !all_digits(frac_part)))
        bad_literal(text);
      digits = std::string(int_part) + std::string(frac_part);
      exponent -= static_cast<long>(frac_part.size());
    } else {
      if (!all_digits(s)) bad_literal(text);
      digits = std::string(s);
    }
    if (digits.empty()) digits = "0";
    Integer mantissa(digits, 10);
    Integer scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
    value = exponent < 0 ? Rational(mantissa, scale) : Rational(mantissa * scale);
    value.canonicalize();
  }
  return negative ? Rational(-value) : value;
}

std::string to_string(const Rational& q) { return q.get_str(); }

Integer floor(const Rational& q) {
  Integer r;
  mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

Integer ceil(const Rational& q) {
  Integer r;
  mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

Rational pow(const Rational& q, unsigned e) {
  Integer num, den;
  mpz_pow_ui(num.get_mpz_t(), q.get_num_mpz_t(), e);
  mpz_pow_ui(den.get_mpz_t(), q.get_den_mpz_t(), e);
  return Rational(num, den);
}

PrecisionPolicy& default_precision() {
  static PrecisionPolicy policy;
  return policy;
}

Interval::Interval(Rational lo, Rational hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
  if (lo_ > hi_) throw std::invalid_argument("interval with lo > hi");
}

int Interval::certified_sign() const {
  if (lo_ > 0) return 1;
  if (hi_ < 0) return -1;
  if (lo_ == 0 && hi_ == 0) return 0;
  return kSignUnknown;
}

Interval operator+(const Interval& a, const Interval& b) { return {a.lo_ + b.lo_, a.hi_ + b.hi_}; }
Interval operator-(const Interval& a, const Interval& b) { return {a.lo_ - b.hi_, a.hi_ - b.lo_}; }
Interval operator-(const Interval& a) { return {-a.hi_, -a.lo_}; }

Interval operator*(const Interval& a, const Interval& b) {
  if (a.exact() && b.exact()) return Interval(a.lo_ * b.lo_);
  std::array<Rational, 4> p{a.lo_ * b.lo_, a.lo_ * b.hi_, a.hi_ * b.lo_, a.hi_ * b.hi_};
  auto [mn, mx] = std::minmax_element(p.begin(), p.end());
  return {*mn, *mx};
}

Interval exp_enclosure(const Interval& x, unsigned bits) {
  if (x.exact() && x.lo() == 0) return Interval(Rational(1));
  Mpfr lo(bits), hi(bits);
  mpfr_set_q(lo.get(), x.lo().get_mpq_t(), MPFR_RNDD);
  mpfr_exp(lo.get(), lo.get(), MPFR_RNDD);
  mpfr_set_q(hi.get(), x.hi().get_mpq_t(), MPFR_RNDU);
  mpfr_exp(hi.get(), hi.get(), MPFR_RNDU);
  return {lo.to_rational(), hi.to_rational()};
}

Interval log_enclosure(const Interval& x, unsigned bits) {
  if (x.lo() <= 0) throw std::domain_error("log of a non-positive enclosure");
  if (x.exact() && x.lo() == 1) return Interval(Rational(0));
  Mpfr lo(bits), hi(bits);
  mpfr_set_q(lo.get(), x.lo().get_mpq_t(), MPFR_RNDD);
  mpfr_log(lo.get(), lo.get(), MPFR_RNDD);
  mpfr_set_q(hi.get(), x.hi().get_mpq_t(), MPFR_RNDU);
  mpfr_log(hi.get(), hi.get(), MPFR_RNDU);
  return {lo.to_rational(), hi.to_rational()};
}

bool rational_sqrt(const Rational& c, Rational& root) {
  if (c < 0) return false;
  if (!mpz_perfect_square_p(c.get_num_mpz_t()) || !mpz_perfect_square_p(c.get_den_mpz_t())) return false;
  Integer n, d;
  mpz_sqrt(n.get_mpz_t(), c.get_num_mpz_t());
  mpz_sqrt(d.get_mpz_t(), c.get_den_mpz_t());
  root = Rational(n, d);
  root.canonicalize();
  return true;
}

Interval sqrt_enclosure(const Rational& c, unsigned bits) {
  if (c < 0) throw std::domain_error("sqrt of a negative constant");
  Rational root;
  if (rational_sqrt(c, root)) return Interval(root);
  Mpfr lo(bits), hi(bits);
  mpfr_set_q(lo.get(), c.get_mpq_t(), MPFR_RNDD);
  mpfr_sqrt(lo.get(), lo.get(), MPFR_RNDD);
  mpfr_set_q(hi.get(), c.get_mpq_t(), MPFR_RNDU);
  mpfr_sqrt(hi.get(), hi.get(), MPFR_RNDU);
  return {lo.to_rational(), hi.to_rational()};
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) return "nan";
  return std::string(buf.data(), end);
}

}  // namespace stratdef
