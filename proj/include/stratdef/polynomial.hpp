#ifndef STRATDEF_POLYNOMIAL_HPP
#define STRATDEF_POLYNOMIAL_HPP

// Sparse multivariate polynomials with exact rational coefficients.

#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "stratdef/formula.hpp"

namespace stratdef {

// Variables with positive exponents, sorted by variable.
using Monomial = std::vector<std::pair<VarRef, std::uint32_t>>;

class Polynomial {
 public:
  Polynomial() = default;
  static Polynomial constant(const Rational& c);
  static Polynomial variable(VarRef v);

  const std::map<Monomial, Rational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  Rational constant_term() const;

  // Total degree over variables accepted by `counts` (all when empty).
  std::uint32_t degree(const std::function<bool(VarRef)>& counts = {}) const;
  std::uint32_t degree_in(VarRef v) const;
  std::set<VarRef> variables() const;

  // Splits p = sum_j c_j * v_j + c_0 for the given variables, provided p
  // has degree <= 1 in them jointly; the c_j are polynomials in the rest.
  std::optional<std::pair<std::vector<Polynomial>, Polynomial>> linear_in(const std::vector<VarRef>& vs) const;

  Rational evaluate(const std::function<Rational(VarRef)>& value) const;

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial operator-() const;
  friend bool operator==(const Polynomial&, const Polynomial&) = default;

 private:
  void add_term(const Monomial& m, const Rational& c);
  std::map<Monomial, Rational> terms_;
};

// Expands a term; nullopt when it contains exp or a symbolic sqrt.
std::optional<Polynomial> to_polynomial(const Term& t);

Term to_term(const Polynomial& p);

}  // namespace stratdef

#endif  // STRATDEF_POLYNOMIAL_HPP
