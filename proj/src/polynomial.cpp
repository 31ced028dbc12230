#include "stratdef/polynomial.hpp"

#include <algorithm>

namespace stratdef {

namespace {

Monomial multiply(const Monomial& a, const Monomial& b) {
  Monomial out;
  out.reserve(a.size() + b.size());
  auto i = a.begin(), j = b.begin();
  while (i != a.end() || j != b.end()) {
    if (j == b.end() || (i != a.end() && i->first < j->first)) {
      out.push_back(*i++);
    } else if (i == a.end() || j->first < i->first) {
      out.push_back(*j++);
    } else {
      out.emplace_back(i->first, i->second + j->second);
      ++i, ++j;
    }
  }
  return out;
}

}  // namespace

Polynomial Polynomial::constant(const Rational& c) {
  Polynomial p;
  p.add_term({}, c);
  return p;
}

Polynomial Polynomial::variable(VarRef v) {
  Polynomial p;
  p.add_term({{v, 1}}, Rational(1));
  return p;
}

void Polynomial::add_term(const Monomial& m, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

bool Polynomial::is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty()); }

Rational Polynomial::constant_term() const {
  auto it = terms_.find(Monomial{});
  return it == terms_.end() ? Rational(0) : it->second;
}

std::uint32_t Polynomial::degree(const std::function<bool(VarRef)>& counts) const {
  std::uint32_t d = 0;
  for (const auto& [m, c] : terms_) {
    std::uint32_t md = 0;
    for (const auto& [v, e] : m)
      if (!counts || counts(v)) md += e;
    d = std::max(d, md);
  }
  return d;
}

std::uint32_t Polynomial::degree_in(VarRef v) const {
  return degree([&](VarRef u) { return u == v; });
}

std::set<VarRef> Polynomial::variables() const {
  std::set<VarRef> out;
  for (const auto& [m, c] : terms_)
    for (const auto& [v, e] : m) out.insert(v);
  return out;
}

std::optional<std::pair<std::vector<Polynomial>, Polynomial>> Polynomial::linear_in(
    const std::vector<VarRef>& vs) const {
  std::vector<Polynomial> coeffs(vs.size());
  Polynomial rest;
  for (const auto& [m, c] : terms_) {
    std::optional<std::size_t> hit;
    Monomial reduced;
    for (const auto& [v, e] : m) {
      auto pos = std::find(vs.begin(), vs.end(), v);
      if (pos == vs.end()) {
        reduced.emplace_back(v, e);
        continue;
      }
      if (hit || e > 1) return std::nullopt;
      hit = static_cast<std::size_t>(pos - vs.begin());
    }
    if (hit) {
      coeffs[*hit].add_term(reduced, c);
    } else {
      rest.add_term(m, c);
    }
  }
  return std::make_pair(std::move(coeffs), std::move(rest));
}

Rational Polynomial::evaluate(const std::function<Rational(VarRef)>& value) const {
  Rational sum(0);
  std::map<VarRef, Rational> cache;
  for (const auto& [m, c] : terms_) {
    Rational t = c;
    for (const auto& [v, e] : m) {
      auto it = cache.find(v);
      if (it == cache.end()) it = cache.emplace(v, value(v)).first;
      t *= pow(it->second, e);
    }
    sum += t;
  }
  return sum;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  Polynomial p = *this;
  for (const auto& [m, c] : o.terms_) p.add_term(m, c);
  return p;
}

Polynomial Polynomial::operator-() const {
  Polynomial p;
  for (const auto& [m, c] : terms_) p.terms_.emplace(m, -c);
  return p;
}

Polynomial Polynomial::operator-(const Polynomial& o) const { return *this + (-o); }

Polynomial Polynomial::operator*(const Polynomial& o) const {
  Polynomial p;
  for (const auto& [ma, ca] : terms_)
    for (const auto& [mb, cb] : o.terms_) p.add_term(multiply(ma, mb), ca * cb);
  return p;
}

std::optional<Polynomial> to_polynomial(const Term& t) {
  if (t.contains_exp() || t.contains_sqrt()) return std::nullopt;
  switch (t.kind()) {
    case Term::Kind::Var: return Polynomial::variable(t.var_ref());
    case Term::Kind::Const: return Polynomial::constant(t.value());
    case Term::Kind::Sum: {
      Polynomial p;
      for (const auto& a : t.args()) p = p + *to_polynomial(a);
      return p;
    }
    case Term::Kind::Product: {
      Polynomial p = Polynomial::constant(Rational(1));
      for (const auto& a : t.args()) p = p * *to_polynomial(a);
      return p;
    }
    default: return std::nullopt;
  }
}

Term to_term(const Polynomial& p) {
  std::vector<Term> sum;
  for (const auto& [m, c] : p.terms()) {
    std::vector<Term> prod;
    if (c != 1 || m.empty()) prod.push_back(Term::constant(c));
    for (const auto& [v, e] : m)
      for (std::uint32_t i = 0; i < e; ++i) prod.push_back(Term::var(v));
    sum.push_back(prod.size() == 1 ? prod.front() : Term::product(std::move(prod)));
  }
  if (sum.empty()) return Term::constant(0);
  return sum.size() == 1 ? sum.front() : Term::sum(std::move(sum));
}

}  // namespace stratdef
