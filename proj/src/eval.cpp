#include "stratdef/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace stratdef {

FloatAssignment to_float(const Assignment& s) {
  auto conv = [](const std::vector<Rational>& v) {
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& q : v) out.push_back(q.get_d());
    return out;
  };
  return {conv(s.x), conv(s.a), conv(s.y), conv(s.w)};
}

Interval enclose(const Term& t, const Assignment& s, unsigned bits) {
  switch (t.kind()) {
    case Term::Kind::Var: return Interval(s.at(t.var_ref()));
    case Term::Kind::Const: return Interval(t.value());
    case Term::Kind::Sqrt: return sqrt_enclosure(t.value(), bits);
    case Term::Kind::Exp: return exp_enclosure(enclose(t.arg(), s, bits), bits);
    case Term::Kind::Sum: {
      Interval acc(Rational(0));
      for (const auto& a : t.args()) acc = acc + enclose(a, s, bits);
      return acc;
    }
    case Term::Kind::Product: {
      Interval acc(Rational(1));
      for (const auto& a : t.args()) acc = acc * enclose(a, s, bits);
      return acc;
    }
  }
  throw std::logic_error("unknown term kind");
}

namespace {

bool relation_holds(int sign, Relation r) {
  switch (r) {
    case Relation::Lt: return sign < 0;
    case Relation::Le: return sign <= 0;
    case Relation::Eq: return sign == 0;
    case Relation::Ge: return sign >= 0;
    case Relation::Gt: return sign > 0;
  }
  return false;
}

bool eval_atom(const Atom& a, const Assignment& s, const PrecisionPolicy& policy) {
  if (a.kind == Atom::Kind::ExpGraph) {
    // exp of a nonzero rational is irrational, so u = exp(v) over the
    // rationals holds exactly at (1, 0).
    return s.at(a.exp_rhs) == 0 && s.at(a.exp_lhs) == 1;
  }
  bool exact_only = !a.lhs.contains_exp() && !a.rhs.contains_exp() && !a.lhs.contains_sqrt() && !a.rhs.contains_sqrt();
  for (unsigned bits = policy.initial;; bits *= 2) {
    Interval d = enclose(a.lhs, s, bits) - enclose(a.rhs, s, bits);
    int sign = d.certified_sign();
    if (sign != kSignUnknown) return relation_holds(sign, a.rel);
    // A straddling enclosure still decides the non-strict side relations.
    if (a.rel == Relation::Le && d.hi() <= 0) return true;
    if (a.rel == Relation::Ge && d.lo() >= 0) return true;
    if (a.rel == Relation::Lt && d.lo() >= 0) return false;
    if (a.rel == Relation::Gt && d.hi() <= 0) return false;
    if (a.rel == Relation::Eq && (d.lo() > 0 || d.hi() < 0)) return false;
    if (exact_only || bits * 2 > policy.cap)
      throw UndecidedError("comparison " + print(Formula::atom(a)) + " undecided at " + std::to_string(bits) +
                           " bits; enclosure [" + std::to_string(d.lo().get_d()) + ", " +
                           std::to_string(d.hi().get_d()) + "]");
  }
}

double scale_of(double l, double r) { return std::max({1.0, std::fabs(l), std::fabs(r)}); }

}  // namespace

bool eval_qf(const Formula& f, const Assignment& s, const PrecisionPolicy& policy) {
  switch (f.kind()) {
    case Formula::Kind::Atom: return eval_atom(f.atom(), s, policy);
    case Formula::Kind::Not: return !eval_qf(f.body(), s, policy);
    case Formula::Kind::And:
      for (const auto& c : f.children())
        if (!eval_qf(c, s, policy)) return false;
      return true;
    case Formula::Kind::Or:
      for (const auto& c : f.children())
        if (eval_qf(c, s, policy)) return true;
      return false;
    default: throw std::invalid_argument("eval_qf requires a quantifier-free formula");
  }
}

double eval_float(const Term& t, const FloatAssignment& s) {
  switch (t.kind()) {
    case Term::Kind::Var: return s.at(t.var_ref());
    case Term::Kind::Const: return t.value().get_d();
    case Term::Kind::Sqrt: return std::sqrt(t.value().get_d());
    case Term::Kind::Exp: return std::exp(eval_float(t.arg(), s));
    case Term::Kind::Sum: {
      double acc = 0;
      for (const auto& a : t.args()) acc += eval_float(a, s);
      return acc;
    }
    case Term::Kind::Product: {
      double acc = 1;
      for (const auto& a : t.args()) acc *= eval_float(a, s);
      return acc;
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

namespace {

std::pair<double, double> atom_sides(const Atom& a, const FloatAssignment& s) {
  if (a.kind == Atom::Kind::ExpGraph) return {s.at(a.exp_lhs), std::exp(s.at(a.exp_rhs))};
  return {eval_float(a.lhs, s), eval_float(a.rhs, s)};
}

bool atom_holds_float(const Atom& a, const FloatAssignment& s, double tol) {
  auto [l, r] = atom_sides(a, s);
  double d = l - r;
  double slack = tol * scale_of(l, r);
  Relation rel = a.kind == Atom::Kind::ExpGraph ? Relation::Eq : a.rel;
  switch (rel) {
    case Relation::Lt: return d < 0;
    case Relation::Le: return d <= slack;
    case Relation::Eq: return std::fabs(d) <= slack;
    case Relation::Ge: return d >= -slack;
    case Relation::Gt: return d > 0;
  }
  return false;
}

}  // namespace

double atom_margin(const Atom& a, const FloatAssignment& s) {
  auto [l, r] = atom_sides(a, s);
  double d = (l - r) / scale_of(l, r);
  Relation rel = a.kind == Atom::Kind::ExpGraph ? Relation::Eq : a.rel;
  switch (rel) {
    case Relation::Lt:
    case Relation::Le: return d;
    case Relation::Ge:
    case Relation::Gt: return -d;
    case Relation::Eq: return std::fabs(d);
  }
  return d;
}

bool eval_qf_float(const Formula& f, const FloatAssignment& s, double tol) {
  switch (f.kind()) {
    case Formula::Kind::Atom: return atom_holds_float(f.atom(), s, tol);
    case Formula::Kind::Not: return !eval_qf_float(f.body(), s, tol);
    case Formula::Kind::And:
      for (const auto& c : f.children())
        if (!eval_qf_float(c, s, tol)) return false;
      return true;
    case Formula::Kind::Or:
      for (const auto& c : f.children())
        if (eval_qf_float(c, s, tol)) return true;
      return false;
    default: throw std::invalid_argument("eval_qf_float requires a quantifier-free formula");
  }
}

double min_abs_margin(const Formula& f, const FloatAssignment& s) {
  if (f.kind() == Formula::Kind::Atom) return std::fabs(atom_margin(f.atom(), s));
  double m = std::numeric_limits<double>::infinity();
  for (const auto& c : f.children()) m = std::min(m, min_abs_margin(c, s));
  return m;
}

}  // namespace stratdef
