#include <algorithm>

#include "stratdef/linear.hpp"
#include "stratdef/polynomial.hpp"

namespace stratdef {

void LinearSystem::normalize() {
  for (auto& c : constraints) {
    if (c.rel == Relation::Ge || c.rel == Relation::Gt) {
      for (auto& a : c.coeffs) a = -a;
      c.rhs = -c.rhs;
      c.rel = flip(c.rel);
    }
  }
}

bool LinearSystem::satisfied_by(const std::vector<Rational>& point) const {
  if (infeasible) return false;
  if (point.size() != variables.size()) throw std::invalid_argument("point dimension mismatch");
  for (const auto& c : constraints) {
    Rational lhs(0);
    for (std::size_t j = 0; j < point.size(); ++j) lhs += c.coeffs[j] * point[j];
    int s = cmp(lhs, c.rhs);
    bool ok = false;
    switch (c.rel) {
      case Relation::Lt: ok = s < 0; break;
      case Relation::Le: ok = s <= 0; break;
      case Relation::Eq: ok = s == 0; break;
      case Relation::Ge: ok = s >= 0; break;
      case Relation::Gt: ok = s > 0; break;
    }
    if (!ok) return false;
  }
  return true;
}

namespace {

void collect_atoms(const Formula& f, std::vector<Atom>& out) {
  if (f.kind() == Formula::Kind::Atom) {
    out.push_back(f.atom());
    return;
  }
  if (f.kind() != Formula::Kind::And) throw NonlinearError("linear system must be a conjunction of atoms");
  for (const auto& c : f.children()) collect_atoms(c, out);
}

}  // namespace

LinearSystem linear_system(const Formula& conjunction, std::vector<VarRef> order) {
  std::vector<Atom> atoms;
  collect_atoms(conjunction, atoms);
  if (order.empty()) {
    auto fv = free_variables(conjunction);
    order.assign(fv.begin(), fv.end());
  }
  LinearSystem sys;
  for (auto v : order) sys.variables.push_back(to_string(v));
  for (const auto& a : atoms) {
    if (a.kind == Atom::Kind::ExpGraph) throw NonlinearError("exp-graph atom in a linear system");
    auto p = to_polynomial(a.lhs - a.rhs);
    if (!p || p->degree() > 1) throw NonlinearError("nonlinear atom " + print(Formula::atom(a)));
    auto split = p->linear_in(order);
    if (!split || !split->second.is_constant())
      throw NonlinearError("atom " + print(Formula::atom(a)) + " uses variables outside the system");
    LinearConstraint c;
    for (const auto& q : split->first) c.coeffs.push_back(q.constant_term());
    c.rel = a.rel;
    c.rhs = -split->second.constant_term();
    sys.constraints.push_back(std::move(c));
  }
  sys.normalize();
  return sys;
}

Formula to_formula(const LinearSystem& sys) {
  if (sys.infeasible) return Formula::falsity();
  std::vector<Term> vars;
  for (const auto& name : sys.variables) vars.push_back(parse_term(name));
  std::vector<Formula> parts;
  for (const auto& c : sys.constraints) {
    std::vector<Term> sum;
    for (std::size_t j = 0; j < vars.size(); ++j) {
      if (c.coeffs[j] == 0) continue;
      sum.push_back(c.coeffs[j] == 1 ? vars[j] : Term::product({Term::constant(c.coeffs[j]), vars[j]}));
    }
    Term lhs = sum.empty() ? Term::constant(0) : sum.size() == 1 ? sum.front() : Term::sum(std::move(sum));
    parts.push_back(Formula::compare(lhs, c.rel, Term::constant(c.rhs)));
  }
  return parts.size() == 1 ? parts.front() : Formula::conjunction(std::move(parts));
}

namespace {

bool is_strict(Relation r) { return r == Relation::Lt || r == Relation::Gt; }

bool all_zero(const std::vector<Rational>& v) {
  return std::all_of(v.begin(), v.end(), [](const Rational& q) { return q == 0; });
}

// Scales so the first nonzero coefficient has magnitude one.
void scale_row(LinearConstraint& c) {
  for (const auto& a : c.coeffs) {
    if (a == 0) continue;
    Rational s = abs(a);
    for (auto& b : c.coeffs) b /= s;
    c.rhs /= s;
    return;
  }
}

// Does constraint a imply constraint b (single-constraint domination)?
bool implies(const LinearConstraint& a, const LinearConstraint& b) {
  if (b.rel == Relation::Eq) return a.rel == Relation::Eq && a.coeffs == b.coeffs && a.rhs == b.rhs;
  auto bound_ok = [&](const Rational& value, bool value_strict) {
    // a gives  c.x (<|<=) value; b needs  c.x (<|<=) b.rhs.
    if (value < b.rhs) return true;
    return value == b.rhs && (value_strict || !is_strict(b.rel));
  };
  if (a.coeffs == b.coeffs) return bound_ok(a.rhs, a.rel == Relation::Lt);
  if (a.rel == Relation::Eq) {
    std::vector<Rational> neg(a.coeffs.size());
    for (std::size_t j = 0; j < neg.size(); ++j) neg[j] = -a.coeffs[j];
    if (neg == b.coeffs) return bound_ok(-a.rhs, false) && !(b.rel == Relation::Lt && -a.rhs == b.rhs);
  }
  return false;
}

// Drops trivial rows (flagging contradictions) and dominated rows.
void tidy(LinearSystem& sys) {
  std::vector<LinearConstraint> rows;
  for (auto& c : sys.constraints) {
    if (all_zero(c.coeffs)) {
      int s = cmp(Rational(0), c.rhs);
      bool ok = c.rel == Relation::Lt ? s < 0 : c.rel == Relation::Le ? s <= 0 : s == 0;
      if (!ok) {
        sys.infeasible = true;
        sys.constraints.clear();
        return;
      }
      continue;
    }
    scale_row(c);
    rows.push_back(std::move(c));
  }
  std::vector<bool> dropped(rows.size(), false);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (dropped[i]) continue;
    for (std::size_t j = 0; j < rows.size(); ++j) {
      if (i == j || dropped[j]) continue;
      if (implies(rows[i], rows[j])) dropped[j] = true;
    }
  }
  sys.constraints.clear();
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (!dropped[i]) sys.constraints.push_back(std::move(rows[i]));
}

void eliminate_column(LinearSystem& sys, std::size_t col) {
  auto& rows = sys.constraints;
  // Equality substitution first.
  for (std::size_t e = 0; e < rows.size(); ++e) {
    if (rows[e].rel != Relation::Eq || rows[e].coeffs[col] == 0) continue;
    LinearConstraint eq = rows[e];
    rows.erase(rows.begin() + static_cast<std::ptrdiff_t>(e));
    for (auto& c : rows) {
      if (c.coeffs[col] == 0) continue;
      Rational f = c.coeffs[col] / eq.coeffs[col];
      for (std::size_t j = 0; j < c.coeffs.size(); ++j) c.coeffs[j] -= f * eq.coeffs[j];
      c.rhs -= f * eq.rhs;
      c.coeffs[col] = 0;
    }
    return;
  }
  std::vector<LinearConstraint> pos, neg, out;
  for (auto& c : rows) {
    if (c.coeffs[col] > 0) {
      pos.push_back(std::move(c));
    } else if (c.coeffs[col] < 0) {
      neg.push_back(std::move(c));
    } else {
      out.push_back(std::move(c));
    }
  }
  for (const auto& p : pos) {
    for (const auto& n : neg) {
      Rational fp = 1 / p.coeffs[col];
      Rational fn = -1 / n.coeffs[col];
      LinearConstraint c;
      c.coeffs.resize(p.coeffs.size());
      for (std::size_t j = 0; j < c.coeffs.size(); ++j) c.coeffs[j] = fp * p.coeffs[j] + fn * n.coeffs[j];
      c.coeffs[col] = 0;
      c.rhs = fp * p.rhs + fn * n.rhs;
      c.rel = (p.rel == Relation::Lt || n.rel == Relation::Lt) ? Relation::Lt : Relation::Le;
      out.push_back(std::move(c));
    }
  }
  rows = std::move(out);
}

}  // namespace

LinearSystem fm_eliminate(const LinearSystem& input, const std::vector<std::string>& eliminate) {
  LinearSystem sys = input;
  sys.normalize();
  for (const auto& c : sys.constraints)
    if (c.coeffs.size() != sys.variables.size()) throw std::invalid_argument("constraint width mismatch");
  std::vector<std::size_t> cols;
  for (const auto& name : eliminate) {
    auto it = std::find(sys.variables.begin(), sys.variables.end(), name);
    if (it == sys.variables.end()) throw std::invalid_argument("unknown variable '" + name + "'");
    cols.push_back(static_cast<std::size_t>(it - sys.variables.begin()));
  }
  tidy(sys);
  for (auto col : cols) {
    if (sys.infeasible) break;
    eliminate_column(sys, col);
    tidy(sys);
  }
  // Drop the eliminated columns.
  std::vector<std::size_t> keep;
  for (std::size_t j = 0; j < sys.variables.size(); ++j)
    if (std::find(cols.begin(), cols.end(), j) == cols.end()) keep.push_back(j);
  LinearSystem out;
  out.infeasible = sys.infeasible;
  for (auto j : keep) out.variables.push_back(sys.variables[j]);
  for (const auto& c : sys.constraints) {
    LinearConstraint r;
    r.rel = c.rel;
    r.rhs = c.rhs;
    for (auto j : keep) r.coeffs.push_back(c.coeffs[j]);
    out.constraints.push_back(std::move(r));
  }
  return out;
}

nlohmann::json to_json(const LinearSystem& sys) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& c : sys.constraints) {
    nlohmann::json coeffs = nlohmann::json::array();
    for (const auto& a : c.coeffs) coeffs.push_back(to_string(a));
    rows.push_back({{"coeffs", coeffs}, {"rel", std::string(to_string(c.rel))}, {"rhs", to_string(c.rhs)}});
  }
  return {{"variables", sys.variables}, {"constraints", rows}, {"infeasible", sys.infeasible}};
}

namespace {

Rational json_rational(const nlohmann::json& v) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return Rational(v.get<long>());
  throw std::invalid_argument("rationals must be JSON strings (\"p/q\") or integers");
}

Relation json_relation(const nlohmann::json& v) {
  auto s = v.get<std::string>();
  for (auto r : {Relation::Lt, Relation::Le, Relation::Eq, Relation::Ge, Relation::Gt})
    if (to_string(r) == s) return r;
  throw std::invalid_argument("unknown relation '" + s + "'");
}

}  // namespace

LinearSystem linear_system_from_json(const nlohmann::json& j) {
  LinearSystem sys;
  sys.variables = j.at("variables").get<std::vector<std::string>>();
  for (const auto& row : j.at("constraints")) {
    LinearConstraint c;
    for (const auto& a : row.at("coeffs")) c.coeffs.push_back(json_rational(a));
    if (c.coeffs.size() != sys.variables.size()) throw std::invalid_argument("constraint width mismatch");
    c.rel = json_relation(row.at("rel"));
    c.rhs = json_rational(row.at("rhs"));
    sys.constraints.push_back(std::move(c));
  }
  sys.infeasible = j.value("infeasible", false);
  return sys;
}

LPInstance lp_from_json(const nlohmann::json& j) {
  LPInstance lp;
  for (const auto& v : j.at("objective")) lp.objective.push_back(json_rational(v));
  for (const auto& row : j.at("matrix")) {
    std::vector<Rational> r;
    for (const auto& v : row) r.push_back(json_rational(v));
    lp.matrix.push_back(std::move(r));
  }
  for (const auto& r : j.at("relations")) lp.relations.push_back(json_relation(r));
  for (const auto& v : j.at("rhs")) lp.rhs.push_back(json_rational(v));
  if (j.contains("lower")) {
    for (const auto& v : j.at("lower")) lp.lower.push_back(v.is_null() ? std::nullopt : std::optional(json_rational(v)));
  } else {
    lp.lower.assign(lp.objective.size(), Rational(0));
  }
  lp.maximize = j.value("maximize", false);
  return lp;
}

}  // namespace stratdef
