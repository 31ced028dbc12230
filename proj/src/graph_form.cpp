#include <algorithm>

#include "stratdef/formula.hpp"

namespace stratdef {

namespace {

bool term_free_of_exp(const Formula& f) {
  if (f.kind() == Formula::Kind::Atom) {
    const auto& a = f.atom();
    return a.kind == Atom::Kind::ExpGraph || (!a.lhs.contains_exp() && !a.rhs.contains_exp());
  }
  for (const auto& c : f.children())
    if (!term_free_of_exp(c)) return false;
  return true;
}

// Replaces every exp(t) by a fresh witness, recording the defining
// constraints. Equal (rewritten) arguments share one witness.
class ExpLifter {
 public:
  explicit ExpLifter(std::uint32_t next_witness) : next_(next_witness) {}

  Term lift(const Term& t) {
    switch (t.kind()) {
      case Term::Kind::Var:
      case Term::Kind::Const:
      case Term::Kind::Sqrt: return t;
      case Term::Kind::Exp: {
        VarRef v = argument_var(lift(t.arg()));
        for (const auto& [arg, u] : lifted_)
          if (arg == v) return Term::var(u);
        VarRef u = fresh();
        lifted_.emplace_back(v, u);
        constraints_.push_back(Formula::exp_graph(u, v));
        definitions_.push_back({u.index, Term::exp(Term::var(v))});
        return Term::var(u);
      }
      case Term::Kind::Sum:
      case Term::Kind::Product: {
        if (!t.contains_exp()) return t;
        std::vector<Term> args;
        for (const auto& a : t.args()) args.push_back(lift(a));
        return t.kind() == Term::Kind::Sum ? Term::sum(std::move(args)) : Term::product(std::move(args));
      }
    }
    return t;
  }

  Formula lift(const Formula& f) {
    switch (f.kind()) {
      case Formula::Kind::Atom: {
        const auto& a = f.atom();
        if (a.kind == Atom::Kind::ExpGraph || (!a.lhs.contains_exp() && !a.rhs.contains_exp())) return f;
        // `z = exp(t)` keeps z as the exp-graph target.
        if (a.rel == Relation::Eq) {
          const Term* var_side = nullptr;
          const Term* exp_side = nullptr;
          if (a.lhs.is_var() && a.rhs.kind() == Term::Kind::Exp) var_side = &a.lhs, exp_side = &a.rhs;
          if (a.rhs.is_var() && a.lhs.kind() == Term::Kind::Exp) var_side = &a.rhs, exp_side = &a.lhs;
          if (var_side) {
            VarRef v = argument_var(lift(exp_side->arg()));
            return Formula::exp_graph(var_side->var_ref(), v);
          }
        }
        return Formula::compare(lift(a.lhs), a.rel, lift(a.rhs));
      }
      case Formula::Kind::Not: return Formula::negation(lift(f.body()));
      case Formula::Kind::And:
      case Formula::Kind::Or: {
        std::vector<Formula> parts;
        for (const auto& c : f.children()) parts.push_back(lift(c));
        return f.kind() == Formula::Kind::And ? Formula::conjunction(std::move(parts))
                                              : Formula::disjunction(std::move(parts));
      }
      default: throw std::logic_error("quantifier below the existential prefix");
    }
  }

  std::vector<Formula>& constraints() { return constraints_; }
  std::vector<WitnessDefinition>& definitions() { return definitions_; }
  std::vector<std::uint32_t> introduced() const {
    std::vector<std::uint32_t> out;
    for (const auto& d : definitions_) out.push_back(d.witness);
    return out;
  }

 private:
  VarRef fresh() { return VarRef{Block::W, next_++}; }

  // A variable standing for `t`: t itself when already a variable, else a
  // fresh witness v with v = t. Equal terms share a witness.
  VarRef argument_var(const Term& t) {
    if (t.is_var()) return t.var_ref();
    for (const auto& [term, v] : named_)
      if (term == t) return v;
    VarRef v = fresh();
    named_.emplace_back(t, v);
    constraints_.push_back(Formula::compare(Term::var(v), Relation::Eq, t));
    definitions_.push_back({v.index, t});
    return v;
  }

  std::uint32_t next_;
  std::vector<std::pair<VarRef, VarRef>> lifted_;
  std::vector<std::pair<Term, VarRef>> named_;
  std::vector<Formula> constraints_;
  std::vector<WitnessDefinition> definitions_;
};

std::uint32_t term_degree(const Term& t) {
  switch (t.kind()) {
    case Term::Kind::Var: return t.var_ref().block == Block::A ? 0 : 1;
    case Term::Kind::Const:
    case Term::Kind::Sqrt:
    case Term::Kind::Exp: return 0;
    case Term::Kind::Sum: {
      std::uint32_t d = 0;
      for (const auto& a : t.args()) d = std::max(d, term_degree(a));
      return d;
    }
    case Term::Kind::Product: {
      std::uint32_t d = 0;
      for (const auto& a : t.args()) d += term_degree(a);
      return d;
    }
  }
  return 0;
}

void count_atoms(const Formula& f, ComplexityProfile& p) {
  if (f.kind() == Formula::Kind::Atom) {
    const auto& a = f.atom();
    if (a.kind == Atom::Kind::ExpGraph) {
      ++p.exp_atoms;
    } else {
      ++p.poly_atoms;
      auto d = std::max(term_degree(a.lhs), term_degree(a.rhs));
      p.degree += d;
      p.max_poly_degree = std::max(p.max_poly_degree, d);
    }
    return;
  }
  for (const auto& c : f.children()) count_atoms(c, p);
}

}  // namespace

bool is_graph_form(const Formula& f) {
  return classify_fragment(f) != Fragment::General && term_free_of_exp(f);
}

GraphForm to_graph_form(const Formula& f) {
  if (classify_fragment(f) == Fragment::General) throw std::invalid_argument("graph form requires an existential formula");
  if (term_free_of_exp(f)) return {f, {}};

  auto [witnesses, body] = strip_exists(f);
  ExpLifter lifter(block_dims(f).w);
  Formula lifted = lifter.lift(body);

  std::vector<Formula> parts = lifter.constraints();
  if (lifted.kind() == Formula::Kind::And) {
    for (const auto& c : lifted.children()) parts.push_back(c);
  } else {
    parts.push_back(lifted);
  }
  for (auto w : lifter.introduced()) witnesses.push_back(w);
  Formula out = Formula::exists(std::move(witnesses), Formula::conjunction(std::move(parts)));
  return {out, std::move(lifter.definitions())};
}

std::uint32_t degree(const Term& t) { return term_degree(t); }

ComplexityProfile complexity(const Formula& f, std::optional<BlockDims> declared) {
  if (!is_graph_form(f)) throw std::invalid_argument("complexity requires graph form (call to_graph_form first)");
  auto [witnesses, body] = strip_exists(f);
  ComplexityProfile p;
  std::set<std::uint32_t> distinct(witnesses.begin(), witnesses.end());
  p.witness_dim = static_cast<std::uint32_t>(distinct.size());
  p.free_count = static_cast<std::uint32_t>(free_variables(f).size());
  count_atoms(body, p);
  BlockDims dims = declared ? *declared : block_dims(f);
  p.input_dim = dims.x;
  p.param_dim = dims.a;
  p.format = p.free_count + p.witness_dim + p.exp_atoms;
  p.degree += p.exp_atoms;
  return p;
}

// ---- JSON ------------------------------------------------------------------

nlohmann::json to_json(const Term& t) {
  using nlohmann::json;
  switch (t.kind()) {
    case Term::Kind::Var: return json{{"var", to_string(t.var_ref())}};
    case Term::Kind::Const: return json{{"const", to_string(t.value())}};
    case Term::Kind::Sqrt: return json{{"sqrt", to_string(t.value())}};
    case Term::Kind::Exp: return json{{"exp", to_json(t.arg())}};
    case Term::Kind::Sum:
    case Term::Kind::Product: {
      json args = json::array();
      for (const auto& a : t.args()) args.push_back(to_json(a));
      return json{{t.kind() == Term::Kind::Sum ? "+" : "*", args}};
    }
  }
  return nullptr;
}

nlohmann::json to_json(const Formula& f) {
  using nlohmann::json;
  switch (f.kind()) {
    case Formula::Kind::Atom: {
      const auto& a = f.atom();
      if (a.kind == Atom::Kind::ExpGraph)
        return json{{"exp_graph", {to_string(a.exp_lhs), to_string(a.exp_rhs)}}};
      return json{{"rel", std::string(to_string(a.rel))}, {"lhs", to_json(a.lhs)}, {"rhs", to_json(a.rhs)}};
    }
    case Formula::Kind::Not: return json{{"not", to_json(f.body())}};
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      json parts = json::array();
      for (const auto& c : f.children()) parts.push_back(to_json(c));
      return json{{f.kind() == Formula::Kind::And ? "and" : "or", parts}};
    }
    case Formula::Kind::Exists:
    case Formula::Kind::ForAll: {
      json bound = json::array();
      for (auto w : f.bound()) bound.push_back("w" + std::to_string(w));
      return json{{f.kind() == Formula::Kind::Exists ? "exists" : "forall", bound}, {"body", to_json(f.body())}};
    }
  }
  return nullptr;
}

nlohmann::json to_json(const ComplexityProfile& p) {
  return nlohmann::json{{"format", p.format},         {"degree", p.degree},
                        {"input_dim", p.input_dim},   {"param_dim", p.param_dim},
                        {"witness_dim", p.witness_dim}, {"exp_atoms", p.exp_atoms},
                        {"free_count", p.free_count}, {"poly_atoms", p.poly_atoms},
                        {"max_poly_degree", p.max_poly_degree}};
}

}  // namespace stratdef
