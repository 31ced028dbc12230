#include "stratdef/formula.hpp"

#include <algorithm>
#include <utility>

namespace stratdef {

// ---- variables and relations ----------------------------------------------

char block_letter(Block b) {
  switch (b) {
    case Block::X: return 'x';
    case Block::A: return 'a';
    case Block::Y: return 'y';
    case Block::W: return 'w';
  }
  return '?';
}

std::string to_string(VarRef v) { return block_letter(v.block) + std::to_string(v.index); }

std::string_view to_string(Relation r) {
  switch (r) {
    case Relation::Lt: return "<";
    case Relation::Le: return "<=";
    case Relation::Eq: return "=";
    case Relation::Ge: return ">=";
    case Relation::Gt: return ">";
  }
  return "?";
}

Relation negate(Relation r) {
  switch (r) {
    case Relation::Lt: return Relation::Ge;
    case Relation::Le: return Relation::Gt;
    case Relation::Ge: return Relation::Lt;
    case Relation::Gt: return Relation::Le;
    case Relation::Eq: break;
  }
  throw std::logic_error("equality has no single-relation negation");
}

Relation flip(Relation r) {
  switch (r) {
    case Relation::Lt: return Relation::Gt;
    case Relation::Le: return Relation::Ge;
    case Relation::Ge: return Relation::Le;
    case Relation::Gt: return Relation::Lt;
    case Relation::Eq: return Relation::Eq;
  }
  return r;
}

// ---- terms -----------------------------------------------------------------

struct Term::Node {
  Kind kind;
  VarRef var{};
  Rational value{0};
  std::vector<Term> args;
  bool has_exp = false;
  bool has_sqrt = false;
};

Term Term::var(VarRef v) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Var;
  n->var = v;
  return Term(std::move(n));
}

Term Term::constant(Rational value) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Const;
  n->value = std::move(value);
  return Term(std::move(n));
}

Term Term::sqrt_of(Rational radicand) {
  if (radicand < 0) throw std::invalid_argument("sqrt of a negative constant");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Sqrt;
  n->value = std::move(radicand);
  n->has_sqrt = true;
  return Term(std::move(n));
}

Term Term::compound(Kind kind, std::vector<Term> args) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->has_exp = kind == Kind::Exp;
  for (const auto& a : args) {
    n->has_exp = n->has_exp || a.contains_exp();
    n->has_sqrt = n->has_sqrt || a.contains_sqrt();
  }
  n->args = std::move(args);
  return Term(std::move(n));
}

Term Term::sum(std::vector<Term> args) { return compound(Kind::Sum, std::move(args)); }
Term Term::product(std::vector<Term> args) { return compound(Kind::Product, std::move(args)); }
Term Term::exp(Term arg) { return compound(Kind::Exp, {std::move(arg)}); }

Term::Kind Term::kind() const { return node_->kind; }

const VarRef& Term::var_ref() const {
  if (node_->kind != Kind::Var) throw std::logic_error("term is not a variable");
  return node_->var;
}

const Rational& Term::value() const {
  if (node_->kind != Kind::Const && node_->kind != Kind::Sqrt) throw std::logic_error("term is not a constant");
  return node_->value;
}

std::span<const Term> Term::args() const { return node_->args; }

const Term& Term::arg() const {
  if (node_->kind != Kind::Exp) throw std::logic_error("term is not an exponential");
  return node_->args.front();
}

bool Term::contains_exp() const { return node_->has_exp; }
bool Term::contains_sqrt() const { return node_->has_sqrt; }

bool operator==(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Term::Kind::Var: return a.var_ref() == b.var_ref();
    case Term::Kind::Const:
    case Term::Kind::Sqrt: return a.value() == b.value();
    default: break;
  }
  auto aa = a.args(), bb = b.args();
  return std::equal(aa.begin(), aa.end(), bb.begin(), bb.end());
}

namespace {
void append_flat(std::vector<Term>& out, const Term& t, Term::Kind kind) {
  if (t.kind() == kind) {
    for (const auto& a : t.args()) out.push_back(a);
  } else {
    out.push_back(t);
  }
}
}  // namespace

Term operator+(const Term& a, const Term& b) {
  std::vector<Term> args;
  append_flat(args, a, Term::Kind::Sum);
  append_flat(args, b, Term::Kind::Sum);
  return Term::sum(std::move(args));
}

Term operator*(const Term& a, const Term& b) {
  std::vector<Term> args;
  append_flat(args, a, Term::Kind::Product);
  append_flat(args, b, Term::Kind::Product);
  return Term::product(std::move(args));
}

Term operator-(const Term& a) {
  if (a.kind() == Term::Kind::Const) return Term::constant(-a.value());
  return Term::constant(-1) * a;
}

Term operator-(const Term& a, const Term& b) { return a + (-b); }

// ---- atoms and formulas -------------------------------------------------------

bool operator==(const Atom& a, const Atom& b) {
  if (a.kind != b.kind) return false;
  if (a.kind == Atom::Kind::ExpGraph) return a.exp_lhs == b.exp_lhs && a.exp_rhs == b.exp_rhs;
  return a.rel == b.rel && a.lhs == b.lhs && a.rhs == b.rhs;
}

struct Formula::Node {
  Kind kind;
  Atom atom;
  std::vector<Formula> children;
  std::vector<std::uint32_t> bound;
};

Formula Formula::atom(Atom a) {
  if (a.kind == Atom::Kind::Compare && a.rel == Relation::Eq && a.lhs.is_var() &&
      a.rhs.kind() == Term::Kind::Exp && a.rhs.arg().is_var()) {
    return exp_graph(a.lhs.var_ref(), a.rhs.arg().var_ref());
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::Atom;
  n->atom = std::move(a);
  return Formula(std::move(n));
}

Formula Formula::compare(Term lhs, Relation rel, Term rhs) {
  Atom a;
  a.kind = Atom::Kind::Compare;
  a.lhs = std::move(lhs);
  a.rel = rel;
  a.rhs = std::move(rhs);
  return atom(std::move(a));
}

Formula Formula::exp_graph(VarRef lhs, VarRef rhs) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Atom;
  n->atom.kind = Atom::Kind::ExpGraph;
  n->atom.exp_lhs = lhs;
  n->atom.exp_rhs = rhs;
  return Formula(std::move(n));
}

Formula Formula::negation(Formula f) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Not;
  n->children.push_back(std::move(f));
  return Formula(std::move(n));
}

Formula Formula::conjunction(std::vector<Formula> parts) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::And;
  n->children = std::move(parts);
  return Formula(std::move(n));
}

Formula Formula::disjunction(std::vector<Formula> parts) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Or;
  n->children = std::move(parts);
  return Formula(std::move(n));
}

Formula Formula::exists(std::vector<std::uint32_t> witnesses, Formula body) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Exists;
  n->bound = std::move(witnesses);
  n->children.push_back(std::move(body));
  return Formula(std::move(n));
}

Formula Formula::forall(std::vector<std::uint32_t> witnesses, Formula body) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::ForAll;
  n->bound = std::move(witnesses);
  n->children.push_back(std::move(body));
  return Formula(std::move(n));
}

Formula::Kind Formula::kind() const { return node_->kind; }

const Atom& Formula::atom() const {
  if (node_->kind != Kind::Atom) throw std::logic_error("formula is not an atom");
  return node_->atom;
}

std::span<const Formula> Formula::children() const { return node_->children; }

const Formula& Formula::body() const {
  if (node_->children.size() != 1 || node_->kind == Kind::And || node_->kind == Kind::Or)
    throw std::logic_error("formula has no single body");
  return node_->children.front();
}

std::span<const std::uint32_t> Formula::bound() const { return node_->bound; }

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  if (a.kind() == Formula::Kind::Atom) return a.atom() == b.atom();
  auto ab = a.bound(), bb = b.bound();
  if (!std::equal(ab.begin(), ab.end(), bb.begin(), bb.end())) return false;
  auto ac = a.children(), bc = b.children();
  return std::equal(ac.begin(), ac.end(), bc.begin(), bc.end());
}

Formula operator&&(const Formula& a, const Formula& b) {
  std::vector<Formula> parts;
  for (const auto* f : {&a, &b}) {
    if (f->kind() == Formula::Kind::And) {
      for (const auto& c : f->children()) parts.push_back(c);
    } else {
      parts.push_back(*f);
    }
  }
  return Formula::conjunction(std::move(parts));
}

Formula operator||(const Formula& a, const Formula& b) {
  std::vector<Formula> parts;
  for (const auto* f : {&a, &b}) {
    if (f->kind() == Formula::Kind::Or) {
      for (const auto& c : f->children()) parts.push_back(c);
    } else {
      parts.push_back(*f);
    }
  }
  return Formula::disjunction(std::move(parts));
}

Formula operator!(const Formula& f) { return Formula::negation(f); }

// ---- structure -------------------------------------------------------------------

std::string_view to_string(Fragment f) {
  switch (f) {
    case Fragment::QuantifierFree: return "quantifier-free";
    case Fragment::Existential: return "existential";
    case Fragment::General: return "general";
  }
  return "?";
}

namespace {

bool has_quantifier(const Formula& f) {
  if (f.is_quantifier()) return true;
  if (f.kind() == Formula::Kind::Atom) return false;
  for (const auto& c : f.children())
    if (has_quantifier(c)) return true;
  return false;
}

void collect_vars(const Term& t, std::set<VarRef>& out) {
  if (t.is_var()) {
    out.insert(t.var_ref());
    return;
  }
  for (const auto& a : t.args()) collect_vars(a, out);
}

void collect_atom_vars(const Atom& a, std::set<VarRef>& out) {
  if (a.kind == Atom::Kind::ExpGraph) {
    out.insert(a.exp_lhs);
    out.insert(a.exp_rhs);
  } else {
    collect_vars(a.lhs, out);
    collect_vars(a.rhs, out);
  }
}

void collect_free(const Formula& f, std::set<std::uint32_t>& bound_now, std::set<VarRef>& out) {
  switch (f.kind()) {
    case Formula::Kind::Atom: {
      std::set<VarRef> vs;
      collect_atom_vars(f.atom(), vs);
      for (const auto& v : vs)
        if (v.block != Block::W || !bound_now.contains(v.index)) out.insert(v);
      return;
    }
    case Formula::Kind::Exists:
    case Formula::Kind::ForAll: {
      std::vector<std::uint32_t> added;
      for (auto w : f.bound())
        if (bound_now.insert(w).second) added.push_back(w);
      collect_free(f.body(), bound_now, out);
      for (auto w : added) bound_now.erase(w);
      return;
    }
    default:
      for (const auto& c : f.children()) collect_free(c, bound_now, out);
  }
}

void update_dims(BlockDims& d, VarRef v) {
  auto bump = [&](std::uint32_t& n) { n = std::max(n, v.index + 1); };
  switch (v.block) {
    case Block::X: bump(d.x); break;
    case Block::A: bump(d.a); break;
    case Block::Y: bump(d.y); break;
    case Block::W: bump(d.w); break;
  }
}

void collect_dims(const Formula& f, BlockDims& d) {
  if (f.kind() == Formula::Kind::Atom) {
    std::set<VarRef> vs;
    collect_atom_vars(f.atom(), vs);
    for (const auto& v : vs) update_dims(d, v);
    return;
  }
  for (auto w : f.bound()) update_dims(d, VarRef{Block::W, w});
  for (const auto& c : f.children()) collect_dims(c, d);
}

}  // namespace

Fragment classify_fragment(const Formula& f) {
  if (!has_quantifier(f)) return Fragment::QuantifierFree;
  const Formula* cur = &f;
  while (cur->kind() == Formula::Kind::Exists) cur = &cur->body();
  return has_quantifier(*cur) ? Fragment::General : Fragment::Existential;
}

BlockDims block_dims(const Formula& f) {
  BlockDims d;
  collect_dims(f, d);
  return d;
}

std::set<VarRef> free_variables(const Formula& f) {
  std::set<std::uint32_t> bound_now;
  std::set<VarRef> out;
  collect_free(f, bound_now, out);
  return out;
}

std::set<VarRef> variables(const Term& t) {
  std::set<VarRef> out;
  collect_vars(t, out);
  return out;
}

bool contains_exp(const Formula& f) {
  if (f.kind() == Formula::Kind::Atom) {
    const auto& a = f.atom();
    return a.kind == Atom::Kind::ExpGraph || a.lhs.contains_exp() || a.rhs.contains_exp();
  }
  for (const auto& c : f.children())
    if (contains_exp(c)) return true;
  return false;
}

Prenex strip_exists(const Formula& f) {
  Prenex p{{}, f};
  while (p.body.kind() == Formula::Kind::Exists) {
    for (auto w : p.body.bound()) p.witnesses.push_back(w);
    Formula next = p.body.body();
    p.body = next;
  }
  return p;
}

Term substitute(const Term& t, const std::map<VarRef, Term>& sub) {
  switch (t.kind()) {
    case Term::Kind::Var: {
      auto it = sub.find(t.var_ref());
      return it == sub.end() ? t : it->second;
    }
    case Term::Kind::Const:
    case Term::Kind::Sqrt: return t;
    case Term::Kind::Exp: return Term::exp(substitute(t.arg(), sub));
    case Term::Kind::Sum:
    case Term::Kind::Product: {
      std::vector<Term> args;
      args.reserve(t.args().size());
      for (const auto& a : t.args()) args.push_back(substitute(a, sub));
      return t.kind() == Term::Kind::Sum ? Term::sum(std::move(args)) : Term::product(std::move(args));
    }
  }
  return t;
}

namespace {

Formula substitute_impl(const Formula& f, const std::map<VarRef, Term>& sub) {
  switch (f.kind()) {
    case Formula::Kind::Atom: {
      const auto& a = f.atom();
      if (a.kind == Atom::Kind::ExpGraph) {
        auto lhs = sub.find(a.exp_lhs);
        auto rhs = sub.find(a.exp_rhs);
        Term l = lhs == sub.end() ? Term::var(a.exp_lhs) : lhs->second;
        Term r = rhs == sub.end() ? Term::var(a.exp_rhs) : rhs->second;
        return Formula::compare(l, Relation::Eq, Term::exp(r));
      }
      return Formula::compare(substitute(a.lhs, sub), a.rel, substitute(a.rhs, sub));
    }
    case Formula::Kind::Not: return Formula::negation(substitute_impl(f.body(), sub));
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      std::vector<Formula> parts;
      for (const auto& c : f.children()) parts.push_back(substitute_impl(c, sub));
      return f.kind() == Formula::Kind::And ? Formula::conjunction(std::move(parts))
                                            : Formula::disjunction(std::move(parts));
    }
    case Formula::Kind::Exists:
    case Formula::Kind::ForAll: {
      auto inner = sub;
      for (auto w : f.bound()) inner.erase(VarRef{Block::W, w});
      std::vector<std::uint32_t> bound(f.bound().begin(), f.bound().end());
      Formula body = substitute_impl(f.body(), inner);
      return f.kind() == Formula::Kind::Exists ? Formula::exists(std::move(bound), body)
                                               : Formula::forall(std::move(bound), body);
    }
  }
  return f;
}

Term rename_term(const Term& t, const std::map<std::uint32_t, std::uint32_t>& m) {
  std::map<VarRef, Term> sub;
  for (const auto& v : variables(t))
    if (v.block == Block::W)
      if (auto it = m.find(v.index); it != m.end()) sub.emplace(v, Term::var(Block::W, it->second));
  return sub.empty() ? t : substitute(t, sub);
}

}  // namespace

Formula substitute(const Formula& f, const std::map<VarRef, Term>& sub) { return substitute_impl(f, sub); }

Formula rename_witnesses(const Formula& f, const std::map<std::uint32_t, std::uint32_t>& mapping) {
  auto ren = [&](VarRef v) {
    if (v.block != Block::W) return v;
    auto it = mapping.find(v.index);
    return it == mapping.end() ? v : VarRef{Block::W, it->second};
  };
  switch (f.kind()) {
    case Formula::Kind::Atom: {
      const auto& a = f.atom();
      if (a.kind == Atom::Kind::ExpGraph) return Formula::exp_graph(ren(a.exp_lhs), ren(a.exp_rhs));
      return Formula::compare(rename_term(a.lhs, mapping), a.rel, rename_term(a.rhs, mapping));
    }
    case Formula::Kind::Not: return Formula::negation(rename_witnesses(f.body(), mapping));
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      std::vector<Formula> parts;
      for (const auto& c : f.children()) parts.push_back(rename_witnesses(c, mapping));
      return f.kind() == Formula::Kind::And ? Formula::conjunction(std::move(parts))
                                            : Formula::disjunction(std::move(parts));
    }
    case Formula::Kind::Exists:
    case Formula::Kind::ForAll: {
      std::vector<std::uint32_t> bound;
      for (auto w : f.bound()) bound.push_back(ren(VarRef{Block::W, w}).index);
      Formula body = rename_witnesses(f.body(), mapping);
      return f.kind() == Formula::Kind::Exists ? Formula::exists(std::move(bound), body)
                                               : Formula::forall(std::move(bound), body);
    }
  }
  return f;
}

}  // namespace stratdef
