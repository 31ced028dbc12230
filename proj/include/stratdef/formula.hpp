#ifndef STRATDEF_FORMULA_HPP
#define STRATDEF_FORMULA_HPP

// First-order formulas over the reals with exponentiation.
//
// Variables live in four fixed blocks: X (inputs), A (parameters), Y (the
// target point of a neighborhood relation) and W (witnesses, the only block
// that may be quantified). Formulas and terms are immutable values backed by
// shared nodes, so copies are cheap and safe to share across threads.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "stratdef/numeric.hpp"

namespace stratdef {

enum class Block : std::uint8_t { X, A, Y, W };

struct VarRef {
  Block block = Block::X;
  std::uint32_t index = 0;

  auto operator<=>(const VarRef&) const = default;
};

std::string to_string(VarRef v);
char block_letter(Block b);

enum class Relation : std::uint8_t { Lt, Le, Eq, Ge, Gt };

std::string_view to_string(Relation r);
Relation negate(Relation r);  // Lt <-> Ge, Le <-> Gt; Eq has no single negation
Relation flip(Relation r);    // l R r  <=>  r flip(R) l

class Term {
 public:
  enum class Kind : std::uint8_t { Var, Const, Sqrt, Sum, Product, Exp };

  static Term var(VarRef v);
  static Term var(Block b, std::uint32_t index) { return var(VarRef{b, index}); }
  static Term constant(Rational value);
  static Term constant(long value) { return constant(Rational(value)); }
  // Named symbolic constant sqrt(c) for rational c >= 0; evaluated through
  // certified enclosures.
  static Term sqrt_of(Rational radicand);
  static Term sum(std::vector<Term> args);
  static Term product(std::vector<Term> args);
  static Term exp(Term arg);

  Kind kind() const;
  const VarRef& var_ref() const;      // Var
  const Rational& value() const;      // Const, Sqrt (radicand)
  std::span<const Term> args() const; // Sum, Product, Exp (single arg)
  const Term& arg() const;            // Exp

  bool is_var() const { return kind() == Kind::Var; }
  bool contains_exp() const;
  bool contains_sqrt() const;

  friend bool operator==(const Term& a, const Term& b);

 private:
  struct Node;
  explicit Term(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static Term compound(Kind kind, std::vector<Term> args);
  std::shared_ptr<const Node> node_;
};

// Building helpers. Sums and products flatten nested sums/products so that
// printed forms re-parse to identical trees.
Term operator+(const Term& a, const Term& b);
Term operator-(const Term& a, const Term& b);
Term operator*(const Term& a, const Term& b);
Term operator-(const Term& a);

namespace vars {
inline Term x(std::uint32_t i) { return Term::var(Block::X, i); }
inline Term a(std::uint32_t i) { return Term::var(Block::A, i); }
inline Term y(std::uint32_t i) { return Term::var(Block::Y, i); }
inline Term w(std::uint32_t i) { return Term::var(Block::W, i); }
inline Term c(const Rational& q) { return Term::constant(q); }
inline Term c(long q) { return Term::constant(q); }
}  // namespace vars

struct Atom {
  enum class Kind : std::uint8_t { Compare, ExpGraph };

  Kind kind = Kind::Compare;
  // Compare
  Term lhs = Term::constant(0);
  Relation rel = Relation::Eq;
  Term rhs = Term::constant(0);
  // ExpGraph: exp_lhs = exp(exp_rhs)
  VarRef exp_lhs{};
  VarRef exp_rhs{};

  friend bool operator==(const Atom& a, const Atom& b);
};

class Formula {
 public:
  enum class Kind : std::uint8_t { Atom, Not, And, Or, Exists, ForAll };

  static Formula atom(Atom a);
  // Comparison atom; `v = exp(u)` with both sides variables becomes an
  // exp-graph atom.
  static Formula compare(Term lhs, Relation rel, Term rhs);
  static Formula exp_graph(VarRef lhs, VarRef rhs);
  static Formula negation(Formula f);
  static Formula conjunction(std::vector<Formula> parts);
  static Formula disjunction(std::vector<Formula> parts);
  static Formula exists(std::vector<std::uint32_t> witnesses, Formula body);
  static Formula forall(std::vector<std::uint32_t> witnesses, Formula body);
  static Formula truth() { return conjunction({}); }
  static Formula falsity() { return disjunction({}); }

  Kind kind() const;
  const Atom& atom() const;                  // Atom
  std::span<const Formula> children() const; // Not (one), And, Or, quantifiers (one)
  const Formula& body() const;               // Not, Exists, ForAll
  std::span<const std::uint32_t> bound() const;  // Exists, ForAll

  bool is_quantifier() const { return kind() == Kind::Exists || kind() == Kind::ForAll; }

  friend bool operator==(const Formula& a, const Formula& b);

 private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

// Comparison shorthands.
inline Formula operator<(const Term& l, const Term& r) { return Formula::compare(l, Relation::Lt, r); }
inline Formula operator<=(const Term& l, const Term& r) { return Formula::compare(l, Relation::Le, r); }
inline Formula operator>(const Term& l, const Term& r) { return Formula::compare(l, Relation::Gt, r); }
inline Formula operator>=(const Term& l, const Term& r) { return Formula::compare(l, Relation::Ge, r); }
inline Formula eq(const Term& l, const Term& r) { return Formula::compare(l, Relation::Eq, r); }
Formula operator&&(const Formula& a, const Formula& b);
Formula operator||(const Formula& a, const Formula& b);
Formula operator!(const Formula& f);

// ---- text ------------------------------------------------------------------

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, std::size_t line, std::size_t column);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

Formula parse_formula(std::string_view text);
Term parse_term(std::string_view text);
std::string print(const Formula& f);
std::string print(const Term& t);

// ---- structure -------------------------------------------------------------

enum class Fragment : std::uint8_t { QuantifierFree, Existential, General };
std::string_view to_string(Fragment f);

Fragment classify_fragment(const Formula& f);

struct BlockDims {
  std::uint32_t x = 0, a = 0, y = 0, w = 0;
  auto operator<=>(const BlockDims&) const = default;
};

// max index + 1 per block over every occurrence (free or bound).
BlockDims block_dims(const Formula& f);
std::set<VarRef> free_variables(const Formula& f);
std::set<VarRef> variables(const Term& t);
bool contains_exp(const Formula& f);

// Outermost existential prefix (possibly empty) and the remaining body.
struct Prenex {
  std::vector<std::uint32_t> witnesses;
  Formula body;
};
Prenex strip_exists(const Formula& f);

// Simultaneous substitution of free variables (bound witnesses untouched).
Term substitute(const Term& t, const std::map<VarRef, Term>& sub);
Formula substitute(const Formula& f, const std::map<VarRef, Term>& sub);
// Renames W variables (free and bound) through `mapping`; unmapped indices
// are kept.
Formula rename_witnesses(const Formula& f, const std::map<std::uint32_t, std::uint32_t>& mapping);

// ---- graph form and complexity --------------------------------------------

// A witness introduced by graph-form conversion, defined as a function of
// previously available variables: w_index := value.
struct WitnessDefinition {
  std::uint32_t witness;
  Term value;
};

struct GraphForm {
  Formula formula;
  std::vector<WitnessDefinition> definitions;  // in dependency order
};

bool is_graph_form(const Formula& f);
GraphForm to_graph_form(const Formula& f);

struct ComplexityProfile {
  std::uint32_t format = 0;        // F = n + f + r
  std::uint32_t degree = 0;        // D = sum of polynomial degrees + r
  std::uint32_t input_dim = 0;     // l
  std::uint32_t param_dim = 0;     // k
  std::uint32_t witness_dim = 0;   // f
  std::uint32_t exp_atoms = 0;     // r
  std::uint32_t free_count = 0;    // n
  std::uint32_t poly_atoms = 0;    // s
  std::uint32_t max_poly_degree = 0;

  friend bool operator==(const ComplexityProfile&, const ComplexityProfile&) = default;
};

// Polynomial degree counts X, Y and W variables; A variables are
// coefficients and contribute degree 0.
std::uint32_t degree(const Term& t);

// Requires graph form. `declared` overrides the inferred block sizes.
ComplexityProfile complexity(const Formula& f, std::optional<BlockDims> declared = std::nullopt);

// ---- JSON ------------------------------------------------------------------

nlohmann::json to_json(const Term& t);
nlohmann::json to_json(const Formula& f);
nlohmann::json to_json(const ComplexityProfile& p);

}  // namespace stratdef

#endif  // STRATDEF_FORMULA_HPP
