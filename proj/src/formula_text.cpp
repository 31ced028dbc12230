#include <cctype>
#include <set>
#include <sstream>

#include "stratdef/formula.hpp"

namespace stratdef {

ParseError::ParseError(const std::string& msg, std::size_t line, std::size_t column)
    : std::runtime_error(msg + " at line " + std::to_string(line) + ", column " + std::to_string(column)),
      line_(line),
      column_(column) {}

// ---- printing ----------------------------------------------------------------

namespace {

void print_term(const Term& t, std::ostream& os) {
  switch (t.kind()) {
    case Term::Kind::Var: os << to_string(t.var_ref()); return;
    case Term::Kind::Const: os << to_string(t.value()); return;
    case Term::Kind::Sqrt: os << "(sqrt " << to_string(t.value()) << ')'; return;
    case Term::Kind::Exp:
      os << "(exp ";
      print_term(t.arg(), os);
      os << ')';
      return;
    case Term::Kind::Sum:
    case Term::Kind::Product:
      os << '(' << (t.kind() == Term::Kind::Sum ? '+' : '*');
      for (const auto& a : t.args()) {
        os << ' ';
        print_term(a, os);
      }
      os << ')';
      return;
  }
}

void print_formula(const Formula& f, std::ostream& os) {
  switch (f.kind()) {
    case Formula::Kind::Atom: {
      const auto& a = f.atom();
      if (a.kind == Atom::Kind::ExpGraph) {
        os << "(= " << to_string(a.exp_lhs) << " (exp " << to_string(a.exp_rhs) << "))";
      } else {
        os << '(' << to_string(a.rel) << ' ';
        print_term(a.lhs, os);
        os << ' ';
        print_term(a.rhs, os);
        os << ')';
      }
      return;
    }
    case Formula::Kind::Not:
      os << "(not ";
      print_formula(f.body(), os);
      os << ')';
      return;
    case Formula::Kind::And:
    case Formula::Kind::Or:
      os << (f.kind() == Formula::Kind::And ? "(and" : "(or");
      for (const auto& c : f.children()) {
        os << ' ';
        print_formula(c, os);
      }
      os << ')';
      return;
    case Formula::Kind::Exists:
    case Formula::Kind::ForAll: {
      os << (f.kind() == Formula::Kind::Exists ? "(exists (" : "(forall (");
      bool first = true;
      for (auto w : f.bound()) {
        if (!first) os << ' ';
        first = false;
        os << 'w' << w;
      }
      os << ") ";
      print_formula(f.body(), os);
      os << ')';
      return;
    }
  }
}

}  // namespace

std::string print(const Term& t) {
  std::ostringstream os;
  print_term(t, os);
  return os.str();
}

std::string print(const Formula& f) {
  std::ostringstream os;
  print_formula(f, os);
  return os.str();
}

// ---- parsing -----------------------------------------------------------------

namespace {

struct Token {
  enum class Kind { Open, Close, Atom, End } kind;
  std::string text;
  std::size_t line;
  std::size_t column;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    skip_space();
    if (pos_ >= src_.size()) return {Token::Kind::End, "", line_, col_};
    std::size_t line = line_, col = col_;
    char c = src_[pos_];
    if (c == '(' || c == ')') {
      advance();
      return {c == '(' ? Token::Kind::Open : Token::Kind::Close, std::string(1, c), line, col};
    }
    std::string text;
    while (pos_ < src_.size() && !std::isspace(static_cast<unsigned char>(src_[pos_])) && src_[pos_] != '(' &&
           src_[pos_] != ')' && src_[pos_] != ';') {
      text.push_back(src_[pos_]);
      advance();
    }
    return {Token::Kind::Atom, std::move(text), line, col};
  }

 private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == ';') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

std::optional<VarRef> as_variable(const std::string& s) {
  if (s.size() < 2) return std::nullopt;
  Block b;
  switch (s[0]) {
    case 'x': b = Block::X; break;
    case 'a': b = Block::A; break;
    case 'y': b = Block::Y; break;
    case 'w': b = Block::W; break;
    default: return std::nullopt;
  }
  for (std::size_t i = 1; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return std::nullopt;
  if (s.size() > 10) return std::nullopt;
  return VarRef{b, static_cast<std::uint32_t>(std::stoul(s.substr(1)))};
}

bool looks_numeric(const std::string& s) {
  if (s.empty()) return false;
  char c = s[0];
  return std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.';
}

class Parser {
 public:
  explicit Parser(std::string_view src) : lex_(src) { tok_ = lex_.next(); }

  Formula formula_top() {
    Formula f = formula();
    expect_end();
    check_binding(f);
    return f;
  }

  Term term_top() {
    Term t = term();
    expect_end();
    return t;
  }

 private:
  [[noreturn]] void fail(const std::string& msg, const Token& at) const { throw ParseError(msg, at.line, at.column); }

  Token take() {
    Token t = tok_;
    tok_ = lex_.next();
    return t;
  }

  void expect_close() {
    if (tok_.kind != Token::Kind::Close) fail("expected ')'", tok_);
    take();
  }

  void expect_end() {
    if (tok_.kind != Token::Kind::End) fail("unexpected trailing input '" + tok_.text + "'", tok_);
  }

  Term term() {
    Token t = take();
    if (t.kind == Token::Kind::Atom) {
      if (auto v = as_variable(t.text)) {
        positions_.emplace(*v, t);
        return Term::var(*v);
      }
      if (looks_numeric(t.text)) {
        try {
          return Term::constant(parse_rational(t.text));
        } catch (const std::exception& e) {
          fail(e.what(), t);
        }
      }
      fail("unbound variable '" + t.text + "'", t);
    }
    if (t.kind != Token::Kind::Open) fail("expected a term", t);
    Token head = take();
    if (head.kind != Token::Kind::Atom) fail("expected a term operator", head);
    if (head.text == "+" || head.text == "*") {
      std::vector<Term> args;
      while (tok_.kind != Token::Kind::Close) {
        if (tok_.kind == Token::Kind::End) fail("unterminated term", tok_);
        args.push_back(term());
      }
      take();
      return head.text == "+" ? Term::sum(std::move(args)) : Term::product(std::move(args));
    }
    if (head.text == "exp") {
      Term arg = term();
      expect_close();
      return Term::exp(arg);
    }
    if (head.text == "sqrt") {
      Token lit = take();
      if (lit.kind != Token::Kind::Atom || !looks_numeric(lit.text)) fail("sqrt expects a rational literal", lit);
      Rational c;
      try {
        c = parse_rational(lit.text);
      } catch (const std::exception& e) {
        fail(e.what(), lit);
      }
      if (c < 0) fail("sqrt of a negative constant", lit);
      expect_close();
      return Term::sqrt_of(c);
    }
    fail("unknown term operator '" + head.text + "'", head);
  }

  std::optional<Relation> relation(const std::string& s) {
    if (s == "<") return Relation::Lt;
    if (s == "<=") return Relation::Le;
    if (s == "=") return Relation::Eq;
    if (s == ">=") return Relation::Ge;
    if (s == ">") return Relation::Gt;
    return std::nullopt;
  }

  Formula formula() {
    Token open = take();
    if (open.kind != Token::Kind::Open) fail("expected '(' to start a formula", open);
    Token head = take();
    if (head.kind != Token::Kind::Atom) fail("expected a formula operator", head);
    if (auto rel = relation(head.text)) {
      Term l = term();
      Term r = term();
      if (tok_.kind != Token::Kind::Close) fail("comparison takes exactly two terms (chains are not allowed)", tok_);
      take();
      return Formula::compare(l, *rel, r);
    }
    if (head.text == "and" || head.text == "or") {
      std::vector<Formula> parts;
      while (tok_.kind != Token::Kind::Close) {
        if (tok_.kind == Token::Kind::End) fail("unterminated connective", tok_);
        parts.push_back(formula());
      }
      take();
      return head.text == "and" ? Formula::conjunction(std::move(parts)) : Formula::disjunction(std::move(parts));
    }
    if (head.text == "not") {
      Formula f = formula();
      expect_close();
      return Formula::negation(f);
    }
    if (head.text == "exists" || head.text == "forall") {
      Token lp = take();
      if (lp.kind != Token::Kind::Open) fail("expected '(' before the bound variable list", lp);
      std::vector<std::uint32_t> bound;
      while (tok_.kind != Token::Kind::Close) {
        Token v = take();
        if (v.kind != Token::Kind::Atom) fail("expected a bound variable", v);
        auto ref = as_variable(v.text);
        if (!ref) fail("unbound variable '" + v.text + "'", v);
        if (ref->block != Block::W)
          fail("block misuse: only witness variables w<i> may be quantified, got '" + v.text + "'", v);
        for (auto b : bound)
          if (b == ref->index) fail("block misuse: '" + v.text + "' bound twice", v);
        bound.push_back(ref->index);
        binder_pos_.emplace(ref->index, v);
      }
      take();
      Formula body = formula();
      expect_close();
      return head.text == "exists" ? Formula::exists(std::move(bound), body) : Formula::forall(std::move(bound), body);
    }
    fail("unknown formula operator '" + head.text + "'", head);
  }

  // Quantified formulas must bind every witness they use, and may not
  // re-bind a witness already in scope. Quantifier-free input may mention
  // free witnesses (the body of a graph-form formula).
  void check_binding(const Formula& f) {
    if (classify_fragment(f) == Fragment::QuantifierFree) return;
    std::set<std::uint32_t> scope;
    walk(f, scope);
    for (const auto& v : free_variables(f)) {
      if (v.block == Block::W) {
        auto it = positions_.find(v);
        const Token& at = it != positions_.end() ? it->second : tok_;
        fail("unbound variable '" + to_string(v) + "'", at);
      }
    }
  }

  void walk(const Formula& f, std::set<std::uint32_t>& scope) {
    if (f.is_quantifier()) {
      for (auto w : f.bound()) {
        if (scope.contains(w)) {
          auto it = binder_pos_.find(w);
          const Token& at = it != binder_pos_.end() ? it->second : tok_;
          fail("block misuse: w" + std::to_string(w) + " re-bound inside its own scope", at);
        }
      }
      for (auto w : f.bound()) scope.insert(w);
      walk(f.body(), scope);
      for (auto w : f.bound()) scope.erase(w);
      return;
    }
    if (f.kind() == Formula::Kind::Atom) return;
    for (const auto& c : f.children()) walk(c, scope);
  }

  Lexer lex_;
  Token tok_;
  std::map<VarRef, Token> positions_;
  std::multimap<std::uint32_t, Token> binder_pos_;
};

}  // namespace

Formula parse_formula(std::string_view text) { return Parser(text).formula_top(); }
Term parse_term(std::string_view text) { return Parser(text).term_top(); }

}  // namespace stratdef
