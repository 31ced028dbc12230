#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "generators.hpp"
#include "stratdef/eval.hpp"
#include "stratdef/linear.hpp"
#include "stratdef/witness.hpp"

using namespace stratdef;

namespace {

Assignment assign(std::vector<Rational> x, std::vector<Rational> a = {}, std::vector<Rational> y = {},
                  std::vector<Rational> w = {}) {
  Assignment s;
  s.x = std::move(x), s.a = std::move(a), s.y = std::move(y), s.w = std::move(w);
  return s;
}

Rational quarter(int v) {
  Rational q(v, 4);
  q.canonicalize();
  return q;
}

// Exact decision of  exists t:  rows  (c_i t + r_i  rel  0)  by interval
// intersection; used when one variable is eliminated.
bool one_var_feasible(const std::vector<std::pair<Rational, Rational>>& rows, const std::vector<Relation>& rels) {
  std::optional<Rational> lo, hi;
  bool lo_strict = false, hi_strict = false;
  std::optional<Rational> fixed;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto [c, r] = rows[i];
    Relation rel = rels[i];
    if (c == 0) {
      if (rel == Relation::Eq && r != 0) return false;
      if (rel == Relation::Le && r > 0) return false;
      if (rel == Relation::Lt && r >= 0) return false;
      continue;
    }
    Rational t = -r / c;
    if (rel == Relation::Eq) {
      if (fixed && *fixed != t) return false;
      fixed = t;
      continue;
    }
    bool strict = rel == Relation::Lt;
    if (c > 0) {  // t <= bound
      if (!hi || t < *hi || (t == *hi && strict)) hi = t, hi_strict = strict;
    } else {
      if (!lo || t > *lo || (t == *lo && strict)) lo = t, lo_strict = strict;
    }
  }
  auto ok = [&](const Rational& t) {
    if (lo && (t < *lo || (t == *lo && lo_strict))) return false;
    if (hi && (t > *hi || (t == *hi && hi_strict))) return false;
    return true;
  };
  if (fixed) return ok(*fixed);
  if (!lo || !hi) return true;
  return *lo < *hi || (*lo == *hi && !lo_strict && !hi_strict);
}

LinearSystem random_system(std::mt19937_64& rng, std::size_t nvars) {
  LinearSystem sys;
  for (std::size_t j = 0; j < nvars; ++j) sys.variables.push_back("v" + std::to_string(j));
  std::uniform_int_distribution<int> coef(-3, 3), rows(1, 8), rel(0, 9);
  int m = rows(rng);
  for (int i = 0; i < m; ++i) {
    LinearConstraint c;
    for (std::size_t j = 0; j < nvars; ++j) c.coeffs.push_back(Rational(coef(rng)));
    int r = rel(rng);
    c.rel = r < 4 ? Relation::Le : r < 6 ? Relation::Lt : r < 8 ? Relation::Ge : r < 9 ? Relation::Gt : Relation::Eq;
    c.rhs = Rational(coef(rng));
    sys.constraints.push_back(std::move(c));
  }
  return sys;
}

// Exhaustive vertex enumeration for  min c.x  s.t. rows (<=), x >= 0.
std::optional<Rational> best_vertex(const std::vector<Rational>& cost, std::vector<std::vector<Rational>> a,
                                    std::vector<Rational> b) {
  const std::size_t n = cost.size();
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<Rational> row(n, Rational(0));
    row[j] = -1;
    a.push_back(row);
    b.push_back(0);
  }
  const std::size_t m = a.size();
  std::optional<Rational> best;
  std::vector<std::size_t> pick(n);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t k, std::size_t from) {
    if (k == n) {
      std::vector<std::vector<Rational>> mat;
      for (auto i : pick) {
        auto row = a[i];
        row.push_back(b[i]);
        mat.push_back(row);
      }
      for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        while (p < n && mat[p][c] == 0) ++p;
        if (p == n) return;
        std::swap(mat[p], mat[c]);
        for (std::size_t r = 0; r < n; ++r) {
          if (r == c || mat[r][c] == 0) continue;
          Rational f = mat[r][c] / mat[c][c];
          for (std::size_t q = c; q <= n; ++q) mat[r][q] -= f * mat[c][q];
        }
      }
      std::vector<Rational> x(n);
      for (std::size_t c = 0; c < n; ++c) x[c] = mat[c][n] / mat[c][c];
      for (std::size_t i = 0; i < m; ++i) {
        Rational s = 0;
        for (std::size_t j = 0; j < n; ++j) s += a[i][j] * x[j];
        if (s > b[i]) return;
      }
      Rational v = 0;
      for (std::size_t j = 0; j < n; ++j) v += cost[j] * x[j];
      if (!best || v < *best) best = v;
      return;
    }
    for (std::size_t i = from; i < m; ++i) {
      pick[k] = i;
      rec(k + 1, i + 1);
    }
  };
  rec(0, 0);
  return best;
}

LPInstance emd(const std::vector<Rational>& x, const std::vector<Rational>& y,
               const std::vector<std::vector<Rational>>& rho) {
  const std::size_t l = x.size();
  LPInstance lp;
  for (std::size_t i = 0; i < l; ++i)
    for (std::size_t j = 0; j < l; ++j) lp.objective.push_back(rho[i][j]);
  lp.lower.assign(l * l, Rational(0));
  for (std::size_t i = 0; i < l; ++i) {
    std::vector<Rational> row(l * l, Rational(0)), col(l * l, Rational(0));
    for (std::size_t j = 0; j < l; ++j) row[i * l + j] = 1, col[j * l + i] = 1;
    lp.matrix.push_back(row), lp.relations.push_back(Relation::Eq), lp.rhs.push_back(x[i]);
    lp.matrix.push_back(col), lp.relations.push_back(Relation::Eq), lp.rhs.push_back(y[i]);
  }
  return lp;
}

}  // namespace

TEST_CASE("eval_qf on direct arithmetic") {
  CHECK(eval_qf(parse_formula("(>= (+ (* a0 x0) (* a1 x1)) a2)"), assign({1, 0}, {1, 1, 1})));
  auto ball = parse_formula("(<= (+ (* (+ x0 (* -1 y0)) (+ x0 (* -1 y0))) (* (+ x1 (* -1 y1)) (+ x1 (* -1 y1)))) 1)");
  CHECK_FALSE(eval_qf(ball, assign({0, 0}, {}, {1, 1})));
  CHECK(eval_qf(parse_formula("(= w0 (exp w1))"), assign({}, {}, {}, {1, 0})));
  CHECK_FALSE(eval_qf(parse_formula("(= w0 (exp w1))"), assign({}, {}, {}, {3, 1})));
}

TEST_CASE("eval_qf decides irrational comparisons by refinement") {
  CHECK(eval_qf(parse_formula("(< (exp 1) 2719/1000)"), assign({})));
  CHECK(eval_qf(parse_formula("(> (sqrt 2) 14142/10000)"), assign({})));
  CHECK_FALSE(eval_qf(parse_formula("(<= (* (sqrt 2) (sqrt 2)) 1)"), assign({})));
  // sqrt(2)^2 = 2 exactly, but enclosures can never certify equality.
  CHECK_THROWS_AS(eval_qf(parse_formula("(= (* (sqrt 2) (sqrt 2)) 2)"), assign({})), UndecidedError);
  CHECK_THROWS_AS(eval_qf(parse_formula("(exists (w0) (<= w0 1))"), assign({})), std::invalid_argument);
}

TEST_CASE("float evaluation tolerance") {
  FloatAssignment s;
  s.x = {1.0 + 1e-12};
  CHECK(eval_qf_float(parse_formula("(<= x0 1)"), s));
  CHECK(eval_qf_float(parse_formula("(= x0 1)"), s));
  CHECK_FALSE(eval_qf_float(parse_formula("(< 1 1)"), s));
  s.x = {1.5};
  CHECK(atom_margin(parse_formula("(<= x0 1)").atom(), s) == doctest::Approx(0.5 / 1.5));
}

TEST_CASE("fm examples") {
  auto one = fm_eliminate(linear_system(parse_formula("(and (>= w0 x0) (<= w0 1))")), {"w0"});
  REQUIRE_FALSE(one.infeasible);
  REQUIRE(one.constraints.size() == 1);
  CHECK(one.variables == std::vector<std::string>{"x0"});
  CHECK(one.constraints[0].coeffs == std::vector<Rational>{1});
  CHECK(one.constraints[0].rel == Relation::Le);
  CHECK(one.constraints[0].rhs == 1);

  auto none = fm_eliminate(linear_system(parse_formula("(and (> w0 x0) (< w0 x0))")), {"w0"});
  CHECK(none.infeasible);
  CHECK(none.constraints.empty());

  auto three = fm_eliminate(linear_system(parse_formula("(and (>= w0 x0) (>= w0 x1) (<= w0 x2))")), {"w0"});
  REQUIRE(three.constraints.size() == 2);
  CHECK(print(to_formula(three)) == "(and (<= (+ x0 (* -1 x2)) 0) (<= (+ x1 (* -1 x2)) 0))");
  for (int i = -8; i <= 8; ++i)
    for (int j = -8; j <= 8; ++j)
      for (int k = -8; k <= 8; ++k) {
        Rational x0 = quarter(i), x1 = quarter(j), x2 = quarter(k);
        bool oracle = one_var_feasible({{-1, x0}, {-1, x1}, {1, -x2}}, {Relation::Le, Relation::Le, Relation::Le});
        REQUIRE(three.satisfied_by({x0, x1, x2}) == oracle);
      }
  CHECK_THROWS_AS(linear_system(parse_formula("(<= (* w0 x0) 1)")), NonlinearError);
}

TEST_CASE("fm substitutes equalities first") {
  auto sys = fm_eliminate(linear_system(parse_formula("(and (= w0 (+ x0 1)) (<= w0 3) (>= w0 0))")), {"w0"});
  CHECK(sys.satisfied_by({Rational(2)}));
  CHECK_FALSE(sys.satisfied_by({Rational(5, 2)}));
  CHECK(sys.satisfied_by({Rational(-1)}));
  CHECK_FALSE(sys.satisfied_by({Rational(-2)}));
}

TEST_CASE("fm agrees with a grid feasibility oracle on random systems") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t d = std::uniform_int_distribution<std::size_t>(2, 4)(rng);
    LinearSystem sys = random_system(rng, d);
    // Eliminate the last variable, or the last two on every third system.
    std::size_t drop = trial % 3 == 0 && d >= 3 ? 2 : 1;
    std::vector<std::string> elim(sys.variables.end() - static_cast<std::ptrdiff_t>(drop), sys.variables.end());
    LinearSystem out = fm_eliminate(sys, elim);
    LinearSystem norm = sys;
    norm.normalize();
    const std::size_t keep = d - drop;
    std::vector<int> idx(keep, -8);
    for (;;) {
      std::vector<Rational> point;
      for (int v : idx) point.push_back(quarter(v));
      bool oracle;
      if (drop == 1) {
        std::vector<std::pair<Rational, Rational>> rows;
        std::vector<Relation> rels;
        for (const auto& c : norm.constraints) {
          Rational r = -c.rhs;
          for (std::size_t j = 0; j < keep; ++j) r += c.coeffs[j] * point[j];
          rows.emplace_back(c.coeffs[keep], r);
          rels.push_back(c.rel);
        }
        oracle = one_var_feasible(rows, rels);
      } else {
        LinearSystem rest;
        rest.variables.assign(elim.begin(), elim.end());
        for (const auto& c : norm.constraints) {
          LinearConstraint rc;
          rc.rel = c.rel;
          rc.rhs = c.rhs;
          for (std::size_t j = 0; j < keep; ++j) rc.rhs -= c.coeffs[j] * point[j];
          rc.coeffs.assign(c.coeffs.begin() + static_cast<std::ptrdiff_t>(keep), c.coeffs.end());
          rest.constraints.push_back(rc);
        }
        oracle = feasible_point(rest).has_value();
      }
      bool got = !out.infeasible && out.satisfied_by(point);
      if (got != oracle) {
        FAIL_CHECK("mismatch on system " << trial << ": " << to_json(sys).dump() << " -> " << to_json(out).dump()
                                         << " oracle " << oracle);
        break;
      }
      std::size_t k = 0;
      while (k < keep && ++idx[k] > 8) idx[k++] = -8;
      if (k == keep) break;
    }
  }
}

TEST_CASE("lp transport examples") {
  std::vector<std::vector<Rational>> rho{{0, 1}, {1, 0}};
  auto r = lp_solve(emd({1, 0}, {0, 1}, rho));
  REQUIRE(r.status == LPResult::Status::Optimal);
  CHECK(r.value == 1);
  // The coupling polytope for point masses is a single point: gamma_12 = 1.
  CHECK(r.point == std::vector<Rational>{0, 1, 0, 0});

  auto same = lp_solve(emd({Rational(1, 3), Rational(2, 3)}, {Rational(1, 3), Rational(2, 3)}, rho));
  REQUIRE(same.status == LPResult::Status::Optimal);
  CHECK(same.value == 0);
  CHECK(same.point == std::vector<Rational>{Rational(1, 3), 0, 0, Rational(2, 3)});

  auto half = lp_solve(emd({1, 0}, {Rational(1, 2), Rational(1, 2)}, rho));
  REQUIRE(half.status == LPResult::Status::Optimal);
  CHECK(half.value == Rational(1, 2));
  // Vertices of this transport polytope: only gamma = ((1/2, 1/2), (0, 0)).
  auto best = best_vertex({0, 1, 1, 0},
                          {{1, 1, 0, 0}, {-1, -1, 0, 0}, {0, 0, 1, 1}, {0, 0, -1, -1},
                           {1, 0, 1, 0}, {-1, 0, -1, 0}, {0, 1, 0, 1}, {0, -1, 0, -1}},
                          {1, -1, 0, 0, Rational(1, 2), Rational(-1, 2), Rational(1, 2), Rational(-1, 2)});
  REQUIRE(best);
  CHECK(*best == half.value);
}

TEST_CASE("lp status and errors") {
  LPInstance lp;
  lp.objective = {-1};
  lp.lower = {Rational(0)};
  lp.matrix = {{1}};
  lp.relations = {Relation::Ge};
  lp.rhs = {1};
  CHECK(lp_solve(lp).status == LPResult::Status::Unbounded);
  lp.relations = {Relation::Le};
  lp.rhs = {-1};
  CHECK(lp_solve(lp).status == LPResult::Status::Infeasible);
  lp.matrix = {{1, 2}};
  CHECK_THROWS_AS(lp_solve(lp), std::invalid_argument);
}

TEST_CASE("lp optimum matches vertex enumeration") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> coef(-3, 3), rhs(0, 6);
  for (int trial = 0; trial < 150; ++trial) {
    std::size_t n = std::uniform_int_distribution<std::size_t>(1, 6)(rng);
    std::size_t m = std::uniform_int_distribution<std::size_t>(1, n <= 4 ? 4 : 2)(rng);
    LPInstance lp;
    std::vector<std::vector<Rational>> a;
    std::vector<Rational> b;
    for (std::size_t j = 0; j < n; ++j) lp.objective.push_back(Rational(coef(rng)));
    lp.lower.assign(n, Rational(0));
    for (std::size_t i = 0; i < m; ++i) {
      std::vector<Rational> row;
      for (std::size_t j = 0; j < n; ++j) row.push_back(Rational(coef(rng)));
      a.push_back(row);
      b.push_back(Rational(rhs(rng)));
    }
    for (std::size_t j = 0; j < n; ++j) {  // box keeps the instance bounded
      std::vector<Rational> row(n, Rational(0));
      row[j] = 1;
      a.push_back(row);
      b.push_back(3);
    }
    lp.matrix = a;
    lp.relations.assign(a.size(), Relation::Le);
    lp.rhs = b;
    auto r = lp_solve(lp);
    auto best = best_vertex(lp.objective, a, b);
    REQUIRE(best);
    REQUIRE(r.status == LPResult::Status::Optimal);
    CHECK(r.value == *best);
    auto again = lp_solve(lp);
    CHECK(again.pivots == r.pivots);
    CHECK(again.point == r.point);
  }
}

TEST_CASE("feasible point with strict rows") {
  auto open = linear_system(parse_formula("(and (< x0 1) (> x0 0))"));
  auto p = feasible_point(open);
  REQUIRE(p);
  CHECK((*p)[0] > 0);
  CHECK((*p)[0] < 1);
  CHECK_FALSE(feasible_point(linear_system(parse_formula("(and (< x0 1) (> x0 1))"))));
  CHECK(feasible_point(linear_system(parse_formula("(and (<= x0 1) (>= x0 1))"))));
}

TEST_CASE("witness search reaches a halfspace through an l2 ball") {
  // h(x) = [x0 >= 0], neighborhood: ||x - y|| <= 1.
  Formula f = parse_formula(
      "(exists (w0 w1) (and (<= (+ (* (+ x0 (* -1 w0)) (+ x0 (* -1 w0))) (* (+ x1 (* -1 w1)) (+ x1 (* -1 w1)))) 1)"
      " (>= w0 0)))");
  WitnessSearcher s(f);
  // Closed-form reach: a.x + rho * ||a|| >= b with a = (1, 0), b = 0, rho = 1.
  auto reach = [](double x0, double x1) { return 1.0 * x0 + 0.0 * x1 + 1.0 * std::hypot(1.0, 0.0) >= 0; };
  std::vector<double> a;
  std::vector<double> x{-0.5, 0};
  auto r = s.search(x, a);
  CHECK(reach(-0.5, 0));
  REQUIRE(r.found());
  CHECK(r.witness[0] >= -1e-9);
  CHECK(std::hypot(r.witness[0] + 0.5, r.witness[1]) <= 1 + 1e-9);

  x = {-2, 0};
  CHECK_FALSE(reach(-2, 0));
  CHECK_FALSE(s.search(x, a).found());
}

TEST_CASE("witness search with an identity neighborhood matches evaluation") {
  Formula h = parse_formula("(>= (+ (* a0 x0) (* a1 x1) (* x0 x1)) a2)");
  std::map<VarRef, Term> sub{{VarRef{Block::X, 0}, Term::var(Block::W, 0)}, {VarRef{Block::X, 1}, Term::var(Block::W, 1)}};
  Formula f = Formula::exists({0, 1}, eq(Term::var(Block::W, 0), Term::var(Block::X, 0)) &&
                                          eq(Term::var(Block::W, 1), Term::var(Block::X, 1)) && substitute(h, sub));
  WitnessSearcher s(f);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    std::vector<Rational> x{testgen::small_rational(rng), testgen::small_rational(rng)};
    std::vector<Rational> a{testgen::small_rational(rng), testgen::small_rational(rng), testgen::small_rational(rng)};
    bool truth = eval_qf(h, assign(x, a));
    auto r = s.search(x, a);
    CHECK(r.found() == truth);
  }
}

TEST_CASE("witness search rejects bad configurations") {
  Formula f = parse_formula("(exists (w0) (<= w0 x0))");
  WitnessSearchConfig cfg;
  cfg.box_hi = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(WitnessSearcher(f, cfg), std::invalid_argument);
  CHECK_THROWS_AS(WitnessSearcher(parse_formula("(forall (w0) (<= w0 x0))")), std::invalid_argument);
  CHECK_THROWS_AS(WitnessSearcher(parse_formula("(exists (w0) (<= w0 y0))")), std::invalid_argument);
}

TEST_CASE("linear clauses are decided exactly") {
  WitnessSearcher s(parse_formula("(exists (w0 w1) (and (< x0 w0) (< w0 w1) (< w1 (+ x0 1/1000000))))"));
  auto r = s.search(std::vector<Rational>{Rational(1, 3)}, {});
  REQUIRE(r.found());
  CHECK(r.certified_exact);
  REQUIRE(r.exact_witness);
  CHECK((*r.exact_witness)[0] > Rational(1, 3));
  WitnessSearcher t(parse_formula("(exists (w0) (and (< x0 w0) (< w0 x0)))"));
  auto r2 = t.search(std::vector<Rational>{Rational(0)}, {});
  CHECK_FALSE(r2.found());
  CHECK(r2.refuted);
}

TEST_CASE("witness search solves exp equations through the graph") {
  WitnessSearcher s(parse_formula("(exists (w0) (and (= (exp w0) x0) (<= w0 1)))"));
  std::vector<double> x{2.0}, a;
  auto r = s.search(x, a);
  REQUIRE(r.found());
  CHECK(std::exp(r.witness[0]) == doctest::Approx(2.0));
  x = {10.0};
  CHECK_FALSE(s.search(x, a).found());
}

TEST_CASE("found witnesses re-verify on random formulas") {
  std::mt19937_64 rng(31);
  testgen::TermShape shape{2, 1, 2, 2, true};
  int found = 0, exact = 0;
  for (int i = 0; i < 300; ++i) {
    Formula body = testgen::random_qf(rng, shape);
    Formula f = Formula::exists({0, 1}, body);
    WitnessSearchConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(i);
    WitnessSearcher s(f, cfg);
    std::vector<double> x{static_cast<double>(testgen::small_rational(rng).get_d()),
                          static_cast<double>(testgen::small_rational(rng).get_d())};
    std::vector<double> a{testgen::small_rational(rng).get_d()};
    auto r = s.search(x, a);
    if (!r.found()) continue;
    ++found;
    auto pre = strip_exists(s.formula());
    FloatAssignment fs;
    fs.x = x, fs.a = a, fs.w = r.witness;
    REQUIRE_MESSAGE(eval_qf_float(pre.body, fs), print(f));
    if (r.certified_exact) {
      ++exact;
      Assignment q;
      for (double v : x) q.x.push_back(Rational(v));
      for (double v : a) q.a.push_back(Rational(v));
      for (double v : r.witness) q.w.push_back(Rational(v));
      if (r.exact_witness) q.w = *r.exact_witness;
      CHECK_MESSAGE(eval_qf(pre.body, q), print(f));
    }
  }
  CHECK(found > 50);
  CHECK(exact > 0);
}

TEST_CASE("graph form preserves semantics after witness completion") {
  std::mt19937_64 rng(77);
  testgen::TermShape shape{2, 1, 0, 2, true};
  std::uniform_real_distribution<double> U(-2, 2);
  int compared = 0;
  for (int i = 0; i < 1000; ++i) {
    Formula f = testgen::random_qf(rng, shape);
    GraphForm g = to_graph_form(f);
    FloatAssignment s;
    s.x = {U(rng), U(rng)};
    s.a = {U(rng)};
    if (min_abs_margin(f, s) < 1e-6) continue;
    s.w.assign(block_dims(g.formula).w, 0.0);
    for (const auto& d : g.definitions) s.w[d.witness] = eval_float(d.value, s);
    if (std::any_of(s.w.begin(), s.w.end(), [](double v) { return !std::isfinite(v); })) continue;
    Formula body = strip_exists(g.formula).body;
    CHECK_MESSAGE(eval_qf_float(f, s) == eval_qf_float(body, s), print(f));
    ++compared;
  }
  CHECK(compared > 800);
}
