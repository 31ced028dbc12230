#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "generators.hpp"
#include "stratdef/eval.hpp"
#include "stratdef/transform.hpp"
#include "stratdef/witness.hpp"

using namespace stratdef;
using namespace stratdef::vars;

namespace {

const char* kHalfspace = "(>= (+ (* a0 x0) (* a1 x1)) a2)";
const char* kBall = "(<= (+ (* (+ x0 (* -1 y0)) (+ x0 (* -1 y0))) (* (+ x1 (* -1 y1)) (+ x1 (* -1 y1)))) 1)";

// Independent recount: polynomial atoms and their summed degree, exp atoms.
struct Recount {
  std::uint32_t poly = 0, degree = 0, exp = 0;
};

std::uint32_t recount_degree(const Term& t) {
  switch (t.kind()) {
    case Term::Kind::Var: return t.var_ref().block == Block::A ? 0 : 1;
    case Term::Kind::Sum: {
      std::uint32_t d = 0;
      for (const auto& a : t.args()) d = std::max(d, recount_degree(a));
      return d;
    }
    case Term::Kind::Product: {
      std::uint32_t d = 0;
      for (const auto& a : t.args()) d += recount_degree(a);
      return d;
    }
    default: return 0;
  }
}

void recount(const Formula& f, Recount& r) {
  if (f.kind() == Formula::Kind::Atom) {
    const Atom& a = f.atom();
    if (a.kind == Atom::Kind::ExpGraph) {
      ++r.exp;
    } else {
      ++r.poly;
      r.degree += std::max(recount_degree(a.lhs), recount_degree(a.rhs));
    }
    return;
  }
  for (const auto& c : f.children()) recount(c, r);
}

}  // namespace

TEST_CASE("halfspace through the l2 ball") {
  auto spec = strategic_transform(parse_formula(kHalfspace), parse_formula(kBall));
  Formula expected = Formula::exists(
      {0, 1}, (x(0) + c(-1) * w(0)) * (x(0) + c(-1) * w(0)) + (x(1) + c(-1) * w(1)) * (x(1) + c(-1) * w(1)) <= c(1) &&
                  a(0) * w(0) + a(1) * w(1) >= a(2));
  CHECK(print(spec.result) == print(expected));
  CHECK(spec.fragment == Fragment::Existential);
  CHECK(spec.input_dim == 2);
  auto dims = block_dims(spec.result);
  CHECK(dims.x == 2);
  CHECK(dims.a == 3);
  CHECK(dims.y == 0);

  auto rep = complexity_report(spec);
  CHECK(rep.k == 3);
  CHECK(rep.l == 2);
  CHECK(rep.f_out <= rep.f_h + rep.f_n);
  CHECK(rep.d_out <= rep.d_h + rep.d_n);
  Recount rc;
  recount(strip_exists(spec.graph->formula).body, rc);
  CHECK(rep.d_out == rc.degree + rc.exp);
  CHECK(rep.d_out == 3);
  // Free x0, x1, a0..a2 plus two witnesses.
  CHECK(rep.f_out == 7);
  CHECK(rep.polynomial_quantifier_free);
  CHECK(rep.poly_atoms == 2);
  CHECK(rep.sample_bound.find("unspecified") != std::string::npos);
}

TEST_CASE("identity neighborhood reproduces the hypothesis") {
  Formula h = parse_formula(kHalfspace);
  auto spec = strategic_transform(h, parse_formula("(and (= y0 x0) (= y1 x1))"));
  WitnessSearcher search(spec.result);
  std::mt19937_64 rng(17);
  int agree = 0;
  for (int i = 0; i < 1000; ++i) {
    std::vector<Rational> xs{testgen::small_rational(rng), testgen::small_rational(rng)};
    std::vector<Rational> as{testgen::small_rational(rng), testgen::small_rational(rng), testgen::small_rational(rng)};
    Assignment s;
    s.x = xs, s.a = as;
    bool truth = eval_qf(h, s);
    auto r = search.search(xs, as);
    REQUIRE(r.certified_exact == r.found());
    if (r.found() == truth) ++agree;
    if (!truth) CHECK(r.refuted);
  }
  CHECK(agree == 1000);
}

TEST_CASE("format and degree at most double the inputs") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    testgen::TermShape hs{2, 2, 0, 2, true};
    Formula h = testgen::random_qf(rng, hs);
    // Neighborhood: random formula over (x, y), built by renaming a's to y's.
    Formula n0 = testgen::random_qf(rng, hs);
    std::map<VarRef, Term> to_y{{VarRef{Block::A, 0}, y(0)}, {VarRef{Block::A, 1}, y(1)}};
    Formula n = substitute(n0, to_y) && (y(0) <= y(1) + c(1));
    auto spec = strategic_transform(h, n, TransformOptions{2u, false});
    REQUIRE(spec.profile_h);
    auto rep = complexity_report(spec);
    CHECK(rep.k == spec.profile_h->param_dim);
    CHECK(spec.profile_out->param_dim == spec.profile_h->param_dim);
    CHECK(spec.fragment == Fragment::Existential);
    std::uint32_t fmax = std::max(rep.f_h, rep.f_n), dmax = std::max(rep.d_h, rep.d_n);
    CHECK(rep.f_out <= 2 * fmax);
    CHECK(rep.d_out <= 2 * dmax);
    CHECK(rep.d_out <= rep.d_h + rep.d_n);
  }
}

TEST_CASE("existential inputs merge into one prefix") {
  Formula h = parse_formula("(exists (w0) (and (= w0 (* x0 x0)) (<= w0 a0)))");
  Formula n = parse_formula("(exists (w0) (and (<= w0 1) (<= (+ x0 (* -1 y0)) w0)))");
  auto spec = strategic_transform(h, n);
  CHECK(spec.fragment == Fragment::Existential);
  CHECK(print(spec.result) ==
        "(exists (w0 w1 w2) (and (<= w1 1) (<= (+ x0 (* -1 w0)) w1) (= w2 (* w0 w0)) (<= w2 a0)))");
}

TEST_CASE("transform errors") {
  Formula h = parse_formula(kHalfspace);
  CHECK_THROWS_WITH_AS(strategic_transform(h, parse_formula("(<= y0 x0)")), doctest::Contains("Y-dimension mismatch"),
                       std::invalid_argument);
  Formula general = parse_formula("(forall (w0) (<= (* w0 w0 x0) (+ y0 y1)))");
  CHECK_THROWS_AS(strategic_transform(h, general), std::invalid_argument);
  auto spec = strategic_transform(h, general, TransformOptions{std::nullopt, true});
  CHECK_FALSE(spec.quantitative);
  CHECK(spec.fragment == Fragment::General);
  CHECK(complexity_report(spec).sample_bound.find("none") == 0);
  CHECK_THROWS_AS(strategic_transform(parse_formula("(<= y0 a0)"), parse_formula("(<= y0 x0)")),
                  std::invalid_argument);
}

TEST_CASE("spec json") {
  auto spec = strategic_transform(parse_formula(kHalfspace), parse_formula(kBall));
  auto j = to_json(spec);
  CHECK(j["fragment"] == "existential");
  CHECK(j["report"]["k"] == 3);
  CHECK(j["profile_out"]["format"] == 7);
}
