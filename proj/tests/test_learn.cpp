#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "stratdef/learn.hpp"

using namespace stratdef;

namespace {

std::shared_ptr<const HypothesisFamily> fam(const char* s) { return make_family(s); }
std::shared_ptr<const NeighborhoodSystem> nb(const char* s, std::uint32_t l) { return make_neighborhood(s, l); }

// Shifted halfspace w.x + rho |w| >= b, evaluated directly.
bool shifted(const std::vector<double>& a, const std::vector<double>& x, double rho) {
  double dot = a[0] * x[0] + a[1] * x[1];
  return dot + rho * std::hypot(a[0], a[1]) >= a[2];
}

}  // namespace

TEST_CASE("realizable data follows the closed form") {
  LearnProblem p(fam("halfspace:l=2"), nb("lp:l=2,p=2,r=1", 2));
  std::vector<double> target{0.6, -0.8, 0.5};
  auto d = generate_realizable(p, target, 500, 3);
  CHECK(d.examples.size() == 500);
  CHECK(d.resampled == 0);
  for (const auto& e : d.examples) {
    CHECK(e.x[0] >= -4);
    CHECK(e.x[0] <= 4);
    CHECK(e.y == shifted(target, e.x, 1.0));
  }
  CHECK(replay_matches(p, d));
  CHECK(d.to_json()["examples"].size() == 500);

  // identity neighborhood and radius 0 both give the base labels
  LearnProblem base(fam("halfspace:l=2"), nullptr);
  LearnProblem zero(fam("halfspace:l=2"), nb("lp:l=2,p=2,r=0", 2));
  auto db = generate_realizable(base, target, 300, 9);
  auto dz = generate_realizable(zero, target, 300, 9);
  for (std::size_t i = 0; i < db.examples.size(); ++i) {
    CHECK(db.examples[i].x == dz.examples[i].x);
    CHECK(db.examples[i].y == dz.examples[i].y);
    CHECK(db.examples[i].y == shifted(target, db.examples[i].x, 0.0));
  }
  CHECK_THROWS_AS(generate_realizable(p, {1.0, 2.0}, 5, 1), std::invalid_argument);
}

TEST_CASE("erm on empty and small samples") {
  LearnProblem p(fam("threshold"), nullptr);
  DataSet empty;
  auto r = erm_fit(p, empty);
  CHECK(r.errors == 0);
  CHECK(r.empirical_error == 0);
  CHECK(r.params.size() == 1);
  CHECK_THROWS_AS(erm_fit(p, empty, ErmOptions{0}), std::invalid_argument);
}

TEST_CASE("threshold erm finds a consistent gap") {
  LearnProblem p(fam("threshold"), nullptr);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto d = generate_realizable(p, {0.3 + 0.2 * double(seed) - 1.0}, 50, seed);
    // independent gap oracle
    double max_neg = -1e300, min_pos = 1e300;
    for (const auto& e : d.examples) (e.y ? min_pos : max_neg) = e.y ? std::min(min_pos, e.x[0]) : std::max(max_neg, e.x[0]);
    REQUIRE(max_neg < min_pos);
    ErmOptions o;
    o.budget = 1000;
    o.seed = seed;
    o.inject_target = false;
    auto r = erm_fit(p, d, o);
    CHECK(r.errors == 0);
    CHECK_FALSE(r.from_target);
    CHECK(r.evaluations <= 1000);
    CHECK(r.params[0] > max_neg);
    CHECK(r.params[0] <= min_pos);
  }
}

TEST_CASE("strategic halfspace erm reaches zero error") {
  LearnProblem p(fam("halfspace:l=2"), nb("lp:l=2,p=2,r=1", 2));
  int zero = 0;
  for (std::uint64_t t = 0; t < 20; ++t) {
    std::mt19937_64 rng(1000 + t);
    auto target = p.family().sample_params(rng);
    auto d = generate_realizable(p, target, 100, t);
    ErmOptions o;
    o.budget = 10000;
    o.seed = t;
    o.inject_target = false;
    auto r = erm_fit(p, d, o);
    zero += r.errors == 0;
    // recount with the closed form
    std::size_t wrong = 0;
    for (const auto& e : d.examples) wrong += shifted(r.params, e.x, 1.0) != e.y;
    CHECK(wrong == r.errors);
  }
  CHECK(zero >= 19);
}

TEST_CASE("erm is deterministic and dominates the target") {
  LearnProblem p(fam("halfspace:l=2"), nb("lp:l=2,p=2,r=1/2", 2));
  std::vector<double> target{1, 1, 0};
  auto d = generate_realizable(p, target, 80, 5);
  for (std::size_t i = 0; i < d.examples.size(); i += 7) d.examples[i].y = !d.examples[i].y;  // noise
  ErmOptions o;
  o.budget = 300;
  o.seed = 11;
  auto a = erm_fit(p, d, o), b = erm_fit(p, d, o);
  CHECK(a.params == b.params);
  CHECK(a.errors == b.errors);
  std::size_t target_errors = 0;
  for (const auto& e : d.examples) target_errors += shifted(target, e.x, 0.5) != e.y;
  CHECK(a.errors <= target_errors);
  CHECK(a.errors > 0);
}

TEST_CASE("holdout error and hoeffding width") {
  LearnProblem p(fam("threshold"), nullptr);
  auto h = holdout_error(p, {0.0}, {0.0}, 400, 1);
  CHECK(h.error == 0);
  CHECK(h.hoeffding == doctest::Approx(std::sqrt(std::log(40.0) / 800)));
  auto off = holdout_error(p, {1.0}, {0.0}, 4000, 2);
  // uniform on [-4, 4]: the disagreement region [0, 1) has mass 1/8
  CHECK(std::fabs(off.error - 0.125) < 0.03);
}

TEST_CASE("threshold sweep within the VC envelope") {
  LearnProblem p(fam("threshold"), nullptr);
  SweepOptions so;
  so.trials = 20;
  so.m_max = 400;
  so.seed = 1;
  so.target = std::vector<double>{0.0};
  auto rep = sample_complexity_sweep(p, so);
  REQUIRE(rep.rows.size() == 3);
  CHECK(rep.holdout == 400);
  for (const auto& r : rep.rows) {
    INFO("eps ", r.eps, " m_hat ", r.m_hat);
    CHECK(r.m_hat > 0);
    CHECK(double(r.m_hat) >= 0.2 / r.eps);
    CHECK(double(r.m_hat) <= 10 * std::log(1 / r.eps) / r.eps);
    CHECK(r.success >= 0.9);
  }
  CHECK(rep.rows[0].m_hat <= rep.rows[1].m_hat);
  CHECK(rep.rows[1].m_hat <= rep.rows[2].m_hat);
  for (double z : rep.zero_error_rate) CHECK(z >= 0.95);

  // smaller delta needs at least as many samples
  so.delta = 0.05;
  auto strict = sample_complexity_sweep(p, so);
  for (std::size_t i = 0; i < 3; ++i) CHECK(strict.rows[i].m_hat >= rep.rows[i].m_hat);
  CHECK(strict.errors == rep.errors);

  // same config, same report
  so.delta = 0.1;
  CHECK(sample_complexity_sweep(p, so).csv() == rep.csv());
  CHECK(rep.csv().rfind("eps,m_hat,success,holdout,hoeffding\n", 0) == 0);
}

TEST_CASE("strategic and base halfspace sweeps agree within 2x") {
  SweepOptions so;
  so.trials = 40;
  so.m_max = 600;
  so.grid_ratio = 1.1;
  so.eps = {0.2, 0.1};
  so.target = std::vector<double>{0.6, 0.8, 0.0};
  auto s = sample_complexity_sweep(LearnProblem(fam("halfspace:l=2"), nb("lp:l=2,p=2,r=1", 2)), so);
  auto b = sample_complexity_sweep(LearnProblem(fam("halfspace:l=2"), nullptr), so);
  for (std::size_t i = 0; i < so.eps.size(); ++i) {
    INFO("eps ", so.eps[i], " strategic ", s.rows[i].m_hat, " base ", b.rows[i].m_hat);
    REQUIRE(s.rows[i].m_hat > 0);
    REQUIRE(b.rows[i].m_hat > 0);
    CHECK(s.rows[i].m_hat <= 2 * b.rows[i].m_hat);
    CHECK(b.rows[i].m_hat <= 2 * s.rows[i].m_hat);
  }
}

TEST_CASE("sweep rejects bad options") {
  LearnProblem p(fam("threshold"), nullptr);
  SweepOptions so;
  so.eps = {0};
  CHECK_THROWS_AS(sample_complexity_sweep(p, so), std::invalid_argument);
  so.eps = {0.1};
  so.delta = 1;
  CHECK_THROWS_AS(sample_complexity_sweep(p, so), std::invalid_argument);
  so.delta = 0.1;
  so.trials = 0;
  CHECK_THROWS_AS(sample_complexity_sweep(p, so), std::invalid_argument);
}
