// Acceptance run: one PASS/FAIL line per criterion. Exit status 1 when any
// criterion fails. `acceptance 3 7` runs only criteria 3 and 7.

#include <mpfr.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "generators.hpp"
#include "oracles.hpp"
#include "stratdef/capacity.hpp"
#include "stratdef/constructions.hpp"
#include "stratdef/learn.hpp"
#include "stratdef/linear.hpp"
#include "stratdef/transform.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace stratdef;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects the first few failure notes; pass flips on any.
struct Tally {
  bool pass = true;
  std::vector<std::string> notes;
  void fail(const std::string& s) {
    pass = false;
    if (notes.size() < 4) notes.push_back(s);
  }
  Outcome done(std::string summary) const {
    for (const auto& n : notes) summary += "; " + n;
    return {pass, summary};
  }
};

Rational q(const char* s) { return parse_rational(s); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, int prec = 3) {
  std::ostringstream s;
  s.precision(prec);
  s << v;
  return s.str();
}

fs::path work_dir() {
  static fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("stratdef-acceptance-" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int run_cli(const std::string& args) {
  std::string cmd = std::string("'") + STRATDEF_CLI + "' " + args + " > /dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::vector<Rational> rationals(const json& arr) {
  std::vector<Rational> v;
  for (const auto& e : arr) v.push_back(parse_rational(e.get<std::string>()));
  return v;
}

// Distinct labelings of `pts` by the closed s-neighborhoods of the sets.
std::size_t brute_traces(const std::vector<std::vector<Rational>>& sets, const std::vector<Rational>& pts,
                         const Rational& s) {
  std::set<std::vector<bool>> seen;
  for (const auto& set : sets) {
    std::vector<bool> row;
    for (const auto& p : pts) {
      bool hit = false;
      for (const auto& z : set) {
        Rational d = z - p;
        if (d < 0) d = -d;
        if (d <= s) {
          hit = true;
          break;
        }
      }
      row.push_back(hit);
    }
    seen.insert(row);
  }
  return seen.size();
}

// Pairwise disjoint nonempty sets, at least two of them: VC exactly 1.
bool disjoint_family(const std::vector<std::vector<Rational>>& sets) {
  std::set<Rational> all;
  std::size_t total = 0;
  for (const auto& s : sets) {
    if (s.empty()) return false;
    total += s.size();
    all.insert(s.begin(), s.end());
  }
  return sets.size() >= 2 && all.size() == total;
}

Rational pow2(int e) {
  Rational r(1);
  for (int i = 0; i < std::abs(e); ++i) r *= 2;
  return e >= 0 ? r : Rational(1) / r;
}

// ---- 1 ----

Outcome fixed_blowup() {
  Tally t;
  std::string timing;
  for (std::uint32_t n : {3u, 8u, 12u}) {
    auto out = work_dir() / ("fixed" + std::to_string(n) + ".json");
    auto t0 = std::chrono::steady_clock::now();
    int rc = run_cli("verify-blowup --construction fixed --n " + std::to_string(n) + " --r 1 --rp 1/2 --out '" +
                     out.string() + "'");
    double secs = seconds_since(t0);
    timing += (timing.empty() ? "" : ", ") + ("n=" + std::to_string(n) + " " + fmt(secs) + "s");
    if (rc != 0) {
      t.fail("n=" + std::to_string(n) + " exit " + std::to_string(rc));
      continue;
    }
    if (secs >= 60) t.fail("n=" + std::to_string(n) + " took " + fmt(secs) + "s");
    auto cert = json::parse(slurp(out))["result"];
    if (cert["pass"] != true) t.fail("certificate n=" + std::to_string(n) + " not passing");
    auto anchors = rationals(cert["anchors"]);
    std::vector<std::vector<Rational>> sets;
    for (const auto& w : cert["witnesses"]) sets.push_back(rationals(w["points"]));
    if (anchors.size() != n || sets.size() != (std::size_t{1} << n)) t.fail("certificate sizes for n=" + std::to_string(n));
    if (!disjoint_family(sets)) t.fail("supports overlap for n=" + std::to_string(n));
    for (const char* s : {"1/2", "3/4", "1"})
      if (brute_traces(sets, anchors, q(s)) != (std::size_t{1} << n))
        t.fail("n=" + std::to_string(n) + " not shattered at s=" + s);
  }
  return t.done("VC(H)=1 and anchors shattered at s in {1/2,3/4,1}; " + timing);
}

// ---- 2 ----

Outcome all_radii() {
  Tally t;
  std::uint32_t tcount = 6;
  auto inst = build_all_radii(tcount);
  std::string blocks;
  for (const char* sv : {"3/10", "3/5", "6/5"}) {
    Rational s = q(sv);
    for (std::uint32_t n = 1; n <= 8; ++n) {
      std::optional<RadiusLocation> loc;
      while (!loc) {
        try {
          loc = locate_radius(inst, s, n);
        } catch (const std::out_of_range& e) {
          std::string msg = e.what();
          auto pos = msg.find("t >= ");
          if (pos == std::string::npos) return {false, msg};
          tcount = static_cast<std::uint32_t>(std::stoul(msg.substr(pos + 5)));
          inst = build_all_radii(tcount);
        }
      }
      const auto& blk = inst.blocks[loc->block];
      const auto& fb = inst.instances[loc->block];
      std::string tag = std::string("s=") + sv + " n=" + std::to_string(n);
      if (!(pow2(-blk.m - 1) <= s && s <= pow2(-blk.m))) t.fail(tag + " wrong dyadic block m=" + std::to_string(blk.m));
      if (blk.n < n) t.fail(tag + " block too small");
      if (!loc->certificate.pass) t.fail(tag + " certificate fails");
      std::vector<std::vector<Rational>> sets(fb.q.begin(), fb.q.end());
      if (brute_traces(sets, fb.anchors, s) != (std::size_t{1} << blk.n)) t.fail(tag + " not shattered");
      if (n == 8) blocks += std::string(blocks.empty() ? "" : ", ") + sv + "->m=" + std::to_string(blk.m);
    }
  }
  if (!all_pass(inst.checks)) t.fail("instance checks fail");
  return t.done("t=" + std::to_string(tcount) + ", " + blocks);
}

// ---- 3 ----

Outcome partition() {
  Tally t;
  auto p = build_partition_pathology(4);
  for (const char* name : {"class-vc-1", "neighborhood-vc-1", "strategic-shattering"}) {
    bool found = false;
    for (const auto& c : p.checks)
      if (c.name == name) found = true, c.pass ? void() : t.fail(std::string(name) + ": " + c.detail);
    if (!found) t.fail(std::string("missing check ") + name);
  }
  if (p.candidates != std::vector<Rational>{q("3/2"), q("5/2"), q("7/2"), q("9/2")}) t.fail("candidates");
  std::vector<std::vector<Rational>> sets;
  for (std::size_t s = 0; s < p.hypotheses.size(); ++s) sets.push_back(p.hypotheses.set(s));
  if (!disjoint_family(sets)) t.fail("supports overlap");
  // unit cells [i, i+1): a candidate is labeled 1 iff its cell holds a support point
  std::set<std::vector<bool>> seen;
  for (const auto& set : sets) {
    std::vector<bool> row;
    for (int i = 1; i <= 4; ++i) {
      bool hit = false;
      for (const auto& z : set) hit = hit || (z >= i && z < i + 1);
      row.push_back(hit);
    }
    seen.insert(row);
  }
  if (seen.size() != 16) t.fail("traces " + std::to_string(seen.size()));
  return t.done("16 traces on {1.5,2.5,3.5,4.5}, disjoint supports");
}

// ---- 4 ----

// {sqrt(2) k} to 256 bits.
double frac_sqrt2_ref(std::uint64_t k) {
  mpfr_t v;
  mpfr_init2(v, 256);
  mpfr_set_ui(v, 2, MPFR_RNDN);
  mpfr_sqrt(v, v, MPFR_RNDN);
  mpfr_mul_ui(v, v, k, MPFR_RNDN);
  mpfr_frac(v, v, MPFR_RNDN);
  double d = mpfr_get_d(v, MPFR_RNDN);
  mpfr_clear(v);
  return d;
}

Outcome frac_construction() {
  Tally t;
  Rational r = q("1/4");
  auto fc = build_frac_construction(3, r);
  if (!all_pass(fc.checks)) t.fail("library checks fail");
  Rational pw = 2 * r, qw = Rational(1, 2) - r, v = std::min(pw, qw);
  for (std::size_t k = 0; k + 1 < fc.b.size(); ++k) {
    // cells after step k have width |P| / b_k or |Q| / b_k
    Rational vk = v / Rational(Integer(std::to_string(fc.b[k])));
    if (!(Rational(Integer(std::to_string(fc.b[k + 1]))) > 2 / vk)) t.fail("b growth at " + std::to_string(k + 1));
  }
  if (fc.m.size() != 8) t.fail("expected 8 subsets");
  std::set<std::vector<bool>> seen;
  double pl = 0.5 - r.get_d(), ph = 0.5 + r.get_d();
  for (std::size_t a = 0; a < fc.m.size(); ++a) {
    if (fc.m[a] == 0 || fc.m[a] > 1000000) t.fail("m_A outside the scan cap");
    std::vector<bool> row;
    for (std::uint32_t i = 0; i < 3; ++i) {
      double f = frac_sqrt2_ref(fc.m[a] * fc.b[i]);
      bool in_p = f > pl && f < ph;
      bool in_q = f > 0 && f < pl;
      if (bool(a >> i & 1) ? !in_p : !in_q) t.fail("A=" + subset_string(a, 3) + " point " + std::to_string(i + 1));
      row.push_back(std::fabs(f - 0.5) <= r.get_d());
    }
    seen.insert(row);
  }
  if (seen.size() != 8) t.fail("labelings " + std::to_string(seen.size()));
  std::string bs;
  for (auto b : fc.b) bs += (bs.empty() ? "" : ",") + std::to_string(b);
  std::uint64_t mmax = *std::max_element(fc.m.begin(), fc.m.end());
  return t.done("b=(" + bs + "), max m_A=" + std::to_string(mmax) + ", 8 labelings");
}

// ---- 5 ----

Outcome transform_semantics() {
  Tally t;
  std::mt19937_64 rng(20240501);
  std::normal_distribution<double> N(0, 1);
  std::uniform_real_distribution<double> B(-2, 2), U(-4, 4);
  std::uniform_int_distribution<int> R(1, 16);
  auto h = std::make_shared<Halfspace>(2);
  std::size_t total = 0, wrong = 0, found = 0, refuted = 0, not_found = 0;
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> a{N(rng), N(rng), B(rng)};
    Rational rho(R(rng), 8);
    rho.canonicalize();
    auto n = std::make_shared<LpBall>(2, Rational(2), RadiusSpec{rho, std::nullopt});
    StrategicOptions opts;
    opts.use_oracle = false;
    opts.search = fast_search_config(2);
    StrategicClassifier cls(h, n, opts);
    const double r = rho.get_d(), norm = std::hypot(a[0], a[1]);
    std::size_t compared = 0;
    while (compared < 100000) {
      std::vector<double> x{U(rng), U(rng)};
      double margin = a[0] * x[0] + a[1] * x[1] - a[2] + r * norm;
      if (std::fabs(margin) <= 1e-6) continue;
      // witness search semantics: a witness found means 1, otherwise 0
      auto lab = cls.label(a, x);
      found += lab.source == StrategicLabel::Source::Search;
      refuted += lab.source == StrategicLabel::Source::Refuted;
      not_found += lab.source == StrategicLabel::Source::Inconclusive;
      if (lab.value != (margin > 0)) {
        ++wrong;
        if (wrong <= 2)
          t.fail("trial " + std::to_string(trial) + " x=(" + fmt(x[0], 17) + "," + fmt(x[1], 17) + ") margin " +
                 fmt(margin));
      }
      ++compared;
    }
    total += compared;
  }
  return t.done(std::to_string(total) + " points over 10 (w,b,rho), " + std::to_string(wrong) + " disagreements; " +
                std::to_string(found) + " witnesses found, " + std::to_string(refuted) + " refuted, " +
                std::to_string(not_found) + " not found");
}

// ---- 6 ----

// Recount of format and degree on a graph-form formula.
struct Recount {
  std::set<VarRef> free;
  std::uint32_t witnesses = 0, exp = 0, degree = 0;
  std::uint32_t format() const { return static_cast<std::uint32_t>(free.size()) + witnesses + exp; }
  std::uint32_t total_degree() const { return degree + exp; }
};

std::uint32_t term_degree(const Term& t, std::set<VarRef>& free) {
  switch (t.kind()) {
    case Term::Kind::Var:
      if (t.var_ref().block != Block::W) free.insert(t.var_ref());
      return t.var_ref().block == Block::A ? 0 : 1;
    case Term::Kind::Sum: {
      std::uint32_t d = 0;
      for (const auto& x : t.args()) d = std::max(d, term_degree(x, free));
      return d;
    }
    case Term::Kind::Product: {
      std::uint32_t d = 0;
      for (const auto& x : t.args()) d += term_degree(x, free);
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
      for (VarRef v : {a.exp_lhs, a.exp_rhs})
        if (v.block != Block::W) r.free.insert(v);
    } else {
      r.degree += std::max(term_degree(a.lhs, r.free), term_degree(a.rhs, r.free));
    }
    return;
  }
  for (const auto& c : f.children()) recount(c, r);
}

Recount recount_graph(const Formula& f) {
  auto g = is_graph_form(f) ? f : to_graph_form(f).formula;
  auto [w, body] = strip_exists(g);
  Recount r;
  r.witnesses = static_cast<std::uint32_t>(std::set<std::uint32_t>(w.begin(), w.end()).size());
  recount(body, r);
  return r;
}

Outcome complexity_bookkeeping() {
  Tally t;
  std::mt19937_64 rng(6);
  std::uint32_t worst_f = 0, worst_d = 0;  // percent of the 2x budget used
  for (int i = 0; i < 100; ++i) {
    // witness w0 only under an explicit prefix
    bool wh = rng() % 2, wn = rng() % 2;
    Formula h = testgen::random_qf(rng, {2, 2, wh ? 1u : 0u, 2, true});
    if (wh) h = Formula::exists({0}, h);
    Formula n0 = testgen::random_qf(rng, {2, 2, wn ? 1u : 0u, 2, true});
    std::map<VarRef, Term> to_y{{VarRef{Block::A, 0}, Term::var(Block::Y, 0)}, {VarRef{Block::A, 1}, Term::var(Block::Y, 1)}};
    Formula n = substitute(n0, to_y) && Formula::compare(Term::var(Block::Y, 0), Relation::Le,
                                                         Term::sum({Term::var(Block::Y, 1), Term::constant(Rational(1))}));
    if (wn) n = Formula::exists({0}, n);
    auto spec = strategic_transform(h, n, TransformOptions{2u, false});
    auto rh = recount_graph(h), rn = recount_graph(n), ro = recount_graph(spec.result);
    std::uint32_t F = std::max(rh.format(), rn.format()), D = std::max(rh.total_degree(), rn.total_degree());
    std::string tag = "pair " + std::to_string(i);
    if (ro.format() > 2 * F) t.fail(tag + " F_out=" + std::to_string(ro.format()) + " > 2*" + std::to_string(F));
    if (ro.total_degree() > 2 * D) t.fail(tag + " D_out=" + std::to_string(ro.total_degree()) + " > 2*" + std::to_string(D));
    if (spec.fragment != Fragment::Existential) t.fail(tag + " left the existential fragment");
    auto rep = complexity_report(spec);
    if (rep.f_out != ro.format() || rep.d_out != ro.total_degree())
      t.fail(tag + " library profile (" + std::to_string(rep.f_out) + "," + std::to_string(rep.d_out) +
             ") differs from recount (" + std::to_string(ro.format()) + "," + std::to_string(ro.total_degree()) + ")");
    worst_f = std::max(worst_f, F ? 100 * ro.format() / (2 * F) : 0);
    worst_d = std::max(worst_d, D ? 100 * ro.total_degree() / (2 * D) : 0);
  }
  return t.done("100 pairs; max F_out/2F=" + std::to_string(worst_f) + "%, max D_out/2D=" + std::to_string(worst_d) + "%");
}

// ---- 7 ----

Relation random_relation(std::mt19937_64& rng) {
  int v = std::uniform_int_distribution<int>(0, 9)(rng);
  static const Relation rels[] = {Relation::Lt, Relation::Le, Relation::Le, Relation::Ge, Relation::Ge,
                                  Relation::Gt, Relation::Lt, Relation::Le, Relation::Ge, Relation::Eq};
  return rels[v];
}

bool holds(const Rational& lhs, Relation rel, const Rational& rhs) {
  switch (rel) {
    case Relation::Lt: return lhs < rhs;
    case Relation::Le: return lhs <= rhs;
    case Relation::Eq: return lhs == rhs;
    case Relation::Ge: return lhs >= rhs;
    case Relation::Gt: return lhs > rhs;
  }
  return false;
}

// Rows c . v rel b over the eliminated variables only.
struct Row {
  std::vector<Rational> c;
  Relation rel;
  Rational b;
};

// One variable: intersect the half-lines directly.
bool feasible_1(const std::vector<Row>& rows) {
  std::optional<std::pair<Rational, bool>> lo, hi;  // bound, strict
  std::optional<Rational> eq;
  for (const auto& r : rows) {
    const Rational& a = r.c[0];
    if (a == 0) {
      if (!holds(Rational(0), r.rel, r.b)) return false;
      continue;
    }
    Rational v = r.b / a;
    Relation rel = r.rel;
    if (a < 0 && rel != Relation::Eq)
      rel = rel == Relation::Lt ? Relation::Gt : rel == Relation::Le ? Relation::Ge : rel == Relation::Ge ? Relation::Le : Relation::Lt;
    if (rel == Relation::Eq) {
      if (eq && *eq != v) return false;
      eq = v;
    } else if (rel == Relation::Le || rel == Relation::Lt) {
      bool strict = rel == Relation::Lt;
      if (!hi || v < hi->first || (v == hi->first && strict)) hi = {v, strict};
    } else {
      bool strict = rel == Relation::Gt;
      if (!lo || v > lo->first || (v == lo->first && strict)) lo = {v, strict};
    }
  }
  auto ok = [&](const Rational& x) {
    if (lo && (x < lo->first || (x == lo->first && lo->second))) return false;
    if (hi && (x > hi->first || (x == hi->first && hi->second))) return false;
    return true;
  };
  if (eq) return ok(*eq);
  if (!lo || !hi) return true;
  return lo->first < hi->first || (lo->first == hi->first && !lo->second && !hi->second);
}

// Two variables (u, v): the feasible u form an interval whose endpoints are
// u-coordinates of pairwise boundary intersections or of boundaries free of
// v, so testing those values, their midpoints and two outer points is exact.
bool feasible_2(const std::vector<Row>& rows) {
  std::set<Rational> crit;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].c[1] == 0 && rows[i].c[0] != 0) crit.insert(rows[i].b / rows[i].c[0]);
    for (std::size_t j = i + 1; j < rows.size(); ++j) {
      Rational det = rows[i].c[0] * rows[j].c[1] - rows[i].c[1] * rows[j].c[0];
      if (det == 0) continue;
      crit.insert((rows[i].b * rows[j].c[1] - rows[i].c[1] * rows[j].b) / det);
    }
  }
  std::vector<Rational> probes(crit.begin(), crit.end());
  std::vector<Rational> extra;
  if (probes.empty()) {
    extra.push_back(Rational(0));
  } else {
    extra.push_back(probes.front() - 1);
    extra.push_back(probes.back() + 1);
    for (std::size_t k = 0; k + 1 < probes.size(); ++k) extra.push_back((probes[k] + probes[k + 1]) / 2);
  }
  probes.insert(probes.end(), extra.begin(), extra.end());
  for (const auto& u : probes) {
    std::vector<Row> sub;
    for (const auto& r : rows) sub.push_back({{r.c[1]}, r.rel, r.b - r.c[0] * u});
    if (feasible_1(sub)) return true;
  }
  return false;
}

Outcome fm_oracle() {
  Tally t;
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> coef(-3, 3), rhs(-4, 4);
  std::size_t points = 0, mismatches = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t d = std::uniform_int_distribution<std::size_t>(2, 4)(rng);
    std::size_t m = std::uniform_int_distribution<std::size_t>(1, 8)(rng);
    LinearSystem sys;
    for (std::size_t j = 0; j < d; ++j) sys.variables.push_back("v" + std::to_string(j));
    for (std::size_t i = 0; i < m; ++i) {
      LinearConstraint c;
      for (std::size_t j = 0; j < d; ++j) c.coeffs.push_back(Rational(coef(rng)));
      c.rel = random_relation(rng);
      c.rhs = Rational(rhs(rng));
      sys.constraints.push_back(c);
    }
    const std::size_t drop = d >= 3 && trial % 2 ? 2 : 1, keep = d - drop;
    std::vector<std::string> elim(sys.variables.begin() + static_cast<std::ptrdiff_t>(keep), sys.variables.end());
    auto out = fm_eliminate(sys, elim);
    std::vector<int> idx(keep, -8);
    for (;;) {
      std::vector<Rational> pt;
      for (int v : idx) {
        pt.emplace_back(v, 4);
        pt.back().canonicalize();
      }
      std::vector<Row> rows;
      for (const auto& c : sys.constraints) {
        Row r{{}, c.rel, c.rhs};
        for (std::size_t j = 0; j < keep; ++j) r.b -= c.coeffs[j] * pt[j];
        r.c.assign(c.coeffs.begin() + static_cast<std::ptrdiff_t>(keep), c.coeffs.end());
        rows.push_back(r);
      }
      bool oracle = drop == 1 ? feasible_1(rows) : feasible_2(rows);
      bool got = !out.infeasible && out.satisfied_by(pt);
      ++points;
      if (got != oracle) {
        ++mismatches;
        std::string at;
        for (const auto& v : pt) at += (at.empty() ? "" : ",") + to_string(v);
        t.fail("system " + std::to_string(trial) + " drop " + std::to_string(drop) + " at (" + at + ") eliminated " +
               (got ? "feasible" : "infeasible") + ": " + to_json(sys).dump());
        break;
      }
      std::size_t k = 0;
      while (k < keep && ++idx[k] > 8) idx[k++] = -8;
      if (k == keep) break;
    }
  }
  return t.done("200 systems, " + std::to_string(points) + " grid points, " + std::to_string(mismatches) + " mismatches");
}

// ---- 8 ----

Outcome emd() {
  Tally t;
  auto sys = make_neighborhood("emd:l=3,r=1", 3);
  auto* ball = dynamic_cast<const EmdBall*>(sys.get());
  if (!ball) return {false, "emd registry entry is not an EMD ball"};
  std::vector<Rational> d1{1, 0, 0}, d3{0, 0, 1};
  if (ball->distance(d1, d3).first != 2) t.fail("EMD(delta1, delta3) = " + to_string(ball->distance(d1, d3).first));
  if (oracle::transport_vertex_min(d1, d3, ball->metric()) != 2) t.fail("vertex oracle disagrees on the point masses");
  std::mt19937_64 rng(8);
  std::size_t instances = 0;
  for (std::size_t l = 2; l <= 4; ++l) {
    std::vector<std::vector<Rational>> rho(l, std::vector<Rational>(l, Rational(0)));
    std::uniform_int_distribution<int> entry(1, 6);
    for (std::size_t i = 0; i < l; ++i)
      for (std::size_t j = i + 1; j < l; ++j) rho[i][j] = rho[j][i] = entry(rng);
    EmdBall b(rho, Rational(1));
    for (int k = 0; k < 50; ++k) {
      auto x = oracle::rational_simplex_point(rng, l), y = oracle::rational_simplex_point(rng, l);
      ++instances;
      if (b.distance(x, y).first != oracle::transport_vertex_min(x, y, rho)) t.fail("l=" + std::to_string(l) + " pair " + std::to_string(k));
      if (b.distance(x, x).first != 0) t.fail("EMD(x, x) != 0");
    }
  }
  return t.done(std::to_string(instances) + " random pairs exact; EMD(delta1,delta3)=2");
}

// ---- 9 ----

bool erm_ok_ref(double c, int k, double eps, double delta, std::uint64_t m) {
  mpfr_t lhs, t;
  mpfr_inits2(256, lhs, t, (mpfr_ptr)0);
  mpfr_set_d(lhs, c, MPFR_RNDN);
  mpfr_set_ui(t, 2 * m, MPFR_RNDN);
  mpfr_pow_ui(t, t, k, MPFR_RNDN);
  mpfr_mul(lhs, lhs, t, MPFR_RNDN);
  mpfr_set_d(t, -eps / 2, MPFR_RNDN);
  mpfr_mul_ui(t, t, m, MPFR_RNDN);
  mpfr_exp(t, t, MPFR_RNDN);
  mpfr_mul(lhs, lhs, t, MPFR_RNDN);
  bool ok = mpfr_cmp_d(lhs, delta) <= 0;
  mpfr_clears(lhs, t, (mpfr_ptr)0);
  return ok;
}

Outcome lemma_suite() {
  Tally t;
  auto m = erm_threshold(Rational(1), 1, q("1/2"), q("1/2"));
  std::uint64_t scan = 1;
  while (!erm_ok_ref(1, 1, 0.5, 0.5, scan)) ++scan;
  if (m != 17 || scan != 17) t.fail("erm_threshold " + std::to_string(m) + ", scan " + std::to_string(scan));

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> A(0, 20), B(1, 16);
  double worst = 0;
  for (int i = 0; i < 500; ++i) {
    double a = A(rng), b = B(rng), bound = 2 * a + 4 * b * std::log2(4 * b);
    // brute force: last grid x in [1, 4 * bound] with x <= a + b log2 x
    double top = 4 * bound, step = top / 200000, best = 0;
    for (double x = 1; x <= top; x += step)
      if (x <= a + b * std::log2(x)) best = x;
    if (best > bound) t.fail("a=" + fmt(a) + " b=" + fmt(b) + " extremal " + fmt(best));
    worst = std::max(worst, best / bound);
  }

  std::uniform_int_distribution<int> AA(2, 1000), K(1, 12);
  std::size_t scanned = 0;
  for (int i = 0; i < 200; ++i) {
    double av = AA(rng), k = K(rng), bound = 4 * k * std::log2(av);
    // integer scan of d <= k log2(A d / k) well past the bound
    std::uint64_t last = 0;
    for (std::uint64_t d = 1; d <= static_cast<std::uint64_t>(4 * bound) + 16; ++d)
      if (double(d) <= k * std::log2(av * double(d) / k)) last = d;
    scanned += last > 0;
    if (double(last) > bound) t.fail("A=" + fmt(av) + " k=" + fmt(k) + " d=" + std::to_string(last));
    if (last != vc_consistency_extremal(av, k)) t.fail("library extremal differs at A=" + fmt(av) + " k=" + fmt(k));
  }
  return t.done("m=17; 500 (a,b) max ratio " + fmt(worst) + "; 200 (A,k), " + std::to_string(scanned) + " with d >= 1");
}

// ---- 10 ----

Outcome growth_shape() {
  Tally t;
  GrowthConfig cfg;
  cfg.seed = 10;
  StrategicOptions so;
  so.search = fast_search_config(2);
  auto rep = growth_estimate(make_family("halfspace:l=2"), make_neighborhood("lp:l=2,p=2,r=1", 2), cfg, so);
  std::string counts;
  for (const auto& p : rep.points) counts += (counts.empty() ? "" : ",") + std::to_string(p.max_traces);
  if (!(rep.slope <= 3.3)) t.fail("slope " + fmt(rep.slope));

  GrowthConfig tc;
  tc.gap_sweep = true;
  tc.seed = 10;
  auto th = growth_estimate(make_family("threshold"), nullptr, tc);
  for (const auto& p : th.points)
    if (p.max_traces != p.m + 1) t.fail("threshold m=" + std::to_string(p.m) + " gives " + std::to_string(p.max_traces));
  return t.done("halfspace traces (" + counts + "), slope " + fmt(rep.slope) + "; thresholds m+1 on all m");
}

// ---- 11 ----

Outcome sweep_shape() {
  Tally t;
  LearnProblem p(make_family("halfspace:l=2"), make_neighborhood("lp:l=2,p=2,r=1", 2));
  SweepOptions so;
  so.trials = 60;
  so.grid_ratio = 1.1;
  so.m_max = 600;
  so.seed = 0;
  so.target = std::vector<double>{0.6, 0.8, 0.0};
  so.erm.inject_target = false;
  auto rep = sample_complexity_sweep(p, so);
  std::vector<double> me;
  std::string shape;
  for (const auto& r : rep.rows) {
    if (r.m_hat == 0) t.fail("no qualifying m for eps=" + fmt(r.eps));
    me.push_back(double(r.m_hat) * r.eps);
    shape += (shape.empty() ? "" : ", ") + ("eps " + fmt(r.eps) + ": m_hat " + std::to_string(r.m_hat));
  }
  for (std::size_t i = 0; i + 1 < me.size(); ++i)
    if (me[i + 1] < me[i]) t.fail("m_hat*eps decreases at eps=" + fmt(rep.rows[i + 1].eps));
  if (!me.empty() && me.front() > 0 && me.back() / me.front() > 4) t.fail("growth factor " + fmt(me.back() / me.front()));
  // zero empirical error across every fitted sample of the sweep
  double zero = 0;
  for (double z : rep.zero_error_rate) zero += z;
  zero /= double(rep.zero_error_rate.size());
  double worst = *std::min_element(rep.zero_error_rate.begin(), rep.zero_error_rate.end());
  if (zero < 0.95) t.fail("zero-error rate " + fmt(zero));
  return t.done(shape + "; ratio " + fmt(me.back() / me.front()) + ", zero-error rate " + fmt(zero) + " (worst m " +
                fmt(worst) + ")");
}

// ---- 12 ----

Outcome determinism() {
  Tally t;
  auto dir = work_dir();
  {
    std::ofstream(dir / "sys.json") << R"j({"formula": "(and (>= w0 x0) (>= w0 x1) (<= w0 x2) (< x2 3))"})j";
  }
  std::vector<std::string> runs{
      "transform --hypothesis halfspace:l=2 --neighborhood lp:l=2,p=2,r=1/2 --out {J}",
      "fm-elim --in '" + (dir / "sys.json").string() + "' --drop w0 --out {J}",
      "verify-blowup --construction fixed --n 4 --r 1 --rp 1/2 --out {J}",
      "verify-blowup --construction all-radii --n 2 --out {J}",
      "verify-blowup --construction partition --n 3 --out {J}",
      "verify-blowup --construction frac --n 2 --out {J}",
      "--seed 5 growth --family halfspace:l=2 --neighborhood lp:l=2,p=2,r=1 --m 8,16 --trials 2 --params 300 --csv {C} --out {J}",
      "--seed 5 growth --family threshold --gap-sweep --m 8,16,32 --csv {C} --out {J}",
      "--seed 5 learn --family threshold --trials 20 --m-max 200 --csv {C} --out {J}",
      "--seed 5 learn --family halfspace:l=2 --neighborhood lp:l=2,p=2,r=1 --eps 0.2,0.1 --trials 20 --m-max 200 --csv {C} --out {J}",
  };
  std::size_t compared = 0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    std::vector<std::string> texts[2];
    for (int rep = 0; rep < 2; ++rep) {
      std::string args = runs[i];
      auto json_path = dir / ("run" + std::to_string(i) + "-" + std::to_string(rep) + ".json");
      auto csv_path = dir / ("run" + std::to_string(i) + "-" + std::to_string(rep) + ".csv");
      for (auto [key, path] : {std::pair{"{J}", json_path}, std::pair{"{C}", csv_path}}) {
        auto pos = args.find(key);
        if (pos != std::string::npos) args.replace(pos, 3, "'" + path.string() + "'");
      }
      int rc = run_cli(args);
      if (rc != 0) t.fail("run " + std::to_string(i) + " exit " + std::to_string(rc));
      texts[rep].push_back(slurp(json_path));
      if (runs[i].find("{C}") != std::string::npos) texts[rep].push_back(slurp(csv_path));
    }
    for (std::size_t k = 0; k < texts[0].size(); ++k) {
      ++compared;
      if (texts[0][k].empty() || texts[0][k] != texts[1][k]) t.fail("run " + std::to_string(i) + " artifact " + std::to_string(k) + " differs");
    }
  }
  // shatter replays the fixed certificate
  auto cert = dir / "run2-0.json";
  for (int rep = 0; rep < 2; ++rep)
    if (run_cli("shatter --instance '" + cert.string() + "' --out '" + (dir / ("sh" + std::to_string(rep) + ".json")).string() + "'") != 0)
      t.fail("shatter exit");
  ++compared;
  if (slurp(dir / "sh0.json") != slurp(dir / "sh1.json")) t.fail("shatter artifact differs");
  if (run_cli("no-such-command") != 2) t.fail("unknown subcommand does not exit 2");
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().string().find(".tmp.") != std::string::npos) t.fail("leftover temporary " + e.path().string());
  return t.done(std::to_string(compared) + " artifacts replayed byte-identically");
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"fixed-radius blowup", fixed_blowup},
      {"all-radii construction", all_radii},
      {"partition pathology", partition},
      {"fractional-part construction", frac_construction},
      {"transform semantics", transform_semantics},
      {"complexity bookkeeping", complexity_bookkeeping},
      {"fm elimination oracle", fm_oracle},
      {"lp and emd", emd},
      {"counting lemmas", lemma_suite},
      {"growth shape", growth_shape},
      {"erm sweep shape", sweep_shape},
      {"cli determinism", determinism},
  };
  std::set<std::size_t> only;
  for (int i = 1; i < argc; ++i) only.insert(std::stoul(argv[i]));
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!only.empty() && !only.contains(i + 1)) continue;
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    all = all && o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << ' ' << i + 1 << ' ' << criteria[i].first << ": " << o.detail << " ["
              << fmt(seconds_since(t0)) << "s]" << std::endl;
  }
  std::error_code ec;
  fs::remove_all(work_dir(), ec);
  return all ? 0 : 1;
}
