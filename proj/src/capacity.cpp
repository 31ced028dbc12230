#include "stratdef/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "stratdef/parallel.hpp"

namespace stratdef {

Labels make_labels(std::size_t cols) { return Labels((cols + 63) / 64, 0); }

std::string labels_to_string(const Labels& l, std::size_t cols) {
  std::string s(cols, '0');
  for (std::size_t j = 0; j < cols; ++j)
    if (get_label(l, j)) s[j] = '1';
  return s;
}

LabelMatrix build_label_matrix(std::size_t rows, std::size_t cols, const LabelFn& label, const std::string& provenance,
                               unsigned workers) {
  LabelMatrix m;
  m.cols = cols;
  m.rows.assign(rows, make_labels(cols));
  m.provenance.assign(rows, provenance);
  std::vector<char> flagged(rows, 0);
  parallel_for(rows, workers, [&](std::size_t h) {
    for (std::size_t j = 0; j < cols; ++j) {
      auto v = label(h, j);
      if (!v) {
        flagged[h] = 1;
        continue;
      }
      set_label(m.rows[h], j, *v);
    }
  });
  m.flagged.assign(flagged.begin(), flagged.end());
  return m;
}

namespace {

TraceSet dedupe(std::vector<Labels> rows, std::size_t cols, std::size_t flagged) {
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  return {cols, std::move(rows), flagged};
}

}  // namespace

TraceSet trace_set(const LabelMatrix& m) {
  std::vector<Labels> rows;
  std::size_t flagged = 0;
  for (std::size_t h = 0; h < m.rows.size(); ++h) {
    if (!m.flagged.empty() && m.flagged[h]) {
      ++flagged;
      continue;
    }
    rows.push_back(m.rows[h]);
  }
  return dedupe(std::move(rows), m.cols, flagged);
}

TraceSet trace_set(const LabelMatrix& m, const std::vector<std::size_t>& columns) {
  std::vector<Labels> rows;
  std::size_t flagged = 0;
  for (std::size_t h = 0; h < m.rows.size(); ++h) {
    if (!m.flagged.empty() && m.flagged[h]) {
      ++flagged;
      continue;
    }
    Labels r = make_labels(columns.size());
    for (std::size_t j = 0; j < columns.size(); ++j) set_label(r, j, get_label(m.rows[h], columns[j]));
    rows.push_back(std::move(r));
  }
  return dedupe(std::move(rows), columns.size(), flagged);
}

ShatterReport is_shattered(const TraceSet& t, std::size_t missing_cap) {
  ShatterReport r;
  r.distinct = t.count();
  r.flagged_rows = t.flagged_rows;
  if (t.cols >= 63) {
    r.shattered = false;  // more labelings than any materialized trace set
    return r;
  }
  const std::uint64_t total = std::uint64_t{1} << t.cols;
  r.shattered = r.distinct == total;
  if (r.shattered) return r;
  // Traces with at most one word are sorted by value.
  for (std::uint64_t v = 0, k = 0; v < total && r.missing.size() < missing_cap; ++v) {
    while (k < t.distinct.size() && (t.distinct[k].empty() ? 0 : t.distinct[k][0]) < v) ++k;
    if (k < t.distinct.size() && (t.distinct[k].empty() ? 0 : t.distinct[k][0]) == v) continue;
    Labels l = make_labels(t.cols);
    if (!l.empty()) l[0] = v;
    r.missing.push_back(std::move(l));
  }
  return r;
}

ShatterReport is_shattered(const LabelMatrix& m, std::size_t missing_cap) {
  return is_shattered(trace_set(m), missing_cap);
}

namespace {

// Visits k-subsets of [n] in lexicographic order until `visit` returns true.
bool for_each_subset(std::size_t n, std::size_t k, const std::function<bool(const std::vector<std::size_t>&)>& visit) {
  if (k > n) return false;
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    if (visit(idx)) return true;
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) return false;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

VcSearchResult vc_search(std::size_t pool, std::size_t max_size, std::size_t budget,
                         const std::function<bool(const std::vector<std::size_t>&)>& shattered) {
  VcSearchResult res;
  auto check = [&](const std::vector<std::size_t>& s) {
    if (res.subsets_checked >= budget) {
      res.budget_exhausted = true;
      return false;
    }
    ++res.subsets_checked;
    return shattered(s);
  };
  for (std::size_t k = 1; k <= std::min(max_size, pool); ++k) {
    bool found = false;
    // Greedy: extend the current witness by one pool point.
    if (!res.witness.empty()) {
      for (std::size_t p = 0; p < pool && !found; ++p) {
        if (std::find(res.witness.begin(), res.witness.end(), p) != res.witness.end()) continue;
        auto cand = res.witness;
        cand.push_back(p);
        std::sort(cand.begin(), cand.end());
        if (check(cand)) {
          res.witness = cand;
          found = true;
        }
      }
    }
    if (!found) {
      found = for_each_subset(pool, k, [&](const std::vector<std::size_t>& s) {
        if (res.budget_exhausted) return true;
        if (check(s)) {
          res.witness = s;
          return true;
        }
        return false;
      });
      if (res.budget_exhausted && (res.witness.size() != k)) break;
    }
    if (!found || res.witness.size() != k) break;
    res.size = k;
  }
  return res;
}

}  // namespace

VcSearchResult vc_lower_bound(const LabelMatrix& pool, std::size_t budget) {
  std::size_t usable = 0;
  for (std::size_t h = 0; h < pool.rows.size(); ++h) usable += pool.flagged.empty() || !pool.flagged[h];
  std::size_t max_size = 0;
  while (max_size < 62 && (std::size_t{1} << (max_size + 1)) <= usable) ++max_size;
  return vc_search(pool.cols, max_size, budget,
                   [&](const std::vector<std::size_t>& s) { return is_shattered(trace_set(pool, s), 0).shattered; });
}

VcSearchResult vc_lower_bound(std::size_t pool_size, const RealizableFn& realizable, std::size_t max_size,
                              std::size_t budget) {
  return vc_search(pool_size, std::min<std::size_t>(max_size, 62), budget, [&](const std::vector<std::size_t>& s) {
    for (std::uint64_t v = 0; v < (std::uint64_t{1} << s.size()); ++v) {
      Labels l = make_labels(s.size());
      if (!l.empty()) l[0] = v;
      if (!realizable(s, l)) return false;
    }
    return true;
  });
}

// ---- growth ----

double loglog_slope(const std::vector<GrowthPoint>& pts) {
  std::vector<std::pair<double, double>> xy;
  for (const auto& p : pts)
    if (p.m > 0 && p.max_traces > 0) xy.emplace_back(std::log(double(p.m)), std::log(double(p.max_traces)));
  if (xy.size() < 2) return 0;
  double mx = 0, my = 0;
  for (auto [x, y] : xy) mx += x, my += y;
  mx /= xy.size(), my /= xy.size();
  double sxy = 0, sxx = 0;
  for (auto [x, y] : xy) sxy += (x - mx) * (y - my), sxx += (x - mx) * (x - mx);
  return sxx > 0 ? sxy / sxx : 0;
}

GrowthReport growth_estimate(std::shared_ptr<const HypothesisFamily> family,
                             std::shared_ptr<const NeighborhoodSystem> n, const GrowthConfig& cfg,
                             const StrategicOptions& opts) {
  if (cfg.ms.empty()) throw std::invalid_argument("growth: empty m list");
  const std::size_t mmax = *std::max_element(cfg.ms.begin(), cfg.ms.end());
  const std::uint32_t l = family->input_dim();
  std::optional<StrategicClassifier> cls;
  if (n) cls.emplace(family, n, opts);
  if (cfg.gap_sweep && (l != 1 || family->param_dim() != 1))
    throw std::invalid_argument("growth: gap sweep needs a one-dimensional threshold family");

  GrowthReport rep;
  for (auto m : cfg.ms) rep.points.push_back({m, 0, 0});
  for (std::size_t set = 0; set < cfg.point_sets; ++set) {
    std::seed_seq pseed{std::uint64_t(cfg.seed), std::uint64_t(set), std::uint64_t(0x9e37)};
    std::mt19937_64 prng(pseed);
    std::vector<std::vector<double>> pts;
    std::uniform_real_distribution<double> U(cfg.lo, cfg.hi);
    for (std::size_t j = 0; j < mmax; ++j) {
      if (n) {
        pts.push_back(n->sample_input(prng, cfg.lo, cfg.hi));
      } else {
        std::vector<double> x(l);
        for (auto& v : x) v = U(prng);
        pts.push_back(std::move(x));
      }
    }
    std::vector<std::vector<double>> params;
    if (cfg.gap_sweep) {
      // Critical thresholds: labels change only where a crosses x + reach(x).
      std::vector<double> crit;
      for (const auto& x : pts) {
        double zero = 0;
        if (n) {
          auto v = family->reach(*n, std::span<const double>(&zero, 1), x);
          if (!v) throw std::invalid_argument("growth: gap sweep needs a reach oracle");
          crit.push_back(v->margin);
        } else {
          crit.push_back(x[0]);
        }
      }
      std::sort(crit.begin(), crit.end());
      params.push_back({crit.front() - 1});
      for (std::size_t j = 0; j < crit.size(); ++j) {
        params.push_back({crit[j]});
        if (j + 1 < crit.size()) params.push_back({(crit[j] + crit[j + 1]) / 2});
      }
      params.push_back({crit.back() + 1});
    } else {
      std::seed_seq aseed{std::uint64_t(cfg.seed), std::uint64_t(set), std::uint64_t(0x7f4a)};
      std::mt19937_64 arng(aseed);
      for (std::size_t p = 0; p < cfg.params_per_set; ++p) params.push_back(family->sample_params(arng));
    }
    auto labels = build_label_matrix(
        params.size(), mmax,
        [&](std::size_t h, std::size_t j) -> std::optional<bool> {
          if (!cls) return family->evaluate(params[h], pts[j]);
          auto lab = cls->label(params[h], pts[j]);
          if (lab.source == StrategicLabel::Source::Inconclusive) return std::nullopt;
          return lab.value;
        },
        "sampled(" + std::to_string(cfg.seed) + ")", cfg.workers);
    for (auto& gp : rep.points) {
      std::vector<std::size_t> cols(gp.m);
      std::iota(cols.begin(), cols.end(), 0);
      auto t = trace_set(labels, cols);
      gp.max_traces = std::max(gp.max_traces, t.count());
      gp.flagged += t.flagged_rows;
    }
  }
  rep.slope = loglog_slope(rep.points);
  return rep;
}

// ---- counting bounds ----

SauerBound sauer_bound(std::uint64_t m, std::uint64_t d) {
  if (m < d) throw std::invalid_argument("sauer bound needs m >= d");
  SauerBound b;
  Integer term = 1;
  b.exact = 0;
  for (std::uint64_t i = 0; i <= d; ++i) {
    if (i > 0) term = term * (m - i + 1) / i;
    b.exact += term;
  }
  b.upper_form = d == 0 ? 1.0 : std::pow(std::exp(1.0) * double(m) / double(d), double(d));
  return b;
}

bool erm_condition(const Rational& c, std::uint32_t k, const Rational& eps, const Rational& delta, std::uint64_t m) {
  if (c < 1 || k < 1 || eps <= 0 || eps >= 1 || delta <= 0 || delta >= 1)
    throw std::invalid_argument("erm threshold needs C >= 1, k >= 1, eps and delta in (0, 1)");
  // ln C + k ln(2m) - ln delta - eps m / 2 <= 0
  Rational two_m(Integer(std::to_string(m)) * 2);
  const auto& policy = default_precision();
  for (unsigned bits = policy.initial; bits <= policy.cap; bits *= 2) {
    Interval g = log_enclosure(Interval(c), bits) + Interval(Rational(k)) * log_enclosure(Interval(two_m), bits) -
                 log_enclosure(Interval(delta), bits) - Interval(Rational(eps * two_m / 4));
    if (g.hi() <= 0) return true;
    if (g.lo() > 0) return false;
  }
  throw UndecidedError("erm threshold: comparison undecided at m = " + std::to_string(m));
}

std::uint64_t erm_threshold(const Rational& c, std::uint32_t k, const Rational& eps, const Rational& delta) {
  auto ok = [&](std::uint64_t m) { return erm_condition(c, k, eps, delta, m); };
  if (ok(1)) return 1;
  // The log of the left side is concave in m, so the failing m form an
  // interval starting at 1 that extends past the maximum at m = 2k / eps.
  Integer hump_z = ceil(Rational(2 * k) / eps);
  std::uint64_t lo = std::max<std::uint64_t>(1, hump_z.get_ui());
  if (ok(lo)) {
    lo = 1;
  }
  std::uint64_t hi = std::max<std::uint64_t>(lo, 1) * 2;
  while (!ok(hi)) {
    lo = hi;
    if (hi > (std::uint64_t{1} << 61)) throw std::overflow_error("erm threshold too large");
    hi *= 2;
  }
  // ok(hi), not ok(lo) or lo == 1 failing
  while (hi - lo > 1) {
    std::uint64_t mid = lo + (hi - lo) / 2;
    (ok(mid) ? hi : lo) = mid;
  }
  return hi;
}

double log_self_bound(double a, double b) {
  if (a < 0 || b < 1) throw std::invalid_argument("log self-bound needs a >= 0, b >= 1");
  return 2 * a + 4 * b * std::log2(4 * b);
}

double vc_from_growth_bound(double c, double k) {
  if (c < 1 || k < 1) throw std::invalid_argument("vc-from-growth needs C >= 1, k >= 1");
  return 2 * std::log2(c) + 4 * k * std::log2(4 * k);
}

double vc_consistency_bound(double a, double k) {
  if (a < 2 || k < 1) throw std::invalid_argument("vc-consistency needs A >= 2, k >= 1");
  return 4 * k * std::log2(a);
}

double log_self_extremal(double a, double b) {
  if (a < 0 || b < 1) throw std::invalid_argument("log self-bound needs a >= 0, b >= 1");
  auto g = [&](double x) { return a + b * std::log2(x) - x; };
  // g is concave with g(1) = a >= 0; bracket the last crossing.
  double lo = std::max(1.0, b / std::log(2.0));
  double hi = 2 * lo + 2 * a + 2;
  while (g(hi) >= 0) lo = hi, hi *= 2;
  for (int i = 0; i < 200; ++i) {
    double mid = (lo + hi) / 2;
    (g(mid) >= 0 ? lo : hi) = mid;
  }
  return lo;
}

std::uint64_t vc_consistency_extremal(double a, double k) {
  if (a < 2 || k < 1) throw std::invalid_argument("vc-consistency needs A >= 2, k >= 1");
  auto ok = [&](double d) { return d <= k * std::log2(a * d / k); };
  std::uint64_t best = 0;
  const double peak = k / std::log(2.0);
  for (std::uint64_t d = 1;; ++d) {
    if (ok(double(d))) {
      best = d;
    } else if (double(d) > peak) {
      break;
    }
  }
  return best;
}

// ---- sign patterns ----

namespace {

void trim(UPoly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

int deg(const UPoly& p) { return static_cast<int>(p.size()) - 1; }

Rational eval(const UPoly& p, const Rational& x) {
  Rational v = 0;
  for (std::size_t i = p.size(); i-- > 0;) v = v * x + p[i];
  return v;
}

int sgn(const Rational& v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); }

UPoly derivative(const UPoly& p) {
  UPoly d;
  for (std::size_t i = 1; i < p.size(); ++i) d.push_back(p[i] * Rational(i));
  trim(d);
  return d;
}

// p = q * d + r
std::pair<UPoly, UPoly> divmod(UPoly p, const UPoly& d) {
  trim(p);
  if (d.empty()) throw std::domain_error("polynomial division by zero");
  UPoly q(std::max<int>(deg(p) - deg(d) + 1, 0), Rational(0));
  while (!p.empty() && deg(p) >= deg(d)) {
    int shift = deg(p) - deg(d);
    Rational f = p.back() / d.back();
    q[shift] = f;
    for (std::size_t i = 0; i < d.size(); ++i) p[i + shift] -= f * d[i];
    p.pop_back();
    trim(p);
  }
  trim(q);
  return {q, p};
}

UPoly monic(UPoly p) {
  trim(p);
  if (p.empty()) return p;
  Rational lead = p.back();
  for (auto& c : p) c /= lead;
  return p;
}

UPoly gcd(UPoly a, UPoly b) {
  trim(a), trim(b);
  while (!b.empty()) {
    UPoly r = divmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  return monic(a);
}

UPoly mul(const UPoly& a, const UPoly& b) {
  if (a.empty() || b.empty()) return {};
  UPoly c(a.size() + b.size() - 1, Rational(0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  return c;
}

UPoly squarefree(const UPoly& p) {
  if (deg(p) <= 0) return p;
  return monic(divmod(p, gcd(p, derivative(p))).first);
}

struct Sturm {
  std::vector<UPoly> seq;
  explicit Sturm(const UPoly& p) {
    seq.push_back(p);
    seq.push_back(derivative(p));
    while (!seq.back().empty()) {
      UPoly r = divmod(seq[seq.size() - 2], seq.back()).second;
      for (auto& c : r) c = -c;
      if (r.empty()) break;
      seq.push_back(std::move(r));
    }
    while (!seq.empty() && seq.back().empty()) seq.pop_back();
  }
  int changes(const Rational& x) const {
    int n = 0, last = 0;
    for (const auto& p : seq) {
      int s = sgn(eval(p, x));
      if (s == 0) continue;
      if (last != 0 && s != last) ++n;
      last = s;
    }
    return n;
  }
  // Distinct roots in (a, b].
  int count(const Rational& a, const Rational& b) const { return changes(a) - changes(b); }
};

struct RootItem {
  Rational lo, hi;  // lo == hi for exact roots; else the root is in (lo, hi)
  bool exact() const { return lo == hi; }
};

}  // namespace

std::size_t sign_pattern_count_univariate(const std::vector<UPoly>& ps, std::vector<std::vector<int>>* patterns) {
  std::vector<UPoly> polys;
  for (auto p : ps) {
    trim(p);
    polys.push_back(std::move(p));
  }
  // Product of the squarefree parts, made squarefree again.
  UPoly q{Rational(1)};
  for (const auto& p : polys)
    if (deg(p) >= 1) q = mul(q, squarefree(p));
  q = squarefree(q);

  std::vector<RootItem> items;
  // Deflate rational roots found at bisection midpoints, then isolate.
  bool restart = true;
  while (restart && deg(q) >= 1) {
    restart = false;
    Sturm st(q);
    Rational bound = 0;
    for (const auto& c : q) bound = std::max(bound, Rational(abs(c / q.back())));
    bound += 1;
    std::vector<std::pair<Rational, Rational>> stack{{-bound, bound}};
    std::vector<RootItem> found;
    while (!stack.empty() && !restart) {
      auto [a, b] = stack.back();
      stack.pop_back();
      int c = st.count(a, b);
      if (c == 0) continue;
      if (c == 1) {
        found.push_back({a, b});
        continue;
      }
      Rational mid = (a + b) / 2;
      if (eval(q, mid) == 0) {
        items.push_back({mid, mid});
        q = monic(divmod(q, UPoly{-mid, Rational(1)}).first);
        restart = true;
        break;
      }
      stack.push_back({a, mid});
      stack.push_back({mid, b});
    }
    if (!restart) {
      for (auto& f : found) items.push_back(f);
    }
  }
  // Shrink interval items until every item is separated from the others.
  auto shrink = [&](RootItem& it) {
    Rational mid = (it.lo + it.hi) / 2;
    int smid = sgn(eval(q, mid));
    if (smid == 0) {
      it.lo = it.hi = mid;
      return;
    }
    int slo = sgn(eval(q, it.lo));
    (smid == slo ? it.lo : it.hi) = mid;
  };
  bool changed = true;
  while (changed) {
    changed = false;
    std::sort(items.begin(), items.end(), [](const RootItem& a, const RootItem& b) { return a.lo < b.lo; });
    for (std::size_t i = 0; i + 1 < items.size(); ++i) {
      if (items[i].hi < items[i + 1].lo) continue;
      if (!items[i].exact()) shrink(items[i]);
      if (!items[i + 1].exact()) shrink(items[i + 1]);
      changed = true;
    }
  }

  std::set<std::vector<int>> seen;
  auto signs_at = [&](const Rational& x) {
    std::vector<int> s;
    for (const auto& p : polys) s.push_back(sgn(eval(p, x)));
    seen.insert(s);
  };
  if (items.empty()) {
    signs_at(Rational(0));
  } else {
    signs_at(items.front().lo - 1);
    signs_at(items.back().hi + 1);
    for (std::size_t i = 0; i + 1 < items.size(); ++i) signs_at((items[i].hi + items[i + 1].lo) / 2);
    for (auto it : items) {
      if (it.exact()) {
        signs_at(it.lo);
        continue;
      }
      std::vector<int> s;
      for (const auto& p : polys) {
        if (deg(p) < 1) {
          s.push_back(p.empty() ? 0 : sgn(p[0]));
          continue;
        }
        UPoly g = gcd(p, q);
        if (deg(g) >= 1 && Sturm(g).count(it.lo, it.hi) == 1) {
          s.push_back(0);
          continue;
        }
        // p has no root at this one; shrink until p has none in the interval.
        UPoly sp = squarefree(p);
        Sturm sps(sp);
        RootItem cur = it;
        while (sps.count(cur.lo, cur.hi) > 0 && !cur.exact()) shrink(cur);
        s.push_back(sgn(eval(p, cur.exact() ? cur.lo : cur.hi)));
      }
      seen.insert(s);
    }
  }
  if (patterns) patterns->assign(seen.begin(), seen.end());
  return seen.size();
}

std::size_t sign_pattern_count_sampled(const std::vector<Polynomial>& ps, const std::vector<VarRef>& vars,
                                       std::size_t samples, std::uint64_t seed, double lo, double hi) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(lo, hi);
  std::set<std::vector<int>> seen;
  std::map<VarRef, Rational> point;
  for (std::size_t s = 0; s < samples; ++s) {
    for (auto v : vars) point[v] = Rational(U(rng));
    std::vector<int> sig;
    for (const auto& p : ps) {
      Rational val = p.evaluate([&](VarRef v) {
        auto it = point.find(v);
        if (it == point.end()) throw std::invalid_argument("sign patterns: unassigned variable " + to_string(v));
        return it->second;
      });
      sig.push_back(sgn(val));
    }
    seen.insert(std::move(sig));
  }
  return seen.size();
}

}  // namespace stratdef
