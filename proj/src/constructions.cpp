#include "stratdef/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "stratdef/capacity.hpp"

namespace stratdef {

namespace {

Rational abs_q(const Rational& v) { return v < 0 ? Rational(-v) : v; }

Rational pow2(int e) {
  Rational v(1);
  if (e >= 0) {
    mpz_mul_2exp(v.get_num_mpz_t(), v.get_num_mpz_t(), static_cast<unsigned>(e));
  } else {
    mpz_mul_2exp(v.get_den_mpz_t(), v.get_den_mpz_t(), static_cast<unsigned>(-e));
  }
  v.canonicalize();
  return v;
}

Rational pow10_neg(unsigned e) {
  Integer d = 1;
  for (unsigned i = 0; i < e; ++i) d *= 10;
  Rational v(Integer(1), d);
  v.canonicalize();
  return v;
}

nlohmann::json interval_json(const Interval& iv) {
  return {{"lo", to_string(iv.lo())}, {"hi", to_string(iv.hi())}};
}

nlohmann::json rationals_json(const std::vector<Rational>& v) {
  auto out = nlohmann::json::array();
  for (const auto& x : v) out.push_back(to_string(x));
  return out;
}

nlohmann::json checks_json(const std::vector<CheckResult>& checks) {
  auto out = nlohmann::json::array();
  for (const auto& c : checks) out.push_back(to_json(c));
  return out;
}

// Strategic shattering certificate shared by the finite constructions: the
// trace of row S must be exactly S.
CheckResult shattering_check(const std::string& name, std::uint32_t n,
                             const std::function<bool(std::uint64_t, std::size_t)>& label) {
  const std::size_t rows = std::size_t{1} << n;
  auto m = build_label_matrix(rows, n, [&](std::size_t s, std::size_t i) -> std::optional<bool> { return label(s, i); });
  std::size_t wrong = 0;
  std::uint64_t first_wrong = 0;
  for (std::size_t s = 0; s < rows; ++s) {
    bool ok = true;
    for (std::uint32_t i = 0; i < n; ++i) ok = ok && get_label(m.rows[s], i) == bool(s >> i & 1);
    if (!ok && wrong++ == 0) first_wrong = s;
  }
  auto t = trace_set(m);
  bool pass = wrong == 0 && t.count() == rows;
  std::ostringstream d;
  d << t.count() << " of " << rows << " labelings realized";
  if (wrong) d << "; " << wrong << " rows differ from their subset, first " << subset_string(first_wrong, n);
  return {name, pass, d.str()};
}

CheckResult class_vc_check(const FiniteSupportClass& cls) {
  bool nonempty = true;
  for (std::size_t i = 0; i < cls.size(); ++i) nonempty = nonempty && !cls.set(i).empty();
  bool pass = cls.pairwise_disjoint() && nonempty && cls.size() >= 2;
  std::ostringstream d;
  d << cls.size() << " hypotheses, " << (cls.pairwise_disjoint() ? "pairwise disjoint" : "overlapping")
    << (nonempty ? ", all nonempty" : ", some empty");
  return {"class-vc-1", pass, d.str()};
}

}  // namespace

nlohmann::json to_json(const CheckResult& c) { return {{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}}; }

bool all_pass(const std::vector<CheckResult>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

std::string subset_string(std::uint64_t mask, std::uint32_t n) {
  std::string s = "{";
  bool first = true;
  for (std::uint32_t i = 0; i < n; ++i) {
    if (!(mask >> i & 1)) continue;
    if (!first) s += ",";
    s += std::to_string(i + 1);
    first = false;
  }
  return s + "}";
}

// ---- fixed blowup ----

bool FixedBlowup::strategic_label(std::uint64_t s_mask, const Rational& x, const Rational& s) const {
  const auto& f = hypotheses.set(s_mask);
  auto it = std::lower_bound(f.begin(), f.end(), Rational(x - s));
  return it != f.end() && *it <= x + s;
}

CheckResult check_shattering(const FixedBlowup& b, const Rational& s) {
  return shattering_check("shatter s=" + to_string(s), b.n, [&](std::uint64_t mask, std::size_t i) {
    return b.strategic_label(mask, b.anchors[i], s);
  });
}

FixedBlowup build_fixed_blowup(std::uint32_t n, const Rational& r, const Rational& rp, const Rational& shift) {
  if (n < 1 || n > 16) throw std::invalid_argument("fixed blowup: n must be in [1, 16]");
  if (rp <= 0) throw std::invalid_argument("fixed blowup: r' must be positive");
  if (rp > r) throw std::invalid_argument("fixed blowup: r' = " + to_string(rp) + " exceeds r = " + to_string(r));
  FixedBlowup b;
  b.n = n, b.r = r, b.rp = rp, b.shift = shift;
  for (std::uint32_t i = 1; i <= n; ++i) b.anchors.push_back(shift + 10 * r * i);
  const std::uint64_t subsets = std::uint64_t{1} << n;
  const Rational scale = rp / (4 * Rational(Integer(subsets)));
  std::vector<std::vector<Rational>> sets;
  for (std::uint64_t s = 0; s < subsets; ++s) {
    Rational jitter = scale * Rational(Integer(std::to_string(s)));  // < r'/4, distinct per S
    std::vector<Rational> row;
    for (std::uint32_t i = 0; i < n; ++i) {
      Rational off = (s >> i & 1) ? Rational(rp / 2) : Rational(3 * r / 2);
      row.push_back(b.anchors[i] + off + jitter);
    }
    b.q.push_back(row);
    sets.push_back(row);
  }
  b.hypotheses = FiniteSupportClass(sets, false);

  b.checks.push_back({"disjoint-supports", b.hypotheses.pairwise_disjoint(),
                      std::to_string(subsets) + " sets F_S compared exactly"});
  bool near = true, far = true;
  for (std::uint64_t s = 0; s < subsets; ++s)
    for (std::uint32_t i = 0; i < n; ++i) {
      Rational d = abs_q(b.q[s][i] - b.anchors[i]);
      if (s >> i & 1) {
        near = near && d < rp;
      } else {
        far = far && d > r;
      }
    }
  b.checks.push_back({"near-points", near, "|q_i^S - p_i| < r' for i in S"});
  b.checks.push_back({"far-points", far, "|q_i^S - p_i| > r for i not in S"});
  bool sep = true;
  for (std::uint32_t i = 0; i < n; ++i)
    for (std::uint32_t j = i + 1; j < n; ++j) sep = sep && abs_q(b.anchors[i] - b.anchors[j]) > 4 * r;
  b.checks.push_back({"anchor-separation", sep, "|p_i - p_j| = 10 r |i - j| > 4 r"});
  b.checks.push_back(class_vc_check(b.hypotheses));
  for (const Rational& s : {rp, Rational((r + rp) / 2), r}) b.checks.push_back(check_shattering(b, s));
  return b;
}

nlohmann::json FixedBlowup::to_json() const {
  nlohmann::json j;
  j["construction"] = "fixed";
  j["n"] = n;
  j["r"] = to_string(r);
  j["rp"] = to_string(rp);
  j["shift"] = to_string(shift);
  j["anchors"] = rationals_json(anchors);
  auto w = nlohmann::json::array();
  for (std::size_t s = 0; s < q.size(); ++s)
    w.push_back({{"subset", subset_string(s, n)}, {"points", rationals_json(q[s])}});
  j["witnesses"] = w;
  j["checks"] = checks_json(checks);
  j["pass"] = all_pass(checks);
  return j;
}

// ---- all radii ----

namespace {

int window_for(std::uint32_t t) {
  int w = 0;
  while ((std::uint64_t{1} << w) < t) ++w;
  return w;  // ceil(log2 t)
}

int m_at(std::size_t idx) { return idx % 2 ? -static_cast<int>((idx + 1) / 2) : static_cast<int>(idx / 2); }

std::size_t idx_of(int m) { return m > 0 ? 2 * static_cast<std::size_t>(m) : 2 * static_cast<std::size_t>(-m) - (m < 0); }

// 1-based position of (n, m) in the enumeration with the window for t.
std::uint64_t position(std::uint32_t n, int m, std::uint32_t t) {
  const std::size_t width = 2 * static_cast<std::size_t>(window_for(t)) + 1, idx = idx_of(m);
  if (idx >= width) return UINT64_MAX;
  const std::uint64_t d0 = n - 1 + idx;
  std::uint64_t pos = 0;
  for (std::uint64_t d = 0; d < d0; ++d) pos += std::min<std::uint64_t>(d + 1, width);
  return pos + idx + 1;
}

// m with 2^-m-1 <= s <= 2^-m, larger m first.
std::vector<int> radius_levels(const Rational& s) {
  int guess = static_cast<int>(std::floor(-std::log2(s.get_d())));
  std::vector<int> out;
  for (int m = guess + 2; m >= guess - 2; --m)
    if (pow2(-m - 1) <= s && s <= pow2(-m)) out.push_back(m);
  return out;
}

}  // namespace

std::vector<std::pair<std::uint32_t, int>> all_radii_pairs(std::uint32_t t) {
  const std::size_t width = 2 * static_cast<std::size_t>(window_for(t)) + 1;
  std::vector<std::pair<std::uint32_t, int>> out;
  for (std::size_t d = 0; out.size() < t; ++d)
    for (std::size_t idx = 0; idx <= d && idx < width && out.size() < t; ++idx)
      out.emplace_back(static_cast<std::uint32_t>(d - idx + 1), m_at(idx));
  return out;
}

AllRadii build_all_radii(std::uint32_t t) {
  if (t < 1) throw std::invalid_argument("all-radii: need at least one block");
  AllRadii inst;
  inst.t = t;
  inst.window = window_for(t);
  Rational a(0);
  std::vector<std::vector<Rational>> all_sets;
  for (auto [n, m] : all_radii_pairs(t)) {
    if (n > 16) throw std::invalid_argument("all-radii: t = " + std::to_string(t) + " needs blocks with n > 16");
    Rational r = pow2(-m), len = 10 * r * (n + 1);
    inst.blocks.push_back({n, m, a, len});
    inst.instances.push_back(build_fixed_blowup(n, r, pow2(-m - 1), a));
    for (const auto& f : inst.instances.back().q) all_sets.push_back(f);
    a += len + 1;
  }
  bool inside = true, gaps = true;
  Rational min_gap;
  for (std::size_t k = 0; k < inst.blocks.size(); ++k) {
    const auto& blk = inst.blocks[k];
    const auto& f = inst.instances[k].hypotheses;
    Rational lo = f.set(0).front(), hi = f.set(0).back();
    for (std::size_t s = 0; s < f.size(); ++s) lo = std::min(lo, f.set(s).front()), hi = std::max(hi, f.set(s).back());
    inside = inside && lo > blk.offset && hi < blk.offset + blk.length;
    if (k + 1 < inst.blocks.size()) {
      Rational gap = inst.blocks[k + 1].offset - hi;
      if (k == 0 || gap < min_gap) min_gap = gap;
      gaps = gaps && gap >= 1;
    }
  }
  FiniteSupportClass whole(all_sets, false);
  inst.checks.push_back({"blocks-in-range", inside, "every support lies in (a_t, a_t + L)"});
  inst.checks.push_back({"block-gaps", gaps,
                         inst.blocks.size() > 1 ? "smallest gap " + to_string(min_gap) : "single block"});
  inst.checks.push_back({"disjoint-supports", whole.pairwise_disjoint(),
                         std::to_string(whole.size()) + " sets across " + std::to_string(t) + " blocks"});
  auto vc = class_vc_check(whole);
  inst.checks.push_back(vc);
  bool blocks_ok = true;
  std::string failed;
  for (std::size_t k = 0; k < inst.instances.size(); ++k)
    if (!all_pass(inst.instances[k].checks)) {
      blocks_ok = false;
      if (failed.empty()) failed = "block " + std::to_string(k + 1);
    }
  inst.checks.push_back({"block-certificates", blocks_ok, blocks_ok ? "all blocks pass" : failed + " fails"});
  return inst;
}

RadiusLocation locate_radius(const AllRadii& inst, const Rational& s, std::uint32_t n) {
  if (s <= 0) throw std::invalid_argument("radius must be positive");
  auto levels = radius_levels(s);
  std::optional<std::size_t> best;
  for (std::size_t k = 0; k < inst.blocks.size(); ++k) {
    const auto& blk = inst.blocks[k];
    if (blk.n < n || std::find(levels.begin(), levels.end(), blk.m) == levels.end()) continue;
    if (!best) {
      best = k;
      continue;
    }
    const auto& cur = inst.blocks[*best];
    if (blk.n < cur.n || (blk.n == cur.n && blk.m > cur.m)) best = k;
  }
  if (!best) {
    std::uint64_t need = 0;
    for (std::uint32_t t = 1; t < (1u << 24) && !need; ++t)
      for (int m : levels)
        if (position(n, m, t) <= t) {
          need = t;
          break;
        }
    throw std::out_of_range("radius " + to_string(s) + " with n = " + std::to_string(n) +
                            " is not covered; needs t >= " + (need ? std::to_string(need) : std::string("2^24")));
  }
  return {*best, check_shattering(inst.instances[*best], s)};
}

nlohmann::json AllRadii::to_json() const {
  nlohmann::json j;
  j["construction"] = "all-radii";
  j["t"] = t;
  j["window"] = {{"m_min", -window}, {"m_max", window}};
  j["truncation"] = "first t pairs of the diagonal enumeration; radii outside the window are not covered";
  auto bl = nlohmann::json::array();
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    bl.push_back({{"n", blocks[k].n},
                  {"m", blocks[k].m},
                  {"offset", to_string(blocks[k].offset)},
                  {"length", to_string(blocks[k].length)},
                  {"anchors", rationals_json(instances[k].anchors)},
                  {"pass", all_pass(instances[k].checks)}});
  }
  j["blocks"] = bl;
  j["checks"] = checks_json(checks);
  j["pass"] = all_pass(checks);
  return j;
}

// ---- partition pathology ----

bool PartitionPathology::strategic_label(std::uint64_t s_mask, const Rational& x) const {
  Rational lo(floor(x)), hi = lo + 1;
  const auto& f = hypotheses.set(s_mask);
  auto it = std::lower_bound(f.begin(), f.end(), lo);
  return it != f.end() && *it < hi;
}

PartitionPathology build_partition_pathology(std::uint32_t n) {
  if (n < 1 || n > 16) throw std::invalid_argument("partition pathology: n must be in [1, 16]");
  PartitionPathology p;
  p.n = n;
  const std::uint64_t subsets = std::uint64_t{1} << n;
  std::vector<std::vector<Rational>> sets;
  bool range = true;
  for (std::uint64_t s = 0; s < subsets; ++s) {
    Rational a = pow10_neg(2);
    for (std::uint32_t j = 1; j <= n; ++j)
      if (s >> (j - 1) & 1) a += pow10_neg(2 + j);
    range = range && a > 0 && a < Rational(1, 10);
    p.alpha.push_back(a);
    std::vector<Rational> f;
    for (std::uint32_t i = 1; i <= n; ++i) f.push_back((s >> (i - 1) & 1) ? Rational(i + Rational(1, 2) + a) : Rational(-a - i));
    sets.push_back(std::move(f));
  }
  for (std::uint32_t i = 1; i <= n; ++i) p.candidates.push_back(i + Rational(1, 2));
  p.hypotheses = FiniteSupportClass(sets, false);
  std::vector<Rational> sorted = p.alpha;
  std::sort(sorted.begin(), sorted.end());
  bool distinct = std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
  p.checks.push_back({"alpha-range", range && distinct, "alpha(S) distinct and in (0, 1/10)"});
  p.checks.push_back({"disjoint-supports", p.hypotheses.pairwise_disjoint(), std::to_string(subsets) + " sets F_S"});
  p.checks.push_back(class_vc_check(p.hypotheses));
  // Cells [j, j+1) meeting the supports and candidates are pairwise disjoint,
  // and {1/2} is shattered by [0, 1) versus [1, 2).
  bool cells = true;
  const int span = static_cast<int>(n) + 1;
  for (int j = -span; j <= span; ++j)
    for (int k = j + 1; k <= span; ++k) cells = cells && Rational(j + 1) <= Rational(k);
  Rational half(1, 2);
  bool single = floor(half) == 0 && floor(half) != 1;
  p.checks.push_back({"neighborhood-vc-1", cells && single,
                      "cells [j, j+1) for |j| <= " + std::to_string(span) + " pairwise disjoint; {1/2} shattered"});
  p.checks.push_back(shattering_check("strategic-shattering", n, [&](std::uint64_t s, std::size_t i) {
    return p.strategic_label(s, p.candidates[i]);
  }));
  return p;
}

nlohmann::json PartitionPathology::to_json() const {
  nlohmann::json j;
  j["construction"] = "partition";
  j["n"] = n;
  j["candidates"] = rationals_json(candidates);
  auto w = nlohmann::json::array();
  for (std::size_t s = 0; s < alpha.size(); ++s)
    w.push_back({{"subset", subset_string(s, n)}, {"alpha", to_string(alpha[s])}, {"points", rationals_json(hypotheses.set(s))}});
  j["witnesses"] = w;
  j["checks"] = checks_json(checks);
  j["pass"] = all_pass(checks);
  return j;
}

// ---- fractional parts of sqrt(2) m ----

namespace {

// Enclosure of sqrt(2) k whose endpoints share an integer part.
std::pair<Interval, Integer> sqrt2_multiple(const Integer& k, unsigned bits) {
  Interval e = sqrt_enclosure(Rational(2 * k * k), bits);
  return {e, floor(e.lo())};
}

}  // namespace

Interval frac_sqrt2(const Integer& k) {
  if (k < 1) throw std::invalid_argument("frac_sqrt2 needs k >= 1");
  const auto& policy = default_precision();
  for (unsigned bits = policy.initial; bits <= policy.cap; bits *= 2) {
    auto [e, f] = sqrt2_multiple(k, bits);
    if (floor(e.hi()) != f) continue;
    Interval fr(e.lo() - f, e.hi() - f);
    if (fr.width() < Rational(1, Integer(1) << 40) || bits * 2 > policy.cap) return fr;
  }
  throw UndecidedError("fractional part of sqrt(2) * " + k.get_str() + " undecided");
}

bool frac_sqrt2_in(const Integer& k, const OpenInterval& iv) {
  if (k < 1) throw std::invalid_argument("frac_sqrt2 needs k >= 1");
  const auto& policy = default_precision();
  for (unsigned bits = policy.initial; bits <= policy.cap; bits *= 2) {
    auto [e, f] = sqrt2_multiple(k, bits);
    if (floor(e.hi()) != f) continue;
    Rational lo = e.lo() - f, hi = e.hi() - f;
    if (iv.lo < lo && hi < iv.hi) return true;
    if (hi <= iv.lo || lo >= iv.hi) return false;
  }
  throw UndecidedError("{sqrt(2) * " + k.get_str() + "} in (" + to_string(iv.lo) + ", " + to_string(iv.hi) +
                       ") undecided");
}

FracConstruction build_frac_construction(std::uint32_t n, const Rational& r, const FracOptions& opts) {
  if (n < 1 || n > 6) throw std::invalid_argument("frac construction: n must be in [1, 6]");
  if (r <= 0 || r >= Rational(1, 2)) throw std::invalid_argument("frac construction: r must be in (0, 1/2)");
  FracConstruction fc;
  fc.n = n, fc.r = r;
  const Rational half(1, 2);
  fc.p = {half - r, half + r};
  fc.q = {Rational(0), half - r};
  fc.cells = {{Rational(0), Rational(1)}};
  for (std::uint32_t k = 0; k < n; ++k) {
    // [0, 1) is already a full unit cell for b_1 = 1.
    std::uint64_t b = 1;
    if (k > 0) {
      Rational v = fc.cells[0].hi - fc.cells[0].lo;
      for (const auto& c : fc.cells) v = std::min(v, Rational(c.hi - c.lo));
      b = Integer(floor(Rational(2 / v)) + 1).get_ui();
    }
    fc.b.push_back(b);
    const Rational bq(Integer(std::to_string(b)));
    std::vector<OpenInterval> next(fc.cells.size() * 2);
    for (std::size_t a = 0; a < fc.cells.size(); ++a) {
      const auto& c = fc.cells[a];
      Integer j = k == 0 ? Integer(0) : floor(Rational(c.lo * bq)) + 1;
      if (Rational(Rational(j + 1) / bq) > c.hi) throw std::logic_error("frac construction: no full cell");
      Rational jq(j);
      next[a] = {jq / bq, (jq + fc.q.hi) / bq};
      next[a | (std::size_t{1} << k)] = {(jq + fc.p.lo) / bq, (jq + fc.p.hi) / bq};
    }
    fc.cells = std::move(next);
  }

  // Assign m_A by one scan over m = 1, 2, ...; a double prefilter picks the
  // cell, certified arithmetic confirms it.
  const std::size_t cells = fc.cells.size();
  std::vector<std::size_t> order(cells);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return fc.cells[x].lo < fc.cells[y].lo; });
  std::vector<double> los, his;
  for (auto a : order) los.push_back(fc.cells[a].lo.get_d()), his.push_back(fc.cells[a].hi.get_d());
  fc.m.assign(cells, 0);
  std::size_t missing = cells;
  for (std::uint64_t m = 1; m <= opts.scan_cap && missing; ++m) {
    double x = double(m) * std::numbers::sqrt2;
    double fr = x - std::floor(x);
    auto pos = std::upper_bound(los.begin(), los.end(), fr + 1e-9) - los.begin();
    for (auto c = pos; c-- > 0;) {
      if (fr > his[c] + 1e-9) break;
      std::size_t a = order[c];
      if (fc.m[a] || !frac_sqrt2_in(Integer(std::to_string(m)), fc.cells[a])) continue;
      fc.m[a] = m;
      --missing;
      break;
    }
  }
  if (missing) {
    for (std::size_t a = 0; a < cells; ++a)
      if (!fc.m[a])
        throw std::runtime_error("frac construction: no m <= " + std::to_string(opts.scan_cap) + " with {sqrt2 m} in (" +
                                 to_string(fc.cells[a].lo) + ", " + to_string(fc.cells[a].hi) + ") for A = " +
                                 subset_string(a, n));
  }

  for (std::uint32_t i = 0; i < n; ++i) fc.candidates.push_back(Rational(Integer(std::to_string(fc.b[i]))) + half);
  bool in_pq = true, per_cell = true;
  std::vector<std::vector<bool>> label(cells, std::vector<bool>(n));
  fc.frac.assign(cells, {});
  for (std::size_t a = 0; a < cells; ++a)
    for (std::uint32_t i = 0; i < n; ++i) {
      Integer k = Integer(std::to_string(fc.m[a])) * Integer(std::to_string(fc.b[i]));
      fc.frac[a].push_back(frac_sqrt2(k));
      bool in_a = a >> i & 1;
      in_pq = in_pq && frac_sqrt2_in(k, in_a ? fc.p : fc.q);
      // |x_i - z_i| = |1/2 - frac|: < r inside P, > r inside Q.
      Interval dist = Interval(half) - fc.frac[a].back();
      Rational dlo = dist.lo() < 0 ? Rational(-dist.hi()) : dist.lo();
      Rational dhi = std::max(abs_q(dist.lo()), abs_q(dist.hi()));
      if (dist.lo() < 0 && dist.hi() > 0) dlo = 0;
      per_cell = per_cell && (in_a ? dhi < r : dlo > r);
      label[a][i] = in_a ? dhi <= r : !(dlo > r);
    }
  bool cross = true;
  for (std::size_t a = 0; a < cells; ++a)
    for (std::uint32_t i = 0; i < n; ++i) {
      // Points of neighboring cells: (b_i - 1) + frac and (b_i + 1) + frac.
      Integer m = Integer(std::to_string(fc.m[a]));
      Integer bi = Integer(std::to_string(fc.b[i]));
      Interval up = Interval(Rational(1)) + frac_sqrt2(m * (bi + 1)) - Interval(half);
      cross = cross && up.lo() > r;
      if (bi > 1) {
        Interval down = Interval(Rational(3, 2)) - frac_sqrt2(m * (bi - 1));
        cross = cross && down.lo() > r;
      }
    }
  cross = cross && half > r;

  std::vector<OpenInterval> sorted_cells;
  for (auto a : order) sorted_cells.push_back(fc.cells[a]);
  bool cells_ok = true;
  for (std::size_t c = 0; c < sorted_cells.size(); ++c) {
    cells_ok = cells_ok && sorted_cells[c].lo < sorted_cells[c].hi && sorted_cells[c].lo >= 0 && sorted_cells[c].hi <= 1;
    if (c + 1 < sorted_cells.size()) cells_ok = cells_ok && sorted_cells[c].hi <= sorted_cells[c + 1].lo;
  }
  std::vector<std::uint64_t> ms = fc.m;
  std::sort(ms.begin(), ms.end());
  bool distinct = std::adjacent_find(ms.begin(), ms.end()) == ms.end();
  // Hypotheses H_m for distinct m meet each candidate cell in distinct points.
  bool hyp_disjoint = true;
  for (std::uint32_t i = 0; i < n; ++i) {
    std::vector<Interval> z;
    for (std::size_t a = 0; a < cells; ++a) z.push_back(fc.frac[a][i]);
    std::sort(z.begin(), z.end(), [](const Interval& x, const Interval& y) { return x.lo() < y.lo(); });
    for (std::size_t c = 0; c + 1 < z.size(); ++c) hyp_disjoint = hyp_disjoint && z[c].hi() < z[c + 1].lo();
  }
  std::string bs;
  for (auto b : fc.b) bs += (bs.empty() ? "" : ",") + std::to_string(b);
  fc.checks.push_back({"cells", cells_ok, "2^n disjoint nonempty cells I_A in [0, 1); b = " + bs});
  fc.checks.push_back({"m-distinct", distinct && ms.front() >= 1, "max m_A = " + std::to_string(ms.back())});
  fc.checks.push_back({"m-in-cell", true, "{sqrt2 m_A} in I_A certified for every A"});
  fc.checks.push_back({"p-q-membership", in_pq, "{sqrt2 m_A b_i} in P for i in A, in Q otherwise"});
  fc.checks.push_back({"per-cell-distance", per_cell, "|x_i - z_i| < r for i in A, > r otherwise"});
  fc.checks.push_back({"cross-cell-distance", cross, "points of neighboring cells are farther than 1/2 > r"});
  fc.checks.push_back({"class-vc-1", hyp_disjoint && cells >= 2,
                       "H_m pairwise disjoint on the candidate cells (certified); singletons shattered"});
  fc.checks.push_back(shattering_check("strategic-shattering", n,
                                       [&](std::uint64_t a, std::size_t i) { return bool(label[a][i]); }));
  return fc;
}

nlohmann::json FracConstruction::to_json() const {
  nlohmann::json j;
  j["construction"] = "frac";
  j["n"] = n;
  j["r"] = to_string(r);
  j["P"] = {to_string(p.lo), to_string(p.hi)};
  j["Q"] = {to_string(q.lo), to_string(q.hi)};
  j["b"] = b;
  j["candidates"] = rationals_json(candidates);
  auto w = nlohmann::json::array();
  for (std::size_t a = 0; a < cells.size(); ++a) {
    auto fr = nlohmann::json::array();
    for (const auto& iv : frac[a]) fr.push_back(interval_json(iv));
    w.push_back({{"subset", subset_string(a, n)},
                 {"cell", {to_string(cells[a].lo), to_string(cells[a].hi)}},
                 {"m", m[a]},
                 {"frac", fr}});
  }
  j["witnesses"] = w;
  j["checks"] = checks_json(checks);
  j["pass"] = all_pass(checks);
  return j;
}

}  // namespace stratdef
