#include "stratdef/witness.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <set>

#include "stratdef/linear.hpp"
#include "stratdef/polynomial.hpp"

namespace stratdef {

namespace {

constexpr double kHuge = 1e300;
constexpr double kOvershoot = 1e-9;

struct SlotMap {
  std::uint32_t nx = 0, na = 0, nw = 0;
  std::uint32_t of(VarRef v) const {
    switch (v.block) {
      case Block::X: return v.index;
      case Block::A: return nx + v.index;
      case Block::W: return nx + na + v.index;
      case Block::Y: break;
    }
    throw std::invalid_argument("witness search does not accept Y variables");
  }
  std::uint32_t size() const { return nx + na + nw; }
};

// Flat post-order program for a term; segments are evaluated in order.
class Tape {
 public:
  enum class Op : std::uint8_t { Const, Slot, Add, Mul };
  struct Node {
    Op op;
    double c;
    std::uint32_t slot;
    std::uint32_t first;
    std::uint32_t count;
  };

  std::uint32_t add(const Term& t, const SlotMap& slots) {
    switch (t.kind()) {
      case Term::Kind::Var: return push({Op::Slot, 0, slots.of(t.var_ref()), 0, 0});
      case Term::Kind::Const: return push({Op::Const, t.value().get_d(), 0, 0, 0});
      case Term::Kind::Sqrt: return push({Op::Const, std::sqrt(t.value().get_d()), 0, 0, 0});
      case Term::Kind::Exp: throw std::logic_error("exp inside a graph-form term");
      case Term::Kind::Sum:
      case Term::Kind::Product: {
        std::vector<std::uint32_t> ids;
        for (const auto& a : t.args()) ids.push_back(add(a, slots));
        auto first = static_cast<std::uint32_t>(kids_.size());
        kids_.insert(kids_.end(), ids.begin(), ids.end());
        return push({t.kind() == Term::Kind::Sum ? Op::Add : Op::Mul, 0, 0, first, static_cast<std::uint32_t>(ids.size())});
      }
    }
    return 0;
  }

  std::uint32_t size() const { return static_cast<std::uint32_t>(nodes_.size()); }

  double eval(std::uint32_t begin, std::uint32_t end, const double* vals, double* scratch) const {
    for (std::uint32_t i = begin; i < end; ++i) {
      const Node& n = nodes_[i];
      switch (n.op) {
        case Op::Const: scratch[i] = n.c; break;
        case Op::Slot: scratch[i] = vals[n.slot]; break;
        case Op::Add: {
          double s = 0;
          for (std::uint32_t k = 0; k < n.count; ++k) s += scratch[kids_[n.first + k]];
          scratch[i] = s;
          break;
        }
        case Op::Mul: {
          double p = 1;
          for (std::uint32_t k = 0; k < n.count; ++k) p *= scratch[kids_[n.first + k]];
          scratch[i] = p;
          break;
        }
      }
    }
    return scratch[end - 1];
  }

 private:
  std::uint32_t push(Node n) {
    nodes_.push_back(n);
    return static_cast<std::uint32_t>(nodes_.size() - 1);
  }
  std::vector<Node> nodes_;
  std::vector<std::uint32_t> kids_;
};

// l rel r, with rel in {<, <=, =} for polynomial literals after orientation.
struct Lit {
  bool is_exp = false;
  Relation rel = Relation::Le;
  // Satisfied when the normalized violation is below `slack` (or at most,
  // when not strict); negated atoms get slack -tol to agree with the float
  // evaluator.
  bool strict = false;
  double slack = 0;
  std::uint32_t lb = 0, le = 0, rb = 0, re = 0;  // tape segments
  std::uint32_t u = 0, v = 0;                    // exp literal: u rel exp(v)
  std::set<std::uint32_t> wslots;
  std::optional<Polynomial> poly;  // lhs - rhs
};

struct Step {
  enum class Kind : std::uint8_t { Linear, ExpForward, ExpInverse } kind;
  std::uint32_t lit;
  std::uint32_t target;
};

struct LinRow {
  std::vector<Polynomial> coeffs;
  Polynomial constant;
  Relation rel;
};

struct Clause {
  std::vector<std::uint32_t> lits;
  std::vector<std::uint32_t> search;    // searched slots
  std::vector<int> hint;                // input coordinate per searched slot, or -1
  std::vector<Step> schedule;
  bool linear = false;
  std::vector<VarRef> wvars;
  std::vector<LinRow> rows;
};

struct Status {
  double worst = 0;
  bool ok = true;
  std::uint32_t worst_lit = 0;
  bool domain = false;  // propagation stopped at log of a nonpositive value
};

// Graded penalty for domain failures, above any literal violation.
constexpr double kDomainPenalty = 1e100;

}  // namespace

struct WitnessSearcher::Impl {
  Formula graph = Formula::truth();
  Formula body = Formula::truth();
  WitnessSearchConfig cfg;
  SlotMap slots;
  Tape tape;
  std::vector<Lit> lits;
  std::vector<Clause> clauses;
  bool transcendental = false;
  bool overflow = false;

  // ---- compilation ----

  using Dnf = std::vector<std::vector<std::uint32_t>>;
  std::map<std::string, std::uint32_t> lit_index;

  struct Mode {
    bool strict;
    double slack;
  };
  Mode positive(Relation r) const {
    bool strict = r == Relation::Lt || r == Relation::Gt;
    return {strict, strict ? 0.0 : cfg.tolerance};
  }
  // Mode of the literal standing for the negation of an atom with relation r.
  Mode negative(Relation r) const {
    bool strict = r == Relation::Lt || r == Relation::Gt;
    return {!strict, strict ? 0.0 : -cfg.tolerance};
  }

  static std::string mode_key(Mode m) { return m.strict ? (m.slack < 0 ? "S-" : "S") : (m.slack > 0 ? "N+" : "N"); }

  std::uint32_t intern_poly(const Term& l, Relation rel, const Term& r, Mode m) {
    std::string key = mode_key(m) + std::string(to_string(rel)) + print(l) + "|" + print(r);
    if (auto it = lit_index.find(key); it != lit_index.end()) return it->second;
    Lit lit;
    lit.rel = rel;
    lit.strict = m.strict;
    lit.slack = m.slack;
    lit.lb = tape.size();
    tape.add(l, slots);
    lit.le = tape.size();
    lit.rb = tape.size();
    tape.add(r, slots);
    lit.re = tape.size();
    std::set<VarRef> vs = variables(l);
    for (auto v : variables(r)) vs.insert(v);
    for (auto v : vs)
      if (v.block == Block::W) lit.wslots.insert(slots.of(v));
    lit.poly = to_polynomial(l - r);
    lits.push_back(std::move(lit));
    return lit_index[key] = static_cast<std::uint32_t>(lits.size() - 1);
  }

  std::uint32_t intern_exp(VarRef u, Relation rel, VarRef v, Mode m) {
    std::string key = "exp" + mode_key(m) + std::string(to_string(rel)) + to_string(u) + "|" + to_string(v);
    if (auto it = lit_index.find(key); it != lit_index.end()) return it->second;
    Lit lit;
    lit.is_exp = true;
    lit.rel = rel;
    lit.strict = m.strict;
    lit.slack = m.slack;
    lit.u = slots.of(u);
    lit.v = slots.of(v);
    for (auto x : {u, v})
      if (x.block == Block::W) lit.wslots.insert(slots.of(x));
    lits.push_back(std::move(lit));
    return lit_index[key] = static_cast<std::uint32_t>(lits.size() - 1);
  }

  Dnf single(std::uint32_t lit) { return Dnf{{lit}}; }

  Dnf combine_and(const Dnf& a, const Dnf& b) {
    Dnf out;
    for (const auto& ca : a) {
      for (const auto& cb : b) {
        auto c = ca;
        for (auto l : cb)
          if (std::find(c.begin(), c.end(), l) == c.end()) c.push_back(l);
        out.push_back(std::move(c));
        if (out.size() > cfg.max_clauses) throw std::length_error("dnf");
      }
    }
    return out;
  }

  Dnf dnf(const Formula& f, bool neg) {
    switch (f.kind()) {
      case Formula::Kind::Atom: {
        const Atom& a = f.atom();
        if (a.kind == Atom::Kind::ExpGraph) {
          if (!neg) return single(intern_exp(a.exp_lhs, Relation::Eq, a.exp_rhs, positive(Relation::Eq)));
          Mode m = negative(Relation::Eq);
          return Dnf{{intern_exp(a.exp_lhs, Relation::Lt, a.exp_rhs, m)}, {intern_exp(a.exp_lhs, Relation::Gt, a.exp_rhs, m)}};
        }
        Relation r = a.rel;
        Mode m = neg ? negative(r) : positive(r);
        if (neg) {
          if (r == Relation::Eq)
            return Dnf{{intern_poly(a.lhs, Relation::Lt, a.rhs, m)}, {intern_poly(a.rhs, Relation::Lt, a.lhs, m)}};
          r = negate(r);
        }
        if (r == Relation::Ge || r == Relation::Gt) return single(intern_poly(a.rhs, flip(r), a.lhs, m));
        return single(intern_poly(a.lhs, r, a.rhs, m));
      }
      case Formula::Kind::Not: return dnf(f.body(), !neg);
      case Formula::Kind::And:
      case Formula::Kind::Or: {
        bool conj = (f.kind() == Formula::Kind::And) != neg;
        if (conj) {
          Dnf acc{{}};
          for (const auto& c : f.children()) acc = combine_and(acc, dnf(c, neg));
          return acc;
        }
        Dnf acc;
        for (const auto& c : f.children()) {
          auto part = dnf(c, neg);
          acc.insert(acc.end(), part.begin(), part.end());
          if (acc.size() > cfg.max_clauses) throw std::length_error("dnf");
        }
        return acc;
      }
      default: throw std::logic_error("quantifier inside the matrix");
    }
  }

  int hint_for(std::uint32_t slot) const {
    std::uint32_t w = slot - slots.nx - slots.na;
    for (auto [hw, xi] : cfg.hints)
      if (hw == w && xi < slots.nx) return static_cast<int>(xi);
    return -1;
  }

  void plan(Clause& c) {
    std::set<std::uint32_t> open;
    for (auto l : c.lits) open.insert(lits[l].wslots.begin(), lits[l].wslots.end());
    auto is_open = [&](std::uint32_t s) { return open.contains(s); };
    while (!open.empty()) {
      bool progress = true;
      while (progress) {
        progress = false;
        for (auto li : c.lits) {
          const Lit& l = lits[li];
          if (l.rel != Relation::Eq) continue;
          if (l.is_exp) {
            if (is_open(l.u) && !is_open(l.v) && l.u != l.v) {
              c.schedule.push_back({Step::Kind::ExpForward, li, l.u});
              open.erase(l.u);
              progress = true;
            } else if (is_open(l.v) && !is_open(l.u) && l.u != l.v) {
              c.schedule.push_back({Step::Kind::ExpInverse, li, l.v});
              open.erase(l.v);
              progress = true;
            }
            continue;
          }
          std::vector<std::uint32_t> unknown;
          for (auto s : l.wslots)
            if (is_open(s)) unknown.push_back(s);
          if (unknown.size() != 1 || !l.poly) continue;
          VarRef v{Block::W, unknown[0] - slots.nx - slots.na};
          if (l.poly->degree_in(v) != 1) continue;
          c.schedule.push_back({Step::Kind::Linear, li, unknown[0]});
          open.erase(unknown[0]);
          progress = true;
        }
      }
      if (open.empty()) break;
      std::uint32_t pick = *open.begin();
      for (auto s : open) {
        if (hint_for(s) >= 0) {
          pick = s;
          break;
        }
      }
      c.search.push_back(pick);
      c.hint.push_back(hint_for(pick));
      open.erase(pick);
    }

    c.linear = true;
    std::set<std::uint32_t> all;
    for (auto l : c.lits) all.insert(lits[l].wslots.begin(), lits[l].wslots.end());
    for (auto s : all) c.wvars.push_back(VarRef{Block::W, s - slots.nx - slots.na});
    for (auto li : c.lits) {
      const Lit& l = lits[li];
      if (l.is_exp || !l.poly) {
        c.linear = false;
        break;
      }
      auto split = l.poly->linear_in(c.wvars);
      if (!split) {
        c.linear = false;
        break;
      }
      c.rows.push_back({std::move(split->first), std::move(split->second), l.rel});
    }
    if (!c.linear) c.rows.clear();
  }

  void compile(const Formula& f) {
    Fragment frag = classify_fragment(f);
    if (frag == Fragment::General) throw std::invalid_argument("witness search requires an existential formula");
    if (!(std::isfinite(cfg.box_lo) && std::isfinite(cfg.box_hi)) || cfg.box_lo > cfg.box_hi)
      throw std::invalid_argument("witness search needs a finite box (explicit cap on every witness)");
    graph = is_graph_form(f) ? f : to_graph_form(f).formula;
    for (const auto& v : free_variables(graph))
      if (v.block != Block::X && v.block != Block::A)
        throw std::invalid_argument("free variable " + to_string(v) + " in witness search (only x and a may be free)");
    auto pre = strip_exists(graph);
    body = pre.body;
    BlockDims d = block_dims(graph);
    slots = {d.x, d.a, d.w};
    transcendental = contains_exp(body) || [&] {
      std::function<bool(const Formula&)> has_sqrt = [&](const Formula& g) -> bool {
        if (g.kind() == Formula::Kind::Atom) {
          const Atom& a = g.atom();
          return a.kind == Atom::Kind::Compare && (a.lhs.contains_sqrt() || a.rhs.contains_sqrt());
        }
        for (const auto& c : g.children())
          if (has_sqrt(c)) return true;
        return false;
      };
      return has_sqrt(body);
    }();
    Dnf clauses_raw;
    try {
      clauses_raw = dnf(body, false);
    } catch (const std::length_error&) {
      overflow = true;
      return;
    }
    for (auto& lits_of : clauses_raw) {
      Clause c;
      c.lits = std::move(lits_of);
      plan(c);
      clauses.push_back(std::move(c));
    }
  }

  // ---- runtime ----

  struct Work {
    std::vector<double> vals;
    std::vector<double> scratch;
    bool domain_fail = false;
    double domain_value = 0;  // argument of the failed log
  };

  std::pair<double, double> sides(const Lit& l, Work& w) const {
    if (l.is_exp) return {w.vals[l.u], std::exp(w.vals[l.v])};
    return {tape.eval(l.lb, l.le, w.vals.data(), w.scratch.data()), tape.eval(l.rb, l.re, w.vals.data(), w.scratch.data())};
  }

  // Signed quantity to push below zero (for equalities: l - r).
  static double drive(const Lit& l, double lv, double rv) {
    return (l.rel == Relation::Gt || l.rel == Relation::Ge) ? rv - lv : lv - rv;
  }

  bool propagate(const Clause& c, Work& w) const {
    w.domain_fail = false;
    for (const auto& s : c.schedule) {
      const Lit& l = lits[s.lit];
      switch (s.kind) {
        case Step::Kind::Linear: {
          w.vals[s.target] = 0;
          auto [l0, r0] = sides(l, w);
          w.vals[s.target] = 1;
          auto [l1, r1] = sides(l, w);
          double c0 = l0 - r0, c1 = (l1 - r1) - c0;
          if (!(std::fabs(c1) > 1e-300)) return false;
          w.vals[s.target] = -c0 / c1;
          break;
        }
        case Step::Kind::ExpForward: w.vals[s.target] = std::exp(w.vals[l.v]); break;
        case Step::Kind::ExpInverse:
          if (!(w.vals[l.u] > 0)) {
            w.domain_fail = std::isfinite(w.vals[l.u]);
            w.domain_value = w.vals[l.u];
            return false;
          }
          w.vals[s.target] = std::log(w.vals[l.u]);
          break;
      }
      if (!std::isfinite(w.vals[s.target])) return false;
    }
    return true;
  }

  Status status(const Clause& c, Work& w) const {
    Status st;
    st.worst = -kHuge;
    if (!propagate(c, w)) {
      std::uint32_t first = c.lits.empty() ? 0u : c.lits.front();
      if (!w.domain_fail) return {kHuge, false, first};
      double u = w.domain_value;
      return {kDomainPenalty * (1 + std::max(-u, 0.0) / std::max(1.0, std::fabs(u))), false, first, true};
    }
    double worst_bad = -kHuge;
    for (auto li : c.lits) {
      const Lit& l = lits[li];
      auto [lv, rv] = sides(l, w);
      double scale = std::max({1.0, std::fabs(lv), std::fabs(rv)});
      double d = drive(l, lv, rv) / scale;
      double viol = l.rel == Relation::Eq ? std::fabs(d) : d;
      if (!std::isfinite(viol)) viol = kHuge;
      bool ok = l.strict ? viol < l.slack : viol <= l.slack;
      st.worst = std::max(st.worst, viol);
      if (!ok) {
        st.ok = false;
        if (viol > worst_bad) {
          worst_bad = viol;
          st.worst_lit = li;
        }
      }
    }
    return st;
  }

  void set_point(const Clause& c, const std::vector<double>& s, Work& w) const {
    for (std::size_t j = 0; j < s.size(); ++j) w.vals[c.search[j]] = s[j];
  }

  double clamp(double v) const { return std::clamp(v, cfg.box_lo, cfg.box_hi); }

  // Value driven by one literal at point s, after propagation.
  double literal_drive(const Clause& c, std::uint32_t li, const std::vector<double>& s, Work& w, double* scale) const {
    set_point(c, s, w);
    if (!propagate(c, w)) return std::numeric_limits<double>::quiet_NaN();
    auto [lv, rv] = sides(lits[li], w);
    if (scale) *scale = std::max({1.0, std::fabs(lv), std::fabs(rv)});
    return drive(lits[li], lv, rv);
  }

  // -u for the log argument u that blocked propagation; NaN once it passes.
  double domain_drive(const Clause& c, const std::vector<double>& s, Work& w, double* scale) const {
    set_point(c, s, w);
    if (propagate(c, w) || !w.domain_fail) return std::numeric_limits<double>::quiet_NaN();
    if (scale) *scale = std::max(1.0, std::fabs(w.domain_value));
    return -w.domain_value;
  }

  bool project(const Clause& c, std::vector<double>& s, Work& w) const {
    double best = kHuge;
    int stall = 0;
    std::vector<double> g(s.size()), probe;
    for (int it = 0; it < cfg.projection_steps; ++it) {
      set_point(c, s, w);
      Status st = status(c, w);
      if (st.ok) return true;
      if (st.worst < best * (1 - 1e-9) - 1e-15) {
        best = st.worst;
        stall = 0;
      } else if (++stall >= 6) {
        return false;
      }
      double scale = 1;
      double f0 = st.domain ? domain_drive(c, s, w, &scale) : literal_drive(c, st.worst_lit, s, w, &scale);
      if (!std::isfinite(f0)) return false;
      double norm2 = 0;
      probe = s;
      for (std::size_t j = 0; j < s.size(); ++j) {
        double h = 1e-7 * std::max(1.0, std::fabs(s[j]));
        probe[j] = s[j] + h;
        double f1 = st.domain ? domain_drive(c, probe, w, nullptr) : literal_drive(c, st.worst_lit, probe, w, nullptr);
        probe[j] = s[j];
        g[j] = std::isfinite(f1) ? (f1 - f0) / h : 0;
        norm2 += g[j] * g[j];
      }
      if (!(norm2 > 1e-300)) return false;
      const Lit& wl = lits[st.worst_lit];
      double target;
      if (st.domain) {
        target = f0 + 1e-6 * scale;
      } else {
        target = wl.rel == Relation::Eq ? f0 : f0 - (std::min(wl.slack, 0.0) - kOvershoot) * scale;
      }
      double step = target / norm2;
      for (std::size_t j = 0; j < s.size(); ++j) s[j] = clamp(s[j] - step * g[j]);
    }
    set_point(c, s, w);
    return status(c, w).ok;
  }

  bool nelder_mead(const Clause& c, std::vector<double>& s, Work& w) const {
    const std::size_t d = s.size();
    auto f = [&](std::vector<double>& p) {
      for (auto& v : p) v = clamp(v);
      set_point(c, p, w);
      Status st = status(c, w);
      return std::make_pair(st.worst, st.ok);
    };
    double span = (cfg.box_hi - cfg.box_lo) / 20;
    if (!(span > 0)) span = 1e-3;
    std::vector<std::vector<double>> simplex(d + 1, s);
    std::vector<double> fv(d + 1);
    for (std::size_t j = 0; j <= d; ++j) {
      if (j > 0) simplex[j][j - 1] += (s[j - 1] + span <= cfg.box_hi) ? span : -span;
      auto [v, ok] = f(simplex[j]);
      if (ok) {
        s = simplex[j];
        return true;
      }
      fv[j] = v;
    }
    std::vector<std::size_t> order(d + 1);
    std::vector<double> centroid(d), trial(d), trial2(d);
    for (int it = 0; it < cfg.local_steps; ++it) {
      for (std::size_t j = 0; j <= d; ++j) order[j] = j;
      std::sort(order.begin(), order.end(), [&](std::size_t p, std::size_t q) { return fv[p] < fv[q]; });
      std::size_t best = order.front(), worst = order.back(), second = order[d - 1];
      if (std::fabs(fv[worst] - fv[best]) <= 1e-14 * (1 + std::fabs(fv[best])) && it > 2 * static_cast<int>(d)) break;
      std::fill(centroid.begin(), centroid.end(), 0.0);
      for (std::size_t j = 0; j <= d; ++j)
        if (j != worst)
          for (std::size_t k = 0; k < d; ++k) centroid[k] += simplex[j][k] / static_cast<double>(d);
      auto blend = [&](double t, std::vector<double>& out) {
        for (std::size_t k = 0; k < d; ++k) out[k] = centroid[k] + t * (simplex[worst][k] - centroid[k]);
      };
      blend(-1, trial);
      auto [fr, okr] = f(trial);
      if (okr) {
        s = trial;
        return true;
      }
      if (fr < fv[best]) {
        blend(-2, trial2);
        auto [fe, oke] = f(trial2);
        if (oke) {
          s = trial2;
          return true;
        }
        if (fe < fr) {
          simplex[worst] = trial2, fv[worst] = fe;
        } else {
          simplex[worst] = trial, fv[worst] = fr;
        }
        continue;
      }
      if (fr < fv[second]) {
        simplex[worst] = trial, fv[worst] = fr;
        continue;
      }
      blend(fr < fv[worst] ? -0.5 : 0.5, trial2);
      auto [fc, okc] = f(trial2);
      if (okc) {
        s = trial2;
        return true;
      }
      if (fc < std::min(fr, fv[worst])) {
        simplex[worst] = trial2, fv[worst] = fc;
        continue;
      }
      for (std::size_t j = 0; j <= d; ++j) {
        if (j == best) continue;
        for (std::size_t k = 0; k < d; ++k) simplex[j][k] = simplex[best][k] + 0.5 * (simplex[j][k] - simplex[best][k]);
        auto [v, ok] = f(simplex[j]);
        if (ok) {
          s = simplex[j];
          return true;
        }
        fv[j] = v;
      }
    }
    return false;
  }

  std::vector<std::vector<double>> seeds(const Clause& c, const double* x, std::size_t clause_id) const {
    const std::size_t d = c.search.size();
    double mid = (cfg.box_lo + cfg.box_hi) / 2;
    std::vector<std::vector<double>> out;
    std::vector<double> hinted(d, mid);
    bool any_hint = false;
    for (std::size_t j = 0; j < d; ++j) {
      if (c.hint[j] >= 0) {
        hinted[j] = clamp(x[c.hint[j]]);
        any_hint = true;
      }
    }
    if (any_hint) out.push_back(hinted);
    out.emplace_back(d, mid);
    if (d == 0) return out;
    if (cfg.grid > 1) {
      double total = std::pow(static_cast<double>(cfg.grid), static_cast<double>(d));
      if (total <= static_cast<double>(cfg.max_grid_points)) {
        std::vector<int> idx(d, 0);
        double cell = (cfg.box_hi - cfg.box_lo) / cfg.grid;
        for (;;) {
          std::vector<double> p(d);
          for (std::size_t j = 0; j < d; ++j) p[j] = cfg.box_lo + (idx[j] + 0.5) * cell;
          out.push_back(std::move(p));
          std::size_t k = 0;
          while (k < d && ++idx[k] == cfg.grid) idx[k++] = 0;
          if (k == d) break;
        }
      }
    }
    std::mt19937_64 rng(cfg.seed * 0x9E3779B97F4A7C15ULL + clause_id + 1);
    std::uniform_real_distribution<double> U(cfg.box_lo, cfg.box_hi);
    for (int r = 0; r < cfg.restarts; ++r) {
      std::vector<double> p(d);
      for (auto& v : p) v = U(rng);
      out.push_back(std::move(p));
    }
    return out;
  }

  bool certify(const double* x, const double* a, const std::vector<Rational>* xq, const std::vector<Rational>* aq,
               const std::vector<double>& wv) const {
    Assignment s;
    for (std::uint32_t i = 0; i < slots.nx; ++i) s.x.push_back(xq ? (*xq)[i] : Rational(x[i]));
    for (std::uint32_t i = 0; i < slots.na; ++i) s.a.push_back(aq ? (*aq)[i] : Rational(a[i]));
    for (double v : wv) s.w.push_back(Rational(v));
    try {
      return eval_qf(body, s);
    } catch (const UndecidedError&) {
      return false;
    }
  }

  WitnessResult run(const double* x, const double* a, const std::vector<Rational>* xq,
                    const std::vector<Rational>* aq) const {
    WitnessResult res;
    if (overflow) {
      res.note = "disjunctive normal form exceeds the clause cap; search skipped";
      return res;
    }
    Work w;
    w.vals.assign(slots.size(), 0.0);
    w.scratch.assign(tape.size(), 0.0);
    for (std::uint32_t i = 0; i < slots.nx; ++i) w.vals[i] = x[i];
    for (std::uint32_t i = 0; i < slots.na; ++i) w.vals[slots.nx + i] = a[i];
    auto witness_out = [&]() {
      return std::vector<double>(w.vals.begin() + slots.nx + slots.na, w.vals.end());
    };

    std::size_t refuted = 0;
    std::vector<Rational> xr, ar;
    auto exact_inputs = [&]() {
      if (xr.empty() && slots.nx)
        for (std::uint32_t i = 0; i < slots.nx; ++i) xr.push_back(xq ? (*xq)[i] : Rational(x[i]));
      if (ar.empty() && slots.na)
        for (std::uint32_t i = 0; i < slots.na; ++i) ar.push_back(aq ? (*aq)[i] : Rational(a[i]));
    };

    for (std::size_t ci = 0; ci < clauses.size(); ++ci) {
      const Clause& c = clauses[ci];
      if (c.linear && cfg.exact_lp) {
        exact_inputs();
        auto value = [&](VarRef v) -> Rational { return v.block == Block::X ? xr.at(v.index) : ar.at(v.index); };
        LinearSystem sys;
        for (auto v : c.wvars) sys.variables.push_back(to_string(v));
        for (const auto& row : c.rows) {
          LinearConstraint lc;
          for (const auto& p : row.coeffs) lc.coeffs.push_back(p.evaluate(value));
          lc.rel = row.rel;
          lc.rhs = -row.constant.evaluate(value);
          sys.constraints.push_back(std::move(lc));
        }
        auto point = feasible_point(sys);
        if (!point) {
          ++refuted;
          continue;
        }
        std::vector<Rational> exact(slots.nw, Rational(0));
        for (std::size_t j = 0; j < c.wvars.size(); ++j) exact[c.wvars[j].index] = (*point)[j];
        res.status = WitnessResult::Status::Found;
        res.witness.clear();
        for (const auto& q : exact) res.witness.push_back(q.get_d());
        res.exact_witness = std::move(exact);
        res.certified_exact = true;
        res.note = "exact linear clause";
        return res;
      }
      const auto starts = seeds(c, x, ci);
      for (const auto& start : starts) {
        std::vector<double> s = start;
        bool ok = false;
        set_point(c, s, w);
        if (status(c, w).ok) {
          ok = true;
        } else if (!s.empty()) {
          ok = project(c, s, w) || nelder_mead(c, s, w);
          set_point(c, s, w);
          ok = ok && status(c, w).ok;
        }
        if (!ok) continue;
        auto wv = witness_out();
        bool exact = cfg.exact_recheck && !transcendental && certify(x, a, xq, aq, wv);
        if (cfg.require_exact && !exact) continue;
        res.status = WitnessResult::Status::Found;
        res.witness = std::move(wv);
        res.certified_exact = exact;
        res.note = "numeric search";
        return res;
      }
    }
    res.refuted = !clauses.empty() ? refuted == clauses.size() : true;
    res.note = res.refuted ? "every clause is infeasible" : "no witness found (inconclusive)";
    return res;
  }
};

WitnessSearcher::WitnessSearcher(const Formula& f, WitnessSearchConfig cfg) : impl_(std::make_unique<Impl>()) {
  impl_->cfg = std::move(cfg);
  impl_->compile(f);
}

WitnessSearcher::~WitnessSearcher() = default;
WitnessSearcher::WitnessSearcher(WitnessSearcher&&) noexcept = default;
WitnessSearcher& WitnessSearcher::operator=(WitnessSearcher&&) noexcept = default;

WitnessResult WitnessSearcher::search(std::span<const double> x, std::span<const double> a) const {
  if (x.size() < impl_->slots.nx || a.size() < impl_->slots.na)
    throw std::invalid_argument("witness search input dimension mismatch");
  return impl_->run(x.data(), a.data(), nullptr, nullptr);
}

WitnessResult WitnessSearcher::search(const std::vector<Rational>& x, const std::vector<Rational>& a) const {
  if (x.size() < impl_->slots.nx || a.size() < impl_->slots.na)
    throw std::invalid_argument("witness search input dimension mismatch");
  std::vector<double> xd, ad;
  for (const auto& q : x) xd.push_back(q.get_d());
  for (const auto& q : a) ad.push_back(q.get_d());
  return impl_->run(xd.data(), ad.data(), &x, &a);
}

const Formula& WitnessSearcher::formula() const { return impl_->graph; }
std::size_t WitnessSearcher::clause_count() const { return impl_->clauses.size(); }
const WitnessSearchConfig& WitnessSearcher::config() const { return impl_->cfg; }

WitnessResult witness_search(const Formula& f, std::span<const double> x, std::span<const double> a,
                             const WitnessSearchConfig& cfg) {
  return WitnessSearcher(f, cfg).search(x, a);
}

}  // namespace stratdef
