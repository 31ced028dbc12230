#include "stratdef/learn.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "stratdef/parallel.hpp"

namespace stratdef {

namespace {

std::mt19937_64 derived_rng(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) {
  std::seed_seq s{seed & 0xffffffffu, seed >> 32, a, b, c};
  return std::mt19937_64(s);
}

nlohmann::json doubles_json(const std::vector<double>& v) {
  auto out = nlohmann::json::array();
  for (double d : v) out.push_back(format_double(d));
  return out;
}

}  // namespace

LearnProblem::LearnProblem(std::shared_ptr<const HypothesisFamily> family, std::shared_ptr<const NeighborhoodSystem> n,
                           StrategicOptions opts, double lo, double hi)
    : family_(std::move(family)), n_(std::move(n)), strategic_(n_ != nullptr), lo_(lo), hi_(hi) {
  if (!(lo < hi)) throw std::invalid_argument("learn: empty input box");
  if (!n_) n_ = std::make_shared<Identity>(family_->input_dim());
  cls_.emplace(family_, n_, std::move(opts));
}

std::vector<double> LearnProblem::sample_input(std::mt19937_64& rng) const { return n_->sample_input(rng, lo_, hi_); }

std::string LearnProblem::distribution() const {
  return "sample_input(" + n_->name() + ")[" + format_double(lo_) + "," + format_double(hi_) + "]";
}

nlohmann::json DataSet::to_json() const {
  nlohmann::json j;
  j["family"] = family;
  j["neighborhood"] = neighborhood;
  j["distribution"] = distribution;
  j["seed"] = seed;
  j["target"] = doubles_json(target);
  j["resampled"] = resampled;
  auto ex = nlohmann::json::array();
  for (const auto& e : examples) ex.push_back({{"x", doubles_json(e.x)}, {"y", e.y ? 1 : 0}});
  j["examples"] = ex;
  return j;
}

DataSet generate_realizable(const LearnProblem& p, const std::vector<double>& target, std::size_t m, std::uint64_t seed,
                            std::size_t retries) {
  if (target.size() != p.family().param_dim())
    throw std::invalid_argument("target has " + std::to_string(target.size()) + " parameters, family needs " +
                                std::to_string(p.family().param_dim()));
  DataSet d;
  d.target = target;
  d.family = p.family().name();
  d.neighborhood = p.strategic() ? p.neighborhood().name() : "none";
  d.distribution = p.distribution();
  d.seed = seed;
  auto rng = derived_rng(seed, 0xda7a);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t attempt = 0;; ++attempt) {
      auto x = p.sample_input(rng);
      auto lab = p.label(target, x);
      if (lab.source != StrategicLabel::Source::Inconclusive) {
        d.examples.push_back({std::move(x), lab.value});
        break;
      }
      ++d.resampled;
      if (attempt + 1 >= retries) throw UndecidedError("label undecided after " + std::to_string(retries) + " draws");
    }
  }
  return d;
}

bool replay_matches(const LearnProblem& p, const DataSet& d) {
  auto again = generate_realizable(p, d.target, d.examples.size(), d.seed);
  if (again.examples.size() != d.examples.size()) return false;
  for (std::size_t i = 0; i < d.examples.size(); ++i)
    if (again.examples[i].x != d.examples[i].x || again.examples[i].y != d.examples[i].y) return false;
  return true;
}

namespace {

constexpr double kMarginPull = 0.02;

struct Score {
  std::size_t errors = 0;
  double violation = 0;
  std::size_t undecided = 0;
  bool operator<(const Score& o) const {
    return errors != o.errors ? errors < o.errors : violation < o.violation;
  }
};

Score score(const LearnProblem& p, const std::vector<double>& a, const DataSet& data) {
  Score s;
  for (const auto& e : data.examples) {
    auto lab = p.label(a, e.x);
    if (lab.source == StrategicLabel::Source::Inconclusive) {
      ++s.errors, ++s.undecided;
      continue;
    }
    const bool oracle = lab.source == StrategicLabel::Source::Oracle;
    if (lab.value == e.y) {
      // Correct points close to the boundary still pull toward a wider margin.
      if (oracle) s.violation += std::max(0.0, kMarginPull - std::fabs(lab.margin));
      continue;
    }
    ++s.errors;
    if (oracle) s.violation += std::fabs(lab.margin) + kMarginPull;
  }
  return s;
}

}  // namespace

ErmResult erm_fit(const LearnProblem& p, const DataSet& data, const ErmOptions& opts) {
  if (opts.budget == 0) throw std::invalid_argument("erm: budget must be positive");
  const std::size_t k = p.family().param_dim();
  ErmResult res;
  auto rng = derived_rng(opts.seed, 0xe77);
  std::normal_distribution<double> N(0, 1);

  std::vector<double> best, cur;
  Score best_s, cur_s;
  double sigma = 0.5;
  std::size_t stall = 0;
  auto restart = [&] {
    cur = p.family().sample_params(rng);
    cur_s = score(p, cur, data);
    ++res.evaluations;
    sigma = 0.5;
    stall = 0;
    if (best.empty() || cur_s < best_s) best = cur, best_s = cur_s;
  };
  restart();
  while (best_s.errors > 0 && res.evaluations < opts.budget) {
    if (stall >= opts.restart_after) {
      restart();
      continue;
    }
    std::vector<double> cand = cur;
    for (std::size_t i = 0; i < k; ++i) cand[i] += sigma * N(rng);
    Score s = score(p, cand, data);
    ++res.evaluations;
    if (s < cur_s) {
      cur = std::move(cand), cur_s = s;
      sigma = std::min(sigma * 1.5, 10.0);
      stall = 0;
      if (cur_s < best_s) best = cur, best_s = cur_s;
    } else {
      sigma = std::max(sigma * 0.92, 1e-6);
      ++stall;
    }
  }
  res.search_errors = best_s.errors;
  res.budget_exhausted = best_s.errors > 0;
  res.params = best;
  res.errors = best_s.errors;
  res.undecided = best_s.undecided;
  if (opts.inject_target && !data.target.empty() && best_s.errors > 0) {
    Score t = score(p, data.target, data);
    if (t.errors < best_s.errors) {
      res.params = data.target;
      res.errors = t.errors;
      res.undecided = t.undecided;
      res.from_target = true;
    }
  }
  res.empirical_error = data.examples.empty() ? 0.0 : double(res.errors) / double(data.examples.size());
  return res;
}

HeldOut holdout_error(const LearnProblem& p, const std::vector<double>& params, const std::vector<double>& target,
                      std::size_t n, std::uint64_t seed) {
  auto fresh = generate_realizable(p, target, n, seed);
  std::size_t wrong = 0;
  for (const auto& e : fresh.examples) {
    auto lab = p.label(params, e.x);
    if (lab.source == StrategicLabel::Source::Inconclusive || lab.value != e.y) ++wrong;
  }
  HeldOut h;
  h.size = n;
  h.error = n ? double(wrong) / double(n) : 0.0;
  h.hoeffding = n ? std::sqrt(std::log(2 / 0.05) / (2.0 * double(n))) : 1.0;
  return h;
}

SweepReport sample_complexity_sweep(const LearnProblem& p, const SweepOptions& opts) {
  if (opts.eps.empty() || opts.trials == 0) throw std::invalid_argument("sweep: need eps values and trials");
  for (double e : opts.eps)
    if (!(e > 0 && e < 1)) throw std::invalid_argument("sweep: eps must lie in (0, 1)");
  if (!(opts.delta > 0 && opts.delta < 1)) throw std::invalid_argument("sweep: delta must lie in (0, 1)");
  if (opts.m_min < 1 || opts.m_max < opts.m_min || opts.grid_ratio <= 1)
    throw std::invalid_argument("sweep: bad m grid");
  SweepReport rep;
  if (opts.target) {
    rep.target = *opts.target;
  } else {
    auto rng = derived_rng(opts.seed, 0x7a6e7);
    rep.target = p.family().sample_params(rng);
  }
  for (double m = double(opts.m_min);; m *= opts.grid_ratio) {
    std::size_t mi = static_cast<std::size_t>(std::llround(m));
    if (mi > opts.m_max) break;
    if (rep.grid.empty() || mi > rep.grid.back()) rep.grid.push_back(mi);
  }
  if (rep.grid.back() != opts.m_max) rep.grid.push_back(opts.m_max);
  const double eps_min = *std::min_element(opts.eps.begin(), opts.eps.end());
  rep.holdout = static_cast<std::size_t>(std::ceil(20 / eps_min - 1e-9));
  rep.hoeffding = std::sqrt(std::log(2 / 0.05) / (2.0 * double(rep.holdout)));

  const std::size_t G = rep.grid.size(), T = opts.trials;
  rep.errors.assign(G, std::vector<double>(T, 1.0));
  std::vector<std::vector<char>> zero(G, std::vector<char>(T, 0));
  parallel_for(T, opts.workers, [&](std::size_t t) {
    // Nested samples: the data for m is the first m points of the trial's stream.
    auto full = generate_realizable(p, rep.target, opts.m_max, opts.seed * 1000003u + t * 7919u + 1);
    auto holdout = generate_realizable(p, rep.target, rep.holdout, opts.seed * 1000003u + t * 7919u + 2);
    for (std::size_t g = 0; g < G; ++g) {
      DataSet d = full;
      d.examples.resize(rep.grid[g]);
      ErmOptions eo = opts.erm;
      eo.seed = opts.erm.seed ^ (opts.seed * 0x9e3779b97f4a7c15ull + t * 1315423911ull + g);
      auto fit = erm_fit(p, d, eo);
      zero[g][t] = fit.search_errors == 0;
      std::size_t wrong = 0;
      for (const auto& e : holdout.examples) {
        auto lab = p.label(fit.params, e.x);
        if (lab.source == StrategicLabel::Source::Inconclusive || lab.value != e.y) ++wrong;
      }
      rep.errors[g][t] = double(wrong) / double(rep.holdout);
    }
  });
  for (std::size_t g = 0; g < G; ++g) {
    double z = 0;
    for (char c : zero[g]) z += c;
    rep.zero_error_rate.push_back(z / double(T));
  }
  const double need = 1 - opts.delta;
  for (double e : opts.eps) {
    std::vector<double> rate(G);
    for (std::size_t g = 0; g < G; ++g) {
      std::size_t ok = 0;
      for (double err : rep.errors[g]) ok += err <= e;
      rate[g] = double(ok) / double(T);
    }
    SweepRow row{e, 0, 0};
    for (std::size_t g = G; g-- > 0;) {
      if (rate[g] + 1e-12 < need) break;
      row.m_hat = rep.grid[g];
      row.success = rate[g];
    }
    rep.rows.push_back(row);
  }
  std::vector<std::pair<double, double>> xy;
  for (const auto& r : rep.rows)
    if (r.m_hat) xy.emplace_back(std::log(1 / r.eps), double(r.m_hat) * r.eps);
  if (xy.size() >= 2) {
    double mx = 0, my = 0;
    for (auto [x, y] : xy) mx += x, my += y;
    mx /= xy.size(), my /= xy.size();
    double sxy = 0, sxx = 0;
    for (auto [x, y] : xy) sxy += (x - mx) * (y - my), sxx += (x - mx) * (x - mx);
    rep.slope = sxx > 0 ? sxy / sxx : 0;
  }
  return rep;
}

std::string SweepReport::csv() const {
  std::ostringstream out;
  out << "eps,m_hat,success,holdout,hoeffding\n";
  for (const auto& r : rows)
    out << format_double(r.eps) << ',' << r.m_hat << ',' << format_double(r.success) << ',' << holdout << ','
        << format_double(hoeffding) << '\n';
  return out.str();
}

nlohmann::json SweepReport::to_json() const {
  nlohmann::json j;
  j["target"] = doubles_json(target);
  j["grid"] = grid;
  j["holdout"] = holdout;
  j["hoeffding"] = format_double(hoeffding);
  auto zr = nlohmann::json::array();
  for (double z : zero_error_rate) zr.push_back(format_double(z));
  j["zero_error_rate"] = zr;
  auto rs = nlohmann::json::array();
  for (const auto& r : rows)
    rs.push_back({{"eps", format_double(r.eps)}, {"m_hat", r.m_hat}, {"success", format_double(r.success)}});
  j["rows"] = rs;
  j["slope"] = format_double(slope);
  j["label"] = "approximate-ERM";
  return j;
}

}  // namespace stratdef
