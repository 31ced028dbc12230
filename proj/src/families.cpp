#include "stratdef/families.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>

#include "stratdef/eval.hpp"
#include "stratdef/linear.hpp"

namespace stratdef {

using namespace vars;

namespace {

Term diff(std::uint32_t i) { return x(i) + c(-1) * y(i); }
Term neg_diff(std::uint32_t i) { return y(i) + c(-1) * x(i); }

Term sum_of(std::vector<Term> parts) {
  if (parts.empty()) return c(0);
  if (parts.size() == 1) return parts.front();
  return Term::sum(std::move(parts));
}

Formula all_equal(std::uint32_t l) {
  std::vector<Formula> parts;
  for (std::uint32_t i = 0; i < l; ++i) parts.push_back(eq(y(i), x(i)));
  return Formula::conjunction(std::move(parts));
}

void require_dim(std::span<const double> v, std::uint32_t l, const char* what) {
  if (v.size() != l) throw std::invalid_argument(std::string(what) + " has dimension " + std::to_string(v.size()) +
                                                 ", expected " + std::to_string(l));
}

void require_dim(const std::vector<Rational>& v, std::uint32_t l, const char* what) {
  if (v.size() != l) throw std::invalid_argument(std::string(what) + " has dimension " + std::to_string(v.size()) +
                                                 ", expected " + std::to_string(l));
}

// Decides enclosure <= bound by doubling precision.
std::optional<bool> decide_le(const std::function<Interval(unsigned)>& enclosure, const Rational& bound) {
  const auto& policy = default_precision();
  for (unsigned bits = policy.initial; bits <= policy.cap; bits *= 2) {
    Interval v = enclosure(bits);
    if (v.hi() <= bound) return true;
    if (v.lo() > bound) return false;
  }
  return std::nullopt;
}

bool on_simplex(std::span<const double> x) {
  double s = 0;
  for (double v : x) {
    if (!(v >= 0)) return false;
    s += v;
  }
  return std::fabs(s - 1) <= 1e-9;
}

bool on_simplex(const std::vector<Rational>& x) {
  Rational s = 0;
  for (const auto& v : x) {
    if (v < 0) return false;
    s += v;
  }
  return s == 1;
}

std::vector<double> simplex_point(std::mt19937_64& rng, std::size_t l) {
  std::exponential_distribution<double> E(1.0);
  std::vector<double> v(l);
  double s = 0;
  for (auto& e : v) s += (e = E(rng));
  for (auto& e : v) e /= s;
  return v;
}

std::string rational_text(const Rational& q) { return to_string(q); }

}  // namespace

// ---- neighborhood systems ----

bool NeighborhoodSystem::in_domain(std::span<const double> x) const { return x.size() == dim(); }

std::vector<double> NeighborhoodSystem::sample_input(std::mt19937_64& rng, double lo, double hi) const {
  std::uniform_real_distribution<double> U(lo, hi);
  std::vector<double> v(dim());
  for (auto& e : v) e = U(rng);
  return v;
}

double RadiusSpec::at(std::span<const double> x) const {
  if (relu_coordinate) return std::max(x[*relu_coordinate], 0.0);
  return constant.get_d();
}

Rational RadiusSpec::at(const std::vector<Rational>& x) const {
  if (relu_coordinate) return x[*relu_coordinate] > 0 ? x[*relu_coordinate] : Rational(0);
  return constant;
}

std::string RadiusSpec::to_string() const {
  if (relu_coordinate) return "relu:x" + std::to_string(*relu_coordinate);
  return rational_text(constant);
}

LpBall::LpBall(std::uint32_t l, std::optional<Rational> p, RadiusSpec radius)
    : l_(l), p_(std::move(p)), radius_(std::move(radius)) {
  if (l_ == 0) throw std::invalid_argument("lp ball needs l >= 1");
  if (p_ && *p_ <= 0) throw std::invalid_argument("lp ball needs p > 0");
  if (!radius_.relu_coordinate && radius_.constant < 0) throw std::invalid_argument("lp ball radius must be >= 0");
  if (radius_.relu_coordinate && *radius_.relu_coordinate >= l_)
    throw std::invalid_argument("radius coordinate out of range");
  if (radius_.relu_coordinate && p_ && *p_ != 1 && *p_ != 2)
    throw std::invalid_argument("variable radius is supported for p in {1, 2, inf}");
}

std::string LpBall::name() const {
  return "lp:l=" + std::to_string(l_) + ",p=" + (p_ ? rational_text(*p_) : std::string("inf")) +
         ",r=" + radius_.to_string();
}

double LpBall::distance(std::span<const double> x, std::span<const double> y) const {
  if (!p_) {
    double m = 0;
    for (std::uint32_t i = 0; i < l_; ++i) m = std::max(m, std::fabs(x[i] - y[i]));
    return m;
  }
  double p = p_->get_d(), s = 0;
  for (std::uint32_t i = 0; i < l_; ++i) s += std::pow(std::fabs(x[i] - y[i]), p);
  return std::pow(s, 1 / p);
}

double LpBall::dual_norm(std::span<const double> w) const {
  double s = 0;
  if (!p_) {
    for (double v : w) s += std::fabs(v);
    return s;
  }
  if (*p_ <= 1) {
    for (double v : w) s = std::max(s, std::fabs(v));
    return s;
  }
  if (*p_ == 2) {
    for (double v : w) s += v * v;
    return std::sqrt(s);
  }
  double p = p_->get_d(), q = p / (p - 1);
  for (double v : w) s += std::pow(std::fabs(v), q);
  return std::pow(s, 1 / q);
}

bool LpBall::contains(std::span<const double> x, std::span<const double> y) const {
  require_dim(x, l_, "x");
  require_dim(y, l_, "y");
  double r = radius_.at(x);
  double slack = kBoundaryTolerance * std::max(1.0, r);
  if (r == 0) {
    for (std::uint32_t i = 0; i < l_; ++i)
      if (std::fabs(x[i] - y[i]) > slack) return false;
    return true;
  }
  if (p_ && *p_ == 2) {
    double s = 0;
    for (std::uint32_t i = 0; i < l_; ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
    return s <= r * r + kBoundaryTolerance * std::max(1.0, r * r);
  }
  return distance(x, y) <= r + slack;
}

std::optional<bool> LpBall::contains_exact(const std::vector<Rational>& x, const std::vector<Rational>& y) const {
  require_dim(x, l_, "x");
  require_dim(y, l_, "y");
  Rational r = radius_.at(x);
  std::vector<Rational> d(l_);
  for (std::uint32_t i = 0; i < l_; ++i) d[i] = abs(x[i] - y[i]);
  if (r == 0) return std::all_of(d.begin(), d.end(), [](const Rational& v) { return v == 0; });
  if (!p_) return std::all_of(d.begin(), d.end(), [&](const Rational& v) { return v <= r; });
  if (*p_ == 1) return std::accumulate(d.begin(), d.end(), Rational(0)) <= r;
  if (*p_ == 2) {
    Rational s = 0;
    for (const auto& v : d) s += v * v;
    return s <= r * r;
  }
  // sum (d_i / r)^p <= 1 with certified exp/log enclosures.
  return decide_le(
      [&](unsigned bits) {
        Interval total(Rational(0));
        for (const auto& v : d) {
          if (v == 0) continue;
          Interval lg = log_enclosure(Interval(Rational(v / r)), bits);
          total = total + exp_enclosure(Interval(*p_) * lg, bits);
        }
        return total;
      },
      Rational(1));
}

std::optional<Formula> LpBall::formula() const {
  std::vector<Formula> parts;
  auto degenerate = [&](std::uint32_t j, Formula ball) {
    return (x(j) >= c(0) && std::move(ball)) || (x(j) < c(0) && all_equal(l_));
  };
  if (!p_) {
    Term r = radius_.relu_coordinate ? x(*radius_.relu_coordinate) : c(radius_.constant);
    for (std::uint32_t i = 0; i < l_; ++i) {
      parts.push_back(diff(i) <= r);
      parts.push_back(neg_diff(i) <= r);
    }
    Formula box = Formula::conjunction(std::move(parts));
    if (radius_.relu_coordinate) return degenerate(*radius_.relu_coordinate, box);
    return box;
  }
  if (*p_ == 2) {
    std::vector<Term> squares;
    for (std::uint32_t i = 0; i < l_; ++i) squares.push_back(diff(i) * diff(i));
    if (radius_.relu_coordinate) {
      std::uint32_t j = *radius_.relu_coordinate;
      return degenerate(j, sum_of(std::move(squares)) <= x(j) * x(j));
    }
    return sum_of(std::move(squares)) <= c(radius_.constant * radius_.constant);
  }
  std::vector<std::uint32_t> ws;
  if (*p_ == 1) {
    // w_i >= |x_i - y_i|, sum w_i <= r
    std::vector<Term> total;
    for (std::uint32_t i = 0; i < l_; ++i) {
      ws.push_back(i);
      parts.push_back(w(i) >= diff(i));
      parts.push_back(w(i) >= neg_diff(i));
      total.push_back(w(i));
    }
    Term r = radius_.relu_coordinate ? x(*radius_.relu_coordinate) : c(radius_.constant);
    parts.push_back(sum_of(std::move(total)) <= r);
    Formula body = Formula::conjunction(std::move(parts));
    if (radius_.relu_coordinate) body = degenerate(*radius_.relu_coordinate, body);
    return Formula::exists(std::move(ws), body);
  }
  // General p on the scaled difference (x - y) / r:
  // u_i = |.|^p = exp(p z_i) with r exp(z_i) = +-(x_i - y_i), or u_i = 0 at x_i = y_i.
  const Rational& r = radius_.constant;
  if (r == 0) return all_equal(l_);
  std::vector<Term> total;
  for (std::uint32_t i = 0; i < l_; ++i) ws.push_back(i), ws.push_back(l_ + i);
  std::sort(ws.begin(), ws.end());
  for (std::uint32_t i = 0; i < l_; ++i) {
    Term u = w(i), z = w(l_ + i);
    Term scaled = r == 1 ? Term::exp(z) : c(r) * Term::exp(z);
    Formula zero = eq(x(i), y(i)) && eq(u, c(0));
    Formula moved = (eq(scaled, diff(i)) || eq(scaled, neg_diff(i))) && eq(u, Term::exp(c(*p_) * z));
    parts.push_back(zero || moved);
    total.push_back(u);
  }
  parts.insert(parts.begin(), sum_of(std::move(total)) <= c(1));
  return Formula::exists(std::move(ws), Formula::conjunction(std::move(parts)));
}

std::vector<std::vector<double>> LpBall::sample(std::span<const double> x, std::size_t budget,
                                                std::mt19937_64& rng) const {
  std::vector<std::vector<double>> out{{x.begin(), x.end()}};
  double r = radius_.at(x);
  if (r == 0) return out;
  std::uniform_real_distribution<double> U(-1, 1), U01(0, 1);
  std::vector<double> zero(l_, 0.0);
  while (out.size() < budget) {
    std::vector<double> d(l_);
    for (auto& v : d) v = U(rng);
    double n = distance(d, zero);
    if (n == 0) continue;
    double scale = r * std::pow(U01(rng), 1.0 / l_) / n;
    std::vector<double> y(l_);
    for (std::uint32_t i = 0; i < l_; ++i) y[i] = x[i] + scale * d[i];
    out.push_back(std::move(y));
  }
  return out;
}

KlBall::KlBall(std::uint32_t l, Rational radius) : l_(l), radius_(std::move(radius)) {
  if (l_ < 2) throw std::invalid_argument("kl ball needs l >= 2");
  if (radius_ < 0) throw std::invalid_argument("kl radius must be >= 0");
}

std::string KlBall::name() const { return "kl:l=" + std::to_string(l_) + ",r=" + rational_text(radius_); }

bool KlBall::in_domain(std::span<const double> x) const { return x.size() == l_ && on_simplex(x); }

double KlBall::divergence(std::span<const double> x, std::span<const double> y) const {
  if (!in_domain(x)) throw std::invalid_argument("kl ball: input is off the simplex");
  if (!in_domain(y)) return std::numeric_limits<double>::infinity();
  double s = 0;
  for (std::uint32_t i = 0; i < l_; ++i) {
    if (x[i] == 0) continue;
    if (y[i] <= 0) return std::numeric_limits<double>::infinity();
    s += x[i] * std::log(x[i] / y[i]);
  }
  return s;
}

bool KlBall::contains(std::span<const double> x, std::span<const double> y) const {
  double r = radius_.get_d();
  return divergence(x, y) <= r + kBoundaryTolerance * std::max(1.0, r);
}

std::optional<bool> KlBall::contains_exact(const std::vector<Rational>& x, const std::vector<Rational>& y) const {
  require_dim(x, l_, "x");
  require_dim(y, l_, "y");
  if (!on_simplex(x)) throw std::invalid_argument("kl ball: input is off the simplex");
  if (!on_simplex(y)) return false;
  for (std::uint32_t i = 0; i < l_; ++i)
    if (x[i] > 0 && y[i] == 0) return false;
  return decide_le(
      [&](unsigned bits) {
        Interval total(Rational(0));
        for (std::uint32_t i = 0; i < l_; ++i) {
          if (x[i] == 0) continue;
          total = total + Interval(x[i]) * log_enclosure(Interval(Rational(x[i] / y[i])), bits);
        }
        return total;
      },
      radius_);
}

std::optional<Formula> KlBall::formula() const {
  std::vector<Formula> parts;
  std::vector<Term> sx, sy, cost;
  std::vector<std::uint32_t> ws;
  for (std::uint32_t i = 0; i < l_; ++i) {
    parts.push_back(x(i) >= c(0));
    parts.push_back(y(i) >= c(0));
    sx.push_back(x(i));
    sy.push_back(y(i));
    cost.push_back(x(i) * w(i));
    ws.push_back(i);
  }
  parts.push_back(eq(sum_of(std::move(sx)), c(1)));
  parts.push_back(eq(sum_of(std::move(sy)), c(1)));
  parts.push_back(sum_of(std::move(cost)) <= c(radius_));
  for (std::uint32_t i = 0; i < l_; ++i)
    parts.push_back((x(i) > c(0) && y(i) > c(0) && eq(y(i) * Term::exp(w(i)), x(i))) ||
                    (eq(x(i), c(0)) && eq(w(i), c(0))));
  return Formula::exists(std::move(ws), Formula::conjunction(std::move(parts)));
}

std::vector<std::vector<double>> KlBall::sample(std::span<const double> x, std::size_t budget,
                                                std::mt19937_64& rng) const {
  std::vector<std::vector<double>> out{{x.begin(), x.end()}};
  std::normal_distribution<double> N(0, 1);
  double sigma = 1;
  for (int tries = 0; out.size() < budget && tries < 100 * static_cast<int>(budget); ++tries) {
    std::vector<double> y(l_);
    double s = 0;
    for (std::uint32_t i = 0; i < l_; ++i) s += (y[i] = x[i] * std::exp(sigma * N(rng)));
    for (auto& v : y) v /= s;
    if (contains(x, y)) {
      out.push_back(std::move(y));
    } else {
      sigma *= 0.8;
    }
  }
  return out;
}

std::vector<double> KlBall::sample_input(std::mt19937_64& rng, double, double) const { return simplex_point(rng, l_); }

GaussianKlBall::GaussianKlBall(Rational radius) : radius_(std::move(radius)) {
  if (radius_ < 0) throw std::invalid_argument("kl radius must be >= 0");
}

std::string GaussianKlBall::name() const { return "gkl:r=" + rational_text(radius_); }

bool GaussianKlBall::contains(std::span<const double> x, std::span<const double> y) const {
  double d = x[0] - y[0], r = radius_.get_d();
  return d * d / 2 <= r + kBoundaryTolerance * std::max(1.0, r);
}

std::optional<bool> GaussianKlBall::contains_exact(const std::vector<Rational>& x,
                                                   const std::vector<Rational>& y) const {
  Rational d = x.at(0) - y.at(0);
  return d * d / 2 <= radius_;
}

std::optional<Formula> GaussianKlBall::formula() const { return diff(0) * diff(0) <= c(2 * radius_); }

std::vector<std::vector<double>> GaussianKlBall::sample(std::span<const double> x, std::size_t budget,
                                                        std::mt19937_64& rng) const {
  std::vector<std::vector<double>> out{{x[0]}};
  double reach = std::sqrt(2 * radius_.get_d());
  std::uniform_real_distribution<double> U(-reach, reach);
  while (out.size() < budget) out.push_back({x[0] + U(rng)});
  return out;
}

std::vector<std::vector<Rational>> example_metric() { return {{0, 1, 2}, {1, 0, 1}, {2, 1, 0}}; }

EmdBall::EmdBall(std::vector<std::vector<Rational>> rho, Rational radius)
    : rho_(std::move(rho)), radius_(std::move(radius)) {
  const std::size_t l = rho_.size();
  if (l == 0) throw std::invalid_argument("emd metric table is empty");
  for (std::size_t i = 0; i < l; ++i) {
    if (rho_[i].size() != l) throw std::invalid_argument("emd metric table is not square");
    if (rho_[i][i] != 0) throw std::invalid_argument("emd metric table needs a zero diagonal");
    for (std::size_t j = 0; j < l; ++j) {
      if (rho_[i][j] < 0) throw std::invalid_argument("emd metric table has a negative entry");
      if (rho_[i][j] != rho_[j][i]) throw std::invalid_argument("emd metric table is not symmetric");
    }
  }
  if (radius_ < 0) throw std::invalid_argument("emd radius must be >= 0");
}

std::string EmdBall::name() const {
  std::string m;
  for (std::size_t i = 0; i < rho_.size(); ++i)
    for (std::size_t j = i + 1; j < rho_.size(); ++j) m += (m.empty() ? "" : ";") + rational_text(rho_[i][j]);
  return "emd:l=" + std::to_string(rho_.size()) + ",metric=" + m + ",r=" + rational_text(radius_);
}

bool EmdBall::in_domain(std::span<const double> x) const { return x.size() == rho_.size() && on_simplex(x); }

std::pair<Rational, std::vector<Rational>> EmdBall::distance(const std::vector<Rational>& x,
                                                             const std::vector<Rational>& y) const {
  const std::size_t l = rho_.size();
  if (x.size() != l || y.size() != l) throw std::invalid_argument("emd: dimension mismatch");
  LPInstance lp;
  for (std::size_t i = 0; i < l; ++i)
    for (std::size_t j = 0; j < l; ++j) lp.objective.push_back(rho_[i][j]);
  lp.lower.assign(l * l, Rational(0));
  for (std::size_t i = 0; i < l; ++i) {
    std::vector<Rational> row(l * l, Rational(0)), col(l * l, Rational(0));
    for (std::size_t j = 0; j < l; ++j) row[i * l + j] = 1, col[j * l + i] = 1;
    lp.matrix.push_back(std::move(row)), lp.relations.push_back(Relation::Eq), lp.rhs.push_back(x[i]);
    lp.matrix.push_back(std::move(col)), lp.relations.push_back(Relation::Eq), lp.rhs.push_back(y[i]);
  }
  LPResult r = lp_solve(lp);
  if (r.status != LPResult::Status::Optimal) throw std::invalid_argument("emd: inputs have different total mass");
  return {r.value, r.point};
}

std::optional<bool> EmdBall::contains_exact(const std::vector<Rational>& x, const std::vector<Rational>& y) const {
  if (!on_simplex(x)) throw std::invalid_argument("emd ball: input is off the simplex");
  if (!on_simplex(y)) return false;
  return distance(x, y).first <= radius_;
}

bool EmdBall::contains(std::span<const double> x, std::span<const double> y) const {
  if (!in_domain(x)) throw std::invalid_argument("emd ball: input is off the simplex");
  if (!in_domain(y)) return false;
  // Exact LP on the binary values, with y rescaled to x's total mass.
  std::vector<Rational> xq, yq;
  Rational sx = 0, sy = 0;
  for (double v : x) xq.emplace_back(v), sx += xq.back();
  for (double v : y) yq.emplace_back(v), sy += yq.back();
  for (auto& v : yq) v = v * sx / sy;
  double d = distance(xq, yq).first.get_d(), r = radius_.get_d();
  return d <= r + kBoundaryTolerance * std::max(1.0, r);
}

std::optional<Formula> EmdBall::formula() const {
  const std::uint32_t l = dim();
  std::vector<Formula> parts;
  std::vector<Term> sx, sy, cost;
  std::vector<std::uint32_t> ws;
  auto g = [&](std::uint32_t i, std::uint32_t j) { return w(i * l + j); };
  for (std::uint32_t i = 0; i < l; ++i) {
    parts.push_back(x(i) >= c(0));
    parts.push_back(y(i) >= c(0));
    sx.push_back(x(i));
    sy.push_back(y(i));
  }
  parts.push_back(eq(sum_of(std::move(sx)), c(1)));
  parts.push_back(eq(sum_of(std::move(sy)), c(1)));
  for (std::uint32_t i = 0; i < l; ++i)
    for (std::uint32_t j = 0; j < l; ++j) {
      ws.push_back(i * l + j);
      parts.push_back(g(i, j) >= c(0));
      if (rho_[i][j] != 0) cost.push_back(rho_[i][j] == 1 ? g(i, j) : c(rho_[i][j]) * g(i, j));
    }
  for (std::uint32_t i = 0; i < l; ++i) {
    std::vector<Term> row;
    for (std::uint32_t j = 0; j < l; ++j) row.push_back(g(i, j));
    parts.push_back(eq(sum_of(std::move(row)), x(i)));
  }
  for (std::uint32_t j = 0; j < l; ++j) {
    std::vector<Term> col;
    for (std::uint32_t i = 0; i < l; ++i) col.push_back(g(i, j));
    parts.push_back(eq(sum_of(std::move(col)), y(j)));
  }
  parts.push_back(sum_of(std::move(cost)) <= c(radius_));
  return Formula::exists(std::move(ws), Formula::conjunction(std::move(parts)));
}

std::vector<std::vector<double>> EmdBall::sample(std::span<const double> x, std::size_t budget,
                                                 std::mt19937_64& rng) const {
  std::vector<std::vector<double>> out{{x.begin(), x.end()}};
  std::uniform_real_distribution<double> U(0, 1);
  for (int tries = 0; out.size() < budget && tries < 100 * static_cast<int>(budget); ++tries) {
    auto z = simplex_point(rng, dim());
    double t = U(rng);
    for (int shrink = 0; shrink < 20; ++shrink, t /= 2) {
      std::vector<double> y(dim());
      for (std::size_t i = 0; i < y.size(); ++i) y[i] = (1 - t) * x[i] + t * z[i];
      if (contains(x, y)) {
        out.push_back(std::move(y));
        break;
      }
    }
  }
  return out;
}

std::vector<double> EmdBall::sample_input(std::mt19937_64& rng, double, double) const {
  return simplex_point(rng, dim());
}

IntervalRadius::IntervalRadius(Rational r) : r_(std::move(r)) {
  if (r_ <= 0) throw std::invalid_argument("interval radius must be > 0");
}

std::string IntervalRadius::name() const { return "interval:r=" + rational_text(r_); }

bool IntervalRadius::contains(std::span<const double> x, std::span<const double> y) const {
  double r = r_.get_d();
  return std::fabs(x[0] - y[0]) <= r + kBoundaryTolerance * std::max(1.0, r);
}

std::optional<bool> IntervalRadius::contains_exact(const std::vector<Rational>& x,
                                                   const std::vector<Rational>& y) const {
  return abs(x.at(0) - y.at(0)) <= r_;
}

std::optional<Formula> IntervalRadius::formula() const { return diff(0) <= c(r_) && neg_diff(0) <= c(r_); }

std::vector<std::vector<double>> IntervalRadius::sample(std::span<const double> x, std::size_t budget,
                                                        std::mt19937_64& rng) const {
  std::vector<std::vector<double>> out{{x[0]}};
  double r = r_.get_d();
  std::uniform_real_distribution<double> U(-r, r);
  if (budget > 1) out.push_back({x[0] - r}), out.push_back({x[0] + r});
  while (out.size() < budget) out.push_back({x[0] + U(rng)});
  return out;
}

bool FloorPartition::contains(std::span<const double> x, std::span<const double> y) const {
  double f = std::floor(x[0]);
  return f <= y[0] && y[0] < f + 1;
}

std::optional<bool> FloorPartition::contains_exact(const std::vector<Rational>& x,
                                                   const std::vector<Rational>& y) const {
  Rational f(floor(x.at(0)));
  return f <= y.at(0) && y.at(0) < f + 1;
}

std::vector<std::vector<double>> FloorPartition::sample(std::span<const double> x, std::size_t budget,
                                                        std::mt19937_64& rng) const {
  std::vector<std::vector<double>> out{{x[0]}};
  double f = std::floor(x[0]);
  std::uniform_real_distribution<double> U(0, 1);
  if (budget > 1) out.push_back({f}), out.push_back({std::nextafter(f + 1, f)});
  while (out.size() < budget) out.push_back({f + U(rng)});
  return out;
}

std::string Identity::name() const { return "identity:l=" + std::to_string(l_); }

bool Identity::contains(std::span<const double> x, std::span<const double> y) const {
  return std::equal(x.begin(), x.end(), y.begin(), y.end());
}

std::optional<bool> Identity::contains_exact(const std::vector<Rational>& x, const std::vector<Rational>& y) const {
  return x == y;
}

std::optional<Formula> Identity::formula() const { return all_equal(l_); }

std::vector<std::vector<double>> Identity::sample(std::span<const double> x, std::size_t, std::mt19937_64&) const {
  return {{x.begin(), x.end()}};
}

// ---- hypothesis families ----

std::optional<bool> HypothesisFamily::evaluate_exact(const std::vector<Rational>& a,
                                                     const std::vector<Rational>& xs) const {
  Assignment s;
  s.a = a;
  s.x = xs;
  try {
    return eval_qf(formula(), s);
  } catch (const UndecidedError&) {
    return std::nullopt;
  }
}

std::optional<ReachVerdict> HypothesisFamily::reach(const NeighborhoodSystem&, std::span<const double>,
                                                    std::span<const double>, double) const {
  return std::nullopt;
}

std::vector<double> HypothesisFamily::sample_params(std::mt19937_64& rng) const {
  std::normal_distribution<double> N(0, 1);
  std::vector<double> a(param_dim());
  for (auto& v : a) v = N(rng);
  return a;
}

namespace {

ReachVerdict verdict(double margin, double tol) {
  if (std::fabs(margin) <= tol) return {Reach::Boundary, margin};
  return {margin > 0 ? Reach::Reachable : Reach::Unreachable, margin};
}

// Reach radius and the dual norm of w for norm-ball systems.
std::optional<std::pair<double, double>> ball_reach(const NeighborhoodSystem& n, std::span<const double> w,
                                                    std::span<const double> x) {
  if (auto* lp = dynamic_cast<const LpBall*>(&n)) return std::make_pair(lp->radius().at(x), lp->dual_norm(w));
  if (dynamic_cast<const Identity*>(&n)) return std::make_pair(0.0, 0.0);
  if (w.size() != 1) return std::nullopt;
  if (auto* iv = dynamic_cast<const IntervalRadius*>(&n)) return std::make_pair(iv->radius().get_d(), std::fabs(w[0]));
  if (auto* g = dynamic_cast<const GaussianKlBall*>(&n))
    return std::make_pair(std::sqrt(2 * g->radius().get_d()), std::fabs(w[0]));
  return std::nullopt;
}

}  // namespace

Halfspace::Halfspace(std::uint32_t l) : l_(l) {
  if (l_ == 0) throw std::invalid_argument("halfspace needs l >= 1");
}

std::string Halfspace::name() const { return "halfspace:l=" + std::to_string(l_); }

bool Halfspace::evaluate(std::span<const double> a, std::span<const double> xs) const {
  double s = 0;
  for (std::uint32_t i = 0; i < l_; ++i) s += a[i] * xs[i];
  return s >= a[l_];
}

Formula Halfspace::formula() const {
  std::vector<Term> terms;
  for (std::uint32_t i = 0; i < l_; ++i) terms.push_back(a(i) * x(i));
  return sum_of(std::move(terms)) >= a(l_);
}

std::optional<ReachVerdict> Halfspace::reach(const NeighborhoodSystem& n, std::span<const double> a,
                                             std::span<const double> xs, double tol) const {
  if (n.dim() != l_) return std::nullopt;
  std::span<const double> wv = a.first(l_);
  auto rr = ball_reach(n, wv, xs);
  if (!rr) return std::nullopt;
  auto [radius, dual] = *rr;
  double s = 0;
  for (std::uint32_t i = 0; i < l_; ++i) s += wv[i] * xs[i];
  return verdict((s + radius * dual - a[l_]) / std::max(1.0, dual), tol);
}

bool Threshold::evaluate(std::span<const double> a, std::span<const double> xs) const { return xs[0] >= a[0]; }

Formula Threshold::formula() const { return x(0) >= a(0); }

std::optional<ReachVerdict> Threshold::reach(const NeighborhoodSystem& n, std::span<const double> a,
                                             std::span<const double> xs, double tol) const {
  if (n.dim() != 1) return std::nullopt;
  if (dynamic_cast<const FloorPartition*>(&n)) {
    // sup N_x = floor(x) + 1 is not attained.
    double m = std::floor(xs[0]) + 1 - a[0];
    if (std::fabs(m) <= tol) return ReachVerdict{Reach::Boundary, m};
    return ReachVerdict{m > 0 ? Reach::Reachable : Reach::Unreachable, m};
  }
  double one = 1;
  auto rr = ball_reach(n, std::span<const double>(&one, 1), xs);
  if (!rr) return std::nullopt;
  return verdict(xs[0] + rr->first - a[0], tol);
}

std::vector<std::vector<std::uint32_t>> graded_lex_monomials(std::uint32_t l, std::uint32_t degree) {
  std::vector<std::vector<std::uint32_t>> out;
  std::vector<std::uint32_t> e(l, 0);
  for (std::uint32_t d = 0; d <= degree; ++d) {
    // Exponent vectors of total degree d in decreasing lex order.
    std::function<void(std::uint32_t, std::uint32_t)> rec = [&](std::uint32_t i, std::uint32_t left) {
      if (i + 1 == l) {
        e[i] = left;
        out.push_back(e);
        return;
      }
      for (std::uint32_t k = left + 1; k-- > 0;) {
        e[i] = k;
        rec(i + 1, left - k);
      }
    };
    if (l == 0) {
      if (d == 0) out.emplace_back();
      continue;
    }
    rec(0, d);
    if (out.size() > kMaxParams) throw std::invalid_argument("polynomial parameter count exceeds the cap");
  }
  return out;
}

PolynomialThreshold::PolynomialThreshold(std::uint32_t l, std::uint32_t degree) : l_(l), degree_(degree) {
  if (l_ == 0 || degree_ == 0) throw std::invalid_argument("polynomial threshold needs l, D >= 1");
  // k = C(l + D, D), checked before enumerating.
  Integer k = 1;
  for (std::uint32_t i = 1; i <= degree_; ++i) k = k * (l_ + i) / i;
  if (k > kMaxParams) throw std::invalid_argument("polynomial parameter count exceeds the cap");
  monomials_ = graded_lex_monomials(l_, degree_);
}

std::string PolynomialThreshold::name() const {
  return "ptf:l=" + std::to_string(l_) + ",D=" + std::to_string(degree_);
}

Term PolynomialThreshold::polynomial(std::uint32_t offset) const {
  std::vector<Term> terms;
  for (std::size_t k = 0; k < monomials_.size(); ++k) {
    std::vector<Term> factors{a(offset + static_cast<std::uint32_t>(k))};
    for (std::uint32_t i = 0; i < l_; ++i)
      for (std::uint32_t e = 0; e < monomials_[k][i]; ++e) factors.push_back(x(i));
    terms.push_back(factors.size() == 1 ? factors.front() : Term::product(std::move(factors)));
  }
  return sum_of(std::move(terms));
}

double PolynomialThreshold::value(std::span<const double> a, std::span<const double> xs, std::size_t offset) const {
  double s = 0;
  for (std::size_t k = 0; k < monomials_.size(); ++k) {
    double m = a[offset + k];
    for (std::uint32_t i = 0; i < l_; ++i)
      for (std::uint32_t e = 0; e < monomials_[k][i]; ++e) m *= xs[i];
    s += m;
  }
  return s;
}

bool PolynomialThreshold::evaluate(std::span<const double> a, std::span<const double> xs) const {
  return value(a, xs) > 0;
}

Formula PolynomialThreshold::formula() const { return polynomial(0) > c(0); }

PolyTree::PolyTree(std::uint32_t l, std::uint32_t q, std::string topology, std::optional<std::uint32_t> max_depth)
    : l_(l), q_(q), topology_(std::move(topology)), poly_(l, q) {
  std::size_t pos = 0;
  build(pos);
  if (pos != topology_.size()) throw std::invalid_argument("malformed topology: trailing characters");
  if (max_depth && depth_ > *max_depth)
    throw std::invalid_argument("malformed topology: depth " + std::to_string(depth_) + " exceeds " +
                                std::to_string(*max_depth));
}

int PolyTree::build(std::size_t& pos) {
  if (pos >= topology_.size()) throw std::invalid_argument("malformed topology: truncated");
  char ch = topology_[pos++];
  int id = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  if (ch == '0' || ch == '1') {
    nodes_[id].label = ch - '0';
    return id;
  }
  if (ch != 'N') throw std::invalid_argument(std::string("malformed topology: unexpected '") + ch + "'");
  nodes_[id].index = internal_++;
  int left = build(pos);
  int right = build(pos);
  nodes_[id].left = left;
  nodes_[id].right = right;
  // Depth in internal nodes along the deepest path.
  std::function<std::uint32_t(int)> height = [&](int n) -> std::uint32_t {
    if (nodes_[n].label >= 0) return 0;
    return 1 + std::max(height(nodes_[n].left), height(nodes_[n].right));
  };
  depth_ = std::max(depth_, height(id));
  return id;
}

std::string PolyTree::name() const {
  return "tree:l=" + std::to_string(l_) + ",q=" + std::to_string(q_) + ",topology=" + topology_;
}

std::uint32_t PolyTree::param_dim() const { return internal_ * poly_.param_dim(); }

bool PolyTree::evaluate(std::span<const double> a, std::span<const double> xs) const {
  int n = 0;
  while (nodes_[n].label < 0) {
    bool right = poly_.value(a, xs, nodes_[n].index * poly_.param_dim()) >= 0;
    n = right ? nodes_[n].right : nodes_[n].left;
  }
  return nodes_[n].label == 1;
}

Formula PolyTree::formula() const {
  std::vector<Formula> leaves;
  std::vector<Formula> path;
  std::function<void(int)> walk = [&](int n) {
    if (nodes_[n].label >= 0) {
      if (nodes_[n].label == 1) leaves.push_back(Formula::conjunction(path));
      return;
    }
    Term p = poly_.polynomial(nodes_[n].index * poly_.param_dim());
    path.push_back(p < c(0));
    walk(nodes_[n].left);
    path.back() = p >= c(0);
    walk(nodes_[n].right);
    path.pop_back();
  };
  walk(0);
  if (leaves.size() == 1) return leaves.front();
  return Formula::disjunction(std::move(leaves));
}

SigmoidNetwork::SigmoidNetwork(std::vector<std::uint32_t> widths) : widths_(std::move(widths)) {
  if (widths_.size() < 2) throw std::invalid_argument("sigmoid network needs at least one layer");
  if (widths_.back() != 1) throw std::invalid_argument("sigmoid network: width mismatch, last layer must be 1");
  for (auto d : widths_)
    if (d == 0) throw std::invalid_argument("sigmoid network: width mismatch, zero-width layer");
  for (std::size_t j = 1; j < widths_.size(); ++j) params_ += widths_[j] * widths_[j - 1] + widths_[j];
}

std::string SigmoidNetwork::name() const {
  std::string s = "sigmoid:widths=";
  for (std::size_t j = 0; j < widths_.size(); ++j) s += (j ? "-" : "") + std::to_string(widths_[j]);
  return s;
}

std::vector<double> SigmoidNetwork::witnesses(std::span<const double> a, std::span<const double> xs) const {
  std::vector<double> out, prev(xs.begin(), xs.end()), cur;
  std::size_t p = 0;
  for (std::size_t j = 1; j < widths_.size(); ++j) {
    const std::uint32_t d = widths_[j], dp = widths_[j - 1];
    std::size_t bias = p + static_cast<std::size_t>(d) * dp;
    cur.assign(d, 0);
    for (std::uint32_t i = 0; i < d; ++i) {
      double r = a[bias + i];
      for (std::uint32_t s = 0; s < dp; ++s) r += a[p + i * dp + s] * prev[s];
      double q = std::exp(-r);
      cur[i] = 1 / (1 + q);
      out.insert(out.end(), {r, q, cur[i]});
    }
    p = bias + d;
    prev = cur;
  }
  return out;
}

double SigmoidNetwork::output(std::span<const double> a, std::span<const double> xs) const {
  auto wv = witnesses(a, xs);
  return wv[wv.size() - 3];
}

bool SigmoidNetwork::evaluate(std::span<const double> a, std::span<const double> xs) const {
  return output(a, xs) >= 0;
}

std::optional<bool> SigmoidNetwork::evaluate_exact(const std::vector<Rational>& a,
                                                   const std::vector<Rational>& xs) const {
  const auto& policy = default_precision();
  for (unsigned bits = policy.initial; bits <= policy.cap; bits *= 2) {
    std::vector<Interval> prev, cur;
    for (const auto& v : xs) prev.emplace_back(v);
    std::size_t p = 0;
    Interval r_out;
    for (std::size_t j = 1; j < widths_.size(); ++j) {
      const std::uint32_t d = widths_[j], dp = widths_[j - 1];
      std::size_t bias = p + static_cast<std::size_t>(d) * dp;
      cur.assign(d, Interval());
      for (std::uint32_t i = 0; i < d; ++i) {
        Interval r(a[bias + i]);
        for (std::uint32_t s = 0; s < dp; ++s) r = r + Interval(a[p + i * dp + s]) * prev[s];
        r_out = r;
        // sigma is increasing: enclose through the endpoints.
        Interval e_lo = exp_enclosure(Interval(Rational(-r.hi())), bits);
        Interval e_hi = exp_enclosure(Interval(Rational(-r.lo())), bits);
        cur[i] = Interval(Rational(1 / (1 + e_hi.hi())), Rational(1 / (1 + e_lo.lo())));
      }
      p = bias + d;
      prev = cur;
    }
    int s = r_out.certified_sign();
    if (s != kSignUnknown) return s >= 0;
  }
  return std::nullopt;
}

Formula SigmoidNetwork::formula() const {
  std::vector<Formula> parts;
  std::vector<std::uint32_t> ws;
  std::vector<Term> prev;
  for (std::uint32_t s = 0; s < widths_.front(); ++s) prev.push_back(x(s));
  std::uint32_t p = 0, next = 0;
  Term last = c(0);
  for (std::size_t j = 1; j < widths_.size(); ++j) {
    const std::uint32_t d = widths_[j], dp = widths_[j - 1];
    std::uint32_t bias = p + d * dp;
    std::vector<Term> cur;
    for (std::uint32_t i = 0; i < d; ++i) {
      std::uint32_t r = next++, q = next++, z = next++;
      ws.insert(ws.end(), {r, q, z});
      std::vector<Term> affine;
      for (std::uint32_t s = 0; s < dp; ++s) affine.push_back(a(p + i * dp + s) * prev[s]);
      affine.push_back(a(bias + i));
      parts.push_back(eq(w(r), sum_of(std::move(affine))));
      parts.push_back(eq(w(q), Term::exp(c(-1) * w(r))));
      parts.push_back(eq(w(z) * (c(1) + w(q)), c(1)));
      cur.push_back(w(z));
      last = w(r);
    }
    p = bias + d;
    prev = std::move(cur);
  }
  parts.push_back(last >= c(0));
  return Formula::exists(std::move(ws), Formula::conjunction(std::move(parts)));
}

FiniteSupportClass::FiniteSupportClass(std::vector<std::vector<Rational>> sets, bool require_disjoint)
    : sets_(std::move(sets)) {
  std::vector<std::pair<Rational, std::size_t>> all;
  for (std::size_t i = 0; i < sets_.size(); ++i) {
    auto& s = sets_[i];
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    for (const auto& v : s) all.emplace_back(v, i);
  }
  std::sort(all.begin(), all.end());
  for (std::size_t k = 1; k < all.size(); ++k) {
    if (all[k].first != all[k - 1].first) continue;
    disjoint_ = false;
    if (require_disjoint)
      throw std::invalid_argument("sets " + std::to_string(all[k - 1].second) + " and " + std::to_string(all[k].second) +
                                  " share the point " + rational_text(all[k].first));
  }
}

bool FiniteSupportClass::evaluate(std::size_t i, const Rational& x) const {
  return std::binary_search(sets_.at(i).begin(), sets_[i].end(), x);
}

std::vector<std::vector<Rational>> decimal_tag_sets(std::uint32_t n) {
  if (n > 20) throw std::invalid_argument("decimal tags: n too large");
  std::vector<std::vector<Rational>> out;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    Rational tag = 0, scale = 1;
    for (std::uint32_t j = 1; j <= n; ++j) {
      scale /= 10;
      if (mask >> (j - 1) & 1) tag += scale;
    }
    std::vector<Rational> s;
    for (std::uint32_t i = 1; i <= n; ++i)
      if (mask >> (i - 1) & 1) s.push_back(Rational(i) + tag);
    out.push_back(std::move(s));
  }
  return out;
}

// ---- registry ----

namespace {

struct SpecArgs {
  std::string name;
  std::map<std::string, std::string> kv;

  std::optional<std::string> take(const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    std::string v = it->second;
    kv.erase(it);
    return v;
  }
  std::uint32_t take_uint(const std::string& key, std::optional<std::uint32_t> fallback) {
    auto v = take(key);
    if (!v) {
      if (!fallback) throw std::invalid_argument(name + ": missing '" + key + "'");
      return *fallback;
    }
    std::size_t used = 0;
    unsigned long n = 0;
    try {
      n = std::stoul(*v, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != v->size()) throw std::invalid_argument(name + ": '" + key + "' must be a natural number");
    return static_cast<std::uint32_t>(n);
  }
  Rational take_rational(const std::string& key, std::optional<Rational> fallback) {
    auto v = take(key);
    if (!v) {
      if (!fallback) throw std::invalid_argument(name + ": missing '" + key + "'");
      return *fallback;
    }
    return parse_rational(*v);
  }
  void finish() const {
    if (!kv.empty()) throw std::invalid_argument(name + ": unknown option '" + kv.begin()->first + "'");
  }
};

SpecArgs split_spec(std::string_view spec) {
  SpecArgs out;
  auto colon = spec.find(':');
  out.name = std::string(spec.substr(0, colon));
  if (colon == std::string_view::npos) return out;
  std::string rest(spec.substr(colon + 1));
  std::stringstream ss(rest);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto eqpos = item.find('=');
    if (eqpos == std::string::npos) throw std::invalid_argument(out.name + ": expected key=value, got '" + item + "'");
    out.kv[item.substr(0, eqpos)] = item.substr(eqpos + 1);
  }
  return out;
}

std::vector<std::vector<Rational>> parse_metric(const std::string& text, std::uint32_t l) {
  if (text == "example") {
    if (l != 3) throw std::invalid_argument("emd: the example metric needs l=3");
    return example_metric();
  }
  std::vector<std::vector<Rational>> rho(l, std::vector<Rational>(l, Rational(0)));
  if (text == "line") {
    for (std::uint32_t i = 0; i < l; ++i)
      for (std::uint32_t j = 0; j < l; ++j) rho[i][j] = i > j ? i - j : j - i;
    return rho;
  }
  // Upper triangle, row-major, ';'-separated.
  std::stringstream ss(text);
  std::string item;
  std::vector<Rational> vals;
  while (std::getline(ss, item, ';')) vals.push_back(parse_rational(item));
  if (vals.size() != static_cast<std::size_t>(l) * (l - 1) / 2)
    throw std::invalid_argument("emd: metric needs l(l-1)/2 entries");
  std::size_t k = 0;
  for (std::uint32_t i = 0; i < l; ++i)
    for (std::uint32_t j = i + 1; j < l; ++j) rho[i][j] = rho[j][i] = vals[k++];
  return rho;
}

}  // namespace

std::unique_ptr<HypothesisFamily> make_family(std::string_view spec) {
  SpecArgs s = split_spec(spec);
  std::unique_ptr<HypothesisFamily> f;
  if (s.name == "halfspace") {
    f = std::make_unique<Halfspace>(s.take_uint("l", 2));
  } else if (s.name == "threshold") {
    f = std::make_unique<Threshold>();
  } else if (s.name == "ptf") {
    std::uint32_t l = s.take_uint("l", 2);
    f = std::make_unique<PolynomialThreshold>(l, s.take_uint("D", 2));
  } else if (s.name == "tree") {
    std::uint32_t l = s.take_uint("l", 2), q = s.take_uint("q", 1);
    auto topo = s.take("topology");
    if (!topo) throw std::invalid_argument("tree: missing 'topology'");
    std::optional<std::uint32_t> depth;
    if (s.kv.contains("depth")) depth = s.take_uint("depth", std::nullopt);
    f = std::make_unique<PolyTree>(l, q, *topo, depth);
  } else if (s.name == "sigmoid") {
    auto text = s.take("widths");
    if (!text) throw std::invalid_argument("sigmoid: missing 'widths'");
    std::vector<std::uint32_t> widths;
    std::stringstream ss(*text);
    std::string item;
    while (std::getline(ss, item, '-')) widths.push_back(static_cast<std::uint32_t>(std::stoul(item)));
    f = std::make_unique<SigmoidNetwork>(widths);
  } else {
    throw std::invalid_argument("unknown family '" + s.name + "'");
  }
  s.finish();
  return f;
}

std::unique_ptr<NeighborhoodSystem> make_neighborhood(std::string_view spec, std::uint32_t default_dim) {
  SpecArgs s = split_spec(spec);
  std::unique_ptr<NeighborhoodSystem> n;
  if (s.name == "lp") {
    std::uint32_t l = s.take_uint("l", default_dim);
    std::optional<Rational> p;
    std::string ptext = s.take("p").value_or("2");
    if (ptext != "inf") p = parse_rational(ptext);
    RadiusSpec radius;
    std::string rtext = s.take("r").value_or("1");
    if (rtext.rfind("relu:x", 0) == 0) {
      radius.relu_coordinate = static_cast<std::uint32_t>(std::stoul(rtext.substr(6)));
    } else {
      radius.constant = parse_rational(rtext);
    }
    n = std::make_unique<LpBall>(l, p, radius);
  } else if (s.name == "kl") {
    std::uint32_t l = s.take_uint("l", default_dim);
    n = std::make_unique<KlBall>(l, s.take_rational("r", Rational(1)));
  } else if (s.name == "gkl") {
    n = std::make_unique<GaussianKlBall>(s.take_rational("r", Rational(1)));
  } else if (s.name == "emd") {
    std::uint32_t l = s.take_uint("l", default_dim);
    auto rho = parse_metric(s.take("metric").value_or(l == 3 ? "example" : "line"), l);
    n = std::make_unique<EmdBall>(std::move(rho), s.take_rational("r", Rational(1)));
  } else if (s.name == "interval") {
    n = std::make_unique<IntervalRadius>(s.take_rational("r", Rational(1)));
  } else if (s.name == "floor") {
    n = std::make_unique<FloorPartition>();
  } else if (s.name == "identity") {
    n = std::make_unique<Identity>(s.take_uint("l", default_dim));
  } else {
    throw std::invalid_argument("unknown neighborhood '" + s.name + "'");
  }
  s.finish();
  return n;
}

// ---- strategic labels ----

WitnessSearchConfig fast_search_config(std::uint32_t l) {
  WitnessSearchConfig cfg;
  cfg.grid = 1;
  cfg.restarts = 2;
  cfg.projection_steps = 30;
  cfg.local_steps = 60;
  for (std::uint32_t i = 0; i < l; ++i) cfg.hints.emplace_back(i, i);
  return cfg;
}

StrategicClassifier::StrategicClassifier(std::shared_ptr<const HypothesisFamily> family,
                                         std::shared_ptr<const NeighborhoodSystem> n, StrategicOptions opts)
    : family_(std::move(family)), n_(std::move(n)), opts_(std::move(opts)) {
  const std::uint32_t l = family_->input_dim();
  if (n_->dim() != l)
    throw std::invalid_argument("neighborhood dimension " + std::to_string(n_->dim()) +
                                " does not match the family's input dimension " + std::to_string(l));
  if (auto nf = n_->formula()) {
    spec_ = strategic_transform(family_->formula(), *nf, TransformOptions{l, false});
    WitnessSearchConfig cfg = opts_.search;
    if (cfg.hints.empty())
      for (std::uint32_t i = 0; i < l; ++i) cfg.hints.emplace_back(i, i);
    searcher_.emplace(spec_->result, cfg);
  }
}

StrategicLabel StrategicClassifier::label(std::span<const double> a, std::span<const double> xs) const {
  if (opts_.use_oracle) {
    auto v = family_->reach(*n_, a, xs, opts_.search.tolerance);
    if (v && v->status != Reach::Boundary)
      return {StrategicLabel::Source::Oracle, v->margin >= 0 && v->status != Reach::Unreachable, v->margin};
  }
  if (searcher_) {
    auto r = searcher_->search(xs, a);
    if (r.found()) return {StrategicLabel::Source::Search, true};
    if (r.refuted) return {StrategicLabel::Source::Refuted, false};
    return {StrategicLabel::Source::Inconclusive, false};
  }
  std::mt19937_64 rng(opts_.search.seed);
  for (const auto& yv : n_->sample(xs, opts_.sample_budget, rng))
    if (family_->evaluate(a, yv)) return {StrategicLabel::Source::Sampled, true};
  return {StrategicLabel::Source::Sampled, false};
}

}  // namespace stratdef
