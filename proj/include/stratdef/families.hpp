#ifndef STRATDEF_FAMILIES_HPP
#define STRATDEF_FAMILIES_HPP

// Hypothesis families and neighborhood systems: evaluators, formula
// emitters, closed-form reach oracles, and a name registry
// ("ptf:l=2,D=3", "lp:p=2,r=1/2", ...).
//
// Hypothesis formulas are free in x (inputs) and a (parameters).
// Neighborhood formulas are free in x (the point) and y (its neighbors).

#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "stratdef/formula.hpp"
#include "stratdef/transform.hpp"
#include "stratdef/witness.hpp"

namespace stratdef {

// ---- neighborhood systems ----

class NeighborhoodSystem {
 public:
  virtual ~NeighborhoodSystem() = default;
  virtual std::string name() const = 0;
  virtual std::uint32_t dim() const = 0;
  virtual bool contains(std::span<const double> x, std::span<const double> y) const = 0;
  // Certified membership; nullopt when undecided at the precision cap.
  virtual std::optional<bool> contains_exact(const std::vector<Rational>& x, const std::vector<Rational>& y) const = 0;
  // Nullopt for systems that are not definable (evaluator only).
  virtual std::optional<Formula> formula() const = 0;
  bool definable() const { return formula().has_value(); }
  virtual bool in_domain(std::span<const double> x) const;
  // Points of N_x; the first one is x itself.
  virtual std::vector<std::vector<double>> sample(std::span<const double> x, std::size_t budget,
                                                  std::mt19937_64& rng) const = 0;
  // Input distribution used by the generators (uniform box by default,
  // uniform simplex for distribution-valued systems).
  virtual std::vector<double> sample_input(std::mt19937_64& rng, double lo, double hi) const;
};

// Radius of an lp ball: a constant, or max(x_j, 0).
struct RadiusSpec {
  Rational constant{1};
  std::optional<std::uint32_t> relu_coordinate;

  double at(std::span<const double> x) const;
  Rational at(const std::vector<Rational>& x) const;
  std::string to_string() const;
};

class LpBall final : public NeighborhoodSystem {
 public:
  // p = nullopt means p = infinity.
  LpBall(std::uint32_t l, std::optional<Rational> p, RadiusSpec radius);
  std::string name() const override;
  std::uint32_t dim() const override { return l_; }
  bool contains(std::span<const double> x, std::span<const double> y) const override;
  std::optional<bool> contains_exact(const std::vector<Rational>& x, const std::vector<Rational>& y) const override;
  std::optional<Formula> formula() const override;
  std::vector<std::vector<double>> sample(std::span<const double> x, std::size_t budget,
                                          std::mt19937_64& rng) const override;

  const std::optional<Rational>& p() const { return p_; }
  const RadiusSpec& radius() const { return radius_; }
  // sup { w . d : ||d||_p <= 1 }  (dual norm; max |w_i| for p <= 1).
  double dual_norm(std::span<const double> w) const;
  double distance(std::span<const double> x, std::span<const double> y) const;

 private:
  std::uint32_t l_;
  std::optional<Rational> p_;
  RadiusSpec radius_;
};

class KlBall final : public NeighborhoodSystem {
 public:
  KlBall(std::uint32_t l, Rational radius);
  std::string name() const override;
  std::uint32_t dim() const override { return l_; }
  bool contains(std::span<const double> x, std::span<const double> y) const override;
  std::optional<bool> contains_exact(const std::vector<Rational>& x, const std::vector<Rational>& y) const override;
  std::optional<Formula> formula() const override;
  bool in_domain(std::span<const double> x) const override;
  std::vector<std::vector<double>> sample(std::span<const double> x, std::size_t budget,
                                          std::mt19937_64& rng) const override;
  std::vector<double> sample_input(std::mt19937_64& rng, double lo, double hi) const override;
  // Natural-log divergence; throws std::invalid_argument off the simplex.
  double divergence(std::span<const double> x, std::span<const double> y) const;

 private:
  std::uint32_t l_;
  Rational radius_;
};

// Gaussian location family N(mu, 1): KL = (mu - mu')^2 / 2.
class GaussianKlBall final : public NeighborhoodSystem {
 public:
  explicit GaussianKlBall(Rational radius);
  std::string name() const override;
  std::uint32_t dim() const override { return 1; }
  bool contains(std::span<const double> x, std::span<const double> y) const override;
  std::optional<bool> contains_exact(const std::vector<Rational>& x, const std::vector<Rational>& y) const override;
  std::optional<Formula> formula() const override;
  std::vector<std::vector<double>> sample(std::span<const double> x, std::size_t budget,
                                          std::mt19937_64& rng) const override;
  const Rational& radius() const { return radius_; }

 private:
  Rational radius_;
};

class EmdBall final : public NeighborhoodSystem {
 public:
  // rho: symmetric, nonnegative, zero diagonal.
  EmdBall(std::vector<std::vector<Rational>> rho, Rational radius);
  std::string name() const override;
  std::uint32_t dim() const override { return static_cast<std::uint32_t>(rho_.size()); }
  bool contains(std::span<const double> x, std::span<const double> y) const override;
  std::optional<bool> contains_exact(const std::vector<Rational>& x, const std::vector<Rational>& y) const override;
  std::optional<Formula> formula() const override;
  bool in_domain(std::span<const double> x) const override;
  std::vector<std::vector<double>> sample(std::span<const double> x, std::size_t budget,
                                          std::mt19937_64& rng) const override;
  std::vector<double> sample_input(std::mt19937_64& rng, double lo, double hi) const override;

  // Exact transport cost with its optimal coupling (row-major).
  std::pair<Rational, std::vector<Rational>> distance(const std::vector<Rational>& x,
                                                       const std::vector<Rational>& y) const;
  const std::vector<std::vector<Rational>>& metric() const { return rho_; }

 private:
  std::vector<std::vector<Rational>> rho_;
  Rational radius_;
};

// The metric from the worked three-point example: rho(1,2)=1, rho(1,3)=2, rho(2,3)=1.
std::vector<std::vector<Rational>> example_metric();

class IntervalRadius final : public NeighborhoodSystem {
 public:
  explicit IntervalRadius(Rational r);
  std::string name() const override;
  std::uint32_t dim() const override { return 1; }
  bool contains(std::span<const double> x, std::span<const double> y) const override;
  std::optional<bool> contains_exact(const std::vector<Rational>& x, const std::vector<Rational>& y) const override;
  std::optional<Formula> formula() const override;
  std::vector<std::vector<double>> sample(std::span<const double> x, std::size_t budget,
                                          std::mt19937_64& rng) const override;
  const Rational& radius() const { return r_; }

 private:
  Rational r_;
};

// N_x = [floor x, floor x + 1). Not definable; evaluator only.
class FloorPartition final : public NeighborhoodSystem {
 public:
  std::string name() const override { return "floor"; }
  std::uint32_t dim() const override { return 1; }
  bool contains(std::span<const double> x, std::span<const double> y) const override;
  std::optional<bool> contains_exact(const std::vector<Rational>& x, const std::vector<Rational>& y) const override;
  std::optional<Formula> formula() const override { return std::nullopt; }
  std::vector<std::vector<double>> sample(std::span<const double> x, std::size_t budget,
                                          std::mt19937_64& rng) const override;
};

class Identity final : public NeighborhoodSystem {
 public:
  explicit Identity(std::uint32_t l) : l_(l) {}
  std::string name() const override;
  std::uint32_t dim() const override { return l_; }
  bool contains(std::span<const double> x, std::span<const double> y) const override;
  std::optional<bool> contains_exact(const std::vector<Rational>& x, const std::vector<Rational>& y) const override;
  std::optional<Formula> formula() const override;
  std::vector<std::vector<double>> sample(std::span<const double> x, std::size_t budget,
                                          std::mt19937_64& rng) const override;

 private:
  std::uint32_t l_;
};

// ---- hypothesis families ----

enum class Reach { Reachable, Unreachable, Boundary };

struct ReachVerdict {
  Reach status;
  double margin;  // normalized; >= 0 means reachable
};

class HypothesisFamily {
 public:
  virtual ~HypothesisFamily() = default;
  virtual std::string name() const = 0;
  virtual std::uint32_t input_dim() const = 0;
  virtual std::uint32_t param_dim() const = 0;
  virtual bool evaluate(std::span<const double> a, std::span<const double> x) const = 0;
  // Certified evaluation (eval_qf on the emitted formula unless overridden).
  virtual std::optional<bool> evaluate_exact(const std::vector<Rational>& a, const std::vector<Rational>& x) const;
  virtual Formula formula() const = 0;
  // Closed-form strategic reach, when known for this neighborhood.
  virtual std::optional<ReachVerdict> reach(const NeighborhoodSystem& n, std::span<const double> a,
                                            std::span<const double> x, double tol = kBoundaryTolerance) const;
  // Standard normal coordinates by default.
  virtual std::vector<double> sample_params(std::mt19937_64& rng) const;
};

// a0 x0 + ... + a_{l-1} x_{l-1} >= a_l
class Halfspace final : public HypothesisFamily {
 public:
  explicit Halfspace(std::uint32_t l);
  std::string name() const override;
  std::uint32_t input_dim() const override { return l_; }
  std::uint32_t param_dim() const override { return l_ + 1; }
  bool evaluate(std::span<const double> a, std::span<const double> x) const override;
  Formula formula() const override;
  std::optional<ReachVerdict> reach(const NeighborhoodSystem& n, std::span<const double> a,
                                    std::span<const double> x, double tol = kBoundaryTolerance) const override;

 private:
  std::uint32_t l_;
};

// x0 >= a0
class Threshold final : public HypothesisFamily {
 public:
  std::string name() const override { return "threshold"; }
  std::uint32_t input_dim() const override { return 1; }
  std::uint32_t param_dim() const override { return 1; }
  bool evaluate(std::span<const double> a, std::span<const double> x) const override;
  Formula formula() const override;
  std::optional<ReachVerdict> reach(const NeighborhoodSystem& n, std::span<const double> a,
                                    std::span<const double> x, double tol = kBoundaryTolerance) const override;
};

// Dense monomials of total degree <= D in graded-lex order: by degree, then
// by exponent vectors in decreasing lexicographic order (x0 first).
std::vector<std::vector<std::uint32_t>> graded_lex_monomials(std::uint32_t l, std::uint32_t degree);

inline constexpr std::size_t kMaxParams = 100000;

// P_theta(x) > 0 with one coefficient per monomial.
class PolynomialThreshold final : public HypothesisFamily {
 public:
  PolynomialThreshold(std::uint32_t l, std::uint32_t degree);
  std::string name() const override;
  std::uint32_t input_dim() const override { return l_; }
  std::uint32_t param_dim() const override { return static_cast<std::uint32_t>(monomials_.size()); }
  bool evaluate(std::span<const double> a, std::span<const double> x) const override;
  Formula formula() const override;
  const std::vector<std::vector<std::uint32_t>>& monomials() const { return monomials_; }
  // The polynomial with coefficients a_{offset}, a_{offset+1}, ...
  Term polynomial(std::uint32_t offset) const;
  double value(std::span<const double> a, std::span<const double> x, std::size_t offset = 0) const;

 private:
  std::uint32_t l_, degree_;
  std::vector<std::vector<std::uint32_t>> monomials_;
};

// Binary tree with a degree-q polynomial test P_v(x) >= 0 at each internal
// node (true: right branch). Topology in preorder: 'N' internal, '0'/'1'
// leaves; e.g. "N0N10".
class PolyTree final : public HypothesisFamily {
 public:
  PolyTree(std::uint32_t l, std::uint32_t q, std::string topology, std::optional<std::uint32_t> max_depth = {});
  std::string name() const override;
  std::uint32_t input_dim() const override { return l_; }
  std::uint32_t param_dim() const override;
  bool evaluate(std::span<const double> a, std::span<const double> x) const override;
  Formula formula() const override;
  std::uint32_t depth() const { return depth_; }
  std::uint32_t internal_nodes() const { return internal_; }

 private:
  struct Node {
    int label = -1;  // leaf label, or -1
    int left = -1, right = -1;
    std::uint32_t index = 0;  // internal node index (parameter block)
  };
  int build(std::size_t& pos);
  std::uint32_t l_, q_;
  std::string topology_;
  PolynomialThreshold poly_;
  std::vector<Node> nodes_;
  std::uint32_t internal_ = 0, depth_ = 0;
};

// Logistic network with widths d0 = l, ..., dL = 1. Parameters per layer:
// A (row-major) then b. Output test: pre-activation r_1^(L) >= 0.
class SigmoidNetwork final : public HypothesisFamily {
 public:
  explicit SigmoidNetwork(std::vector<std::uint32_t> widths);
  std::string name() const override;
  std::uint32_t input_dim() const override { return widths_.front(); }
  std::uint32_t param_dim() const override { return params_; }
  bool evaluate(std::span<const double> a, std::span<const double> x) const override;
  std::optional<bool> evaluate_exact(const std::vector<Rational>& a, const std::vector<Rational>& x) const override;
  Formula formula() const override;
  // Forward pass; returns all (r, q, z) per neuron in witness order.
  std::vector<double> witnesses(std::span<const double> a, std::span<const double> x) const;
  double output(std::span<const double> a, std::span<const double> x) const;

 private:
  std::vector<std::uint32_t> widths_;
  std::uint32_t params_ = 0;
};

// Indicators of finite sets of rationals; hypothesis i is 1 exactly on sets[i].
class FiniteSupportClass {
 public:
  // With require_disjoint, overlapping sets are rejected.
  explicit FiniteSupportClass(std::vector<std::vector<Rational>> sets, bool require_disjoint = true);
  std::size_t size() const { return sets_.size(); }
  const std::vector<Rational>& set(std::size_t i) const { return sets_[i]; }
  bool evaluate(std::size_t i, const Rational& x) const;
  bool pairwise_disjoint() const { return disjoint_; }

 private:
  std::vector<std::vector<Rational>> sets_;  // each sorted, deduplicated
  bool disjoint_ = true;
};

// {i + x_S : i in S} with x_S = sum_{j in S} 10^-j, one set per S subset of [n]
// (bit i-1 of the index selects i).
std::vector<std::vector<Rational>> decimal_tag_sets(std::uint32_t n);

// ---- registry ----

std::unique_ptr<HypothesisFamily> make_family(std::string_view spec);
// `default_dim` fills in l when the spec omits it.
std::unique_ptr<NeighborhoodSystem> make_neighborhood(std::string_view spec, std::uint32_t default_dim);

// ---- strategic labels ----

struct StrategicLabel {
  enum class Source { Oracle, Search, Refuted, Inconclusive, Sampled } source;
  bool value;
  double margin = 0;  // oracle margin when available
};

struct StrategicOptions {
  bool use_oracle = true;
  WitnessSearchConfig search;
  // Sample budget for non-definable systems without an oracle.
  std::size_t sample_budget = 256;
};

// h^N(x) = 1 iff some y in N_x has h(y) = 1.
class StrategicClassifier {
 public:
  StrategicClassifier(std::shared_ptr<const HypothesisFamily> family, std::shared_ptr<const NeighborhoodSystem> n,
                      StrategicOptions opts = {});
  StrategicLabel label(std::span<const double> a, std::span<const double> x) const;
  const HypothesisFamily& family() const { return *family_; }
  const NeighborhoodSystem& neighborhood() const { return *n_; }
  const StrategicClassSpec* spec() const { return spec_ ? &*spec_ : nullptr; }

 private:
  std::shared_ptr<const HypothesisFamily> family_;
  std::shared_ptr<const NeighborhoodSystem> n_;
  StrategicOptions opts_;
  std::optional<StrategicClassSpec> spec_;
  std::optional<WitnessSearcher> searcher_;
};

// Labeling config tuned for throughput on small searches.
WitnessSearchConfig fast_search_config(std::uint32_t l);

}  // namespace stratdef

#endif  // STRATDEF_FAMILIES_HPP
