#ifndef STRATDEF_LEARN_HPP
#define STRATDEF_LEARN_HPP

// Realizable data, approximate strategic ERM and sample-complexity sweeps.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "stratdef/families.hpp"

namespace stratdef {

// A hypothesis family with an optional neighborhood system. Without one the
// base class is learned (labels through the identity neighborhood).
class LearnProblem {
 public:
  LearnProblem(std::shared_ptr<const HypothesisFamily> family, std::shared_ptr<const NeighborhoodSystem> n,
               StrategicOptions opts = {}, double lo = -4, double hi = 4);

  const HypothesisFamily& family() const { return *family_; }
  const NeighborhoodSystem& neighborhood() const { return *n_; }
  bool strategic() const { return strategic_; }
  StrategicLabel label(std::span<const double> a, std::span<const double> x) const { return cls_->label(a, x); }
  std::vector<double> sample_input(std::mt19937_64& rng) const;
  std::string distribution() const;  // e.g. "box[-4,4]^2"
  double lo() const { return lo_; }
  double hi() const { return hi_; }

 private:
  std::shared_ptr<const HypothesisFamily> family_;
  std::shared_ptr<const NeighborhoodSystem> n_;
  bool strategic_;
  std::optional<StrategicClassifier> cls_;
  double lo_, hi_;
};

struct Example {
  std::vector<double> x;
  bool y = false;
};

struct DataSet {
  std::vector<Example> examples;
  std::vector<double> target;  // a*
  std::string family, neighborhood, distribution;
  std::uint64_t seed = 0;
  std::size_t resampled = 0;  // points redrawn because their label stayed undecided
  nlohmann::json to_json() const;
};

// m points from the problem's distribution labeled by h_{a*}^N. Undecided
// labels are redrawn up to `retries` times per point, then UndecidedError.
DataSet generate_realizable(const LearnProblem& p, const std::vector<double>& target, std::size_t m, std::uint64_t seed,
                            std::size_t retries = 20);
// Regenerates the set from its recorded seed and compares bit for bit.
bool replay_matches(const LearnProblem& p, const DataSet& d);

struct ErmOptions {
  std::size_t budget = 10000;  // candidate evaluations
  std::uint64_t seed = 0;
  // Fall back to a* when the search ends with more errors than a* has.
  bool inject_target = true;
  std::size_t restart_after = 300;  // non-improving steps before a fresh start
};

struct ErmResult {
  std::vector<double> params;
  std::size_t errors = 0;
  double empirical_error = 0;
  std::size_t search_errors = 0;  // best error reached by the search alone
  std::size_t evaluations = 0;
  bool budget_exhausted = false;  // budget spent with nonzero search error
  bool from_target = false;       // the returned parameters are a*
  std::size_t undecided = 0;      // labels counted as errors because undecided
};

// Multistart (1+1) evolution strategy over the parameters with a
// lexicographic objective (errors, summed margin violation). Deterministic
// for a given seed. Throws std::invalid_argument when budget == 0.
ErmResult erm_fit(const LearnProblem& p, const DataSet& data, const ErmOptions& opts = {});

// Errors of `params` against labels of `target` on n fresh points.
struct HeldOut {
  double error = 0;
  std::size_t size = 0;
  double hoeffding = 0;  // 95% half-width
};
HeldOut holdout_error(const LearnProblem& p, const std::vector<double>& params, const std::vector<double>& target,
                      std::size_t n, std::uint64_t seed);

struct SweepOptions {
  std::vector<double> eps{0.2, 0.1, 0.05};
  double delta = 0.1;
  std::size_t trials = 20;
  std::uint64_t seed = 0;
  std::size_t m_min = 2, m_max = 1024;
  double grid_ratio = 1.25;
  ErmOptions erm;
  unsigned workers = 1;
  std::optional<std::vector<double>> target;  // sampled from the family when absent
};

struct SweepRow {
  double eps = 0;
  std::size_t m_hat = 0;  // 0 when no grid m qualifies
  double success = 0;     // fraction of trials with held-out error <= eps at m_hat
};

struct SweepReport {
  std::vector<double> target;
  std::vector<std::size_t> grid;
  std::size_t holdout = 0;
  double hoeffding = 0;
  std::vector<std::vector<double>> errors;  // [grid index][trial] held-out error
  std::vector<double> zero_error_rate;      // per grid m: search reached zero empirical error
  std::vector<SweepRow> rows;
  double slope = 0;  // least-squares slope of m_hat * eps against log(1/eps)
  std::string csv() const;
  nlohmann::json to_json() const;
};

// For every grid m and trial: fit on the trial's first m points and measure
// held-out error on ceil(20 / min eps) fresh points. m_hat(eps) is the
// smallest grid m from which on at least (1 - delta) of the trials reach
// held-out error <= eps at every larger grid m.
SweepReport sample_complexity_sweep(const LearnProblem& p, const SweepOptions& opts);

}  // namespace stratdef

#endif  // STRATDEF_LEARN_HPP
