#ifndef STRATDEF_CAPACITY_HPP
#define STRATDEF_CAPACITY_HPP

// Traces, shattering, growth estimates, sign patterns and the explicit
// counting bounds behind the ERM sample-complexity estimates.

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "stratdef/families.hpp"
#include "stratdef/polynomial.hpp"

namespace stratdef {

// Packed labels: point j is bit j % 64 of word j / 64.
using Labels = std::vector<std::uint64_t>;

Labels make_labels(std::size_t cols);
inline bool get_label(const Labels& l, std::size_t j) { return l[j / 64] >> (j % 64) & 1; }
inline void set_label(Labels& l, std::size_t j, bool v) {
  if (v) {
    l[j / 64] |= std::uint64_t{1} << (j % 64);
  } else {
    l[j / 64] &= ~(std::uint64_t{1} << (j % 64));
  }
}
std::string labels_to_string(const Labels& l, std::size_t cols);  // "0110", point 0 first

struct LabelMatrix {
  std::size_t cols = 0;
  std::vector<Labels> rows;
  std::vector<std::string> provenance;  // "exact" or "sampled(<seed>)"
  std::vector<bool> flagged;            // some label undecided; excluded from traces
};

// Label oracle: nullopt when the label cannot be decided.
using LabelFn = std::function<std::optional<bool>(std::size_t hypothesis, std::size_t point)>;

LabelMatrix build_label_matrix(std::size_t rows, std::size_t cols, const LabelFn& label,
                               const std::string& provenance = "exact", unsigned workers = 1);

struct TraceSet {
  std::size_t cols = 0;
  std::vector<Labels> distinct;  // sorted
  std::size_t flagged_rows = 0;
  std::size_t count() const { return distinct.size(); }
};

TraceSet trace_set(const LabelMatrix& m);
// Trace restricted to a subset of the columns.
TraceSet trace_set(const LabelMatrix& m, const std::vector<std::size_t>& columns);

struct ShatterReport {
  bool shattered = false;
  std::size_t distinct = 0;
  std::vector<Labels> missing;  // up to `missing_cap` absent labelings
  std::size_t flagged_rows = 0;
};

ShatterReport is_shattered(const LabelMatrix& m, std::size_t missing_cap = 64);
ShatterReport is_shattered(const TraceSet& t, std::size_t missing_cap = 64);

struct VcSearchResult {
  std::size_t size = 0;
  std::vector<std::size_t> witness;  // indices into the pool
  std::size_t subsets_checked = 0;
  bool budget_exhausted = false;
};

// Largest shattered subset of the pool found within `budget` subset checks:
// greedy extension first, then exhaustive search size by size.
VcSearchResult vc_lower_bound(const LabelMatrix& pool, std::size_t budget = 100000);
// Same search, with a realizability oracle for (subset, labeling) pairs.
using RealizableFn = std::function<bool(const std::vector<std::size_t>& subset, const Labels& labeling)>;
VcSearchResult vc_lower_bound(std::size_t pool_size, const RealizableFn& realizable, std::size_t max_size,
                              std::size_t budget = 100000);

// ---- growth ----

struct GrowthConfig {
  std::vector<std::size_t> ms{8, 16, 32, 64};
  std::size_t point_sets = 4;        // trials: independent point sets per m
  std::size_t params_per_set = 2000;
  std::uint64_t seed = 0;
  double lo = -4, hi = 4;            // input box for the point sampler
  // 1-D threshold families: enumerate critical parameters instead of sampling.
  bool gap_sweep = false;
  unsigned workers = 1;
};

struct GrowthPoint {
  std::size_t m = 0;
  std::size_t max_traces = 0;
  std::size_t flagged = 0;  // labels left undecided
};

struct GrowthReport {
  std::vector<GrowthPoint> points;
  double slope = 0;  // least-squares slope of log max_traces against log m
};

// Sampled lower estimate of the growth function of H (n == nullptr) or H^N.
// Point set i draws its first m points from a stream seeded by (seed, i), so
// estimates are monotone in m and in point_sets.
GrowthReport growth_estimate(std::shared_ptr<const HypothesisFamily> family,
                             std::shared_ptr<const NeighborhoodSystem> n, const GrowthConfig& cfg,
                             const StrategicOptions& opts = {});

double loglog_slope(const std::vector<GrowthPoint>& pts);

// ---- counting bounds ----

struct SauerBound {
  Integer exact;      // sum_{i<=d} C(m, i)
  double upper_form;  // (e m / d)^d, 1 when d = 0
};
SauerBound sauer_bound(std::uint64_t m, std::uint64_t d);

// Smallest m >= 1 with C (2m)^k exp(-eps m / 2) <= delta, decided with
// certified enclosures.
std::uint64_t erm_threshold(const Rational& c, std::uint32_t k, const Rational& eps, const Rational& delta);
// Certified truth of C (2m)^k exp(-eps m / 2) <= delta at one m.
bool erm_condition(const Rational& c, std::uint32_t k, const Rational& eps, const Rational& delta, std::uint64_t m);

// Base-2 bounds: x <= a + b log x implies x <= 2a + 4b log(4b); growth C m^k
// implies VC <= 2 log C + 4k log(4k); d <= k log(A d / k) implies d <= 4k log A.
double log_self_bound(double a, double b);
double vc_from_growth_bound(double c, double k);
double vc_consistency_bound(double a, double k);
// Largest x >= 1 with x <= a + b log2 x (bisection on the last crossing).
double log_self_extremal(double a, double b);
// Largest integer d >= 1 with d <= k log2(A d / k), or 0 when none.
std::uint64_t vc_consistency_extremal(double a, double k);

// ---- sign patterns ----

using UPoly = std::vector<Rational>;  // coefficient of x^i at index i

// Exact number of sign vectors of the polynomials along the real line.
std::size_t sign_pattern_count_univariate(const std::vector<UPoly>& ps,
                                          std::vector<std::vector<int>>* patterns = nullptr);
// Distinct sign vectors at sampled rational points of the box (lower bound).
std::size_t sign_pattern_count_sampled(const std::vector<Polynomial>& ps, const std::vector<VarRef>& vars,
                                       std::size_t samples, std::uint64_t seed, double lo = -4, double hi = 4);

}  // namespace stratdef

#endif  // STRATDEF_CAPACITY_HPP
