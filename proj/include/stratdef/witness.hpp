#ifndef STRATDEF_WITNESS_HPP
#define STRATDEF_WITNESS_HPP

// Witness search for existential formulas  exists W theta(X, A, W).
//
// The body is put in disjunctive normal form. Each clause that is linear in
// W (with rational data) is decided exactly by linear programming. Other
// clauses go through a numeric search: equalities that determine one
// witness are solved directly, the remaining witnesses are seeded from
// hints, the box center, a grid and random points, then refined by
// most-violated-constraint projection and Nelder-Mead on the max violation.
//
// Found results are sound (the witness satisfies the body under the float
// tolerance, and exactly when `certified_exact` is set). NotFound is
// inconclusive unless `refuted` is set.

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "stratdef/eval.hpp"
#include "stratdef/formula.hpp"

namespace stratdef {

struct WitnessSearchConfig {
  double box_lo = -16;  // search box for every witness; must be finite
  double box_hi = 16;
  int grid = 3;                    // grid points per searched dimension
  std::size_t max_grid_points = 243;
  int restarts = 4;                // random seeds per clause
  int projection_steps = 40;
  int local_steps = 120;           // Nelder-Mead iterations per seed
  std::uint64_t seed = 0;
  // (witness index, input coordinate): seed witness w at x[coordinate].
  std::vector<std::pair<std::uint32_t, std::uint32_t>> hints;
  bool exact_lp = true;        // decide linear clauses exactly
  bool exact_recheck = true;   // certify numeric witnesses when no exp/sqrt occurs
  bool require_exact = false;  // accept only exactly certified witnesses
  std::size_t max_clauses = 4096;
  double tolerance = kBoundaryTolerance;
};

struct WitnessResult {
  enum class Status { Found, NotFound } status = Status::NotFound;
  std::vector<double> witness;                        // indexed by W index
  std::optional<std::vector<Rational>> exact_witness;  // from the LP path
  bool certified_exact = false;
  bool refuted = false;  // every clause proven infeasible
  std::string note;

  bool found() const { return status == Status::Found; }
};

class WitnessSearcher {
 public:
  // Converts to graph form when needed. Throws std::invalid_argument for
  // General formulas, free variables outside X/A, or an infinite box.
  explicit WitnessSearcher(const Formula& f, WitnessSearchConfig cfg = {});
  ~WitnessSearcher();
  WitnessSearcher(WitnessSearcher&&) noexcept;
  WitnessSearcher& operator=(WitnessSearcher&&) noexcept;

  WitnessResult search(std::span<const double> x, std::span<const double> a) const;
  WitnessResult search(const std::vector<Rational>& x, const std::vector<Rational>& a) const;

  const Formula& formula() const;  // graph form actually searched
  std::size_t clause_count() const;
  const WitnessSearchConfig& config() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

WitnessResult witness_search(const Formula& f, std::span<const double> x, std::span<const double> a,
                             const WitnessSearchConfig& cfg = {});

}  // namespace stratdef

#endif  // STRATDEF_WITNESS_HPP
