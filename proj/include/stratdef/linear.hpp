#ifndef STRATDEF_LINEAR_HPP
#define STRATDEF_LINEAR_HPP

// Exact linear algebra over the rationals: Fourier-Motzkin projection and a
// two-phase simplex with Bland's rule.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "stratdef/formula.hpp"

namespace stratdef {

class NonlinearError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// coeffs . vars  rel  rhs, with rel one of <, <=, = once normalized.
struct LinearConstraint {
  std::vector<Rational> coeffs;
  Relation rel = Relation::Le;
  Rational rhs{0};

  friend bool operator==(const LinearConstraint&, const LinearConstraint&) = default;
};

struct LinearSystem {
  std::vector<std::string> variables;
  std::vector<LinearConstraint> constraints;
  // Set when elimination derived a contradiction; constraints are then empty.
  bool infeasible = false;

  // Rewrites >= and > rows as <= and < by negation.
  void normalize();
  bool satisfied_by(const std::vector<Rational>& point) const;
};

// Reads a conjunction of linear comparison atoms. `order` fixes the
// variable columns (all free variables, sorted, when empty).
LinearSystem linear_system(const Formula& conjunction, std::vector<VarRef> order = {});

Formula to_formula(const LinearSystem& sys);

// Projects out the named variables. Equalities are eliminated by
// substitution first; inequalities by pairwise combination, where a
// combination is strict if either parent is. Constraints dominated by a
// single other constraint are dropped.
LinearSystem fm_eliminate(const LinearSystem& sys, const std::vector<std::string>& eliminate);

nlohmann::json to_json(const LinearSystem& sys);
LinearSystem linear_system_from_json(const nlohmann::json& j);

// ---- linear programming ----------------------------------------------------

struct LPInstance {
  std::vector<Rational> objective;               // minimized
  std::vector<std::vector<Rational>> matrix;     // rows
  std::vector<Relation> relations;               // <=, =, >= per row
  std::vector<Rational> rhs;
  std::vector<std::optional<Rational>> lower;    // per variable; nullopt = free
  bool maximize = false;
};

struct LPResult {
  enum class Status { Optimal, Infeasible, Unbounded } status = Status::Infeasible;
  Rational value{0};
  std::vector<Rational> point;
  std::vector<std::pair<std::size_t, std::size_t>> pivots;  // (row, column) sequence
};

std::string_view to_string(LPResult::Status s);

// Throws std::invalid_argument on dimension mismatch or strict relations.
LPResult lp_solve(const LPInstance& lp);

// Exact feasibility of a normalized system, strict rows included, by
// maximizing a common slack t in [0, 1] on the strict rows. Returns a
// feasible point when one exists.
std::optional<std::vector<Rational>> feasible_point(const LinearSystem& sys);

LPInstance lp_from_json(const nlohmann::json& j);
nlohmann::json to_json(const LPResult& r);

}  // namespace stratdef

#endif  // STRATDEF_LINEAR_HPP
