#ifndef STRATDEF_EVAL_HPP
#define STRATDEF_EVAL_HPP

// Quantifier-free evaluation.
//
// The exact path evaluates over rational assignments with certified interval
// enclosures for exp and sqrt, refining precision until every comparison is
// decided. The float path uses doubles with a relative boundary tolerance.

#include <vector>

#include "stratdef/formula.hpp"

namespace stratdef {

template <class T>
struct BlockValues {
  std::vector<T> x, a, y, w;

  const T& at(VarRef v) const {
    const std::vector<T>* b = nullptr;
    switch (v.block) {
      case Block::X: b = &x; break;
      case Block::A: b = &a; break;
      case Block::Y: b = &y; break;
      case Block::W: b = &w; break;
    }
    if (v.index >= b->size()) throw std::out_of_range("assignment has no value for " + to_string(v));
    return (*b)[v.index];
  }
};

using Assignment = BlockValues<Rational>;
using FloatAssignment = BlockValues<double>;

FloatAssignment to_float(const Assignment& s);

// Certified enclosure of a term at the given precision.
Interval enclose(const Term& t, const Assignment& s, unsigned bits);

// Throws UndecidedError when a comparison stays undecided at the precision
// cap, std::invalid_argument for quantified input.
bool eval_qf(const Formula& f, const Assignment& s, const PrecisionPolicy& policy = default_precision());

inline constexpr double kBoundaryTolerance = 1e-9;

double eval_float(const Term& t, const FloatAssignment& s);

// <= holds when l - r <= tol * max(1, |l|, |r|); = holds when |l - r| is
// within the same slack; < and > are strict without slack.
bool eval_qf_float(const Formula& f, const FloatAssignment& s, double tol = kBoundaryTolerance);

// Signed distance of an atom from its boundary, relative to the same scale
// as the tolerance: negative means satisfied with room to spare (for
// equalities, |l - r|).
double atom_margin(const Atom& a, const FloatAssignment& s);

// Smallest |margin| over all atoms of a quantifier-free formula; used to
// skip near-boundary sample points.
double min_abs_margin(const Formula& f, const FloatAssignment& s);

}  // namespace stratdef

#endif  // STRATDEF_EVAL_HPP
