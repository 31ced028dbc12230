#ifndef STRATDEF_TRANSFORM_HPP
#define STRATDEF_TRANSFORM_HPP

// Compilation of the strategic class  psi(x, a) = exists y (N(x, y) and H(y, a)).
//
// Conventions: the hypothesis formula is written free in (X, A), with X
// standing for the point being classified; the neighborhood formula is
// written free in (X, Y). The transform renames the hypothesis' X block and
// the neighborhood's Y block onto the same fresh witnesses.

#include <optional>
#include <string>

#include <json.hpp>

#include "stratdef/formula.hpp"

namespace stratdef {

struct StrategicClassSpec {
  Formula hypothesis;
  Formula neighborhood;
  Formula result;                       // free in (X, A)
  std::uint32_t input_dim = 0;          // l
  std::vector<std::uint32_t> y_witnesses;
  Fragment fragment = Fragment::Existential;
  // False for General-fragment inputs: usable for evaluation only.
  bool quantitative = true;
  std::optional<ComplexityProfile> profile_h;
  std::optional<ComplexityProfile> profile_n;
  std::optional<ComplexityProfile> profile_out;
  std::optional<GraphForm> graph;       // graph form of `result`
};

struct TransformOptions {
  // Input dimension; when absent the hypothesis' X size must equal the
  // neighborhood's Y size.
  std::optional<std::uint32_t> input_dim;
  // Accept General-fragment inputs (result flagged non-quantitative).
  bool allow_general = false;
};

// Throws std::invalid_argument on dimension mismatch, misplaced blocks, free
// witnesses, or General inputs when not allowed.
StrategicClassSpec strategic_transform(const Formula& hypothesis, const Formula& neighborhood,
                                       const TransformOptions& opts = {});

struct ComplexityReport {
  std::uint32_t f_h = 0, d_h = 0, f_n = 0, d_n = 0, f_out = 0, d_out = 0;
  std::uint32_t k = 0, l = 0;
  std::uint32_t poly_atoms = 0;       // s over both inputs
  std::uint32_t max_poly_degree = 0;  // D' over both inputs
  bool polynomial_quantifier_free = false;
  std::string sample_bound;
  std::string vc_bound;
  bool quantitative = true;
};

ComplexityReport complexity_report(const StrategicClassSpec& spec);

nlohmann::json to_json(const ComplexityReport& r);
nlohmann::json to_json(const StrategicClassSpec& s);

}  // namespace stratdef

#endif  // STRATDEF_TRANSFORM_HPP
