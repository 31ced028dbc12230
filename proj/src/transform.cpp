#include "stratdef/transform.hpp"

#include <algorithm>
#include <stdexcept>

namespace stratdef {

namespace {

void require_blocks(const Formula& f, std::initializer_list<Block> allowed, const char* what) {
  for (const auto& v : free_variables(f)) {
    if (std::find(allowed.begin(), allowed.end(), v.block) == allowed.end())
      throw std::invalid_argument(std::string(what) + " has an unexpected free variable " + to_string(v));
  }
}

std::vector<Formula> conjuncts(const Formula& f) {
  if (f.kind() == Formula::Kind::And) return {f.children().begin(), f.children().end()};
  return {f};
}

Formula shift_witnesses(const Formula& f, std::uint32_t offset) {
  std::map<std::uint32_t, std::uint32_t> m;
  for (std::uint32_t w = 0; w < block_dims(f).w; ++w) m[w] = w + offset;
  return rename_witnesses(f, m);
}

}  // namespace

StrategicClassSpec strategic_transform(const Formula& hypothesis, const Formula& neighborhood,
                                       const TransformOptions& opts) {
  require_blocks(hypothesis, {Block::X, Block::A}, "hypothesis formula");
  require_blocks(neighborhood, {Block::X, Block::Y}, "neighborhood formula");

  Fragment fh = classify_fragment(hypothesis);
  Fragment fn = classify_fragment(neighborhood);
  bool general = fh == Fragment::General || fn == Fragment::General;
  if (general && !opts.allow_general)
    throw std::invalid_argument("general-fragment input rejected (enable evaluation-only mode to accept it)");

  BlockDims dh = block_dims(hypothesis);
  BlockDims dn = block_dims(neighborhood);
  std::uint32_t l = 0;
  if (opts.input_dim) {
    l = *opts.input_dim;
    if (dh.x > l || dn.y > l || dn.x > l)
      throw std::invalid_argument("Y-dimension mismatch: formulas use more than " + std::to_string(l) + " coordinates");
  } else {
    if (dh.x != dn.y)
      throw std::invalid_argument("Y-dimension mismatch: hypothesis has " + std::to_string(dh.x) +
                                  " inputs, neighborhood targets " + std::to_string(dn.y));
    l = dh.x;
  }

  StrategicClassSpec spec{hypothesis, neighborhood, hypothesis, 0, {}, Fragment::Existential, true, {}, {}, {}, {}};
  spec.input_dim = l;
  spec.quantitative = !general;

  // Global fresh counter: y block first, then the neighborhood's witnesses,
  // then the hypothesis' witnesses.
  std::map<VarRef, Term> to_y_h, to_y_n;
  for (std::uint32_t i = 0; i < l; ++i) {
    spec.y_witnesses.push_back(i);
    to_y_h.emplace(VarRef{Block::X, i}, Term::var(Block::W, i));
    to_y_n.emplace(VarRef{Block::Y, i}, Term::var(Block::W, i));
  }
  Formula n2 = substitute(shift_witnesses(neighborhood, l), to_y_n);
  Formula h2 = substitute(shift_witnesses(hypothesis, l + dn.w), to_y_h);

  if (general) {
    spec.result = Formula::exists(spec.y_witnesses, n2 && h2);
    spec.fragment = Fragment::General;
    return spec;
  }

  auto [wn, bn] = strip_exists(n2);
  auto [wh, bh] = strip_exists(h2);
  std::vector<std::uint32_t> bound = spec.y_witnesses;
  bound.insert(bound.end(), wn.begin(), wn.end());
  bound.insert(bound.end(), wh.begin(), wh.end());
  std::vector<Formula> parts = conjuncts(bn);
  for (auto& c : conjuncts(bh)) parts.push_back(std::move(c));
  spec.result = Formula::exists(std::move(bound), Formula::conjunction(std::move(parts)));
  spec.fragment = classify_fragment(spec.result);

  BlockDims declared_h{l, dh.a, 0, 0};
  BlockDims declared_n{l, 0, l, 0};
  spec.profile_h = complexity(to_graph_form(hypothesis).formula, declared_h);
  spec.profile_n = complexity(to_graph_form(neighborhood).formula, declared_n);
  spec.graph = to_graph_form(spec.result);
  spec.profile_out = complexity(spec.graph->formula, BlockDims{l, dh.a, 0, 0});
  return spec;
}

ComplexityReport complexity_report(const StrategicClassSpec& spec) {
  ComplexityReport r;
  r.quantitative = spec.quantitative;
  r.l = spec.input_dim;
  r.k = block_dims(spec.hypothesis).a;
  if (!spec.quantitative) {
    r.sample_bound = "none: general-fragment input (evaluation only)";
    r.vc_bound = "none: general-fragment input (evaluation only)";
    return r;
  }
  const auto& ph = *spec.profile_h;
  const auto& pn = *spec.profile_n;
  const auto& po = *spec.profile_out;
  r.f_h = ph.format, r.d_h = ph.degree;
  r.f_n = pn.format, r.d_n = pn.degree;
  r.f_out = po.format, r.d_out = po.degree;
  r.k = ph.param_dim;
  r.poly_atoms = ph.poly_atoms + pn.poly_atoms;
  r.max_poly_degree = std::max(ph.max_poly_degree, pn.max_poly_degree);
  r.polynomial_quantifier_free = classify_fragment(spec.hypothesis) == Fragment::QuantifierFree &&
                                 classify_fragment(spec.neighborhood) == Fragment::QuantifierFree &&
                                 !contains_exp(spec.hypothesis) && !contains_exp(spec.neighborhood);
  std::string k = std::to_string(r.k), l = std::to_string(r.l);
  if (r.polynomial_quantifier_free) {
    std::string d = std::to_string(r.poly_atoms * r.max_poly_degree);
    r.sample_bound = "m_ERM(eps, delta) = O((" + k + " log(1/eps) + " + k + "^2 * " + l + " * log(" + d +
                     ") + log(1/delta)) / eps); O-constant unspecified";
    r.vc_bound = "VC = O(" + k + "^2 * " + l + " * log(" + d + ")); O-constant unspecified";
  } else {
    std::string f = std::to_string(std::max(r.f_h, r.f_n));
    std::string d = std::to_string(std::max(r.d_h, r.d_n));
    r.sample_bound = "m_ERM(eps, delta) = O((" + k + " log(1/eps) + gamma(" + f + ") log(" + d +
                     ") + log(1/delta)) / eps); gamma and O-constant unspecified";
    r.vc_bound = "VC = O_F(log(" + d + ")) with F = " + f + "; constant unspecified";
  }
  return r;
}

nlohmann::json to_json(const ComplexityReport& r) {
  return nlohmann::json{{"F_H", r.f_h},
                        {"D_H", r.d_h},
                        {"F_N", r.f_n},
                        {"D_N", r.d_n},
                        {"F_out", r.f_out},
                        {"D_out", r.d_out},
                        {"k", r.k},
                        {"l", r.l},
                        {"poly_atoms", r.poly_atoms},
                        {"max_poly_degree", r.max_poly_degree},
                        {"polynomial_quantifier_free", r.polynomial_quantifier_free},
                        {"quantitative", r.quantitative},
                        {"sample_bound", r.sample_bound},
                        {"vc_bound", r.vc_bound}};
}

nlohmann::json to_json(const StrategicClassSpec& s) {
  nlohmann::json j{{"hypothesis", print(s.hypothesis)},
                   {"neighborhood", print(s.neighborhood)},
                   {"result", print(s.result)},
                   {"fragment", std::string(to_string(s.fragment))},
                   {"input_dim", s.input_dim},
                   {"quantitative", s.quantitative}};
  if (s.graph) j["graph_form"] = print(s.graph->formula);
  if (s.profile_h) j["profile_h"] = to_json(*s.profile_h);
  if (s.profile_n) j["profile_n"] = to_json(*s.profile_n);
  if (s.profile_out) j["profile_out"] = to_json(*s.profile_out);
  j["report"] = to_json(complexity_report(s));
  return j;
}

}  // namespace stratdef
