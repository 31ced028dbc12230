// stratdef command-line driver.
//
// Every subcommand emits one JSON artifact {"tool", "version", "config",
// "result"} (stdout unless --out) and optionally a CSV table. Artifacts are
// written to a temporary sibling and renamed into place.

#include <unistd.h>

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <thread>

#include "stratdef/capacity.hpp"
#include "stratdef/constructions.hpp"
#include "stratdef/learn.hpp"
#include "stratdef/linear.hpp"
#include "stratdef/transform.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace stratdef;

namespace {

constexpr int kOk = 0, kFailed = 1, kUsage = 2;

// Bad user input: unknown names, unreadable or malformed files.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::uint64_t seed = 0;
  unsigned precision_bits = 4096;
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
};

json globals_json(const Globals& g) {
  return {{"seed", g.seed}, {"precision_bits", g.precision_bits}, {"workers", g.workers}};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw UsageError("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_atomic(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    return;
  }
  fs::path target(path);
  // devices and pipes are written in place; renaming over them would replace the node
  if (fs::exists(target) && !fs::is_regular_file(target)) {
    std::ofstream out(target, std::ios::binary);
    if (!(out << content)) throw UsageError("cannot write '" + path + "'");
    return;
  }
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw UsageError("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw std::runtime_error("write to '" + tmp.string() + "' failed");
    }
  }
  fs::rename(tmp, target);
}

void emit(const std::string& out, const std::string& command, const json& config, const json& result) {
  json art;
  art["tool"] = "stratdef";
  art["version"] = STRATDEF_VERSION;
  art["command"] = command;
  art["config"] = config;
  art["result"] = result;
  std::string text = art.dump(2) + "\n";
  write_atomic(out.empty() ? "-" : out, text);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<Rational> rational_list(const std::string& s) {
  std::vector<Rational> out;
  for (const auto& t : split_list(s)) out.push_back(parse_rational(t));
  return out;
}

std::vector<double> double_list(const std::string& s) {
  std::vector<double> out;
  for (const auto& t : split_list(s)) {
    double d = 0;
    auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), d);
    if (ec != std::errc() || end != t.data() + t.size()) throw UsageError("'" + t + "' is not a number");
    out.push_back(d);
  }
  return out;
}

Rational parse_q(const std::string& s, const char* flag) {
  try {
    return parse_rational(s);
  } catch (const std::exception&) {
    throw UsageError(std::string(flag) + ": '" + s + "' is not a rational number");
  }
}

std::shared_ptr<const HypothesisFamily> family_arg(const std::string& spec) {
  try {
    return make_family(spec);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

std::shared_ptr<const NeighborhoodSystem> neighborhood_arg(const std::string& spec, std::uint32_t dim) {
  if (spec.empty() || spec == "none") return nullptr;
  try {
    return make_neighborhood(spec, dim);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

// A formula file when the path exists, else a registry spec.
Formula formula_arg(const std::string& arg, bool hypothesis, std::uint32_t dim) {
  if (fs::exists(arg)) {
    try {
      return parse_formula(read_file(arg));
    } catch (const ParseError& e) {
      throw UsageError("malformed formula in '" + arg + "': " + e.what());
    }
  }
  if (hypothesis) return family_arg(arg)->formula();
  auto n = neighborhood_arg(arg, dim);
  if (!n) throw UsageError("a neighborhood is required");
  auto f = n->formula();
  if (!f) throw UsageError("neighborhood '" + arg + "' has no first-order definition");
  return *f;
}

// ---- subcommands ----

struct TransformArgs {
  std::string hypothesis, neighborhood, out;
  std::uint32_t input_dim = 0;
  bool allow_general = false;
};

int run_transform(const Globals& g, const TransformArgs& a) {
  Formula h = formula_arg(a.hypothesis, true, 0);
  std::uint32_t dim = a.input_dim;
  if (!dim)
    for (const auto& v : free_variables(h))
      if (v.block == Block::X) dim = std::max(dim, v.index + 1);
  Formula n = formula_arg(a.neighborhood, false, dim);
  TransformOptions opts;
  if (a.input_dim) opts.input_dim = a.input_dim;
  opts.allow_general = a.allow_general;
  auto spec = [&] {
    try {
      return strategic_transform(h, n, opts);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }();
  json result = to_json(spec);
  result["complexity"] = to_json(complexity_report(spec));
  json cfg = {{"hypothesis", a.hypothesis}, {"neighborhood", a.neighborhood}, {"input_dim", a.input_dim},
              {"allow_general", a.allow_general}, {"global", globals_json(g)}};
  emit(a.out, "transform", cfg, result);
  return kOk;
}

struct FmArgs {
  std::string in, drop, out;
};

int run_fm(const Globals& g, const FmArgs& a) {
  json input = read_json(a.in);
  LinearSystem sys;
  try {
    sys = input.contains("formula") ? linear_system(parse_formula(input.at("formula").get<std::string>()))
                                    : linear_system_from_json(input);
  } catch (const std::exception& e) {
    throw UsageError("bad system in '" + a.in + "': " + e.what());
  }
  auto drop = split_list(a.drop);
  for (const auto& v : drop)
    if (std::find(sys.variables.begin(), sys.variables.end(), v) == sys.variables.end())
      throw UsageError("variable '" + v + "' does not occur in the system");
  auto out = fm_eliminate(sys, drop);
  json result;
  result["system"] = to_json(out);
  try {
    result["formula"] = print(to_formula(out));
  } catch (const std::exception&) {
    result["formula"] = nullptr;  // names outside the x/a/y/w convention
  }
  auto pt = feasible_point(out);
  result["feasible"] = pt.has_value();
  if (pt) {
    json p = json::array();
    for (const auto& v : *pt) p.push_back(to_string(v));
    result["point"] = p;
  }
  json cfg = {{"in", a.in}, {"input", input}, {"drop", drop}, {"global", globals_json(g)}};
  emit(a.out, "fm-elim", cfg, result);
  return kOk;
}

struct BlowupArgs {
  std::string construction, r, rp = "1/2", shift = "0", s, out;
  std::uint32_t n = 3, t = 0;
  std::uint64_t scan_cap = 1000000;
};

int run_blowup(const Globals& g, const BlowupArgs& a) {
  json cfg = {{"construction", a.construction}, {"n", a.n}, {"global", globals_json(g)}};
  json result;
  bool pass = false;
  try {
    if (a.construction == "fixed") {
      Rational r = parse_q(a.r.empty() ? "1" : a.r, "--r"), rp = parse_q(a.rp, "--rp"), shift = parse_q(a.shift, "--shift");
      cfg["r"] = to_string(r), cfg["rp"] = to_string(rp), cfg["shift"] = to_string(shift);
      auto b = build_fixed_blowup(a.n, r, rp, shift);
      result = b.to_json();
      pass = all_pass(b.checks);
    } else if (a.construction == "all-radii") {
      auto radii = rational_list(a.s);
      std::uint32_t t = a.t ? a.t : 6;
      cfg["s"] = a.s;
      cfg["t_requested"] = a.t;
      // grow t until every requested radius is covered with n anchors
      for (;;) {
        auto inst = build_all_radii(t);
        json located = json::array();
        bool grew = false, ok = all_pass(inst.checks);
        for (const auto& s : radii) {
          try {
            auto loc = locate_radius(inst, s, a.n);
            const auto& blk = inst.blocks[loc.block];
            located.push_back({{"s", to_string(s)}, {"block", loc.block}, {"n", blk.n}, {"m", blk.m},
                               {"certificate", to_json(loc.certificate)}});
            ok = ok && loc.certificate.pass;
          } catch (const std::out_of_range& e) {
            std::string msg = e.what();
            auto pos = msg.find("t >= ");
            if (pos == std::string::npos || a.t) throw UsageError(msg);
            t = static_cast<std::uint32_t>(std::stoul(msg.substr(pos + 5)));
            grew = true;
            break;
          }
        }
        if (grew) continue;
        result = inst.to_json();
        result["located"] = located;
        result["pass"] = ok;
        cfg["t"] = t;
        pass = ok;
        break;
      }
    } else if (a.construction == "partition") {
      auto p = build_partition_pathology(a.n);
      result = p.to_json();
      pass = all_pass(p.checks);
    } else if (a.construction == "frac") {
      Rational r = parse_q(a.r.empty() ? "1/4" : a.r, "--r");
      cfg["r"] = to_string(r);
      cfg["scan_cap"] = a.scan_cap;
      FracOptions fo;
      fo.scan_cap = a.scan_cap;
      auto f = build_frac_construction(a.n, r, fo);
      result = f.to_json();
      pass = all_pass(f.checks);
    } else {
      throw UsageError("unknown construction '" + a.construction + "'");
    }
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  emit(a.out, "verify-blowup", cfg, result);
  return pass ? kOk : kFailed;
}

LabelMatrix interval_traces(const std::vector<std::vector<Rational>>& sets, const std::vector<Rational>& pts,
                            const Rational& s, unsigned workers) {
  return build_label_matrix(sets.size(), pts.size(), [&](std::size_t h, std::size_t i) -> std::optional<bool> {
    for (const auto& z : sets[h])
      if (abs(z - pts[i]) <= s) return true;
    return false;
  }, "exact", workers);
}

struct ShatterArgs {
  std::string instance, s, out;
};

// Re-derives the traces of a certificate's witnesses on its candidate points.
int run_shatter(const Globals& g, const ShatterArgs& a) {
  json cert = read_json(a.instance);
  if (cert.contains("result")) cert = cert["result"];
  std::string kind = cert.value("construction", "");
  json cfg = {{"instance", a.instance}, {"construction", kind}, {"global", globals_json(g)}};
  auto rationals = [](const json& arr) {
    std::vector<Rational> v;
    for (const auto& e : arr) v.push_back(parse_rational(e.get<std::string>()));
    return v;
  };
  json result = json::array();
  bool all = true;
  auto record = [&](const std::string& what, const LabelMatrix& m) {
    auto rep = is_shattered(m);
    result.push_back({{"radius", what}, {"points", m.cols}, {"traces", rep.distinct}, {"shattered", rep.shattered},
                      {"missing", rep.missing.size()}, {"flagged_rows", rep.flagged_rows}});
    all = all && rep.shattered;
  };
  try {
    if (kind == "fixed" || kind == "partition") {
      const std::string pts_key = kind == "fixed" ? "anchors" : "candidates";
      auto pts = rationals(cert.at(pts_key));
      std::vector<std::vector<Rational>> sets;
      for (const auto& w : cert.at("witnesses")) sets.push_back(rationals(w.at("points")));
      std::vector<Rational> radii = rational_list(a.s);
      if (kind == "fixed" && radii.empty()) {
        Rational r = parse_rational(cert.at("r").get<std::string>()), rp = parse_rational(cert.at("rp").get<std::string>());
        radii = {rp, (r + rp) / 2, r};
      }
      if (kind == "fixed") {
        for (const auto& s : radii) record(to_string(s), interval_traces(sets, pts, s, g.workers));
      } else {
        auto m = build_label_matrix(sets.size(), pts.size(), [&](std::size_t h, std::size_t i) -> std::optional<bool> {
          Integer cell = floor(pts[i]);
          for (const auto& z : sets[h])
            if (floor(z) == cell) return true;
          return false;
        }, "exact", g.workers);
        record("floor", m);
      }
    } else if (kind == "all-radii") {
      // witness sets are not stored; rebuild and match the anchors block by block
      auto inst = build_all_radii(cert.at("t").get<std::uint32_t>());
      const auto& blocks = cert.at("blocks");
      if (blocks.size() != inst.blocks.size()) throw UsageError("all-radii: block count does not match t");
      for (std::size_t k = 0; k < blocks.size(); ++k)
        if (rationals(blocks[k].at("anchors")) != inst.instances[k].anchors)
          throw UsageError("all-radii: anchors of block " + std::to_string(k) + " differ from the rebuilt instance");
      std::vector<std::pair<std::size_t, Rational>> probes;
      if (cert.contains("located"))
        for (const auto& l : cert["located"])
          probes.emplace_back(l.at("block").get<std::size_t>(), parse_rational(l.at("s").get<std::string>()));
      for (const auto& s : rational_list(a.s)) probes.emplace_back(locate_radius(inst, s).block, s);
      if (probes.empty())
        for (std::size_t k = 0; k < inst.blocks.size(); ++k) probes.emplace_back(k, inst.instances[k].r);
      for (const auto& [k, s] : probes) {
        const auto& b = inst.instances[k];
        std::vector<std::vector<Rational>> sets(b.q.begin(), b.q.end());
        record("block " + std::to_string(k) + " s=" + to_string(s), interval_traces(sets, b.anchors, s, g.workers));
      }
    } else if (kind == "frac") {
      auto n = cert.at("n").get<std::uint32_t>();
      Rational r = parse_rational(cert.at("r").get<std::string>());
      OpenInterval p{Rational(1, 2) - r, Rational(1, 2) + r};
      auto b = cert.at("b").get<std::vector<std::uint64_t>>();
      std::vector<std::uint64_t> ms;
      for (const auto& w : cert.at("witnesses")) ms.push_back(w.at("m").get<std::uint64_t>());
      auto m = build_label_matrix(ms.size(), n, [&](std::size_t h, std::size_t i) -> std::optional<bool> {
        try {
          return frac_sqrt2_in(Integer(std::to_string(ms[h] * b[i])), p);
        } catch (const UndecidedError&) {
          return std::nullopt;
        }
      }, "exact", g.workers);
      record("P", m);
    } else {
      throw UsageError("shatter: unsupported certificate kind '" + kind + "'");
    }
  } catch (const json::exception& e) {
    throw UsageError(std::string("malformed certificate: ") + e.what());
  }
  emit(a.out, "shatter", cfg, {{"checks", result}, {"pass", all}});
  return all ? kOk : kFailed;
}

struct GrowthArgs {
  std::string family, neighborhood, ms = "8,16,32,64", csv, out;
  std::size_t trials = 4, params = 2000;
  double lo = -4, hi = 4;
  bool gap_sweep = false;
};

int run_growth(const Globals& g, const GrowthArgs& a) {
  auto fam = family_arg(a.family);
  auto nb = neighborhood_arg(a.neighborhood, fam->input_dim());
  GrowthConfig gc;
  gc.ms.clear();
  for (const auto& t : split_list(a.ms)) gc.ms.push_back(std::stoul(t));
  if (gc.ms.empty()) throw UsageError("--m needs at least one value");
  gc.point_sets = a.trials;
  gc.params_per_set = a.params;
  gc.seed = g.seed;
  gc.lo = a.lo, gc.hi = a.hi;
  gc.gap_sweep = a.gap_sweep;
  gc.workers = g.workers;
  StrategicOptions so;
  so.search = fast_search_config(fam->input_dim());
  so.search.seed = g.seed;
  GrowthReport rep;
  try {
    rep = growth_estimate(fam, nb, gc, so);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  json pts = json::array();
  std::ostringstream csv;
  csv << "m,max_traces,flagged\n";
  for (const auto& p : rep.points) {
    pts.push_back({{"m", p.m}, {"max_traces", p.max_traces}, {"flagged", p.flagged}});
    csv << p.m << ',' << p.max_traces << ',' << p.flagged << '\n';
  }
  json cfg = {{"family", fam->name()}, {"neighborhood", nb ? nb->name() : "none"}, {"m", gc.ms}, {"trials", a.trials},
              {"params", a.params}, {"lo", format_double(a.lo)}, {"hi", format_double(a.hi)},
              {"gap_sweep", a.gap_sweep}, {"global", globals_json(g)}};
  if (!a.csv.empty()) write_atomic(a.csv, csv.str());
  emit(a.out, "growth", cfg, {{"points", pts}, {"slope", format_double(rep.slope)}, {"estimate", "lower"}});
  return kOk;
}

struct LearnArgs {
  std::string family, neighborhood, eps = "0.2,0.1,0.05", target, csv, out;
  double delta = 0.1, grid_ratio = 1.25;
  std::size_t trials = 20, m_min = 2, m_max = 1024, budget = 10000;
  bool no_inject = false;
};

int run_learn(const Globals& g, const LearnArgs& a) {
  auto fam = family_arg(a.family);
  auto nb = neighborhood_arg(a.neighborhood, fam->input_dim());
  StrategicOptions so;
  so.search = fast_search_config(fam->input_dim());
  so.search.seed = g.seed;
  LearnProblem p(fam, nb, so);
  SweepOptions opts;
  opts.eps = double_list(a.eps);
  opts.delta = a.delta;
  opts.trials = a.trials;
  opts.seed = g.seed;
  opts.m_min = a.m_min, opts.m_max = a.m_max;
  opts.grid_ratio = a.grid_ratio;
  opts.erm.budget = a.budget;
  opts.erm.inject_target = !a.no_inject;
  opts.workers = g.workers;
  if (!a.target.empty()) opts.target = double_list(a.target);
  SweepReport rep;
  try {
    rep = sample_complexity_sweep(p, opts);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  json eps = json::array();
  for (double e : opts.eps) eps.push_back(format_double(e));
  json cfg = {{"family", fam->name()}, {"neighborhood", nb ? nb->name() : "none"}, {"distribution", p.distribution()},
              {"eps", eps}, {"delta", format_double(a.delta)}, {"trials", a.trials}, {"m_min", a.m_min},
              {"m_max", a.m_max}, {"grid_ratio", format_double(a.grid_ratio)}, {"budget", a.budget},
              {"inject_target", !a.no_inject}, {"target", a.target.empty() ? json("sampled") : json(a.target)},
              {"global", globals_json(g)}};
  if (!a.csv.empty()) write_atomic(a.csv, rep.csv());
  emit(a.out, "learn", cfg, rep.to_json());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stratdef: strategic classification toolkit"};
  app.set_version_flag("--version", std::string("stratdef ") + STRATDEF_VERSION);
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);
  Globals g;
  app.add_option("--seed", g.seed, "base seed for every sampler")->capture_default_str();
  app.add_option("--precision-bits", g.precision_bits, "precision cap for certified enclosures")
      ->check(CLI::Range(64u, 1u << 20))
      ->capture_default_str();
  app.add_option("--workers", g.workers, "worker threads")->check(CLI::PositiveNumber);

  TransformArgs ta;
  auto* tr = app.add_subcommand("transform", "compile the strategic class of a hypothesis and a neighborhood");
  tr->add_option("--hypothesis", ta.hypothesis, "formula file or family spec")->required();
  tr->add_option("--neighborhood", ta.neighborhood, "formula file or neighborhood spec")->required();
  tr->add_option("--input-dim", ta.input_dim, "input dimension l");
  tr->add_flag("--allow-general", ta.allow_general, "accept non-existential inputs");
  tr->add_option("--out", ta.out, "JSON artifact path");

  FmArgs fa;
  auto* fm = app.add_subcommand("fm-elim", "Fourier-Motzkin elimination");
  fm->add_option("--in", fa.in, "system JSON")->required();
  fm->add_option("--drop", fa.drop, "variables to eliminate, comma separated")->required();
  fm->add_option("--out", fa.out, "JSON artifact path");

  BlowupArgs ba;
  auto* vb = app.add_subcommand("verify-blowup", "build and certify a VC blow-up construction");
  vb->add_option("--construction", ba.construction)
      ->required()
      ->check(CLI::IsMember({"fixed", "all-radii", "partition", "frac"}));
  vb->add_option("--n", ba.n, "number of points")->capture_default_str();
  vb->add_option("--r", ba.r, "radius r (fixed: default 1, frac: default 1/4)");
  vb->add_option("--rp", ba.rp, "radius r'")->capture_default_str();
  vb->add_option("--shift", ba.shift, "translation of the fixed construction")->capture_default_str();
  vb->add_option("--t", ba.t, "all-radii: number of blocks (grown to cover --s when omitted)");
  vb->add_option("--s", ba.s, "all-radii: radii to locate, comma separated")->default_str("0.3,0.6,1.2");
  vb->add_option("--scan-cap", ba.scan_cap, "frac: largest m scanned")->capture_default_str();
  vb->add_option("--out", ba.out, "certificate path");
  ba.s = "0.3,0.6,1.2";

  ShatterArgs sa;
  auto* sh = app.add_subcommand("shatter", "re-check shattering from a certificate");
  sh->add_option("--instance", sa.instance, "certificate JSON")->required();
  sh->add_option("--s", sa.s, "radii to check, comma separated (fixed default: r', (r+r')/2, r)");
  sh->add_option("--out", sa.out, "JSON artifact path");

  GrowthArgs ga;
  auto* gr = app.add_subcommand("growth", "sampled growth-function lower estimate");
  gr->add_option("--family", ga.family)->required();
  gr->add_option("--neighborhood", ga.neighborhood, "neighborhood spec or none");
  gr->add_option("--m", ga.ms, "sample sizes, comma separated")->capture_default_str();
  gr->add_option("--trials", ga.trials, "independent point sets per m")->capture_default_str();
  gr->add_option("--params", ga.params, "sampled parameters per point set")->capture_default_str();
  gr->add_option("--lo", ga.lo)->capture_default_str();
  gr->add_option("--hi", ga.hi)->capture_default_str();
  gr->add_flag("--gap-sweep", ga.gap_sweep, "1-D families: enumerate critical parameters");
  gr->add_option("--csv", ga.csv, "CSV path (m,max_traces,flagged)");
  gr->add_option("--out", ga.out, "JSON artifact path");

  LearnArgs la;
  auto* le = app.add_subcommand("learn", "sample-complexity sweep with approximate ERM");
  le->add_option("--family", la.family)->required();
  le->add_option("--neighborhood", la.neighborhood, "neighborhood spec or none");
  le->add_option("--eps", la.eps, "comma separated")->capture_default_str();
  le->add_option("--delta", la.delta)->capture_default_str();
  le->add_option("--trials", la.trials)->capture_default_str();
  le->add_option("--m-min", la.m_min)->capture_default_str();
  le->add_option("--m-max", la.m_max)->capture_default_str();
  le->add_option("--grid-ratio", la.grid_ratio)->capture_default_str();
  le->add_option("--budget", la.budget, "ERM evaluations per fit")->capture_default_str();
  le->add_flag("--no-inject", la.no_inject, "do not fall back to the target parameters");
  le->add_option("--target", la.target, "target parameters, comma separated (sampled when absent)");
  le->add_option("--csv", la.csv, "CSV path (eps,m_hat,success,holdout,hoeffding)");
  le->add_option("--out", la.out, "JSON artifact path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  default_precision().cap = g.precision_bits;
  default_precision().initial = std::min(default_precision().initial, g.precision_bits);

  try {
    if (*tr) return run_transform(g, ta);
    if (*fm) return run_fm(g, fa);
    if (*vb) return run_blowup(g, ba);
    if (*sh) return run_shatter(g, sa);
    if (*gr) return run_growth(g, ga);
    if (*le) return run_learn(g, la);
  } catch (const UsageError& e) {
    std::cerr << "stratdef: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "stratdef: " << e.what() << '\n';
    return kFailed;
  }
  return kUsage;
}
