#include <algorithm>

#include "stratdef/linear.hpp"

namespace stratdef {

std::string_view to_string(LPResult::Status s) {
  switch (s) {
    case LPResult::Status::Optimal: return "optimal";
    case LPResult::Status::Infeasible: return "infeasible";
    case LPResult::Status::Unbounded: return "unbounded";
  }
  return "?";
}

namespace {

// Dense tableau over nonnegative columns. The last column holds the rhs;
// `obj` holds reduced costs and, in its last entry, minus the objective.
class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols) : t_(rows, std::vector<Rational>(cols + 1)), basis_(rows), cols_(cols) {}

  Rational& at(std::size_t i, std::size_t j) { return t_[i][j]; }
  Rational& rhs(std::size_t i) { return t_[i][cols_]; }
  std::size_t rows() const { return t_.size(); }
  std::size_t cols() const { return cols_; }
  std::vector<std::size_t>& basis() { return basis_; }

  void set_objective(const std::vector<Rational>& cost) {
    obj_.assign(cols_ + 1, Rational(0));
    for (std::size_t j = 0; j < cols_; ++j) obj_[j] = cost[j];
    for (std::size_t i = 0; i < rows(); ++i) {
      const Rational& cb = cost[basis_[i]];
      if (cb == 0) continue;
      for (std::size_t j = 0; j <= cols_; ++j) obj_[j] -= cb * t_[i][j];
    }
  }

  Rational objective_value() const { return -obj_[cols_]; }

  void pivot(std::size_t p, std::size_t q, std::vector<std::pair<std::size_t, std::size_t>>& log) {
    log.emplace_back(p, q);
    Rational piv = t_[p][q];
    for (auto& v : t_[p]) v /= piv;
    for (std::size_t i = 0; i < rows(); ++i) {
      if (i == p || t_[i][q] == 0) continue;
      Rational f = t_[i][q];
      for (std::size_t j = 0; j <= cols_; ++j)
        if (t_[p][j] != 0) t_[i][j] -= f * t_[p][j];
    }
    if (obj_[q] != 0) {
      Rational f = obj_[q];
      for (std::size_t j = 0; j <= cols_; ++j)
        if (t_[p][j] != 0) obj_[j] -= f * t_[p][j];
    }
    basis_[p] = q;
  }

  // Bland's rule. Returns false when unbounded.
  bool optimize(const std::vector<bool>& allowed, std::vector<std::pair<std::size_t, std::size_t>>& log) {
    for (;;) {
      std::optional<std::size_t> enter;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (allowed[j] && obj_[j] < 0) {
          enter = j;
          break;
        }
      }
      if (!enter) return true;
      std::optional<std::size_t> leave;
      Rational best;
      for (std::size_t i = 0; i < rows(); ++i) {
        if (t_[i][*enter] <= 0) continue;
        Rational ratio = t_[i][cols_] / t_[i][*enter];
        if (!leave || ratio < best || (ratio == best && basis_[i] < basis_[*leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (!leave) return false;
      pivot(*leave, *enter, log);
    }
  }

  void drop_row(std::size_t i) {
    t_.erase(t_.begin() + static_cast<std::ptrdiff_t>(i));
    basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(i));
  }

 private:
  std::vector<std::vector<Rational>> t_;
  std::vector<std::size_t> basis_;
  std::size_t cols_;
  std::vector<Rational> obj_;
};

}  // namespace

LPResult lp_solve(const LPInstance& lp) {
  const std::size_t n = lp.objective.size();
  const std::size_t m = lp.matrix.size();
  if (lp.relations.size() != m || lp.rhs.size() != m) throw std::invalid_argument("LP row count mismatch");
  if (lp.lower.size() != n) throw std::invalid_argument("LP bound count mismatch");
  for (const auto& row : lp.matrix)
    if (row.size() != n) throw std::invalid_argument("LP column count mismatch");
  for (auto r : lp.relations)
    if (r == Relation::Lt || r == Relation::Gt) throw std::invalid_argument("LP rows must be <=, = or >=");

  // Column layout: shifted/split structural columns, then slacks, then
  // artificials.
  struct Col {
    std::size_t var;
    int sign;
  };
  std::vector<Col> structural;
  for (std::size_t j = 0; j < n; ++j) {
    structural.push_back({j, 1});
    if (!lp.lower[j]) structural.push_back({j, -1});
  }
  std::vector<std::vector<Rational>> a(m);
  std::vector<Rational> b(m);
  std::vector<Relation> rel = lp.relations;
  for (std::size_t i = 0; i < m; ++i) {
    b[i] = lp.rhs[i];
    for (const auto& c : structural) a[i].push_back(c.sign * lp.matrix[i][c.var]);
    for (std::size_t j = 0; j < n; ++j)
      if (lp.lower[j]) b[i] -= lp.matrix[i][j] * *lp.lower[j];
    if (b[i] < 0) {
      for (auto& v : a[i]) v = -v;
      b[i] = -b[i];
      rel[i] = flip(rel[i]);
    }
  }
  std::size_t ns = structural.size();
  std::size_t slacks = static_cast<std::size_t>(std::count_if(rel.begin(), rel.end(), [](Relation r) { return r != Relation::Eq; }));
  std::size_t arts = static_cast<std::size_t>(std::count_if(rel.begin(), rel.end(), [](Relation r) { return r != Relation::Le; }));
  std::size_t total = ns + slacks + arts;

  Tableau tab(m, total);
  std::size_t next_slack = ns, next_art = ns + slacks;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < ns; ++j) tab.at(i, j) = a[i][j];
    tab.rhs(i) = b[i];
    if (rel[i] == Relation::Le) {
      tab.at(i, next_slack) = 1;
      tab.basis()[i] = next_slack++;
    } else {
      if (rel[i] == Relation::Ge) tab.at(i, next_slack++) = -1;
      tab.at(i, next_art) = 1;
      tab.basis()[i] = next_art++;
    }
  }

  LPResult result;
  std::vector<bool> allowed(total, true);
  if (arts > 0) {
    std::vector<Rational> phase1(total, Rational(0));
    for (std::size_t j = ns + slacks; j < total; ++j) phase1[j] = 1;
    tab.set_objective(phase1);
    tab.optimize(allowed, result.pivots);
    if (tab.objective_value() > 0) {
      result.status = LPResult::Status::Infeasible;
      return result;
    }
    // Drive zero-level artificials out of the basis; rows without a usable
    // pivot are redundant.
    for (std::size_t i = 0; i < tab.rows();) {
      if (tab.basis()[i] < ns + slacks) {
        ++i;
        continue;
      }
      std::optional<std::size_t> q;
      for (std::size_t j = 0; j < ns + slacks; ++j) {
        if (tab.at(i, j) != 0) {
          q = j;
          break;
        }
      }
      if (q) {
        tab.pivot(i, *q, result.pivots);
        ++i;
      } else {
        tab.drop_row(i);
      }
    }
    for (std::size_t j = ns + slacks; j < total; ++j) allowed[j] = false;
  }

  std::vector<Rational> cost(total, Rational(0));
  for (std::size_t k = 0; k < ns; ++k) {
    Rational c = structural[k].sign * lp.objective[structural[k].var];
    cost[k] = lp.maximize ? Rational(-c) : c;
  }
  tab.set_objective(cost);
  if (!tab.optimize(allowed, result.pivots)) {
    result.status = LPResult::Status::Unbounded;
    return result;
  }

  std::vector<Rational> colval(total, Rational(0));
  for (std::size_t i = 0; i < tab.rows(); ++i) colval[tab.basis()[i]] = tab.rhs(i);
  result.point.assign(n, Rational(0));
  for (std::size_t j = 0; j < n; ++j)
    if (lp.lower[j]) result.point[j] = *lp.lower[j];
  for (std::size_t k = 0; k < ns; ++k) result.point[structural[k].var] += structural[k].sign * colval[k];
  result.value = 0;
  for (std::size_t j = 0; j < n; ++j) result.value += lp.objective[j] * result.point[j];
  result.status = LPResult::Status::Optimal;
  return result;
}

std::optional<std::vector<Rational>> feasible_point(const LinearSystem& input) {
  LinearSystem sys = input;
  sys.normalize();
  if (sys.infeasible) return std::nullopt;
  const std::size_t n = sys.variables.size();
  bool strict = std::any_of(sys.constraints.begin(), sys.constraints.end(),
                            [](const LinearConstraint& c) { return c.rel == Relation::Lt; });
  LPInstance lp;
  std::size_t cols = n + (strict ? 1 : 0);
  lp.objective.assign(cols, Rational(0));
  lp.lower.assign(cols, std::nullopt);
  if (strict) {
    lp.objective[n] = 1;
    lp.maximize = true;
    lp.lower[n] = Rational(0);
  }
  for (const auto& c : sys.constraints) {
    std::vector<Rational> row = c.coeffs;
    if (strict) row.push_back(c.rel == Relation::Lt ? Rational(1) : Rational(0));
    lp.matrix.push_back(std::move(row));
    lp.relations.push_back(c.rel == Relation::Eq ? Relation::Eq : Relation::Le);
    lp.rhs.push_back(c.rhs);
  }
  if (strict) {
    std::vector<Rational> cap(cols, Rational(0));
    cap[n] = 1;
    lp.matrix.push_back(std::move(cap));
    lp.relations.push_back(Relation::Le);
    lp.rhs.push_back(Rational(1));
  }
  if (lp.matrix.empty()) return std::vector<Rational>(n, Rational(0));
  LPResult r = lp_solve(lp);
  if (r.status != LPResult::Status::Optimal) return std::nullopt;
  if (strict && r.value <= 0) return std::nullopt;
  r.point.resize(n);
  return r.point;
}

nlohmann::json to_json(const LPResult& r) {
  nlohmann::json point = nlohmann::json::array();
  for (const auto& v : r.point) point.push_back(to_string(v));
  nlohmann::json j{{"status", std::string(to_string(r.status))}, {"pivots", r.pivots.size()}};
  if (r.status == LPResult::Status::Optimal) {
    j["value"] = to_string(r.value);
    j["point"] = point;
  }
  return j;
}

}  // namespace stratdef
