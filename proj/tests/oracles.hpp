#ifndef STRATDEF_TESTS_ORACLES_HPP
#define STRATDEF_TESTS_ORACLES_HPP

// Brute-force oracles shared by the unit tests and the acceptance binary.
// None of these call into the library's solvers.

#include <algorithm>
#include <optional>
#include <random>
#include <vector>

#include "stratdef/numeric.hpp"

namespace stratdef::oracle {

// Solves the square system M v = b by exact Gaussian elimination; nullopt
// when singular.
inline std::optional<std::vector<Rational>> solve_square(std::vector<std::vector<Rational>> m, std::vector<Rational> b) {
  const std::size_t n = m.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && m[piv][col] == 0) ++piv;
    if (piv == n) return std::nullopt;
    std::swap(m[piv], m[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || m[r][col] == 0) continue;
      Rational f = m[r][col] / m[col][col];
      for (std::size_t k = col; k < n; ++k) m[r][k] -= f * m[col][k];
      b[r] -= f * b[col];
    }
  }
  std::vector<Rational> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = b[i] / m[i][i];
  return v;
}

// Minimum transport cost by enumerating the vertices of the transport
// polytope: every basic solution on 2l-1 of the l^2 cells (the last column
// constraint is implied by equal masses).
inline Rational transport_vertex_min(const std::vector<Rational>& x, const std::vector<Rational>& y,
                                     const std::vector<std::vector<Rational>>& rho) {
  const std::size_t l = x.size(), cells = l * l, basis = 2 * l - 1;
  std::vector<std::vector<Rational>> rows;
  std::vector<Rational> rhs;
  for (std::size_t i = 0; i < l; ++i) {
    std::vector<Rational> r(cells, Rational(0));
    for (std::size_t j = 0; j < l; ++j) r[i * l + j] = 1;
    rows.push_back(r), rhs.push_back(x[i]);
  }
  for (std::size_t j = 0; j + 1 < l; ++j) {
    std::vector<Rational> r(cells, Rational(0));
    for (std::size_t i = 0; i < l; ++i) r[i * l + j] = 1;
    rows.push_back(r), rhs.push_back(y[j]);
  }
  std::optional<Rational> best;
  std::vector<bool> pick(cells, false);
  std::fill(pick.begin(), pick.begin() + basis, true);
  do {
    std::vector<std::size_t> cols;
    for (std::size_t k = 0; k < cells; ++k)
      if (pick[k]) cols.push_back(k);
    std::vector<std::vector<Rational>> m(basis, std::vector<Rational>(basis));
    for (std::size_t r = 0; r < basis; ++r)
      for (std::size_t k = 0; k < basis; ++k) m[r][k] = rows[r][cols[k]];
    auto v = solve_square(m, rhs);
    if (!v || std::any_of(v->begin(), v->end(), [](const Rational& q) { return q < 0; })) continue;
    Rational cost = 0;
    for (std::size_t k = 0; k < basis; ++k) cost += (*v)[k] * rho[cols[k] / l][cols[k] % l];
    if (!best || cost < *best) best = cost;
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return *best;
}

// Random point of the simplex with small-denominator rational coordinates.
inline std::vector<Rational> rational_simplex_point(std::mt19937_64& rng, std::size_t l, int denominator = 12) {
  std::uniform_int_distribution<int> cut(0, denominator);
  std::vector<int> cuts{0, denominator};
  for (std::size_t i = 0; i + 1 < l; ++i) cuts.push_back(cut(rng));
  std::sort(cuts.begin(), cuts.end());
  std::vector<Rational> p;
  for (std::size_t i = 0; i < l; ++i) {
    Rational q(cuts[i + 1] - cuts[i], denominator);
    q.canonicalize();
    p.push_back(q);
  }
  return p;
}

}  // namespace stratdef::oracle

#endif  // STRATDEF_TESTS_ORACLES_HPP
