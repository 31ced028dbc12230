#ifndef STRATDEF_CONSTRUCTIONS_HPP
#define STRATDEF_CONSTRUCTIONS_HPP

// Exact generators for the VC blow-up constructions. Every builder returns
// the instance together with a list of checks run in exact (or certified)
// arithmetic; `to_json` emits the certificate.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "stratdef/families.hpp"
#include "stratdef/numeric.hpp"

namespace stratdef {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

nlohmann::json to_json(const CheckResult& c);
bool all_pass(const std::vector<CheckResult>& checks);

// Subsets S of [n] are bitmasks: bit i-1 set iff i in S.
std::string subset_string(std::uint64_t mask, std::uint32_t n);  // "{1,3}"

// ---- interval neighborhoods with a fixed radius pair ----

struct FixedBlowup {
  std::uint32_t n = 0;
  Rational r, rp;
  Rational shift{0};                     // added to every point
  std::vector<Rational> anchors;         // p_i = shift + 10 r i
  std::vector<std::vector<Rational>> q;  // q[S][i-1] = q_i^S
  FiniteSupportClass hypotheses{std::vector<std::vector<Rational>>{}};  // F_S = {q_i^S}, by S
  std::vector<CheckResult> checks;

  // 1 iff some point of F_S lies within s of x (closed interval neighborhood).
  bool strategic_label(std::uint64_t s_mask, const Rational& x, const Rational& s) const;
  nlohmann::json to_json() const;
};

// Requires r >= r' > 0, 1 <= n <= 16. Radii checked: r', (r + r')/2, r.
FixedBlowup build_fixed_blowup(std::uint32_t n, const Rational& r, const Rational& rp,
                               const Rational& shift = Rational(0));
// Strategic shattering of the anchors at radius s (exhaustive trace).
CheckResult check_shattering(const FixedBlowup& b, const Rational& s);

// ---- all radii at once ----

struct AllRadiiBlock {
  std::uint32_t n = 0;
  int m = 0;  // radii r = 2^-m, r' = 2^-m-1
  Rational offset;  // a_t
  Rational length;  // L = 10 * 2^-m (n + 1)
};

struct AllRadii {
  std::uint32_t t = 0;
  int window = 0;  // m ranges over [-window, window]
  std::vector<AllRadiiBlock> blocks;
  std::vector<FixedBlowup> instances;
  std::vector<CheckResult> checks;
  nlohmann::json to_json() const;
};

// First t pairs of the diagonal enumeration of {n >= 1} x {0, -1, 1, -2, 2, ...}
// with |m| <= ceil(log2 t).
std::vector<std::pair<std::uint32_t, int>> all_radii_pairs(std::uint32_t t);
AllRadii build_all_radii(std::uint32_t t);

struct RadiusLocation {
  std::size_t block = 0;
  CheckResult certificate;
};
// Block with 2^-m-1 <= s <= 2^-m and at least n anchors (the smallest such
// n, then the larger m on a dyadic tie). Throws std::out_of_range naming the
// t that would cover (s, n) when no block does.
RadiusLocation locate_radius(const AllRadii& inst, const Rational& s, std::uint32_t n = 1);

// ---- floor-partition pathology ----

struct PartitionPathology {
  std::uint32_t n = 0;
  std::vector<Rational> alpha;                // per S
  FiniteSupportClass hypotheses{std::vector<std::vector<Rational>>{}};  // F_S per S
  std::vector<Rational> candidates;           // i + 1/2
  std::vector<CheckResult> checks;

  // F_S meets [floor x, floor x + 1).
  bool strategic_label(std::uint64_t s_mask, const Rational& x) const;
  nlohmann::json to_json() const;
};

PartitionPathology build_partition_pathology(std::uint32_t n);

// ---- fractional-part construction ----

struct OpenInterval {
  Rational lo, hi;
  bool contains(const Rational& v) const { return lo < v && v < hi; }
};

struct FracConstruction {
  std::uint32_t n = 0;
  Rational r;
  OpenInterval p, q;                     // (1/2 - r, 1/2 + r), (0, 1/2 - r)
  std::vector<std::uint64_t> b;          // b_1..b_n
  std::vector<OpenInterval> cells;       // I_A per A
  std::vector<std::uint64_t> m;          // m_A per A
  std::vector<std::vector<Interval>> frac;  // certified {sqrt2 m_A b_i}
  std::vector<Rational> candidates;      // b_i + 1/2
  std::vector<CheckResult> checks;
  nlohmann::json to_json() const;
};

struct FracOptions {
  std::uint64_t scan_cap = 1000000;
};

// Requires 0 < r < 1/2 and 1 <= n <= 6. Throws std::runtime_error when no
// m <= scan_cap lands in some I_A, UndecidedError when a membership stays
// undecided at the precision cap.
FracConstruction build_frac_construction(std::uint32_t n, const Rational& r, const FracOptions& opts = {});

// Certified enclosure of the fractional part of sqrt(2) * k, k >= 1.
Interval frac_sqrt2(const Integer& k);
// Certified membership of {sqrt(2) k} in an open interval with rational ends.
bool frac_sqrt2_in(const Integer& k, const OpenInterval& iv);

}  // namespace stratdef

#endif  // STRATDEF_CONSTRUCTIONS_HPP
