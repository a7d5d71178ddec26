// Diagonal-product elements in canonical form (cursor, base lamp map,
// derived lamp maps), generator actions, the group law, range, and the word
// metric: exact BFS oracle plus explicit upper bounds.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lab/group_kernel.hpp"

namespace lab {

// Parameters of a diagonal product: spacing sequence k_0 = 0 < k_1 < ... for
// the finitely many levels with finite spacing, and a marked group per
// positive level.  Level 0 always carries Gamma_0 = A x B.  An instance with
// no positive levels is the lamplighter over A x B.
struct DeltaParams {
  int kappa = 3;
  std::vector<long> k;            // k[0] = 0; strictly increasing
  MarkedGamma gamma0;             // A x B with trivial derived subgroup
  std::vector<MarkedGamma> gammas;  // gammas[m-1] backs level m

  DeltaParams() = default;
  // Validates k_0 = 0, k_{m+1} >= 2 k_m, and that every level's markings
  // have the same orders as gamma0's.
  DeltaParams(int kappa_, std::vector<long> k_, MarkedGamma gamma0_,
              std::vector<MarkedGamma> gammas_);

  int levels() const { return static_cast<int>(k.size()) - 1; }
  const MarkedGamma& gamma(int m) const { return m == 0 ? gamma0 : gammas[m - 1]; }
  // max{ m <= levels : k_m <= n }
  int ell(long n) const;
  int q() const { return gamma0.gamma.order; }
  // Word-metric diameter l_m of Gamma_m.
  int l(int m) const { return gamma(m).diameter_l; }

  static DeltaParams lamplighter(int a_order = 2, int b_order = 3);
};

// Canonical data of a diagonal-product element: two elements are equal iff
// their canonical data agree.
struct DeltaElement {
  long t = 0;
  std::map<long, int> f0;                  // site -> nonidentity id in gamma0
  std::vector<std::map<long, int>> fprime; // per level m >= 1: site -> id in
                                           // gamma_prime of gamma(m)
  bool operator==(const DeltaElement& o) const = default;
  auto operator<=>(const DeltaElement& o) const = default;
};

struct Generator {
  enum Kind { cursor, a_type, b_type } kind = cursor;
  int shift = 0;  // +1 / -1 for cursor
  int power = 0;  // exponent of a or b for lamp kinds
};

DeltaElement identity(const DeltaParams& p);
// All generators with their inverses: cursor +-1, nontrivial powers of a
// (lamp at the cursor, every level), nontrivial powers of b.
std::vector<Generator> generator_set(const DeltaParams& p);
// The group element of a generator (for the true group law).
DeltaElement generator_element(const DeltaParams& p, const Generator& s);

// The defined right action of a generator: cursor generators shift t; lamp
// generators multiply f0(t) and leave every derived map unchanged.
DeltaElement apply_generator(const DeltaParams& p, const DeltaElement& x,
                             const Generator& s);

// True group law: reconstruct the full level maps, multiply pointwise with
// cursor shift, re-extract canonical data.
DeltaElement multiply(const DeltaParams& p, const DeltaElement& x,
                      const DeltaElement& y);
DeltaElement inverse(const DeltaParams& p, const DeltaElement& x);

// Full level-m map of x (sites with nonidentity value in gamma(m)).
std::map<long, int> level_map(const DeltaParams& p, const DeltaElement& x, int m);

struct Interval {
  long lo = 0, hi = 0;
  long diam() const { return hi - lo; }
  long card() const { return hi - lo + 1; }
};

// Smallest interval containing 0, t, supp(f0), and for every positive level
// both x and x - k_m for each site x of supp(f'_m).
Interval range_interval(const DeltaParams& p, const DeltaElement& x);

// E_m: k_m * sum over width-floor(k_m/2) windows meeting the range of the
// window maxima of (|f_m(site)|_Gamma_m - 1)_+.
long essential_contribution(const DeltaParams& p, const DeltaElement& x, int m);

// 500 * sum_{m <= ell(range)} 9 (|range interval| + E_m); an upper bound for
// the word length (the per-level range enters through its cardinality, 0 for
// a trivial level).
long word_length_upper(const DeltaParams& p, const DeltaElement& x);

// Exact word length by BFS over the Cayley graph restricted to elements
// whose range stays within x's range interval padded by `pad`.  Empty result
// = not found within `limit` steps (truncation, not failure).
std::optional<long> word_length_exact(const DeltaParams& p, const DeltaElement& x,
                                      long limit, long pad = 1);
std::optional<long> distance_exact(const DeltaParams& p, const DeltaElement& x,
                                   const DeltaElement& y, long limit,
                                   long pad = 1);

enum class DistanceMode { interval, level };

// mode interval: requires equal derived maps and f0 differences confined to
// an interval containing both cursors; returns 3 * diam of the hull of the
// cursors and differing sites.  mode level: requires a common range inside
// [0, D]; returns sum_{m <= i} 9 (D + l_m (2D + 2 k_m)) + |t_x - t_y| where
// i is the top level where the derived maps differ.
long distance_upper(const DeltaParams& p, const DeltaElement& x,
                    const DeltaElement& y, DistanceMode mode);

// Structured-text serialization: cursor line, then one line per level with
// (site, element-id) pairs.
std::string element_to_text(const DeltaParams& p, const DeltaElement& x);
DeltaElement element_from_text(const DeltaParams& p, const std::string& text);

}  // namespace lab
