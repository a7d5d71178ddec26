// Folner families F_n and F_{n,i,j} of a diagonal product: nested subset
// chains, exact cardinalities, enumeration, boundaries, Sofic-defect
// measurement, and growth-bound reports.
#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

#include "lab/delta_core.hpp"

namespace lab {

// (n, i, j): box size n, level i in [0, ell(n-1)], chain stage j in [1, N_i].
struct FolnerIndex {
  long n = 1;
  int i = 0;
  int j = 1;
  bool operator==(const FolnerIndex&) const = default;
};

struct GrowthReport {
  // smallest constants making the growth inequalities hold on the sweep:
  // ln(lamp-product part) <= C1 n l,  ln|F_{n,i,j}| <= C2 n l,
  // C3 kappa^{nu-1} l <= ln|F_{kappa^nu}| <= C4 kappa^nu l
  double C1 = 0, C2 = 0, C3 = 0, C4 = 0;
  bool sandwich_nonempty = false;  // whether any kappa-power was in range
  std::string to_text() const;
};

class FolnerAtlas {
 public:
  explicit FolnerAtlas(DeltaParams params);

  const DeltaParams& params() const { return params_; }
  // chain length N_i (N_0 = 1)
  int chain_length(int i) const;
  // |Lambda^{(i)}_j| for j in [0, N_i]
  long lambda_size(int i, int j) const;
  // Lambda^{(i)}_j for i >= 1, as element ids of Gamma_i (prefix of the
  // canonical word-length order of Gamma'_i)
  std::vector<int> lambda_set(int i, int j) const;

  bool valid(const FolnerIndex& idx) const;
  // chain order: (n,i,N_i) -> (n,i+1,1), (n, ell(n-1), N) -> (n+1, 0, 1)
  FolnerIndex successor(const FolnerIndex& idx) const;
  // F_n as a chain member: (n, ell(n-1), N_{ell(n-1)})
  FolnerIndex full_index(long n) const;

  // Exact cardinality by the product formula (no enumeration).
  mpz_class cardinality(const FolnerIndex& idx) const;
  bool member(const FolnerIndex& idx, const DeltaElement& x) const;
  // Materializes the set; throws std::length_error quoting the cardinality
  // when it exceeds the budget.
  std::vector<DeltaElement> enumerate(const FolnerIndex& idx,
                                      long budget = 2000000) const;
  // Elements x with x.s outside F for some generator s; equals
  // {x : t in {0, n-1}} exactly.
  std::vector<DeltaElement> boundary(const FolnerIndex& idx,
                                     long budget = 2000000) const;

  // Fraction of x in F whose labeled r-ball in the generator action graph
  // differs from the r-ball at the identity (exhaustive when the set fits
  // the budget; the exact cursor law min(2r, n)/n otherwise).
  mpq_class sofic_defect(const FolnerIndex& idx, int r,
                         long budget = 2000000) const;

  GrowthReport growth_bounds_report(long n_max) const;
  // CSV columns: n,i,j,|F|,ln|F|,ratio,boundary_ratio,sofic_defect_r1
  std::string growth_csv(long n_max) const;
  // Lower-bound witnesses (|F_n|, n/2) for the isoperimetric profile.
  std::vector<std::pair<mpz_class, mpq_class>> isoperimetric_estimate(
      long n_max) const;

 private:
  DeltaParams params_;
  std::vector<std::vector<long>> sizes_;       // per level i >= 1
  std::vector<std::vector<int>> bfs_orders_;   // per level i >= 1
};

// natural log of a positive big integer
double ln_mpz(const mpz_class& v);

}  // namespace lab
