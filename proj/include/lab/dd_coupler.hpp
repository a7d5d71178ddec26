// Injection between the Folner sets of two diagonal products over the same
// kappa: target-index search along the nested chain, cursor maps u and chi,
// variable-base numberings on both sides, the spreading map, the carved
// target set, and the distance / enumeration / integrability audits.
#pragma once

#include <gmpxx.h>

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lab/delta_core.hpp"
#include "lab/folner_atlas.hpp"
#include "lab/mixed_radix.hpp"
#include "lab/profile_forge.hpp"
#include "lab/z_coupler.hpp"

namespace lab {

// Numeric stand-in for one side of the coupling when only cardinalities and
// diameters matter (parameter sweeps past desk scale): spacing k_m, diameter
// l_m per level, and |Gamma'_m| as big integers.
struct SyntheticSide {
  int kappa = 3;
  int q = 6;
  std::vector<long> k;             // k[0] = 0, strictly increasing
  std::vector<long> l;             // l[m], l[0] for the base group
  std::vector<mpz_class> gprime;   // |Gamma'_m| for m = 1..levels
};

// A coupling problem: source and target diagonal products (concrete groups,
// or numeric stand-ins), the integrability weight phi, and the exponent
// margin epsilon with the recorded hypothesis verdicts.
struct DDParams {
  std::optional<DeltaParams> source, target;            // concrete pair
  std::optional<SyntheticSide> source_num, target_num;  // numeric pair
  FunctionDescriptor phi;   // weight phi(r) in the integrability sums
  double epsilon = 0;       // phi(x) should be O(x^{1 - epsilon})
  HypothesisReport hypotheses;  // summability + fitted-exponent verdicts

  bool concrete() const { return source.has_value(); }
  // both recorded verdicts positive (diameter summability, exponent margin)
  bool hypotheses_hold() const;

  static DDParams concrete_pair(DeltaParams src, DeltaParams tgt,
                                FunctionDescriptor phi, double epsilon);
  static DDParams synthetic_pair(SyntheticSide src, SyntheticSide tgt,
                                 FunctionDescriptor phi, double epsilon);
};

// Location of the source set inside the target chain: the sandwich index
// (d, i, j), the next chain member (D, I, J) backing the enlarged target
// set, the cursor split D = Q kappa^n + R, the block depth p with
// kappa^{p-1} < D <= kappa^p, and the top numbered level M.  The two flags
// record per-n measurements of properties that only hold asymptotically.
struct TargetIndex {
  long d = 1;
  int i = 0, j = 1;
  long D = 1;
  int I = 0, J = 1;
  long Q = 0, R = 0;
  int p = 0, M = 0;
  bool Q_at_least_3 = false;  // measured, never assumed
  bool D_exceeds_box = false;
};

// Two-piece affine spreading of [0, max_in] onto [0, max_out]:
// x -> (a-1) x below the breakpoint, a x + b from it on.  Increasing,
// integer valued, a-Lipschitz, endpoint exact.
struct SpreadingMap {
  mpz_class a, b;
  mpz_class max_in, max_out;

  mpz_class eval(const mpz_class& x) const;
  // total on the image; throws std::domain_error off it
  mpz_class invert(const mpz_class& y) const;
};

// The carved target set: thresholds of the removed corner, exact removed
// count at desk scale, and the cardinality comparisons.
struct CarveReport {
  mpz_class theta_threshold;  // spreading(q^{kappa^n} maxE)
  long chi_threshold = 0;     // kappa^n (max mu - Q maxE + 1)
  mpz_class removed;          // exact count of removed elements
  mpz_class removed_bound;    // D q^{3 + kappa^n}
  mpz_class source_size, enlarged_size, carved_size;
  bool proportional = false;  // source <= enlarged <= 4 q^2 source
};

// Per-depth histogram row of a distance audit: the number of elements whose
// carry depth is m, the closed-form majorant, the constant it needs, and
// the running weighted sum.
struct AuditRow {
  int m = 0;
  mpz_class count;
  double paper_majorant = 0;
  double fitted_constant = 0;
  double partial_sum = 0;
};

struct CouplingAudit {
  std::vector<AuditRow> rows;
  bool exhaustive = false;
  bool depth_zero_below_start = true;  // no element below the first depth
  bool bounds_certified = false;  // certified distance <= shape bound always
  long max_distance = 0;          // largest certified distance seen
  double max_shape_ratio = 0;     // certified / shape bound, worst case
  std::string csv() const;  // columns m,count,paper_majorant,fitted_constant,partial_sum
};

// The three partial sums of the integrability estimate: depths up to p, the
// seam depth p+1, and the level depths past it.
struct IntegrabilityTriple {
  double head = 0, seam = 0, tail = 0;
  bool exhaustive = false;
  bool hypotheses_hold = false;
  double total() const { return head + seam + tail; }
};

// Per-n coupling session.  Element-level operations require a concrete
// pair; index and sum operations work for numeric pairs too.
class DDCoupler {
 public:
  DDCoupler(DDParams params, long n);

  const DDParams& params() const { return params_; }
  long n() const { return n_; }
  long box() const { return box_; }  // kappa^n
  const TargetIndex& index() const { return index_; }
  const mpz_class& source_size() const { return source_size_; }
  const mpz_class& enlarged_size() const { return K_size_; }
  const mpz_class& max_mu() const { return max_mu_; }  // source level numbering
  const mpz_class& max_E() const { return max_E_; }
  const mpz_class& max_theta_tilde() const { return max_tt_; }
  const mpz_class& max_theta() const { return max_t_; }
  const SpreadingMap& spreading_map() const { return spread_; }
  const MixedRadixBase& source_base() const { return source_base_; }

  // measured sandwiches (valid at this n or not; reported, never assumed)
  bool E_sandwich_holds() const;
  bool theta_tilde_sandwich_holds() const;

  // ---- source side (concrete pair only) ----
  bool source_member(const DeltaElement& x) const;
  mpz_class mu_tilde(const DeltaElement& x) const;  // source level numbering
  // Euclidean split mu = E Q + P with 0 <= P < Q
  std::pair<mpz_class, long> extract_EP(const DeltaElement& x) const;
  mpz_class theta_tilde(const DeltaElement& x) const;
  // membership in the box union that (t, theta_tilde, P) ranges over
  bool triple_in_box_union(long t, const mpz_class& tt, long P) const;

  // ---- cursor maps (any pair) ----
  long cursor_map(long P, long t) const;       // u(P, t) in [0, D-1]
  bool in_cursor_image(long v) const;
  // every skipped cursor has its predecessor in the image
  bool cursor_image_gap_free() const;
  long chi(long v) const;                      // onto [0, Q kappa^n - 1]

  // ---- target side ----
  // ideal blocks B'_i for i in [0, p]; real blocks are chi preimages
  std::vector<Interval> ideal_blocks(long P, long t) const;
  std::vector<Interval> real_blocks(long P, long t) const;
  MixedRadixBase target_base(long P, long t) const;
  bool enlarged_member(const DeltaElement& g) const;  // concrete pair only

  // numbering of the target lamp data at cursor v; bijective onto
  // [0, enlarged_size / D - 1] for every cursor (skipped cursors share the
  // doubled innermost block of their predecessor)
  mpz_class vartheta(const DeltaElement& g) const;
  DeltaElement vartheta_decode(const mpz_class& z, long v) const;

  mpz_class spreading(const mpz_class& z) const { return spread_.eval(z); }
  mpz_class spreading_inverse(const mpz_class& y) const {
    return spread_.invert(y);
  }

  CarveReport carve() const;
  bool carved_member(const DeltaElement& g) const;

  // the injection x -> (g, u(P, t)); image lands in the carved set
  DeltaElement inject(const DeltaElement& x) const;
  // largest distance from a carved element to the image, by multi-source
  // search in the generator-action graph restricted to the carved set
  long density_radius(long budget = 2000000) const;

  // exhaustive distance audit for one generator over cursors t <= box - 2
  CouplingAudit distance_audit(const Generator& s, long budget = 2000000) const;
  // three-way split of sum_r phi(r) P(distance = r); exhaustive at desk
  // scale, closed majorants otherwise
  IntegrabilityTriple integrability_sum(long R, long budget = 2000000) const;

 private:
  struct ChainData;  // numeric chain views of the two sides

  void require_split() const;  // element ops need Q >= 1
  void require_concrete() const;

  DDParams params_;
  long n_ = 1;
  long box_ = 1;
  std::shared_ptr<const ChainData> chain_;
  std::shared_ptr<const FolnerAtlas> source_atlas_, target_atlas_;
  TargetIndex index_;
  mpz_class source_size_, K_size_;
  mpz_class max_mu_, max_E_, max_tt_, max_t_;
  SpreadingMap spread_;
  MixedRadixBase source_base_;  // (nu_0, .., nu_n, E)
  int source_top_ = 0;          // source levels active in the box
};

}  // namespace lab
