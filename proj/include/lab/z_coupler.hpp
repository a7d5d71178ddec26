// Explicit bijection from the Folner set over a kappa^n box onto an integer
// interval: block decomposition of the cursor, interlaced variable-base
// encoding, neighbor-gap laws, carry histograms, and integrability sums.
#pragma once

#include <gmpxx.h>

#include <map>
#include <string>
#include <vector>

#include "lab/folner_atlas.hpp"
#include "lab/mixed_radix.hpp"
#include "lab/profile_forge.hpp"

namespace lab {

// Nested cursor blocks B_i(t) = [sum_{j>=i} t_j kappa^j, + kappa^i - 1].
std::vector<Interval> block_intervals(long t, long n, int kappa);
// min{ i : digit t_i < kappa - 1 }; throws std::domain_error when t is the
// saturated cursor kappa^n - 1.
int carry_position(long t, long n, int kappa);

// Symbolic function family for integrability tests: identity, power x^p, or
// rho(log x) with rho a profile.
struct FunctionDescriptor {
  enum Kind { identity, power, rho_log } kind = identity;
  double p = 1.0;          // exponent for `power`
  ProfileSpec rho;         // profile for `rho_log`
  // evaluate at x = e^{ln_x} (log-domain argument avoids overflow)
  double eval_ln(double ln_x) const;
  double eval(double x) const;
  std::string to_text() const;
};

// phi o psi with the simplification rho(log(x^p)) -> rho(log x) up to
// constants (valid for profiles of the admitted class).
FunctionDescriptor compose_integrability(const FunctionDescriptor& phi,
                                         const FunctionDescriptor& psi);

struct IntegrabilitySummary {
  double lamp_sum = 0;        // max over lamp generators of sum phi(r) P(gap = r)
  bool lamp_exhaustive = false;
  double cursor_sum = 0;      // measured when exhaustive, else the majorant
  bool cursor_exhaustive = false;
  double cursor_majorant = 0; // sum_m phi(kappa^{m+1} q^{kappa^{m+1}}) kappa^{-m}
};

class ZEncoder {
 public:
  // Encoder for the Folner set over the box [0, kappa^n - 1].
  ZEncoder(DeltaParams params, long n);

  const DeltaParams& params() const { return atlas_.params(); }
  const FolnerAtlas& atlas() const { return atlas_; }
  long n() const { return n_; }
  long box() const { return box_; }         // kappa^n
  const mpz_class& size() const { return size_; }  // cardinality of the set
  const MixedRadixBase& base() const { return base_; }

  bool member(const DeltaElement& x) const;
  // cursor strictly inside the box: the interior set with full 1-balls
  bool interior(const DeltaElement& x) const;

  mpz_class encode(const DeltaElement& x) const;  // domain error off the set
  DeltaElement decode(const mpz_class& z) const;  // domain error off range

  // |encode(x) - encode(x s)|; throws std::domain_error unless x is interior.
  mpz_class neighbor_gap(const DeltaElement& x, const Generator& s) const;

  // exact count of elements whose cursor has carry position m, for m in
  // [0, n-1]; the saturated cursor contributes size()/box() residual mass
  std::map<long, mpz_class> carry_histogram() const;

  IntegrabilitySummary integrability_sum(long R, const FunctionDescriptor& phi,
                                         long budget = 2000000) const;

  // CSV audit of the gap distribution for one generator over the interior
  // set: columns r,count,fraction,phi_r,partial_sum
  std::string gap_csv(const Generator& s, const FunctionDescriptor& phi,
                      long budget = 2000000) const;

 private:
  FolnerAtlas atlas_;
  long n_ = 1;
  long box_ = 1;
  FolnerIndex full_{};
  mpz_class size_;
  MixedRadixBase base_;
  int top_level_ = 0;  // levels active in the box
};

// Minimal polyline plot (x = n, y = partial sum), one path per series.
std::string partial_sums_svg(
    const std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>>&
        series);

}  // namespace lab
