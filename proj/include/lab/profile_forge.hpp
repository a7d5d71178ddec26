// Translate a prescribed isoperimetric profile rho into spacing/diameter
// sequences (k_m, l_m) and the piecewise-affine companions bar_f, bar_rho,
// rho_bij (with exact rational evaluation), plus summability and growth
// hypothesis checks.
#pragma once

#include <gmpxx.h>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace lab {

using Rat = mpq_class;

struct ProfileSpec {
  enum Family { identity_map, power, iterated_log, tabulated } family =
      identity_map;
  double alpha = 1.0;  // power family: rho(x) = x^{1/(1+alpha)}
  int r = 1;           // iterated_log family: rho = log^{(r)}
  // tabulated family: (x, rho(x)) samples, x increasing; piecewise-linear
  std::vector<std::pair<double, double>> table;

  // Evaluation clamped into [1, +inf).
  double eval(double x) const;
  // rho nondecreasing and x/rho(x) nondecreasing on a geometric grid.
  bool in_C(double x_max = 1e12) const;
};

// Spacing/diameter sequences of a diagonal product; entries of k beyond the
// stored ones are +infinity when infinite_tail is set (lamplighter case).
struct DeltaSequences {
  long kappa = 3, lambda = 3;
  std::vector<mpz_class> k;  // k[0] = 0
  std::vector<mpz_class> l;  // l[m] for each stored m; l[0] = 1
  bool infinite_tail = false;

  std::string to_text() const;
  static DeltaSequences from_text(const std::string& text);
};

// Builds (k_m, l_m) for m = 0..M.  Built-in families use their closed
// forms; tabulated profiles use a greedy rule (l_m = smallest lambda-power
// >= f(k_m l_{m-1}), k_{m+1} = smallest kappa-power >= 2 k_m).  Throws
// std::invalid_argument if rho fails the monotonicity checks.
DeltaSequences build_sequences(const ProfileSpec& rho, long kappa, long lambda,
                               int M);

// Exact piecewise-affine companions of a sequence pair.
struct PiecewiseProfile {
  DeltaSequences seq;
  Rat delta = Rat(1, 4);  // corner parameter, 0 < delta < 1/2

  PiecewiseProfile() = default;
  explicit PiecewiseProfile(DeltaSequences s, Rat d = Rat(1, 4));

  // bar_f: l_m on [k_m l_m, k_{m+1} l_m], x / k_{m+1} on
  // [k_{m+1} l_m, k_{m+1} l_{m+1}]; constant l_M past the last breakpoint.
  Rat bar_f(const Rat& x) const;
  // bar_rho(x) = x / bar_f(x)
  Rat bar_rho(const Rat& x) const;
  // strictly increasing piecewise-affine bijection with
  // |rho_bij - bar_rho| <= 2 delta
  Rat rho_bij(const Rat& x) const;
  Rat rho_bij_inverse(const Rat& y) const;

  // breakpoints of rho_bij as (x, y) pairs (exact)
  const std::vector<std::pair<Rat, Rat>>& corners() const { return pts_; }

 private:
  std::vector<std::pair<Rat, Rat>> pts_;
};

struct HypothesisReport {
  // terms and partial sums of rho(kappa^m) kappa^{-m}
  std::vector<double> profile_terms;
  double profile_partial_sum = 0;
  bool profile_summable = false;
  // terms and partial sums of l_m exp(-l_{m-1})
  std::vector<double> diameter_terms;
  double diameter_partial_sum = 0;
  bool diameter_summable = false;
  // fitted exponent of x -> target_rho(rho_bij^{-1}(x)) on a log-log grid
  bool has_target = false;
  double fitted_exponent = 0;
  double epsilon = 0;

  std::string to_text() const;
};

HypothesisReport hypothesis_report(const ProfileSpec& rho,
                                   const DeltaSequences& seq,
                                   const ProfileSpec* target_rho = nullptr,
                                   const PiecewiseProfile* source_bij = nullptr);

}  // namespace lab
