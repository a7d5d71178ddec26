// Finite marked groups: multiplication tables over dense ids, normal
// closures, a fiber-product constructor for the test family, projections to
// the abelianized marking A x B, and BFS diameters.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace lab {

struct FiniteGroup {
  int order = 1;
  int identity = 0;
  std::vector<int> mul;  // row-major order x order table
  std::vector<int> inv;

  int prod(int a, int b) const { return mul[static_cast<std::size_t>(a) * order + b]; }
  int inverse(int a) const { return inv[a]; }
  int conj(int g, int x) const { return prod(prod(g, x), inv[g]); }
  int element_order(int a) const;
  // Throws std::logic_error if identity/inverse/associativity fail.
  // Associativity is checked exhaustively for order <= 512, sampled above.
  void check_axioms() const;

  static FiniteGroup trivial();
  static FiniteGroup cyclic(int n);
  static FiniteGroup direct_product(const FiniteGroup& g, const FiniteGroup& h);
  // Closure of the given permutations of {0..n-1}; identity gets id 0 and
  // elements are numbered in BFS order from the identity.
  static FiniteGroup from_permutations(int n,
                                       const std::vector<std::vector<int>>& gens);
};

// Smallest normal subgroup of G containing S, as a sorted id list.
std::vector<int> normal_closure(const FiniteGroup& G, const std::vector<int>& S);

// Max over elements of BFS distance from the identity; generators are used
// together with their inverses.  Throws std::invalid_argument if gens do not
// generate.
int diameter(const FiniteGroup& G, const std::vector<int>& gens);

// A finite group Gamma with cyclic markings A = <a>, B = <b>, derived
// subgroup Gamma' = <<[A,B]>>, and the projection theta : Gamma -> A x B
// determined by a |-> (1,0), b |-> (0,1) on the quotient by Gamma'.
struct MarkedGamma {
  FiniteGroup gamma;
  int a_gen = 0, b_gen = 0;      // marked generators (a_gen may equal e if |A|=1)
  std::vector<int> A, B;         // cyclic subgroups: e, a, a^2, ... / e, b, ...
  std::vector<int> gamma_prime;  // sorted ids of <<[A,B]>>
  std::vector<std::pair<int, int>> theta;  // per element: exponents (alpha, beta)
  int diameter_l = 0;            // diameter of Cayley(Gamma, A u B)

  int q() const { return static_cast<int>(A.size() * B.size()); }
  // theta^A(g), theta^B(g) as group elements.
  int theta_a_elt(int g) const { return A[theta[g].first]; }
  int theta_b_elt(int g) const { return B[theta[g].second]; }
  // g' = g * (theta^A(g) theta^B(g))^{-1}, an element of gamma_prime.
  int derived_part(int g) const;
  bool in_gamma_prime(int g) const;
  // Index of g within the sorted gamma_prime list (identity maps to 0 when
  // renumbered by BFS order; see gamma_prime_bfs).
  int gamma_prime_index(int g) const;
  // Canonical enumeration of gamma_prime: sorted by word length in
  // Cayley(Gamma, A u B), ties broken by id; the identity comes first.
  // Numberings and nested subset chains use prefixes of this order.
  std::vector<int> gamma_prime_bfs() const;

  // Internal: fill gamma_prime, theta and diameter from gamma + markings.
  void finalize();
};

// The subgroup of (Z|A| x Z|B|) x H generated by ((1,0), x) and ((0,1), y),
// with x of order matching |A| and y of order matching |B|.  Default marking
// orders 2 and 3.  Throws std::invalid_argument on order/generation failure.
MarkedGamma fiber_product_gamma(const FiniteGroup& H, int x, int y,
                                int a_order = 2, int b_order = 3);

// The degenerate marked group Gamma_0 = A x B itself (gamma_prime trivial).
MarkedGamma marked_direct_product(int a_order, int b_order);

// Plain-text exchange format: first line the order, then order^2 product
// entries, then marking lines "A: ids" and "B: ids".
void export_marked(const MarkedGamma& mg, std::ostream& os);
MarkedGamma import_marked(std::istream& is);

// Convenience exemplars used across the suite.
FiniteGroup symmetric_group(int n);
FiniteGroup alternating_group(int n);

}  // namespace lab
