#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "lab/group_kernel.hpp"

using lab::FiniteGroup;
using lab::MarkedGamma;

namespace {

// Find an element of a given order by scan.
int find_of_order(const FiniteGroup& G, int k) {
  for (int g = 0; g < G.order; ++g)
    if (G.element_order(g) == k) return g;
  return -1;
}

// A generating pair (x of order 2, y of order 3) for H, found by scan.
std::pair<int, int> find_marking_pair(const FiniteGroup& H) {
  for (int x = 0; x < H.order; ++x) {
    if (H.element_order(x) != 2) continue;
    for (int y = 0; y < H.order; ++y) {
      if (H.element_order(y) != 3) continue;
      try {
        if (lab::diameter(H, {x, y}) >= 0) return {x, y};
      } catch (const std::invalid_argument&) {
      }
    }
  }
  return {-1, -1};
}

}  // namespace

TEST_CASE("table constructors satisfy the group axioms") {
  for (auto G : {FiniteGroup::trivial(), FiniteGroup::cyclic(6),
                 lab::symmetric_group(3), lab::symmetric_group(4),
                 lab::alternating_group(4), lab::alternating_group(5)}) {
    CHECK_NOTHROW(G.check_axioms());
  }
  CHECK(lab::symmetric_group(3).order == 6);
  CHECK(lab::alternating_group(5).order == 60);
  CHECK(FiniteGroup::direct_product(FiniteGroup::cyclic(2), FiniteGroup::cyclic(3))
            .order == 6);
}

TEST_CASE("normal_closure: worked examples") {
  auto S3 = lab::symmetric_group(3);
  CHECK(lab::normal_closure(S3, {S3.identity}) ==
        std::vector<int>{S3.identity});

  int three_cycle = find_of_order(S3, 3);
  REQUIRE(three_cycle >= 0);
  auto A3 = lab::normal_closure(S3, {three_cycle});
  CHECK(A3.size() == 3);
  // A3 is a subgroup: closed under product and inverse.
  for (int a : A3)
    for (int b : A3) {
      int p = S3.prod(a, b);
      CHECK(std::find(A3.begin(), A3.end(), p) != A3.end());
    }

  auto A5 = lab::alternating_group(5);
  for (int g = 1; g < A5.order; g += 17) {
    auto cl = lab::normal_closure(A5, {g});
    CHECK(cl.size() == 60);  // simplicity
  }
}

TEST_CASE("diameter: worked examples") {
  auto Z6 = FiniteGroup::direct_product(FiniteGroup::cyclic(2), FiniteGroup::cyclic(3));
  int a = 1 * 3;  // (1, 0)
  int b = 1;      // (0, 1)
  // Farthest element is (1, 2) = a * b^{-1}: distance 2, since generators
  // act together with their inverses.
  CHECK(lab::diameter(Z6, {a, b}) == 2);

  CHECK(lab::diameter(FiniteGroup::trivial(), {}) == 0);

  auto S3 = lab::symmetric_group(3);
  CHECK_THROWS_AS(lab::diameter(S3, {find_of_order(S3, 3)}),
                  std::invalid_argument);
}

TEST_CASE("fiber product over S3: orders and quotient") {
  auto S3 = lab::symmetric_group(3);
  auto [x, y] = find_marking_pair(S3);
  REQUIRE(x >= 0);
  auto mg = lab::fiber_product_gamma(S3, x, y);
  CHECK(mg.gamma.order == 18);
  CHECK(mg.gamma_prime.size() == 3);
  CHECK(mg.q() == 6);
  CHECK_NOTHROW(mg.gamma.check_axioms());
  CHECK(mg.diameter_l == lab::diameter(mg.gamma, {mg.a_gen, mg.b_gen}));
}

TEST_CASE("fiber product over A5: orders and quotient") {
  auto A5 = lab::alternating_group(5);
  auto [x, y] = find_marking_pair(A5);
  REQUIRE(x >= 0);
  auto mg = lab::fiber_product_gamma(A5, x, y);
  CHECK(mg.gamma.order == 360);
  CHECK(mg.gamma_prime.size() == 60);
  CHECK(mg.q() == 6);
}

TEST_CASE("theta is a surjective homomorphism with kernel gamma_prime") {
  auto S3 = lab::symmetric_group(3);
  auto [x, y] = find_marking_pair(S3);
  std::vector<MarkedGamma> family = {lab::marked_direct_product(2, 3),
                                     lab::fiber_product_gamma(S3, x, y)};
  {
    auto A5 = lab::alternating_group(5);
    auto [x5, y5] = find_marking_pair(A5);
    family.push_back(lab::fiber_product_gamma(A5, x5, y5));
  }
  for (const auto& mg : family) {
    const auto& G = mg.gamma;
    CHECK(static_cast<std::size_t>(G.order) ==
          mg.gamma_prime.size() * mg.q());
    // homomorphism property of theta (exponent pairs add mod orders)
    const int na = static_cast<int>(mg.A.size()), nb = static_cast<int>(mg.B.size());
    for (int g = 0; g < G.order; ++g)
      for (int h = 0; h < G.order; ++h) {
        auto [ga, gb] = mg.theta[g];
        auto [ha, hb] = mg.theta[h];
        auto [pa, pb] = mg.theta[G.prod(g, h)];
        CHECK(pa == (ga + ha) % na);
        CHECK(pb == (gb + hb) % nb);
      }
    // kernel = gamma_prime
    for (int g = 0; g < G.order; ++g) {
      bool trivial_image = mg.theta[g] == std::pair<int, int>{0, 0};
      CHECK(trivial_image == mg.in_gamma_prime(g));
    }
    // surjectivity: every (alpha, beta) hit
    std::vector<int> hits(mg.q(), 0);
    for (int g = 0; g < G.order; ++g)
      ++hits[mg.theta[g].first * nb + mg.theta[g].second];
    for (int h : hits) CHECK(h == static_cast<int>(mg.gamma_prime.size()));
  }
}

TEST_CASE("derived_part: identities, generators, commutator") {
  auto S3 = lab::symmetric_group(3);
  auto [x, y] = find_marking_pair(S3);
  auto mg = lab::fiber_product_gamma(S3, x, y);
  const auto& G = mg.gamma;

  CHECK(mg.derived_part(G.identity) == G.identity);
  CHECK(mg.derived_part(mg.a_gen) == G.identity);
  CHECK(mg.derived_part(mg.b_gen) == G.identity);

  int comm = G.prod(G.prod(mg.a_gen, mg.b_gen),
                    G.prod(G.inv[mg.a_gen], G.inv[mg.b_gen]));
  CHECK(comm != G.identity);
  CHECK(mg.in_gamma_prime(comm));
  CHECK(mg.derived_part(comm) == comm);

  // Decomposition law g = g' * theta^A(g) * theta^B(g), and g' in Gamma'.
  for (int g = 0; g < G.order; ++g) {
    int gp = mg.derived_part(g);
    CHECK(mg.in_gamma_prime(gp));
    CHECK(G.prod(gp, G.prod(mg.theta_a_elt(g), mg.theta_b_elt(g))) == g);
  }
}

TEST_CASE("derived part of a product obeys the conjugation rule") {
  // Writing theta(g) = theta^A(g) theta^B(g), expanding g f =
  // g' theta(g) f' theta(f) gives the exact pointwise law
  //   (g f)' = g' * (theta(g) f' theta(g)^{-1}) * corr,
  // where corr = theta(g) theta(f) theta(gf)^{-1} is the (Gamma'-valued)
  // cost of re-sorting the A- and B-parts. We verify both that corr lands
  // in Gamma' and that the identity holds for every pair.
  auto S3 = lab::symmetric_group(3);
  auto [x, y] = find_marking_pair(S3);
  for (const auto& mg :
       {lab::marked_direct_product(2, 3), lab::fiber_product_gamma(S3, x, y)}) {
    const auto& G = mg.gamma;
    for (int g = 0; g < G.order; ++g)
      for (int f = 0; f < G.order; ++f) {
        int lhs = mg.derived_part(G.prod(g, f));
        int tg = G.prod(mg.theta_a_elt(g), mg.theta_b_elt(g));
        int rhs = G.prod(mg.derived_part(g), G.conj(tg, mg.derived_part(f)));
        // correction term: theta(g) theta(f) vs theta-parts of gf
        int tf = G.prod(mg.theta_a_elt(f), mg.theta_b_elt(f));
        int tgf = G.prod(mg.theta_a_elt(G.prod(g, f)),
                         mg.theta_b_elt(G.prod(g, f)));
        int corr = G.prod(G.prod(tg, tf), G.inv[tgf]);
        CHECK(mg.in_gamma_prime(corr));
        CHECK(G.prod(rhs, corr) == lhs);
      }
  }
}

TEST_CASE("gamma_prime log-size vs diameter: affine sandwich report") {
  auto S3 = lab::symmetric_group(3);
  auto A5 = lab::alternating_group(5);
  auto [x3, y3] = find_marking_pair(S3);
  auto [x5, y5] = find_marking_pair(A5);
  std::vector<MarkedGamma> family = {lab::fiber_product_gamma(S3, x3, y3),
                                     lab::fiber_product_gamma(A5, x5, y5)};
  // Fit c1, c2 with c1 * l - c2 <= ln|Gamma'| <= c1 * l + c2 across the
  // family; both groups must fit a common affine band with small c2.
  double c1 = 0;
  for (const auto& mg : family)
    c1 = std::max(c1, std::log((double)mg.gamma_prime.size()) / mg.diameter_l);
  double c2 = 0;
  for (const auto& mg : family) {
    double diff = c1 * mg.diameter_l - std::log((double)mg.gamma_prime.size());
    c2 = std::max(c2, std::abs(diff));
  }
  CHECK(c1 > 0);
  CHECK(c2 < c1 * family[0].diameter_l);  // band is informative, not vacuous
}

TEST_CASE("text import/export round trip") {
  auto S3 = lab::symmetric_group(3);
  auto [x, y] = find_marking_pair(S3);
  auto mg = lab::fiber_product_gamma(S3, x, y);
  std::stringstream ss;
  lab::export_marked(mg, ss);
  auto back = lab::import_marked(ss);
  CHECK(back.gamma.order == mg.gamma.order);
  CHECK(back.gamma.mul == mg.gamma.mul);
  CHECK(back.A == mg.A);
  CHECK(back.B == mg.B);
  CHECK(back.gamma_prime == mg.gamma_prime);
  CHECK(back.theta == mg.theta);
  CHECK(back.diameter_l == mg.diameter_l);
}

TEST_CASE("canonical gamma_prime enumeration starts at the identity") {
  auto S3 = lab::symmetric_group(3);
  auto [x, y] = find_marking_pair(S3);
  auto mg = lab::fiber_product_gamma(S3, x, y);
  auto order = mg.gamma_prime_bfs();
  REQUIRE(order.size() == mg.gamma_prime.size());
  CHECK(order[0] == mg.gamma.identity);
}
