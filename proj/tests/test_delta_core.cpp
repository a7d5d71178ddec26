#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <deque>
#include <map>
#include <set>
#include <vector>

#include "lab/delta_core.hpp"

using namespace lab;

namespace {

DeltaParams lamplighter() { return DeltaParams::lamplighter(2, 3); }

// kappa = 3, k_1 = 2, Gamma_1 = fiber product over S3 (|Gamma'| = 3).
DeltaParams small_gamma_instance() {
  auto S3 = symmetric_group(3);
  int x = -1, y = -1;
  for (int g = 0; g < S3.order && (x < 0 || y < 0); ++g) {
    if (x < 0 && S3.element_order(g) == 2) x = g;
    if (y < 0 && S3.element_order(g) == 3) y = g;
  }
  return DeltaParams(3, {0, 2}, marked_direct_product(2, 3),
                     {fiber_product_gamma(S3, x, y)});
}

// All elements within the given word-metric radius, with their distances.
std::vector<std::pair<DeltaElement, long>> ball(const DeltaParams& p, long radius) {
  std::vector<std::pair<DeltaElement, long>> out;
  std::set<DeltaElement> seen;
  std::deque<std::pair<DeltaElement, long>> q;
  q.push_back({identity(p), 0});
  seen.insert(identity(p));
  std::vector<DeltaElement> gens;
  for (const auto& g : generator_set(p)) gens.push_back(generator_element(p, g));
  while (!q.empty()) {
    auto [u, d] = q.front();
    q.pop_front();
    out.push_back({u, d});
    if (d == radius) continue;
    for (const auto& g : gens) {
      DeltaElement v = multiply(p, u, g);
      if (seen.insert(v).second) q.push_back({v, d + 1});
    }
  }
  return out;
}

// All elements with cursor in [0, n-1] and base lamps supported there
// (lamplighter only).
std::vector<DeltaElement> lamplighter_box(const DeltaParams& p, long n) {
  std::vector<DeltaElement> out;
  const long sites = n;
  long configs = 1;
  for (long s = 0; s < sites; ++s) configs *= p.q();
  for (long t = 0; t < n; ++t)
    for (long c = 0; c < configs; ++c) {
      DeltaElement e = identity(p);
      e.t = t;
      long rest = c;
      for (long s = 0; s < sites; ++s) {
        int v = static_cast<int>(rest % p.q());
        rest /= p.q();
        if (v != p.gamma0.gamma.identity) e.f0[s] = v;
      }
      out.push_back(e);
    }
  return out;
}

Generator a_gen() { return {Generator::a_type, 0, 1}; }
Generator b_gen(int pow = 1) { return {Generator::b_type, 0, pow}; }
Generator step(int dir) { return {Generator::cursor, dir, 0}; }

DeltaElement word(const DeltaParams& p, const std::vector<Generator>& w) {
  DeltaElement x = identity(p);
  for (const auto& s : w) x = multiply(p, x, generator_element(p, s));
  return x;
}

}  // namespace

TEST_CASE("identity basics") {
  for (const auto& p : {lamplighter(), small_gamma_instance()}) {
    auto e = identity(p);
    CHECK(multiply(p, e, e) == e);
    auto r = range_interval(p, e);
    CHECK(r.lo == 0);
    CHECK(r.hi == 0);
    CHECK(word_length_exact(p, e, 10) == 0);
    CHECK(word_length_upper(p, e) == 0);
  }
}

TEST_CASE("generator actions: cursor and single lamp") {
  auto p = lamplighter();
  auto e = identity(p);
  auto moved = apply_generator(p, e, step(+1));
  CHECK(moved.t == 1);
  CHECK(moved.f0.empty());

  auto lit = apply_generator(p, e, a_gen());
  CHECK(lit.t == 0);
  REQUIRE(lit.f0.size() == 1);
  CHECK(lit.f0.at(0) == p.gamma0.A[1]);
}

TEST_CASE("commutator across one spacing lands in the derived lamp map") {
  auto p = small_gamma_instance();
  const long k1 = p.k[1];
  // f = (0,k1) a (0,-k1): a-lamp at site k1, cursor returned to 0.
  auto f = word(p, {step(+1), step(+1), a_gen(), step(-1), step(-1)});
  CHECK(f.t == 0);
  CHECK(f.f0 == std::map<long, int>{{k1, p.gamma0.A[1]}});
  CHECK(f.fprime[0].empty());

  // g = f b f^{-1} b^{-1}
  auto b = generator_element(p, b_gen());
  auto g = multiply(p, multiply(p, multiply(p, f, b), inverse(p, f)),
                    inverse(p, b));
  CHECK(g.t == 0);
  CHECK(g.f0.empty());
  REQUIRE(g.fprime[0].size() == 1);
  const auto& G1 = p.gamma(1);
  int comm = G1.gamma.prod(G1.gamma.prod(G1.a_gen, G1.b_gen),
                           G1.gamma.prod(G1.gamma.inv[G1.a_gen],
                                         G1.gamma.inv[G1.b_gen]));
  CHECK(comm != G1.gamma.identity);
  CHECK(g.fprime[0].at(k1) == comm);
}

TEST_CASE("group law: inverses, involution, associativity on generated sets") {
  for (const auto& p : {lamplighter(), small_gamma_instance()}) {
    auto e = identity(p);
    auto aa = multiply(p, generator_element(p, a_gen()),
                       generator_element(p, a_gen()));
    CHECK(aa == e);  // a^2 = e

    // all distinct elements from words of length <= 2
    std::set<DeltaElement> elems{e};
    for (const auto& g : generator_set(p)) {
      auto x = generator_element(p, g);
      elems.insert(x);
      for (const auto& h : generator_set(p))
        elems.insert(multiply(p, x, generator_element(p, h)));
    }
    for (const auto& x : elems) {
      CHECK(multiply(p, x, e) == x);
      CHECK(multiply(p, e, x) == x);
      CHECK(multiply(p, x, inverse(p, x)) == e);
      CHECK(multiply(p, inverse(p, x), x) == e);
    }
    std::vector<DeltaElement> v(elems.begin(), elems.end());
    for (std::size_t i = 0; i < v.size(); i += 3)
      for (std::size_t j = 0; j < v.size(); j += 2)
        for (std::size_t l = 0; l < v.size(); l += 3)
          CHECK(multiply(p, multiply(p, v[i], v[j]), v[l]) ==
                multiply(p, v[i], multiply(p, v[j], v[l])));
  }
}

TEST_CASE("group axioms exhaustively over words of length <= 4") {
  auto p = lamplighter();
  // Every way of bracketing a length-4 word gives the same element.
  auto gens = generator_set(p);
  for (const auto& s1 : gens)
    for (const auto& s2 : gens)
      for (const auto& s3 : gens)
        for (const auto& s4 : gens) {
          auto e1 = generator_element(p, s1), e2 = generator_element(p, s2);
          auto e3 = generator_element(p, s3), e4 = generator_element(p, s4);
          auto left = multiply(p, multiply(p, multiply(p, e1, e2), e3), e4);
          auto right = multiply(p, e1, multiply(p, e2, multiply(p, e3, e4)));
          auto mid = multiply(p, multiply(p, e1, e2), multiply(p, e3, e4));
          CHECK(left == right);
          CHECK(left == mid);
        }
}

TEST_CASE("apply_generator agrees with the group law on the lamplighter") {
  auto p = lamplighter();
  auto box = lamplighter_box(p, 3);
  CHECK(box.size() == 3 * 6 * 6 * 6);
  for (const auto& x : box)
    for (const auto& s : generator_set(p))
      CHECK(apply_generator(p, x, s) ==
            multiply(p, x, generator_element(p, s)));
}

TEST_CASE("lamp generators never change the derived maps") {
  auto p = small_gamma_instance();
  // elements with cursor and base lamps in [0,2] and one derived lamp at k1=2
  auto base = lamplighter_box(lamplighter(), 3);
  const auto& G1 = p.gamma(1);
  for (const auto& b : base) {
    for (int gp : G1.gamma_prime) {
      DeltaElement x = identity(p);
      x.t = b.t;
      x.f0 = b.f0;
      if (gp != G1.gamma.identity) x.fprime[0][2] = gp;
      for (const auto& s : generator_set(p)) {
        auto y = apply_generator(p, x, s);
        CHECK(y.fprime == x.fprime);
        if (s.kind == Generator::cursor)  // cursor moves are the true law
          CHECK(y == multiply(p, x, generator_element(p, s)));
      }
    }
  }
}

TEST_CASE("range_interval worked examples") {
  auto p = lamplighter();
  DeltaElement x = identity(p);
  x.f0[0] = p.gamma0.A[1];
  x.t = 3;
  auto r = range_interval(p, x);
  CHECK(r.lo == 0);
  CHECK(r.hi == 3);

  auto ps = small_gamma_instance();
  DeltaElement y = identity(ps);
  y.fprime[0][ps.k[1]] = ps.gamma(1).gamma_prime_bfs()[1];
  auto ry = range_interval(ps, y);
  CHECK(ry.lo == 0);
  CHECK(ry.hi == ps.k[1]);
}

TEST_CASE("range_interval is exactly the window needed by restricted BFS") {
  auto p = lamplighter();
  for (const auto& [x, d] : ball(p, 5)) {
    if (range_interval(p, x).card() > 4) continue;
    auto found = word_length_exact(p, x, d + 1, /*pad=*/0);
    REQUIRE(found.has_value());
    CHECK(*found == d);
  }
}

TEST_CASE("essential_contribution worked examples") {
  auto p = small_gamma_instance();
  CHECK(essential_contribution(p, identity(p), 1) == 0);

  // one base lamp: its level-1 shadow has word length 1, so (len-1)+ clips
  DeltaElement one = identity(p);
  one.f0[0] = p.gamma0.A[1];
  CHECK(essential_contribution(p, one, 1) == 0);

  // a derived lamp whose full level-1 value has Gamma-length L contributes
  // k_1 * (L - 1) when alone in its window
  const auto& G1 = p.gamma(1);
  std::vector<int> gens1 = {G1.a_gen, G1.b_gen};
  DeltaElement y = identity(p);
  int gp = G1.gamma_prime_bfs()[1];
  y.fprime[0][p.k[1]] = gp;
  long len = 0;
  {  // word length of gp in Gamma_1 by BFS
    std::deque<std::pair<int, long>> q{{G1.gamma.identity, 0}};
    std::vector<long> dist(G1.gamma.order, -1);
    dist[G1.gamma.identity] = 0;
    while (!q.empty()) {
      auto [u, d] = q.front();
      q.pop_front();
      for (int g : gens1)
        for (int v : {G1.gamma.prod(u, g), G1.gamma.prod(u, G1.gamma.inv[g])})
          if (dist[v] < 0) {
            dist[v] = d + 1;
            q.push_back({v, d + 1});
          }
    }
    len = dist[gp];
  }
  CHECK(len >= 3);  // a derived element needs at least a commutator's worth
  CHECK(essential_contribution(p, y, 1) == p.k[1] * (len - 1));
}

TEST_CASE("word_length_exact worked examples") {
  auto p = lamplighter();
  DeltaElement walk = identity(p);
  walk.t = 5;
  CHECK(word_length_exact(p, walk, 10) == 5);

  DeltaElement lamp2 = identity(p);
  lamp2.f0[2] = p.gamma0.A[1];
  CHECK(word_length_exact(p, lamp2, 10) == 5);  // out 2, flip, back 2

  CHECK_FALSE(word_length_exact(p, walk, 3).has_value());  // truncation
}

TEST_CASE("upper bound dominates the exact word length") {
  auto p = lamplighter();
  for (const auto& [x, d] : ball(p, 6)) CHECK(word_length_upper(p, x) >= d);
  auto ps = small_gamma_instance();
  for (const auto& [x, d] : ball(ps, 4)) CHECK(word_length_upper(ps, x) >= d);
}

TEST_CASE("distance_upper interval mode") {
  auto p = lamplighter();
  DeltaElement x = identity(p);
  x.t = 1;
  CHECK(distance_upper(p, x, x, DistanceMode::interval) == 0);

  DeltaElement y = x;
  y.f0[1] = p.gamma0.B[1];  // one lamp at the shared cursor
  long bound = distance_upper(p, x, y, DistanceMode::interval);
  CHECK(bound == 3);
  CHECK(distance_exact(p, x, y, 10) == 1);

  auto ps = small_gamma_instance();
  DeltaElement u = identity(ps), v = identity(ps);
  v.fprime[0][2] = ps.gamma(1).gamma_prime_bfs()[1];
  CHECK_THROWS_AS(distance_upper(ps, u, v, DistanceMode::interval),
                  std::invalid_argument);
}

TEST_CASE("distance_upper level mode dominates BFS distance") {
  auto ps = small_gamma_instance();
  const auto& G1 = ps.gamma(1);
  DeltaElement x = identity(ps);
  DeltaElement y = identity(ps);
  y.fprime[0][2] = G1.gamma_prime_bfs()[1];
  long bound = distance_upper(ps, x, y, DistanceMode::level);
  auto d = distance_exact(ps, x, y, 40, /*pad=*/0);
  REQUIRE(d.has_value());
  CHECK(*d <= bound);
  CHECK(*d >= 1);

  // pair differing in the derived map on [k_1, D] with D = 4
  DeltaElement y4 = identity(ps);
  y4.fprime[0][2] = G1.gamma_prime_bfs()[1];
  y4.fprime[0][4] = G1.gamma_prime_bfs()[2];
  long bound4 = distance_upper(ps, x, y4, DistanceMode::level);
  auto d4 = distance_exact(ps, x, y4, 60, /*pad=*/0);
  REQUIRE(d4.has_value());
  CHECK(*d4 <= bound4);
}

TEST_CASE("serialization round trip") {
  auto ps = small_gamma_instance();
  DeltaElement x = identity(ps);
  x.t = -2;
  x.f0[-1] = ps.gamma0.B[2];
  x.f0[3] = ps.gamma0.A[1];
  x.fprime[0][2] = ps.gamma(1).gamma_prime_bfs()[1];
  auto text = element_to_text(ps, x);
  CHECK(element_from_text(ps, text) == x);
}
