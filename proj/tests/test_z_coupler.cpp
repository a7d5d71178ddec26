#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>
#include <vector>

#include "lab/z_coupler.hpp"

using namespace lab;

namespace {

DeltaParams lamplighter() { return DeltaParams::lamplighter(2, 3); }

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

mpz_class random_below(std::mt19937_64& rng, const mpz_class& bound) {
  mpz_class z = 0;
  for (int rounds = 0; rounds < 3; ++rounds)
    z = z * (mpz_class(1) << 62) + mpz_class(static_cast<unsigned long>(
            rng() & ((1ULL << 62) - 1)));
  return z % bound;
}

FunctionDescriptor mass_one() {
  FunctionDescriptor d;
  d.kind = FunctionDescriptor::power;
  d.p = 0;
  return d;
}

FunctionDescriptor rho_log_of(ProfileSpec::Family fam, double alpha = 1.0) {
  FunctionDescriptor d;
  d.kind = FunctionDescriptor::rho_log;
  d.rho.family = fam;
  d.rho.alpha = alpha;
  return d;
}

}  // namespace

TEST_CASE("block intervals: worked example and laws") {
  // kappa=3, n=3, t=16 = [1,2,1]
  std::vector<Interval> b = block_intervals(16, 3, 3);
  REQUIRE(b.size() == 4);
  CHECK(b[0].lo == 16);
  CHECK(b[0].hi == 16);
  CHECK(b[1].lo == 15);
  CHECK(b[1].hi == 17);
  CHECK(b[2].lo == 9);
  CHECK(b[2].hi == 17);
  CHECK(b[3].lo == 0);
  CHECK(b[3].hi == 26);

  for (long i = 0; i <= 3; ++i) {
    std::vector<Interval> z = block_intervals(0, 3, 3);
    CHECK(z[static_cast<size_t>(i)].lo == 0);
    CHECK(z[static_cast<size_t>(i)].hi ==
          static_cast<long>(std::pow(3, i)) - 1);
  }

  for (long t = 0; t < 27; ++t) {
    std::vector<Interval> bb = block_intervals(t, 3, 3);
    CHECK(bb[0].lo == t);
    CHECK(bb[3].lo == 0);
    CHECK(bb[3].hi == 26);
    for (long i = 0; i < 3; ++i) {
      CHECK(bb[static_cast<size_t>(i)].lo >= bb[static_cast<size_t>(i) + 1].lo);
      CHECK(bb[static_cast<size_t>(i)].hi <= bb[static_cast<size_t>(i) + 1].hi);
      CHECK(bb[static_cast<size_t>(i)].diam() ==
            static_cast<long>(std::pow(3, i)) - 1);
    }
  }
}

TEST_CASE("carry position") {
  CHECK(carry_position(16, 3, 3) == 0);
  CHECK(carry_position(17, 3, 3) == 2);
  CHECK(carry_position(0, 3, 3) == 0);
  CHECK_THROWS_AS(carry_position(26, 3, 3), std::domain_error);
  // stability: blocks above the carry position survive t -> t+1
  for (long t = 0; t < 26; ++t) {
    int i0 = carry_position(t, 3, 3);
    std::vector<Interval> a = block_intervals(t, 3, 3);
    std::vector<Interval> b = block_intervals(t + 1, 3, 3);
    for (int i = i0 + 1; i <= 3; ++i) {
      CHECK(a[static_cast<size_t>(i)].lo == b[static_cast<size_t>(i)].lo);
      CHECK(a[static_cast<size_t>(i)].hi == b[static_cast<size_t>(i)].hi);
    }
  }
}

TEST_CASE("encoder: bijection onto the integer interval (exhaustive n=1)") {
  for (const DeltaParams& p : {lamplighter(), small_gamma_instance()}) {
    ZEncoder enc(p, 1);
    std::vector<DeltaElement> set = enc.atlas().enumerate(enc.atlas().full_index(3));
    CHECK(enc.size() == static_cast<long>(set.size()));
    std::set<mpz_class> image;
    for (const auto& x : set) {
      mpz_class z = enc.encode(x);
      CHECK(z >= 0);
      CHECK(z < enc.size());
      CHECK(image.insert(z).second);
      CHECK(enc.decode(z) == x);
    }
    CHECK(image.size() == set.size());
    CHECK(*image.begin() == 0);
    CHECK(*image.rbegin() == enc.size() - 1);
    CHECK(enc.encode(identity(p)) == 0);
  }
}

TEST_CASE("encoder: sampled round trips at n=2") {
  std::mt19937_64 rng(7);
  for (const DeltaParams& p : {lamplighter(), small_gamma_instance()}) {
    ZEncoder enc(p, 2);
    CHECK(enc.box() == 9);
    CHECK(enc.decode(0) == identity(p));
    for (int trial = 0; trial < 20000; ++trial) {
      mpz_class z = random_below(rng, enc.size());
      DeltaElement x = enc.decode(z);
      CHECK(enc.member(x));
      CHECK(enc.encode(x) == z);
    }
    // all-maximal digits decode to a full lamp configuration
    DeltaElement top = enc.decode(enc.size() - 1);
    CHECK(top.t == enc.box() - 1);
    CHECK(static_cast<long>(top.f0.size()) == enc.box());
    CHECK_THROWS_AS(enc.decode(enc.size()), std::domain_error);
    CHECK_THROWS_AS(enc.decode(mpz_class(-1)), std::domain_error);
  }
}

TEST_CASE("encode rejects elements off the set") {
  ZEncoder enc(lamplighter(), 1);
  DeltaElement bad = identity(lamplighter());
  bad.t = 3;  // outside the box
  CHECK_THROWS_AS(enc.encode(bad), std::domain_error);
  DeltaElement far = identity(lamplighter());
  far.f0[5] = 1;  // lamp outside the box
  CHECK_THROWS_AS(enc.encode(far), std::domain_error);
}

TEST_CASE("neighbor gaps: lamp law and cursor law (exhaustive n=1)") {
  for (const DeltaParams& p : {lamplighter(), small_gamma_instance()}) {
    ZEncoder enc(p, 1);
    long q = p.q();
    // expected lamp spread straight from the value table
    long spread = 0;
    std::vector<Generator> gens = generator_set(p);
    for (const Generator& g : gens) {
      if (g.kind == Generator::cursor) continue;
      DeltaElement gen = generator_element(p, g);
      int gv = gen.f0.at(0);
      for (int v = 0; v < q; ++v)
        spread = std::max(spread,
                          std::abs(static_cast<long>(p.gamma0.gamma.prod(v, gv)) - v));
    }
    long max_lamp = 0;
    for (const auto& x : enc.atlas().enumerate(enc.atlas().full_index(3))) {
      if (!enc.interior(x)) continue;
      for (const Generator& g : gens) {
        mpz_class gap = enc.neighbor_gap(x, g);
        CHECK(gap >= 1);  // injectivity
        if (g.kind == Generator::cursor) {
          int i0 = carry_position(x.t, 1, p.kappa);
          mpz_class bound;
          mpz_ui_pow_ui(bound.get_mpz_t(), static_cast<unsigned long>(q),
                        static_cast<unsigned long>(std::pow(p.kappa, i0 + 1)));
          bound *= static_cast<long>(std::pow(p.kappa, i0 + 1));
          CHECK(gap < bound);
        } else {
          CHECK(gap <= q);
          max_lamp = std::max(max_lamp, static_cast<long>(gap.get_si()));
        }
      }
    }
    CHECK(max_lamp == spread);
  }
}

TEST_CASE("neighbor gaps: sampled interior laws at n=2") {
  std::mt19937_64 rng(11);
  ZEncoder enc(lamplighter(), 2);
  std::vector<Generator> gens = generator_set(enc.params());
  for (int trial = 0; trial < 2000; ++trial) {
    DeltaElement x = enc.decode(random_below(rng, enc.size()));
    if (!enc.interior(x)) continue;
    for (const Generator& g : gens) {
      mpz_class gap = enc.neighbor_gap(x, g);
      if (g.kind != Generator::cursor) {
        CHECK(gap <= enc.params().q());
        // lamp moves only touch the least significant digit
        mpz_class zx = enc.encode(x);
        mpz_class zy = enc.encode(apply_generator(enc.params(), x, g));
        CHECK(addition_locality_holds(std::min(zx, zy), std::max(zx, zy), 0,
                                      enc.base()));
      } else if (g.shift == 1) {
        int i0 = carry_position(x.t, 2, 3);
        mpz_class bound;
        mpz_ui_pow_ui(bound.get_mpz_t(), 6,
                      static_cast<unsigned long>(std::pow(3, i0 + 1)));
        bound *= static_cast<long>(std::pow(3, i0 + 1));
        CHECK(gap < bound);
      }
    }
  }
  DeltaElement edge = identity(enc.params());
  CHECK_THROWS_AS(enc.neighbor_gap(edge, gens[0]), std::domain_error);  // t = 0
}

TEST_CASE("carry histogram is exact") {
  ZEncoder e1(lamplighter(), 1);
  std::map<long, mpz_class> h1 = e1.carry_histogram();
  CHECK(h1.at(0) == 432);  // t in {0,1}, 216 configurations each

  ZEncoder e2(lamplighter(), 2);
  std::map<long, mpz_class> h2 = e2.carry_histogram();
  CHECK(h2.at(0) * 3 == e2.size() * 2);
  CHECK(h2.at(1) * 9 == e2.size() * 2);

  for (ZEncoder* e : {&e1, &e2}) {
    // oracle: count carry positions cursor by cursor
    std::map<long, long> cursors;
    for (long t = 0; t < e->box() - 1; ++t)
      ++cursors[carry_position(t, e->n(), 3)];
    mpz_class per_cursor = e->size() / e->box();
    mpz_class total = per_cursor;  // saturated cursor
    for (const auto& [m, count] : e->carry_histogram()) {
      CHECK(count == per_cursor * cursors.at(m));
      total += count;
    }
    CHECK(total == e->size());
  }

  ZEncoder e3(lamplighter(), 3);
  CHECK(e3.carry_histogram().at(2) == 2 * (e3.size() / e3.box()));
}

TEST_CASE("integrability sums") {
  ZEncoder enc(lamplighter(), 1);
  IntegrabilitySummary mass = enc.integrability_sum(1000000, mass_one());
  CHECK(mass.lamp_exhaustive);
  CHECK(mass.lamp_sum <= 1.0);
  CHECK(mass.cursor_sum <= 1.0);
  CHECK(mass.lamp_sum > 0.0);

  IntegrabilitySummary lg =
      enc.integrability_sum(1000000, rho_log_of(ProfileSpec::identity_map));
  CHECK(lg.lamp_sum <= std::log(6.0));

  ZEncoder enc2(lamplighter(), 2);
  IntegrabilitySummary lg2 =
      enc2.integrability_sum(1000000, rho_log_of(ProfileSpec::identity_map), 500);
  CHECK_FALSE(lg2.lamp_exhaustive);
  CHECK(lg2.lamp_sum == doctest::Approx(std::log(6.0)));

  // cursor majorants for rho = sqrt: monotone in n and uniformly bounded
  double prev = 0;
  for (long n = 1; n <= 6; ++n) {
    ZEncoder e(lamplighter(), n);
    IntegrabilitySummary s =
        e.integrability_sum(0, rho_log_of(ProfileSpec::power, 1.0), 1);
    CHECK(s.cursor_majorant >= prev);
    CHECK(s.cursor_majorant < 20.0);
    prev = s.cursor_majorant;
  }
}

TEST_CASE("composition of integrability descriptors") {
  FunctionDescriptor id;
  FunctionDescriptor pa;
  pa.kind = FunctionDescriptor::power;
  pa.p = 2;
  FunctionDescriptor pb = pa;
  pb.p = 3;
  FunctionDescriptor rl = rho_log_of(ProfileSpec::power, 1.0);

  CHECK(compose_integrability(id, pa).p == 2);
  CHECK(compose_integrability(pa, id).p == 2);
  CHECK(compose_integrability(pa, pb).p == 6);
  FunctionDescriptor simp = compose_integrability(rl, pb);
  CHECK(simp.kind == FunctionDescriptor::rho_log);
  CHECK_THROWS_AS(compose_integrability(rl, rl), std::invalid_argument);
  CHECK(rl.to_text().find("rho_log") == 0);
  CHECK(pa.eval(10.0) == doctest::Approx(100.0));
}

TEST_CASE("gap csv audit") {
  ZEncoder enc(lamplighter(), 1);
  Generator lamp{Generator::a_type, 0, 1};
  std::string csv = enc.gap_csv(lamp, mass_one());
  CHECK(csv.find("r,count,fraction,phi_r,partial_sum") == 0);
  // partial sums reach total mass 1 for phi = 1
  CHECK(csv.find(",1\n") != std::string::npos);
}

TEST_CASE("partial sums svg") {
  std::string svg = partial_sums_svg({{"cursor", {{1, 0.5}, {2, 0.8}, {3, 0.9}}}});
  CHECK(svg.find("<svg") == 0);
  CHECK(svg.find("polyline") != std::string::npos);
  CHECK(svg.find("cursor") != std::string::npos);
}
