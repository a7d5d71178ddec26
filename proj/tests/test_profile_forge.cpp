#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lab/profile_forge.hpp"

using namespace lab;

namespace {

ProfileSpec identity_profile() {
  ProfileSpec s;
  s.family = ProfileSpec::identity_map;
  return s;
}

ProfileSpec power_profile(double alpha) {
  ProfileSpec s;
  s.family = ProfileSpec::power;
  s.alpha = alpha;
  return s;
}

ProfileSpec log_profile(int r = 1) {
  ProfileSpec s;
  s.family = ProfileSpec::iterated_log;
  s.r = r;
  return s;
}

}  // namespace

TEST_CASE("build_sequences: closed forms of the builtin families") {
  auto lamp = build_sequences(identity_profile(), 3, 3, 5);
  CHECK(lamp.infinite_tail);
  CHECK(lamp.k == std::vector<mpz_class>{0});
  CHECK(lamp.l == std::vector<mpz_class>{1});

  auto pw = build_sequences(power_profile(1.0), 3, 3, 5);
  CHECK_FALSE(pw.infinite_tail);
  CHECK(pw.k == std::vector<mpz_class>{0, 3, 9, 27, 81, 243});
  CHECK(pw.l == std::vector<mpz_class>{1, 3, 9, 27, 81, 243});

  auto lg = build_sequences(log_profile(), 3, 3, 2);
  CHECK(lg.k == std::vector<mpz_class>{0, 3, 9});
  CHECK(lg.l[1] == 27);            // 3^{3^1}
  CHECK(lg.l[2] == mpz_class(19683));  // 3^{3^2}

  // doubling law holds for every family
  for (const auto& s : {pw, lg})
    for (std::size_t m = 2; m < s.k.size(); ++m) CHECK(s.k[m] >= 2 * s.k[m - 1]);
}

TEST_CASE("build_sequences rejects profiles outside the class") {
  ProfileSpec bad;
  bad.family = ProfileSpec::tabulated;
  bad.table = {{1, 5}, {10, 3}, {100, 2}};  // decreasing
  CHECK_THROWS_AS(build_sequences(bad, 3, 3, 4), std::invalid_argument);
}

TEST_CASE("tabulated profiles go through the greedy rule") {
  ProfileSpec tab;
  tab.family = ProfileSpec::tabulated;
  // samples of rho(x) = sqrt(x) (the alpha = 1 profile)
  for (double x = 1; x <= 1e9; x *= 2) tab.table.push_back({x, std::sqrt(x)});
  auto s = build_sequences(tab, 3, 3, 5);
  REQUIRE(s.k.size() == 6);
  for (std::size_t m = 2; m < s.k.size(); ++m) CHECK(s.k[m] >= 2 * s.k[m - 1]);
  for (std::size_t m = 1; m < s.l.size(); ++m) CHECK(s.l[m] >= s.l[m - 1]);
  // bar_f tracks f = sqrt within a constant band on the covered range
  PiecewiseProfile pp(s);
  double covered = mpz_get_d(s.k.back().get_mpz_t()) *
                   mpz_get_d(s.l.back().get_mpz_t());
  for (double x = 4; x < covered; x *= 2.7) {
    double fbar = mpq_get_d(pp.bar_f(Rat(x)).get_mpq_t());
    double f = std::sqrt(x);
    CHECK(fbar <= 4 * f);
    CHECK(f <= 4 * fbar);
  }
}

TEST_CASE("bar_f: breakpoint values and branch agreement") {
  PiecewiseProfile pp(build_sequences(power_profile(1.0), 3, 3, 6));
  const auto& s = pp.seq;
  for (std::size_t m = 1; m + 1 < s.k.size(); ++m) {
    Rat km_lm = Rat(s.k[m]) * Rat(s.l[m]);
    CHECK(pp.bar_f(km_lm) == Rat(s.l[m]));
    // both branches meet at x = k_{m+1} l_m
    Rat seam = Rat(s.k[m + 1]) * Rat(s.l[m]);
    CHECK(pp.bar_f(seam) == Rat(s.l[m]));
    CHECK(seam / Rat(s.k[m + 1]) == Rat(s.l[m]));
  }
  // worked value: x = 27 sits at the seam k_2 l_1 -> bar_f = l_1 = 3
  CHECK(pp.bar_f(Rat(27)) == 3);
  CHECK(pp.bar_rho(Rat(27)) == 9);
}

TEST_CASE("bar_f and bar_rho satisfy the monotone class inequalities") {
  PiecewiseProfile pp(build_sequences(power_profile(1.0), 3, 3, 8));
  Rat prev_rho(0), prev_f(0);
  for (Rat x(1); x < 100000; x = x * 5 / 4 + 1) {
    Rat f = pp.bar_f(x), r = pp.bar_rho(x);
    CHECK(f >= prev_f);
    CHECK(r >= prev_rho);
    prev_f = f;
    prev_rho = r;
    for (long c : {2L, 3L, 10L}) {
      CHECK(pp.bar_rho(x * c) >= r);
      CHECK(pp.bar_rho(x * c) <= c * r);
    }
    // c' < 1 variant: c' rho(x') <= rho(c' x') for x' >= 1/c'
    Rat cp(1, 3);
    if (x >= 3) CHECK(cp * pp.bar_rho(x) <= pp.bar_rho(cp * x));
  }
}

TEST_CASE("rho_bij: bijection, band, and inverse law") {
  PiecewiseProfile pp(build_sequences(power_profile(1.0), 3, 3, 8));
  const Rat two_delta = 2 * pp.delta;

  // strict increase and round trip on a dense grid
  Rat prev(-1);
  for (Rat x(1); x < 200000; x = x * 21 / 20 + 1) {
    Rat y = pp.rho_bij(x);
    CHECK(y > prev);
    prev = y;
    CHECK(pp.rho_bij_inverse(y) == x);
    Rat gap = y - pp.bar_rho(x);
    if (gap < 0) gap = -gap;
    CHECK(gap <= two_delta);
  }
  // exact at corners
  for (const auto& [x, y] : pp.corners()) {
    CHECK(pp.rho_bij(x) == y);
    CHECK(pp.rho_bij_inverse(y) == x);
  }
  // if bar_rho(x) = y then x <= rho_bij_inverse(2 y)
  for (Rat x(1); x < 100000; x = x * 3 / 2 + 1) {
    Rat y = pp.bar_rho(x);
    if (y >= 1) CHECK(x <= pp.rho_bij_inverse(2 * y));
  }
}

TEST_CASE("plateau corners interpolate between the shifted spacing values") {
  PiecewiseProfile pp(build_sequences(power_profile(1.0), 3, 3, 6));
  const auto& s = pp.seq;
  // midpoint of the corner segment for m = 1: between (k_2 - d) l_1 and
  // (k_2 + d) l_2, the image interpolates between k_2 - d and k_2 + d
  Rat d = pp.delta;
  Rat x0 = (Rat(s.k[2]) - d) * Rat(s.l[1]);
  Rat x1 = (Rat(s.k[2]) + d) * Rat(s.l[2]);
  CHECK(pp.rho_bij(x0) == Rat(s.k[2]) - d);
  CHECK(pp.rho_bij(x1) == Rat(s.k[2]) + d);
  Rat mid = (x0 + x1) / 2;
  CHECK(pp.rho_bij(mid) == Rat(s.k[2]));  // affine midpoint
}

TEST_CASE("hypothesis_report: summability verdicts") {
  auto lamp_seq = build_sequences(identity_profile(), 3, 3, 5);
  auto rep = hypothesis_report(identity_profile(), lamp_seq);
  CHECK_FALSE(rep.profile_summable);  // rho(kappa^m) kappa^{-m} = 1
  for (double t : rep.profile_terms) CHECK(t == doctest::Approx(1.0));

  auto pw_seq = build_sequences(power_profile(1.0), 3, 3, 10);
  auto rep2 = hypothesis_report(power_profile(1.0), pw_seq);
  CHECK(rep2.profile_summable);  // terms 3^{-m/2}
  CHECK(rep2.diameter_summable);  // l_m exp(-l_{m-1}) with l_m = 3^m
  CHECK(rep2.profile_partial_sum < 3.0);
}

TEST_CASE("hypothesis_report: composite exponent for a power pair") {
  auto src_seq = build_sequences(power_profile(1.0), 3, 3, 20);
  PiecewiseProfile src_bij(src_seq);
  auto tgt = power_profile(2.0);
  auto rep = hypothesis_report(power_profile(1.0), src_seq, &tgt, &src_bij);
  REQUIRE(rep.has_target);
  // expected exponent (1 + alpha) / (1 + alpha~) = 2/3
  CHECK(rep.fitted_exponent > 0.55);
  CHECK(rep.fitted_exponent < 0.78);
  CHECK(rep.epsilon > 0.2);
  CHECK(rep.epsilon < 0.45);
}

TEST_CASE("sequence text round trip") {
  for (const auto& s : {build_sequences(identity_profile(), 3, 3, 4),
                        build_sequences(power_profile(1.0), 3, 3, 6),
                        build_sequences(log_profile(), 2, 2, 3)}) {
    auto back = DeltaSequences::from_text(s.to_text());
    CHECK(back.kappa == s.kappa);
    CHECK(back.lambda == s.lambda);
    CHECK(back.infinite_tail == s.infinite_tail);
    CHECK(back.k == s.k);
    CHECK(back.l == s.l);
  }
}
