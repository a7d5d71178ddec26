#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <string>
#include <vector>

#include "lab/mixed_radix.hpp"

using lab::DigitVector;
using lab::Int;
using lab::MixedRadixBase;

namespace {

// Independent digit extraction: x_i = (x mod b_0...b_i) / (b_0...b_{i-1}),
// a closed formula rather than iterated division.
std::vector<Int> oracle_digits(const Int& x, const MixedRadixBase& base) {
  std::vector<Int> out(base.size());
  Int lo = 1;
  for (std::size_t i = 0; i < base.size(); ++i) {
    Int hi = lo * base.radices[i];
    if (i + 1 == base.size() && base.last_unbounded)
      out[i] = x / lo;
    else
      out[i] = (x % hi) / lo;
    lo = hi;
  }
  return out;
}

// Oracle carry index by scanning oracle digits; returns -1 when saturated.
long oracle_carry(const Int& x, std::size_t k, const MixedRadixBase& base) {
  auto d = oracle_digits(x, base);
  for (std::size_t j = k + 1; j < d.size(); ++j)
    if (d[j] < base.radices[j] - 1) return static_cast<long>(j);
  return -1;
}

std::string key(const std::vector<Int>& digits) {
  std::string s;
  for (const Int& d : digits) s += d.get_str() + ",";
  return s;
}

}  // namespace

TEST_CASE("decompose: worked examples") {
  MixedRadixBase b258({2, 5, 8});
  MixedRadixBase b258u({2, 5, 8}, true);

  CHECK(lab::decompose(0, b258).digits == std::vector<Int>{0, 0, 0});
  CHECK(lab::decompose(100, b258u).digits == std::vector<Int>{0, 0, 10});
  // 119 exceeds 2*5*8, so it only decomposes when the top digit is free.
  CHECK(lab::decompose(119, b258u).digits == std::vector<Int>{1, 4, 11});
  // The tempting alternative [2,0,12] is not a valid digit vector for 100:
  // it recomposes to 122 and its first digit violates x_0 < b_0.
  DigitVector wrong;
  wrong.base = b258u;
  wrong.digits = {2, 0, 12};
  CHECK_THROWS_AS(lab::recompose(wrong), std::invalid_argument);
  {
    Int v = 2 * 1 + 0 * 2 + 12 * 10;
    CHECK(v == 122);
  }

  CHECK_THROWS_AS(lab::decompose(80, b258), std::out_of_range);
  CHECK_THROWS_AS(lab::decompose(-1, b258), std::out_of_range);
}

TEST_CASE("recompose: worked examples and inverse") {
  MixedRadixBase b258({2, 5, 8});
  DigitVector d;
  d.base = b258;
  d.digits = {0, 0, 0};
  CHECK(lab::recompose(d) == 0);
  d.digits = {1, 0, 0};
  CHECK(lab::recompose(d) == 1);
  d.base = MixedRadixBase({2, 5, 8}, true);
  d.digits = {1, 4, 11};
  CHECK(lab::recompose(d) == 119);
  d.base = b258;
  d.digits = {0, 5, 0};
  CHECK_THROWS_AS(lab::recompose(d), std::invalid_argument);
}

TEST_CASE("round trip, uniqueness and range law on exhaustive small bases") {
  std::vector<MixedRadixBase> bases = {
      MixedRadixBase({2, 5, 8}), MixedRadixBase({2, 3, 2, 3}),
      MixedRadixBase({3, 3, 3}), MixedRadixBase({7, 2}),
      MixedRadixBase({2, 2, 2, 2, 2})};
  for (const auto& base : bases) {
    Int total = base.product();
    std::set<std::string> seen;
    for (Int x = 0; x < total; ++x) {
      DigitVector d = lab::decompose(x, base);
      CHECK(d.digits == oracle_digits(x, base));
      CHECK(lab::recompose(d) == x);
      CHECK(seen.insert(key(d.digits)).second);  // injectivity
      // Range law: x < b_0...b_m  <=>  digits above m all vanish.
      for (std::size_t m = 0; m + 1 < base.size(); ++m) {
        bool in_range = x < base.prefix_product(m);
        bool high_zero = true;
        for (std::size_t j = m + 1; j < base.size(); ++j)
          if (d.digits[j] != 0) high_zero = false;
        CHECK(in_range == high_zero);
      }
    }
  }
}

TEST_CASE("carry_index: worked examples") {
  MixedRadixBase b234({2, 3, 4});
  // digits [1,2,0]: value 1 + 2*2 + 0 = 5; digit 1 is maximal (b_1-1 = 2),
  // digit 2 = 0 < 3, so the first free slot above 0 is index 2.
  CHECK(lab::carry_index(5, 0, b234) == 2);

  MixedRadixBase b258({2, 5, 8});
  CHECK(lab::carry_index(0, 0, b258) == 1);
  // digits [0,4,7]: everything above index 0 is maximal.
  Int sat = 0 + 4 * 2 + 7 * 10;
  CHECK_THROWS_AS(lab::carry_index(sat, 0, b258), std::domain_error);
  CHECK_THROWS_AS(lab::carry_index(0, 2, b258), std::out_of_range);
}

TEST_CASE("carry_index matches oracle exhaustively") {
  std::vector<MixedRadixBase> bases = {MixedRadixBase({2, 5, 8}),
                                       MixedRadixBase({2, 3, 2, 3}),
                                       MixedRadixBase({4, 3, 2})};
  for (const auto& base : bases) {
    Int total = base.product();
    for (Int x = 0; x < total; ++x) {
      for (std::size_t k = 0; k + 1 < base.size(); ++k) {
        long expect = oracle_carry(x, k, base);
        if (expect < 0) {
          CHECK_THROWS_AS(lab::carry_index(x, k, base), std::domain_error);
        } else {
          CHECK(lab::carry_index(x, k, base) ==
                static_cast<std::size_t>(expect));
        }
      }
    }
  }
}

TEST_CASE("addition locality: worked example and exhaustive law") {
  MixedRadixBase b258({2, 5, 8});
  CHECK(lab::addition_locality_holds(9, 10, 0, b258));
  CHECK(lab::addition_locality_holds(42, 42, 1, b258));

  // For every x <= y with y - x < b_0...b_k, locality must hold.
  MixedRadixBase base({2, 3, 2, 3});
  Int total = base.product();
  for (Int x = 0; x < total; ++x)
    for (Int y = x; y < total; ++y)
      for (std::size_t k = 0; k + 1 < base.size(); ++k)
        if (y - x < base.prefix_product(k))
          CHECK(lab::addition_locality_holds(x, y, k, base));
}

TEST_CASE("count_by_carry_index: formula vs brute force") {
  MixedRadixBase b232({2, 3, 2});
  CHECK(lab::count_by_carry_index(b232, 0, 1) == 8);  // b_2 (b_1-1) b_0
  CHECK(lab::count_by_carry_index(b232, 1, 1) == 0);
  MixedRadixBase b258({2, 5, 8});
  CHECK(lab::count_by_carry_index(b258, 0, 2) == 14);

  std::vector<MixedRadixBase> bases = {b232, b258, MixedRadixBase({2, 3, 2, 3}),
                                       MixedRadixBase({5, 4, 3, 2})};
  for (const auto& base : bases) {
    Int total = base.product();
    for (std::size_t k = 0; k + 1 < base.size(); ++k) {
      for (std::size_t m = 0; m < base.size(); ++m) {
        Int brute = 0;
        for (Int x = 0; x < total; ++x)
          if (oracle_carry(x, k, base) == static_cast<long>(m)) ++brute;
        CHECK(lab::count_by_carry_index(base, k, m) == brute);
      }
    }
  }
}

TEST_CASE("lipschitz_image_covers: worked examples and gap law") {
  MixedRadixBase b258({2, 5, 8});
  std::vector<Int> full;
  for (Int x = 0; x < 80; ++x) full.push_back(x);
  CHECK(lab::lipschitz_image_covers(full, b258, 1, 1));

  CHECK_FALSE(lab::lipschitz_image_covers({Int(0)}, b258, 1, 9));

  std::vector<Int> mult3;
  for (Int x = 0; x < 80; x += 3) mult3.push_back(x);
  CHECK(lab::lipschitz_image_covers(mult3, b258, 1, 3));

  // Gap law: any image touching 0 and max with consecutive gaps <= c for
  // c < b_0...b_i covers; one with a gap >= b_0 b_1 need not.
  std::vector<Int> sparse;
  for (Int x = 0; x < 80; x += 10) sparse.push_back(x);
  CHECK_FALSE(lab::lipschitz_image_covers(sparse, b258, 0, 10));
}
