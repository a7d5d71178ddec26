// Variable-base (mixed-radix) integer arithmetic: decomposition,
// recomposition, carry-index analysis, counting, and Lipschitz-density
// utilities used by the integer codecs elsewhere in the lab.
#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <vector>

namespace lab {

using Int = mpz_class;

// A finite sequence of radices (b_0, ..., b_M), least significant first.
// When last_unbounded is set, digit M has no upper bound, so the base
// represents all nonnegative integers.
struct MixedRadixBase {
  std::vector<Int> radices;
  bool last_unbounded = false;

  MixedRadixBase() = default;
  MixedRadixBase(std::vector<Int> r, bool unbounded = false);

  std::size_t size() const { return radices.size(); }
  // prod_{i <= m} b_i
  Int prefix_product(std::size_t m) const;
  // prod of all radices; only meaningful when bounded.
  Int product() const;
};

// Digits (x_0, ..., x_M) of an integer in a mixed-radix base, least
// significant first: x = sum_i x_i * b_{i-1} ... b_0.
struct DigitVector {
  std::vector<Int> digits;
  MixedRadixBase base;
};

// Iterated Euclidean division by b_0, b_1, ...  Throws std::out_of_range if
// the base is bounded and x >= prod b_i.
DigitVector decompose(const Int& x, const MixedRadixBase& base);

// sum_i x_i * b_{i-1}...b_0.  Throws std::invalid_argument if a digit
// violates its radix bound.
Int recompose(const DigitVector& d);

// min{ j > k : x_j < b_j - 1 }.  Throws std::domain_error if every digit
// strictly above k is at its maximum (saturation) — callers that cannot
// saturate guarantee this via interior-element preconditions.
std::size_t carry_index(const Int& x, std::size_t k, const MixedRadixBase& base);

// Whether the digits of x and y agree strictly above carry_index(x, k).
// Guaranteed true whenever y - x < b_0 ... b_k.
bool addition_locality_holds(const Int& x, const Int& y, std::size_t k,
                             const MixedRadixBase& base);

// Exact number of x in [0, prod b - 1] with carry_index(x, k) = m:
// 0 if k >= m, else b_M ... b_{m+1} * (b_m - 1) * b_k ... b_0.
Int count_by_carry_index(const MixedRadixBase& base, std::size_t k, std::size_t m);

// True iff every y in [0, prod b - 1] has some x in `image` whose digits
// agree with y's strictly above index i.  A c-Lipschitz image (consecutive
// gaps <= c < b_0...b_i) always covers.
bool lipschitz_image_covers(const std::vector<Int>& image,
                            const MixedRadixBase& base, std::size_t i,
                            const Int& c);

}  // namespace lab
