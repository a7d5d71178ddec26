#include "lab/mixed_radix.hpp"

#include <algorithm>
#include <stdexcept>

namespace lab {

MixedRadixBase::MixedRadixBase(std::vector<Int> r, bool unbounded)
    : radices(std::move(r)), last_unbounded(unbounded) {
  if (radices.empty()) throw std::invalid_argument("empty radix sequence");
  for (const Int& b : radices)
    if (b < 1) throw std::invalid_argument("radix must be >= 1");
}

Int MixedRadixBase::prefix_product(std::size_t m) const {
  if (m >= radices.size()) throw std::out_of_range("prefix index");
  Int p = 1;
  for (std::size_t i = 0; i <= m; ++i) p *= radices[i];
  return p;
}

Int MixedRadixBase::product() const {
  Int p = 1;
  for (const Int& b : radices) p *= b;
  return p;
}

DigitVector decompose(const Int& x, const MixedRadixBase& base) {
  if (x < 0) throw std::out_of_range("negative input");
  DigitVector d;
  d.base = base;
  d.digits.resize(base.size());
  Int rest = x;
  const std::size_t M = base.size() - 1;
  for (std::size_t i = 0; i < M; ++i) {
    Int q, r;
    mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), rest.get_mpz_t(),
                base.radices[i].get_mpz_t());
    d.digits[i] = r;
    rest = q;
  }
  if (!base.last_unbounded && rest >= base.radices[M])
    throw std::out_of_range("value exceeds radix product");
  d.digits[M] = rest;
  return d;
}

Int recompose(const DigitVector& d) {
  const MixedRadixBase& base = d.base;
  if (d.digits.size() != base.size())
    throw std::invalid_argument("digit/radix length mismatch");
  Int x = 0, weight = 1;
  for (std::size_t i = 0; i < d.digits.size(); ++i) {
    const Int& xi = d.digits[i];
    if (xi < 0) throw std::invalid_argument("negative digit");
    const bool bounded = i + 1 < base.size() || !base.last_unbounded;
    if (bounded && xi >= base.radices[i])
      throw std::invalid_argument("digit out of radix range");
    x += xi * weight;
    weight *= base.radices[i];
  }
  return x;
}

std::size_t carry_index(const Int& x, std::size_t k, const MixedRadixBase& base) {
  const std::size_t M = base.size() - 1;
  if (k >= M) throw std::out_of_range("no digit strictly above k");
  DigitVector d = decompose(x, base);
  for (std::size_t j = k + 1; j <= M; ++j) {
    if (j == M && base.last_unbounded) return j;  // unbounded digit always absorbs
    if (d.digits[j] < base.radices[j] - 1) return j;
  }
  throw std::domain_error("carry index saturated: all digits above k maximal");
}

bool addition_locality_holds(const Int& x, const Int& y, std::size_t k,
                             const MixedRadixBase& base) {
  if (x < 0 || y < x) throw std::invalid_argument("need 0 <= x <= y");
  std::size_t j0;
  try {
    j0 = carry_index(x, k, base);
  } catch (const std::domain_error&) {
    return true;  // digits above k all maximal: nothing above them to disagree
  }
  DigitVector dx = decompose(x, base), dy = decompose(y, base);
  for (std::size_t j = j0 + 1; j < base.size(); ++j)
    if (dx.digits[j] != dy.digits[j]) return false;
  return true;
}

Int count_by_carry_index(const MixedRadixBase& base, std::size_t k,
                         std::size_t m) {
  const std::size_t M = base.size() - 1;
  if (k > M || m > M) throw std::out_of_range("index beyond base length");
  if (k >= m) return 0;
  Int count = base.radices[m] - 1;
  for (std::size_t j = m + 1; j <= M; ++j) count *= base.radices[j];
  for (std::size_t j = 0; j <= k; ++j) count *= base.radices[j];
  return count;
}

bool lipschitz_image_covers(const std::vector<Int>& image,
                            const MixedRadixBase& base, std::size_t i,
                            const Int& c) {
  if (image.empty()) return false;
  (void)c;  // the Lipschitz constant is the caller's certificate, not an input
            // to the ground-truth check
  const Int P = base.prefix_product(i);
  const Int total = base.product();
  Int blocks = total / P;
  for (Int h = 0; h < blocks; ++h) {
    const Int lo = h * P, hi = lo + P;  // block [lo, hi)
    auto it = std::lower_bound(image.begin(), image.end(), lo);
    if (it == image.end() || *it >= hi) return false;
  }
  return true;
}

}  // namespace lab
