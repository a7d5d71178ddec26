#include "lab/folner_atlas.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace lab {

double ln_mpz(const mpz_class& v) {
  if (v <= 0) throw std::domain_error("ln_mpz: argument must be positive");
  long exp2 = 0;
  double d = mpz_get_d_2exp(&exp2, v.get_mpz_t());
  return std::log(d) + static_cast<double>(exp2) * std::log(2.0);
}

namespace {

mpz_class pow_z(const mpz_class& b, long e) {
  mpz_class r;
  mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), static_cast<unsigned long>(e));
  return r;
}

// smallest s >= 1 with s^N >= G^j
long ceil_root_power(long G, int j, int N) {
  mpz_class target = pow_z(G, j);
  long s = static_cast<long>(
      std::ceil(std::pow(static_cast<double>(G), double(j) / double(N))));
  if (s < 1) s = 1;
  while (pow_z(s, N) < target) ++s;
  while (s > 1 && pow_z(s - 1, N) >= target) --s;
  return s;
}

// doubling staircase of prefix sizes 1 = s_0 < s_1 < ... < s_N = G with
// 2 s_{j-1} <= s_j and s_j roughly G^{j/N}
std::vector<long> staircase_sizes(long G) {
  std::vector<long> s{1};
  if (G == 1) return s;
  int N = 0;
  while ((2L << N) <= G) ++N;  // N = max{N : 2^N <= G}
  for (int j = 1; j <= N; ++j) {
    long v = std::max(2 * s.back(), ceil_root_power(G, j, N));
    // keep room to double up to G on the remaining steps
    mpz_class cap_z = G / pow_z(2, N - j);
    long cap = cap_z.get_si();
    v = std::min(v, cap);
    s.push_back(v);
  }
  s.back() = G;
  return s;
}

}  // namespace

FolnerAtlas::FolnerAtlas(DeltaParams params) : params_(std::move(params)) {
  for (int m = 1; m <= params_.levels(); ++m) {
    const MarkedGamma& g = params_.gamma(m);
    long G = static_cast<long>(g.gamma_prime.size());
    sizes_.push_back(staircase_sizes(G));
    bfs_orders_.push_back(g.gamma_prime_bfs());
  }
}

int FolnerAtlas::chain_length(int i) const {
  if (i == 0) return 1;
  if (i < 1 || i > params_.levels())
    throw std::out_of_range("chain_length: level out of range");
  return static_cast<int>(sizes_[i - 1].size()) - 1;
}

long FolnerAtlas::lambda_size(int i, int j) const {
  if (j < 0 || j > chain_length(i))
    throw std::out_of_range("lambda_size: stage out of range");
  if (i == 0) return j == 0 ? 1 : params_.q();
  return sizes_[i - 1][static_cast<size_t>(j)];
}

std::vector<int> FolnerAtlas::lambda_set(int i, int j) const {
  if (i < 1 || i > params_.levels())
    throw std::out_of_range("lambda_set: level out of range");
  long s = lambda_size(i, j);
  const std::vector<int>& order = bfs_orders_[i - 1];
  return std::vector<int>(order.begin(), order.begin() + s);
}

bool FolnerAtlas::valid(const FolnerIndex& idx) const {
  if (idx.n < 1) return false;
  int ell = params_.ell(idx.n - 1);
  if (idx.i < 0 || idx.i > ell) return false;
  return idx.j >= 1 && idx.j <= chain_length(idx.i);
}

FolnerIndex FolnerAtlas::successor(const FolnerIndex& idx) const {
  if (!valid(idx)) throw std::invalid_argument("successor: invalid index");
  if (idx.j < chain_length(idx.i)) return {idx.n, idx.i, idx.j + 1};
  if (idx.i < params_.ell(idx.n - 1)) return {idx.n, idx.i + 1, 1};
  return {idx.n + 1, 0, 1};
}

FolnerIndex FolnerAtlas::full_index(long n) const {
  int ell = params_.ell(n - 1);
  return {n, ell, chain_length(ell)};
}

mpz_class FolnerAtlas::cardinality(const FolnerIndex& idx) const {
  if (!valid(idx)) throw std::invalid_argument("cardinality: invalid index");
  long n = idx.n;
  int ell = params_.ell(n - 1);
  mpz_class card = n;
  if (idx.i == 0) {
    card *= pow_z(params_.q(), n - 1) * lambda_size(0, idx.j);
    for (int m = 1; m <= ell; ++m)
      card *= pow_z(static_cast<long>(params_.gamma(m).gamma_prime.size()),
                    n - 1 - params_.k[static_cast<size_t>(m)]);
  } else {
    card *= pow_z(params_.q(), n);
    for (int m = 1; m <= ell; ++m) {
      long G = static_cast<long>(params_.gamma(m).gamma_prime.size());
      long k = params_.k[static_cast<size_t>(m)];
      if (m < idx.i) {
        card *= pow_z(G, n - k);
      } else if (m == idx.i) {
        card *= lambda_size(idx.i, idx.j) * pow_z(G, n - 1 - k);
      } else {
        card *= pow_z(G, n - 1 - k);
      }
    }
  }
  return card;
}

bool FolnerAtlas::member(const FolnerIndex& idx, const DeltaElement& x) const {
  if (!valid(idx)) throw std::invalid_argument("member: invalid index");
  long n = idx.n;
  int ell = params_.ell(n - 1);
  if (x.t < 0 || x.t >= n) return false;
  for (const auto& [site, val] : x.f0) {
    (void)val;
    if (site < 0 || site >= n) return false;
  }
  if (static_cast<int>(x.fprime.size()) > params_.levels())
    return false;
  for (int m = 1; m <= static_cast<int>(x.fprime.size()); ++m) {
    const MarkedGamma& g = params_.gamma(m);
    long k = params_.k[static_cast<size_t>(m)];
    for (const auto& [site, val] : x.fprime[static_cast<size_t>(m - 1)]) {
      if (!g.in_gamma_prime(val)) return false;
      if (m > ell) return false;  // level inactive at this box size
      long hi = (m < idx.i) ? n - 1 : n - 2;
      if (m == idx.i && site == n - 1) {
        std::vector<int> lam = lambda_set(idx.i, idx.j);
        if (std::find(lam.begin(), lam.end(), val) == lam.end()) return false;
        continue;
      }
      if (site < k || site > hi) return false;
    }
  }
  return true;
}

std::vector<DeltaElement> FolnerAtlas::enumerate(const FolnerIndex& idx,
                                                 long budget) const {
  mpz_class card = cardinality(idx);
  if (card > budget) {
    std::ostringstream os;
    os << "enumerate: cardinality " << card.get_str()
       << " exceeds budget " << budget;
    throw std::length_error(os.str());
  }
  long n = idx.n;
  int ell = params_.ell(n - 1);

  // one slot per free coordinate: (level, site, value list)
  struct Slot {
    int level;  // 0 = cursor lamp f0, m >= 1 = derived level m
    long site;
    std::vector<int> values;
  };
  std::vector<Slot> slots;
  std::vector<int> all_q(static_cast<size_t>(params_.q()));
  for (int v = 0; v < params_.q(); ++v) all_q[static_cast<size_t>(v)] = v;
  for (long s = 0; s < n; ++s) slots.push_back({0, s, all_q});
  for (int m = 1; m <= ell; ++m) {
    std::vector<int> full = bfs_orders_[static_cast<size_t>(m - 1)];
    long k = params_.k[static_cast<size_t>(m)];
    long hi = (m < idx.i) ? n - 1 : n - 2;
    for (long s = k; s <= hi; ++s) slots.push_back({m, s, full});
    if (m == idx.i) slots.push_back({m, n - 1, lambda_set(idx.i, idx.j)});
  }

  std::vector<DeltaElement> out;
  std::vector<size_t> digit(slots.size(), 0);
  for (;;) {
    for (long t = 0; t < n; ++t) {
      DeltaElement x;
      x.t = t;
      x.fprime.resize(static_cast<size_t>(params_.levels()));
      for (size_t s = 0; s < slots.size(); ++s) {
        int val = slots[s].values[digit[s]];
        if (slots[s].level == 0) {
          if (val != params_.gamma0.gamma.identity) x.f0[slots[s].site] = val;
        } else {
          const MarkedGamma& g = params_.gamma(slots[s].level);
          if (val != g.gamma.identity)
            x.fprime[static_cast<size_t>(slots[s].level - 1)][slots[s].site] =
                val;
        }
      }
      out.push_back(std::move(x));
    }
    size_t p = 0;
    while (p < slots.size() && digit[p] + 1 == slots[p].values.size())
      digit[p++] = 0;
    if (p == slots.size()) break;
    ++digit[p];
  }
  return out;
}

std::vector<DeltaElement> FolnerAtlas::boundary(const FolnerIndex& idx,
                                                long budget) const {
  std::vector<DeltaElement> set = enumerate(idx, budget);
  std::vector<Generator> gens = generator_set(params_);
  std::vector<DeltaElement> out;
  for (const DeltaElement& x : set) {
    for (const Generator& g : gens) {
      DeltaElement y = apply_generator(params_, x, g);
      if (!member(idx, y)) {
        out.push_back(x);
        break;
      }
    }
  }
  return out;
}

mpq_class FolnerAtlas::sofic_defect(const FolnerIndex& idx, int r,
                                    long budget) const {
  if (r < 0) throw std::invalid_argument("sofic_defect: negative radius");
  if (r == 0) return 0;
  long n = idx.n;
  mpz_class card = cardinality(idx);
  if (card > budget) {
    // Only the cursor coordinate can reach outside the box within r steps,
    // and lamp moves never change the labeled ball shape.
    mpq_class q(std::min(2L * r, n), n);
    q.canonicalize();
    return q;
  }

  std::vector<Generator> gens = generator_set(params_);
  // all generator words of length <= r, in a fixed order
  std::vector<std::vector<size_t>> words{{}};
  for (int len = 1; len <= r; ++len) {
    size_t start = 0, stop = words.size();
    while (words[start].size() + 1 < static_cast<size_t>(len)) ++start;
    for (size_t w = start; w < stop; ++w) {
      if (words[w].size() + 1 != static_cast<size_t>(len)) continue;
      for (size_t g = 0; g < gens.size(); ++g) {
        std::vector<size_t> nw = words[w];
        nw.push_back(g);
        words.push_back(std::move(nw));
      }
    }
  }

  // ball signature: per word, the visit-order class of its endpoint, or -1
  // when the path leaves the set (restricted = true)
  auto signature = [&](const DeltaElement& base, bool restricted) {
    std::map<DeltaElement, int> classes;
    std::vector<int> sig;
    sig.reserve(words.size());
    for (const auto& w : words) {
      DeltaElement cur = base;
      bool alive = true;
      for (size_t g : w) {
        cur = apply_generator(params_, cur, gens[g]);
        if (restricted && !member(idx, cur)) {
          alive = false;
          break;
        }
      }
      if (!alive) {
        sig.push_back(-1);
        continue;
      }
      auto [it, fresh] = classes.emplace(cur, static_cast<int>(classes.size()));
      (void)fresh;
      sig.push_back(it->second);
    }
    return sig;
  };

  std::vector<int> model = signature(identity(params_), false);
  std::vector<DeltaElement> set = enumerate(idx, budget);
  long bad = 0;
  for (const DeltaElement& x : set)
    if (signature(x, true) != model) ++bad;
  mpq_class q(bad, static_cast<long>(set.size()));
  q.canonicalize();
  return q;
}

GrowthReport FolnerAtlas::growth_bounds_report(long n_max) const {
  GrowthReport rep;
  rep.C3 = std::numeric_limits<double>::infinity();
  for (long n = 1; n <= n_max; ++n) {
    int ell = params_.ell(n - 1);
    double l_ell = static_cast<double>(params_.l(ell));
    FolnerIndex idx{n, 0, 1};
    for (;;) {
      mpz_class card = cardinality(idx);
      // lamp-product part: drop the cursor factor n
      double ln_prod = ln_mpz(card / n);
      rep.C1 = std::max(rep.C1, ln_prod / (double(n) * l_ell));
      rep.C2 = std::max(rep.C2, ln_mpz(card) / (double(n) * l_ell));
      if (idx == full_index(n)) break;
      idx = successor(idx);
    }
  }
  double kappa = static_cast<double>(params_.kappa);
  for (double p = kappa; p <= static_cast<double>(n_max); p *= kappa) {
    long n = static_cast<long>(std::llround(p));
    double l_big = static_cast<double>(params_.l(params_.ell(n)));
    double lnF = ln_mpz(cardinality(full_index(n)));
    rep.C3 = std::min(rep.C3, lnF / (p / kappa * l_big));
    rep.C4 = std::max(rep.C4, lnF / (p * l_big));
    rep.sandwich_nonempty = true;
  }
  if (!rep.sandwich_nonempty) rep.C3 = 0;
  return rep;
}

std::string GrowthReport::to_text() const {
  std::ostringstream os;
  os << "C1 " << C1 << "\nC2 " << C2 << "\nC3 " << C3 << "\nC4 " << C4
     << "\nsandwich " << (sandwich_nonempty ? "nonempty" : "empty") << "\n";
  return os.str();
}

std::string FolnerAtlas::growth_csv(long n_max) const {
  std::ostringstream os;
  os << "n,i,j,cardinality,ln_cardinality,ratio,boundary_ratio,"
        "sofic_defect_r1\n";
  mpz_class prev = 0;
  for (FolnerIndex idx{1, 0, 1};; idx = successor(idx)) {
    if (idx.n > n_max) break;
    mpz_class card = cardinality(idx);
    os << idx.n << ',' << idx.i << ',' << idx.j << ',' << card.get_str()
       << ',' << ln_mpz(card) << ',';
    if (prev > 0) os << mpq_class(card, prev).get_d();
    os << ',' << (idx.n >= 2 ? 2.0 / double(idx.n) : 1.0) << ','
       << sofic_defect(idx, 1).get_d() << '\n';
    prev = card;
  }
  return os.str();
}

std::vector<std::pair<mpz_class, mpq_class>> FolnerAtlas::isoperimetric_estimate(
    long n_max) const {
  std::vector<std::pair<mpz_class, mpq_class>> out;
  for (long n = 1; n <= n_max; ++n) {
    mpq_class half_n(n, 2);
    half_n.canonicalize();
    out.emplace_back(cardinality(full_index(n)), half_n);
  }
  return out;
}

}  // namespace lab
