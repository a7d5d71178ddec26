#include "lab/dd_coupler.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace lab {

namespace {

mpz_class pow_z(long b, long e) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(b),
                static_cast<unsigned long>(e));
  return r;
}

mpz_class pow_zz(const mpz_class& b, long e) {
  mpz_class r;
  mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), static_cast<unsigned long>(e));
  return r;
}

// smallest s >= 1 with s^N >= G^j (big-integer version)
mpz_class ceil_root_power_z(const mpz_class& G, int j, int N) {
  mpz_class target = pow_zz(G, j);
  mpz_class s;
  mpz_root(s.get_mpz_t(), target.get_mpz_t(), static_cast<unsigned long>(N));
  if (s < 1) s = 1;
  while (pow_zz(s, N) < target) ++s;
  while (s > 1 && pow_zz(s - 1, N) >= target) --s;
  return s;
}

// doubling staircase 1 = s_0 < ... < s_N = G with 2 s_{j-1} <= s_j and
// s_j roughly G^{j/N}; matches the per-level chain of the atlas
std::vector<mpz_class> staircase_sizes_z(const mpz_class& G) {
  std::vector<mpz_class> s{1};
  if (G == 1) return s;
  int N = 0;
  while (mpz_class(2) * pow_zz(2, N) <= G) ++N;
  for (int j = 1; j <= N; ++j) {
    mpz_class v = std::max(mpz_class(2 * s.back()), ceil_root_power_z(G, j, N));
    mpz_class cap = G / pow_zz(2, N - j);
    if (v > cap) v = cap;
    s.push_back(v);
  }
  s.back() = G;
  return s;
}

std::vector<long> base_kappa_digits(long t, long n, int kappa) {
  std::vector<long> d(static_cast<size_t>(n), 0);
  for (long i = 0; i < n; ++i) {
    d[static_cast<size_t>(i)] = t % kappa;
    t /= kappa;
  }
  return d;
}

// steepest log-log slope of phi over a geometric grid; the exponent the
// growth hypothesis compares against 1 - epsilon
double fitted_exponent_of(const FunctionDescriptor& phi) {
  double worst = 0;
  double prev_ln_x = std::log(10.0), prev_ln_y = std::log(phi.eval(10.0));
  for (double ln_x = 2 * std::log(10.0); ln_x <= 14 * std::log(10.0);
       ln_x += std::log(10.0)) {
    double ln_y = std::log(std::max(phi.eval_ln(ln_x), 1e-300));
    worst = std::max(worst, (ln_y - prev_ln_y) / (ln_x - prev_ln_x));
    prev_ln_x = ln_x;
    prev_ln_y = ln_y;
  }
  return worst;
}

}  // namespace

// ---------------------------------------------------------------------------
// Numeric chain view of one side: enough of the nested-set chain to walk it
// and evaluate cardinalities, for concrete and synthetic sides alike.
struct SideView {
  int kappa = 3;
  int q = 6;
  std::vector<long> k;                        // k[0] = 0
  std::vector<long> l;                        // diameters l[m]
  std::vector<mpz_class> gprime;              // |Gamma'_m|, m >= 1
  std::vector<std::vector<mpz_class>> chain;  // staircase per level >= 1

  int levels() const { return static_cast<int>(k.size()) - 1; }

  int ell(long n) const {
    int m = 0;
    while (m + 1 <= levels() && k[static_cast<size_t>(m + 1)] <= n) ++m;
    return m;
  }

  int chain_length(int i) const {
    if (i == 0) return 1;
    return static_cast<int>(chain[static_cast<size_t>(i - 1)].size()) - 1;
  }

  mpz_class lambda_size(int i, int j) const {
    if (i == 0) return j == 0 ? 1 : q;
    return chain[static_cast<size_t>(i - 1)][static_cast<size_t>(j)];
  }

  bool valid(const FolnerIndex& idx) const {
    if (idx.n < 1) return false;
    int e = ell(idx.n - 1);
    if (idx.i < 0 || idx.i > e) return false;
    return idx.j >= 1 && idx.j <= chain_length(idx.i);
  }

  FolnerIndex successor(const FolnerIndex& idx) const {
    if (idx.j < chain_length(idx.i)) return {idx.n, idx.i, idx.j + 1};
    if (idx.i < ell(idx.n - 1)) return {idx.n, idx.i + 1, 1};
    return {idx.n + 1, 0, 1};
  }

  // chain predecessor; (1,0,1) has none
  std::optional<FolnerIndex> predecessor(const FolnerIndex& idx) const {
    if (idx.j > 1) return FolnerIndex{idx.n, idx.i, idx.j - 1};
    if (idx.i > 0) return FolnerIndex{idx.n, idx.i - 1, chain_length(idx.i - 1)};
    if (idx.n == 1) return std::nullopt;
    int e = ell(idx.n - 2);
    return FolnerIndex{idx.n - 1, e, chain_length(e)};
  }

  FolnerIndex full_index(long n) const {
    int e = ell(n - 1);
    return {n, e, chain_length(e)};
  }

  mpz_class cardinality(const FolnerIndex& idx) const {
    if (!valid(idx)) throw std::invalid_argument("cardinality: invalid index");
    long n = idx.n;
    int e = ell(n - 1);
    mpz_class card = n;
    if (idx.i == 0) {
      card *= pow_z(q, n - 1) * lambda_size(0, idx.j);
      for (int m = 1; m <= e; ++m)
        card *= pow_zz(gprime[static_cast<size_t>(m - 1)],
                       n - 1 - k[static_cast<size_t>(m)]);
    } else {
      card *= pow_z(q, n);
      for (int m = 1; m <= e; ++m) {
        const mpz_class& G = gprime[static_cast<size_t>(m - 1)];
        long km = k[static_cast<size_t>(m)];
        if (m < idx.i)
          card *= pow_zz(G, n - km);
        else if (m == idx.i)
          card *= lambda_size(idx.i, idx.j) * pow_zz(G, n - 1 - km);
        else
          card *= pow_zz(G, n - 1 - km);
      }
    }
    return card;
  }

  static SideView from_delta(const DeltaParams& p) {
    SideView v;
    v.kappa = p.kappa;
    v.q = p.q();
    v.k = p.k;
    for (int m = 0; m <= p.levels(); ++m) v.l.push_back(p.l(m));
    for (int m = 1; m <= p.levels(); ++m) {
      mpz_class G = static_cast<long>(p.gamma(m).gamma_prime.size());
      v.gprime.push_back(G);
      v.chain.push_back(staircase_sizes_z(G));
    }
    return v;
  }

  static SideView from_synthetic(const SyntheticSide& s) {
    SideView v;
    v.kappa = s.kappa;
    v.q = s.q;
    v.k = s.k;
    v.l = s.l;
    v.gprime = s.gprime;
    for (const mpz_class& G : s.gprime) v.chain.push_back(staircase_sizes_z(G));
    return v;
  }
};

struct DDCoupler::ChainData {
  SideView src, tgt;
  mpz_class sandwich_card;  // |F_{d,i,j}| on the target chain
  mpz_class pred_card;      // chain predecessor of the sandwich (0 if none)
};

// ---------------------------------------------------------------------------
// DDParams

bool DDParams::hypotheses_hold() const {
  return hypotheses.diameter_summable && epsilon > 0 &&
         hypotheses.fitted_exponent <= 1 - epsilon + 1e-9;
}

namespace {

// diameter-tail verdict: l_m exp(-l_{m-1}) terms nonincreasing past the
// first, filled into a fresh report together with the fitted exponent
HypothesisReport make_verdicts(const std::vector<long>& l,
                               const FunctionDescriptor& phi, double epsilon) {
  HypothesisReport rep;
  rep.epsilon = epsilon;
  rep.has_target = true;
  rep.fitted_exponent = fitted_exponent_of(phi);
  for (size_t m = 1; m < l.size(); ++m) {
    double term = static_cast<double>(l[m]) *
                  std::exp(-static_cast<double>(l[m - 1]));
    rep.diameter_terms.push_back(term);
    rep.diameter_partial_sum += term;
  }
  rep.diameter_summable = true;
  for (size_t i = 2; i < rep.diameter_terms.size(); ++i)
    if (rep.diameter_terms[i] > rep.diameter_terms[i - 1])
      rep.diameter_summable = false;
  return rep;
}

}  // namespace

DDParams DDParams::concrete_pair(DeltaParams src, DeltaParams tgt,
                                 FunctionDescriptor phi, double epsilon) {
  if (src.kappa != tgt.kappa)
    throw std::invalid_argument("concrete_pair: kappa mismatch");
  if (src.q() != tgt.q())
    throw std::invalid_argument("concrete_pair: base-group order mismatch");
  DDParams p;
  std::vector<long> l;
  for (int m = 0; m <= tgt.levels(); ++m) l.push_back(tgt.l(m));
  p.hypotheses = make_verdicts(l, phi, epsilon);
  p.source = std::move(src);
  p.target = std::move(tgt);
  p.phi = std::move(phi);
  p.epsilon = epsilon;
  return p;
}

DDParams DDParams::synthetic_pair(SyntheticSide src, SyntheticSide tgt,
                                  FunctionDescriptor phi, double epsilon) {
  if (src.kappa != tgt.kappa)
    throw std::invalid_argument("synthetic_pair: kappa mismatch");
  if (src.q != tgt.q)
    throw std::invalid_argument("synthetic_pair: base-group order mismatch");
  DDParams p;
  p.hypotheses = make_verdicts(tgt.l, phi, epsilon);
  p.source_num = std::move(src);
  p.target_num = std::move(tgt);
  p.phi = std::move(phi);
  p.epsilon = epsilon;
  return p;
}

// ---------------------------------------------------------------------------
// SpreadingMap

mpz_class SpreadingMap::eval(const mpz_class& x) const {
  if (x < 0 || x > max_in) throw std::domain_error("spreading: out of range");
  if (x < -b) return (a - 1) * x;
  return a * x + b;
}

mpz_class SpreadingMap::invert(const mpz_class& y) const {
  if (y < 0 || y > max_out)
    throw std::domain_error("spreading inverse: out of range");
  mpz_class knee = (-b) * (a - 1);  // value at the breakpoint from below
  if (b < 0 && y < knee) {
    if (y % (a - 1) != 0)
      throw std::domain_error("spreading inverse: value not reached");
    return y / (a - 1);
  }
  mpz_class num = y - b;
  if (num % a != 0)
    throw std::domain_error("spreading inverse: value not reached");
  mpz_class x = num / a;
  if (x > max_in) throw std::domain_error("spreading inverse: value not reached");
  return x;
}

// ---------------------------------------------------------------------------
// DDCoupler construction

DDCoupler::DDCoupler(DDParams params, long n) : params_(std::move(params)), n_(n) {
  if (n < 1) throw std::invalid_argument("DDCoupler: n must be positive");
  bool conc = params_.concrete();
  if (!conc && !params_.source_num.has_value())
    throw std::invalid_argument("DDCoupler: no side data");

  auto data = std::make_shared<ChainData>();
  if (conc) {
    data->src = SideView::from_delta(*params_.source);
    data->tgt = SideView::from_delta(*params_.target);
    source_atlas_ = std::make_shared<FolnerAtlas>(*params_.source);
    target_atlas_ = std::make_shared<FolnerAtlas>(*params_.target);
  } else {
    data->src = SideView::from_synthetic(*params_.source_num);
    data->tgt = SideView::from_synthetic(*params_.target_num);
  }
  const SideView& src = data->src;
  const SideView& tgt = data->tgt;
  if (src.kappa != tgt.kappa) throw std::invalid_argument("kappa mismatch");

  mpz_class box = pow_z(src.kappa, n);
  if (!box.fits_slong_p()) throw std::invalid_argument("DDCoupler: box too large");
  box_ = box.get_si();
  source_size_ = src.cardinality(src.full_index(box_));
  source_top_ = src.ell(box_ - 1);

  // walk the target chain to the first member at least as large
  FolnerIndex idx{1, 0, 1};
  mpz_class card = tgt.cardinality(idx);
  mpz_class prev = 0;
  long steps = 0;
  while (card < source_size_) {
    if (++steps > 2000000)
      throw std::runtime_error("find_target_index: chain budget exhausted");
    prev = card;
    idx = tgt.successor(idx);
    card = tgt.cardinality(idx);
  }
  data->sandwich_card = card;
  if (auto p = tgt.predecessor(idx)) data->pred_card = tgt.cardinality(*p);

  index_.d = idx.n;
  index_.i = idx.i;
  index_.j = idx.j;
  FolnerIndex kidx = tgt.successor(idx);
  index_.D = kidx.n;
  index_.I = kidx.i;
  index_.J = kidx.j;
  index_.Q = index_.D / box_;
  index_.R = index_.D % box_;
  index_.p = 0;
  while (pow_z(tgt.kappa, index_.p) < index_.D) ++index_.p;
  int lD = tgt.ell(index_.D - 1);
  index_.M = (lD >= 1 && tgt.k[static_cast<size_t>(lD)] == index_.D - 1 &&
              index_.I < lD)
                 ? lD - 1
                 : lD;
  index_.Q_at_least_3 = index_.Q >= 3;
  index_.D_exceeds_box = index_.D > box_;
  K_size_ = tgt.cardinality(kidx);
  chain_ = data;

  max_mu_ = source_size_ / (box_ * pow_z(src.q, box_)) - 1;
  if (index_.Q >= 1) {
    max_E_ = max_mu_ / index_.Q;
    max_tt_ = pow_z(src.q, box_) * (max_E_ + 1) - 1;
    max_t_ = K_size_ / index_.D - 1;
    spread_.max_in = max_tt_;
    spread_.max_out = max_t_;
    spread_.a = (max_t_ + max_tt_ - 1) / max_tt_;  // ceiling quotient
    spread_.b = max_t_ - spread_.a * max_tt_;

    std::vector<Int> radices;
    radices.push_back(src.q);
    for (long i = 1; i <= n_; ++i) {
      long w = pow_z(src.kappa, i).get_si() - pow_z(src.kappa, i - 1).get_si();
      radices.push_back(pow_z(src.q, w));
    }
    radices.push_back(max_E_ + 1);
    source_base_ = MixedRadixBase(std::move(radices));
  }
}

void DDCoupler::require_split() const {
  if (index_.Q < 1)
    throw std::domain_error(
        "cursor split degenerate: target box index below kappa^n at this n");
}

void DDCoupler::require_concrete() const {
  if (!params_.concrete())
    throw std::domain_error("operation needs a concrete pair");
}

bool DDCoupler::E_sandwich_holds() const {
  if (index_.Q < 1) return false;
  mpz_class mid = (max_E_ + 1) * index_.D * pow_z(chain_->src.q, box_);
  return chain_->pred_card <= mid && mid <= K_size_;
}

bool DDCoupler::theta_tilde_sandwich_holds() const {
  if (index_.Q < 1) return false;
  mpz_class mid = (max_tt_ + 1) * index_.D;
  return chain_->pred_card <= mid && mid <= K_size_;
}

// ---------------------------------------------------------------------------
// source side

bool DDCoupler::source_member(const DeltaElement& x) const {
  require_concrete();
  return source_atlas_->member(source_atlas_->full_index(box_), x);
}

mpz_class DDCoupler::mu_tilde(const DeltaElement& x) const {
  require_concrete();
  const DeltaParams& p = *params_.source;
  mpz_class mu = 0, w = 1;
  for (int m = 1; m <= source_top_; ++m) {
    const std::vector<int> order = p.gamma(m).gamma_prime_bfs();
    std::vector<long> pos(static_cast<size_t>(p.gamma(m).gamma.order), -1);
    for (size_t j = 0; j < order.size(); ++j)
      pos[static_cast<size_t>(order[j])] = static_cast<long>(j);
    long G = static_cast<long>(order.size());
    const auto& level = x.fprime[static_cast<size_t>(m - 1)];
    for (long s = p.k[static_cast<size_t>(m)]; s <= box_ - 1; ++s) {
      auto it = level.find(s);
      long idx = it == level.end() ? 0 : pos[static_cast<size_t>(it->second)];
      mu += idx * w;
      w *= G;
    }
  }
  return mu;
}

std::pair<mpz_class, long> DDCoupler::extract_EP(const DeltaElement& x) const {
  require_split();
  mpz_class mu = mu_tilde(x);
  mpz_class E = mu / index_.Q;
  mpz_class P = mu % index_.Q;
  return {E, P.get_si()};
}

mpz_class DDCoupler::theta_tilde(const DeltaElement& x) const {
  require_split();
  require_concrete();
  if (!source_member(x)) throw std::domain_error("theta_tilde: not a member");
  const DeltaParams& p = *params_.source;
  long q = p.q();
  std::vector<Interval> blocks = block_intervals(x.t, n_, p.kappa);
  auto f0_at = [&](long site) -> long {
    auto it = x.f0.find(site);
    return it == x.f0.end() ? 0 : it->second;
  };
  std::vector<Int> digits(source_base_.size(), 0);
  digits[0] = f0_at(x.t);
  for (long i = 1; i <= n_; ++i) {
    mpz_class nu = 0, w = 1;
    const Interval& big = blocks[static_cast<size_t>(i)];
    const Interval& small = blocks[static_cast<size_t>(i - 1)];
    for (long s = big.lo; s <= big.hi; ++s) {
      if (s >= small.lo && s <= small.hi) continue;
      nu += f0_at(s) * w;
      w *= q;
    }
    digits[static_cast<size_t>(i)] = nu;
  }
  digits.back() = extract_EP(x).first;
  return recompose(DigitVector{std::move(digits), source_base_});
}

bool DDCoupler::triple_in_box_union(long t, const mpz_class& tt, long P) const {
  require_split();
  if (t < 0 || t >= box_) return false;
  if (tt < 0 || P < 0) return false;
  mpz_class corner = pow_z(chain_->src.q, box_) * max_E_;
  if (tt < corner) return P < index_.Q;
  if (tt > max_tt_) return false;
  return P <= max_mu_ - index_.Q * max_E_;
}

// ---------------------------------------------------------------------------
// cursor maps

long DDCoupler::cursor_map(long P, long t) const {
  require_split();
  if (P < 0 || P >= index_.Q || t < 0 || t >= box_)
    throw std::out_of_range("cursor_map: arguments out of range");
  if (P < index_.Q - 1) return P * box_ + t;
  if (t < index_.R) return P * box_ + 2 * t;
  return P * box_ + index_.R + t;
}

bool DDCoupler::in_cursor_image(long v) const {
  require_split();
  if (v < 0 || v >= index_.D) return false;
  long last = (index_.Q - 1) * box_;
  if (v < last) return true;
  long o = v - last;
  if (o >= 2 * index_.R) return true;
  return o % 2 == 0;
}

bool DDCoupler::cursor_image_gap_free() const {
  require_split();
  for (long v = 1; v < index_.D; ++v)
    if (!in_cursor_image(v) && !in_cursor_image(v - 1)) return false;
  return in_cursor_image(0);
}

long DDCoupler::chi(long v) const {
  require_split();
  if (v < 0 || v >= index_.D) throw std::out_of_range("chi: cursor out of range");
  while (!in_cursor_image(v)) --v;  // predecessor is in the image
  long last = (index_.Q - 1) * box_;
  if (v < last) return v;
  long o = v - last;
  long t = o >= 2 * index_.R ? o - index_.R : o / 2;
  return last + t;
}

// ---------------------------------------------------------------------------
// target blocks and base

std::vector<Interval> DDCoupler::ideal_blocks(long P, long t) const {
  require_split();
  if (P < 0 || P >= index_.Q || t < 0 || t >= box_)
    throw std::out_of_range("ideal_blocks: arguments out of range");
  std::vector<Interval> src_blocks = block_intervals(t, n_, chain_->src.kappa);
  std::vector<Interval> out;
  for (int i = 0; i <= index_.p; ++i) {
    if (i == index_.p) {
      out.push_back({0, index_.Q * box_ - 1});
    } else if (i <= n_) {
      Interval b = src_blocks[static_cast<size_t>(i)];
      out.push_back({P * box_ + b.lo, P * box_ + b.hi});
    } else {
      mpz_class ki = pow_z(chain_->src.kappa, i);
      mpz_class reach = pow_z(chain_->src.kappa, i - static_cast<long>(n_));
      if (P + 1 >= reach)
        out.push_back({(P + 1) * box_ - ki.get_si(), (P + 1) * box_ - 1});
      else
        out.push_back({0, ki.get_si() - 1});
    }
  }
  return out;
}

std::vector<Interval> DDCoupler::real_blocks(long P, long t) const {
  std::vector<Interval> ideal = ideal_blocks(P, t);
  std::vector<Interval> out;
  for (const Interval& b : ideal) {
    long lo = cursor_map(b.lo / box_, b.lo % box_);
    long hi = cursor_map(b.hi / box_, b.hi % box_);
    if (hi + 1 < index_.D && !in_cursor_image(hi + 1)) ++hi;
    out.push_back({lo, hi});
  }
  return out;
}

MixedRadixBase DDCoupler::target_base(long P, long t) const {
  const SideView& tgt = chain_->tgt;
  std::vector<Interval> blocks = real_blocks(P, t);
  std::vector<Int> radices;
  radices.push_back(tgt.q);
  // the companion site of a doubled innermost fiber is charged to the first
  // window, so every prefix product equals q^(block cardinality)
  long prev_card = 1;
  for (int i = 1; i <= index_.p; ++i) {
    long card = blocks[static_cast<size_t>(i)].card();
    radices.push_back(pow_z(tgt.q, card - prev_card));
    prev_card = card;
  }
  for (int m = 1; m <= index_.M; ++m) {
    const mpz_class& G = tgt.gprime[static_cast<size_t>(m - 1)];
    long km = tgt.k[static_cast<size_t>(m)];
    if (index_.I >= 1 && m < index_.I)
      radices.push_back(pow_zz(G, index_.D - km));
    else if (index_.I >= 1 && m == index_.I)
      radices.push_back(pow_zz(G, index_.D - 1 - km) *
                        tgt.lambda_size(index_.I, index_.J));
    else
      radices.push_back(pow_zz(G, index_.D - 1 - km));
  }
  return MixedRadixBase(std::move(radices));
}

bool DDCoupler::enlarged_member(const DeltaElement& g) const {
  require_concrete();
  return target_atlas_->member({index_.D, index_.I, index_.J}, g);
}

// ---------------------------------------------------------------------------
// target numbering

namespace {

// per-digit site lists of the lamp part: window 0 is the cursor site, then
// one window per block ring
std::vector<std::vector<long>> lamp_windows(const std::vector<Interval>& blocks,
                                            long v) {
  std::vector<std::vector<long>> w;
  w.push_back({v});
  std::vector<char> used(static_cast<size_t>(blocks.back().card()), 0);
  used[static_cast<size_t>(v)] = 1;
  for (size_t i = 1; i < blocks.size(); ++i) {
    std::vector<long> sites;
    for (long s = blocks[i].lo; s <= blocks[i].hi; ++s) {
      if (used[static_cast<size_t>(s)]) continue;
      used[static_cast<size_t>(s)] = 1;
      sites.push_back(s);
    }
    w.push_back(std::move(sites));
  }
  return w;
}

}  // namespace

mpz_class DDCoupler::vartheta(const DeltaElement& g) const {
  require_concrete();
  long v = g.t;
  const DeltaParams& p = *params_.target;
  long c = chi(v);
  long P = c / box_, t = c % box_;
  MixedRadixBase base = target_base(P, t);
  std::vector<std::vector<long>> windows = lamp_windows(real_blocks(P, t), v);

  auto f0_at = [&](long site) -> long {
    auto it = g.f0.find(site);
    return it == g.f0.end() ? 0 : it->second;
  };
  std::vector<Int> digits(base.size(), 0);
  long q = p.q();
  for (int i = 0; i <= index_.p; ++i) {
    mpz_class nu = 0, w = 1;
    for (long s : windows[static_cast<size_t>(i)]) {
      nu += f0_at(s) * w;
      w *= q;
    }
    digits[static_cast<size_t>(i)] = nu;
  }

  for (int m = 1; m <= index_.M; ++m) {
    const std::vector<int> order = p.gamma(m).gamma_prime_bfs();
    std::vector<long> pos(static_cast<size_t>(p.gamma(m).gamma.order), -1);
    for (size_t j = 0; j < order.size(); ++j)
      pos[static_cast<size_t>(order[j])] = static_cast<long>(j);
    long G = static_cast<long>(order.size());
    const auto& level = g.fprime[static_cast<size_t>(m - 1)];
    auto pos_at = [&](long site) -> long {
      auto it = level.find(site);
      return it == level.end() ? 0 : pos[static_cast<size_t>(it->second)];
    };
    long km = p.k[static_cast<size_t>(m)];
    mpz_class mu = 0, w = 1;
    if (index_.I >= 1 && m < index_.I) {
      for (long s = km; s <= index_.D - 1; ++s) {
        mu += pos_at(s) * w;
        w *= G;
      }
    } else if (index_.I >= 1 && m == index_.I) {
      for (long s = km; s <= index_.D - 2; ++s) {
        mu += pos_at(s) * w;
        w *= G;
      }
      mu += pos_at(index_.D - 1) * w;  // restricted slot, chain-prefix index
    } else {
      for (long s = km; s <= index_.D - 2; ++s) {
        mu += pos_at(s) * w;
        w *= G;
      }
    }
    digits[static_cast<size_t>(index_.p + m)] = mu;
  }
  return recompose(DigitVector{std::move(digits), base});
}

DeltaElement DDCoupler::vartheta_decode(const mpz_class& z, long v) const {
  require_concrete();
  if (v < 0 || v >= index_.D)
    throw std::out_of_range("vartheta_decode: cursor out of range");
  const DeltaParams& p = *params_.target;
  long c = chi(v);
  long P = c / box_, t = c % box_;
  MixedRadixBase base = target_base(P, t);
  if (z < 0 || z >= base.product())
    throw std::domain_error("vartheta_decode: value out of range");
  std::vector<std::vector<long>> windows = lamp_windows(real_blocks(P, t), v);
  DigitVector d = lab::decompose(z, base);

  DeltaElement g;
  g.t = v;
  g.fprime.resize(static_cast<size_t>(p.levels()));
  long q = p.q();
  for (int i = 0; i <= index_.p; ++i) {
    mpz_class nu = d.digits[static_cast<size_t>(i)];
    for (long s : windows[static_cast<size_t>(i)]) {
      mpz_class digit = nu % q;
      nu /= q;
      if (digit != 0) g.f0[s] = static_cast<int>(digit.get_si());
    }
  }
  for (int m = 1; m <= index_.M; ++m) {
    const std::vector<int> order = p.gamma(m).gamma_prime_bfs();
    long G = static_cast<long>(order.size());
    long km = p.k[static_cast<size_t>(m)];
    mpz_class mu = d.digits[static_cast<size_t>(index_.p + m)];
    auto put = [&](long site, long idx) {
      int val = order[static_cast<size_t>(idx)];
      if (val != p.gamma(m).gamma.identity)
        g.fprime[static_cast<size_t>(m - 1)][site] = val;
    };
    long hi = (index_.I >= 1 && m < index_.I) ? index_.D - 1 : index_.D - 2;
    for (long s = km; s <= hi; ++s) {
      mpz_class idx = mu % G;
      mu /= G;
      put(s, idx.get_si());
    }
    if (index_.I >= 1 && m == index_.I) put(index_.D - 1, mu.get_si());
  }
  return g;
}

// ---------------------------------------------------------------------------
// carve and injection

CarveReport DDCoupler::carve() const {
  require_split();
  CarveReport rep;
  rep.source_size = source_size_;
  rep.enlarged_size = K_size_;
  rep.removed_bound = index_.D * pow_z(chain_->tgt.q, 3 + box_);
  rep.theta_threshold = spread_.eval(pow_z(chain_->src.q, box_) * max_E_);
  mpz_class chi_thr = box_ * (max_mu_ - index_.Q * max_E_ + 1);
  rep.chi_threshold = chi_thr.get_si();

  // per cursor, the numbering is onto [0, max_theta], so the removed count
  // factors into (cursors past the chi threshold) x (values past the
  // theta threshold)
  mpz_class theta_count = max_t_ + 1 - rep.theta_threshold;
  if (theta_count < 0) theta_count = 0;
  long cursor_count = 0;
  if (rep.chi_threshold < index_.Q * box_) {
    long first = cursor_map(rep.chi_threshold / box_, rep.chi_threshold % box_);
    cursor_count = index_.D - first;
  }
  rep.removed = theta_count * cursor_count;
  rep.carved_size = K_size_ - rep.removed;
  rep.proportional = source_size_ <= K_size_ &&
                     K_size_ <= 4 * chain_->tgt.q * chain_->tgt.q * source_size_;
  return rep;
}

bool DDCoupler::carved_member(const DeltaElement& g) const {
  require_concrete();
  if (!enlarged_member(g)) return false;
  CarveReport rep = carve();
  if (chi(g.t) < rep.chi_threshold) return true;
  return vartheta(g) < rep.theta_threshold;
}

DeltaElement DDCoupler::inject(const DeltaElement& x) const {
  require_split();
  if (!source_member(x)) throw std::domain_error("inject: not a member");
  auto [E, P] = extract_EP(x);
  (void)E;
  long v = cursor_map(P, x.t);
  return vartheta_decode(spread_.eval(theta_tilde(x)), v);
}

long DDCoupler::density_radius(long budget) const {
  require_concrete();
  std::vector<DeltaElement> big =
      target_atlas_->enumerate({index_.D, index_.I, index_.J}, budget);
  CarveReport rep = carve();
  std::map<DeltaElement, long> dist;
  for (DeltaElement& g : big) {
    if (chi(g.t) >= rep.chi_threshold && vartheta(g) >= rep.theta_threshold)
      continue;
    dist.emplace(std::move(g), -1);
  }

  std::deque<const DeltaElement*> queue;
  std::vector<DeltaElement> sources =
      source_atlas_->enumerate(source_atlas_->full_index(box_), budget);
  for (const DeltaElement& x : sources) {
    auto it = dist.find(inject(x));
    if (it == dist.end())
      throw std::logic_error("density_radius: image escapes the carved set");
    if (it->second != 0) {
      it->second = 0;
      queue.push_back(&it->first);
    }
  }

  std::vector<Generator> gens = generator_set(*params_.target);
  while (!queue.empty()) {
    const DeltaElement* y = queue.front();
    queue.pop_front();
    long d = dist.at(*y);
    for (const Generator& s : gens) {
      DeltaElement z = apply_generator(*params_.target, *y, s);
      auto it = dist.find(z);
      if (it == dist.end() || it->second >= 0) continue;
      it->second = d + 1;
      queue.push_back(&it->first);
    }
  }
  long radius = 0;
  for (const auto& [g, d] : dist) {
    (void)g;
    if (d < 0) return -1;  // disconnected remainder; report, never mask
    radius = std::max(radius, d);
  }
  return radius;
}

// ---------------------------------------------------------------------------
// audits

std::string CouplingAudit::csv() const {
  std::ostringstream os;
  os << "m,count,paper_majorant,fitted_constant,partial_sum\n";
  for (const AuditRow& r : rows)
    os << r.m << ',' << r.count.get_str() << ',' << r.paper_majorant << ','
       << r.fitted_constant << ',' << r.partial_sum << '\n';
  return os.str();
}

CouplingAudit DDCoupler::distance_audit(const Generator& s, long budget) const {
  require_concrete();
  require_split();
  if (s.kind == Generator::cursor && s.shift != 1)
    throw std::invalid_argument("distance_audit: cursor audits use shift +1");
  const DeltaParams& tp = *params_.target;
  const SideView& tgt = chain_->tgt;
  std::vector<DeltaElement> set =
      source_atlas_->enumerate(source_atlas_->full_index(box_), budget);

  CouplingAudit audit;
  audit.exhaustive = true;
  audit.bounds_certified = true;
  int top = index_.p + index_.M;
  std::map<int, mpz_class> counts;
  long audited = 0;
  for (const DeltaElement& x : set) {
    if (x.t > box_ - 2) continue;  // interior cursors only
    ++audited;
    DeltaElement xs = apply_generator(*params_.source, x, s);
    auto [E, P] = extract_EP(x);
    (void)E;
    mpz_class h1 = spread_.eval(theta_tilde(x));
    mpz_class h2 = spread_.eval(theta_tilde(xs));
    mpz_class lo = std::min(h1, h2);
    MixedRadixBase base = target_base(P, x.t);

    std::size_t start = 2;
    if (s.kind == Generator::cursor) {
      int i0 = carry_position(x.t, n_, tgt.kappa);
      if (i0 > 0) start = static_cast<std::size_t>(i0 + 1);
    }
    int m;
    if (start + 1 >= base.size()) {
      m = top + 1;  // no digit above the start index to absorb a carry
    } else {
      try {
        m = static_cast<int>(carry_index(lo, start, base));
      } catch (const std::domain_error&) {
        m = top + 1;  // saturated above the start index
      }
    }
    if (m <= static_cast<int>(start)) audit.depth_zero_below_start = false;
    counts[m] += 1;

    DeltaElement y1 = inject(x);
    DeltaElement y2 = inject(xs);
    long cert = distance_upper(tp, y1, y2,
                               y1.fprime == y2.fprime ? DistanceMode::interval
                                                      : DistanceMode::level);
    audit.max_distance = std::max(audit.max_distance, cert);
    double shape;
    if (m <= index_.p) {
      shape = 6 * std::pow(static_cast<double>(tgt.kappa), m);
      if (cert > shape) audit.bounds_certified = false;
    } else {
      int lev = std::min(m - index_.p, static_cast<int>(tgt.l.size()) - 1);
      shape = static_cast<double>(index_.D) *
              static_cast<double>(tgt.l[static_cast<size_t>(lev)]);
    }
    audit.max_shape_ratio =
        std::max(audit.max_shape_ratio, static_cast<double>(cert) / shape);
  }

  // closed-form majorants per depth, with the constant each count needs
  double lnK = ln_mpz(K_size_);
  double ln_q = std::log(static_cast<double>(tgt.q));
  double ln_kappa = std::log(static_cast<double>(tgt.kappa));
  double total = static_cast<double>(audited);
  double partial = 0;
  const FunctionDescriptor& phi = params_.phi;
  for (const auto& [m, count] : counts) {
    AuditRow row;
    row.m = m;
    row.count = count;
    double ln_maj;
    if (s.kind == Generator::cursor) {
      if (m <= n_ + 1)
        ln_maj = lnK - m * ln_kappa;
      else if (m <= index_.p)
        ln_maj = lnK - n_ * ln_kappa +
                 (2.0 * static_cast<double>(box_) -
                  std::pow(static_cast<double>(tgt.kappa), m - 1)) *
                     ln_q;
      else
        ln_maj = lnK - n_ * ln_kappa +
                 (2.0 * static_cast<double>(box_) - index_.D) * ln_q;
    } else {
      if (m <= 2)
        ln_maj = -std::numeric_limits<double>::infinity();
      else if (m <= index_.p)
        ln_maj = lnK - std::pow(static_cast<double>(tgt.kappa), m - 1) * ln_q;
      else
        ln_maj = lnK - index_.D * ln_q;
    }
    if (m > index_.p + 1) {
      int lev = std::min(m - 1 - index_.p, static_cast<int>(tgt.l.size()) - 1);
      ln_maj -= static_cast<double>(tgt.l[static_cast<size_t>(lev)]);
    }
    row.paper_majorant = std::exp(ln_maj);
    row.fitted_constant =
        row.paper_majorant > 0
            ? mpz_get_d(count.get_mpz_t()) / row.paper_majorant
            : std::numeric_limits<double>::infinity();
    double weight;
    if (m <= index_.p)
      weight = phi.eval_ln(m * ln_kappa);
    else if (m == index_.p + 1)
      weight = phi.eval_ln(index_.p * ln_kappa);
    else {
      int lev = std::min(m - index_.p, static_cast<int>(tgt.l.size()) - 1);
      weight = phi.eval_ln(std::log(static_cast<double>(index_.D)) +
                           std::log(static_cast<double>(
                               tgt.l[static_cast<size_t>(lev)])));
    }
    partial += weight * mpz_get_d(count.get_mpz_t()) / total;
    row.partial_sum = partial;
    audit.rows.push_back(std::move(row));
  }
  return audit;
}

IntegrabilityTriple DDCoupler::integrability_sum(long R, long budget) const {
  require_split();
  IntegrabilityTriple out;
  out.hypotheses_hold = params_.hypotheses_hold();
  const SideView& tgt = chain_->tgt;
  double ln_q = std::log(static_cast<double>(tgt.q));
  double ln_kappa = std::log(static_cast<double>(tgt.kappa));
  const FunctionDescriptor& phi = params_.phi;

  auto weight = [&](int m) -> double {
    double w;
    if (m <= index_.p)
      w = phi.eval_ln(m * ln_kappa);
    else if (m == index_.p + 1)
      w = phi.eval_ln(index_.p * ln_kappa);
    else {
      int lev = std::min(m - index_.p, static_cast<int>(tgt.l.size()) - 1);
      w = phi.eval_ln(std::log(static_cast<double>(index_.D)) +
                      std::log(static_cast<double>(
                          tgt.l[static_cast<size_t>(lev)])));
    }
    return w;
  };
  auto in_budget = [&](int m) {
    double bound = m <= index_.p
                       ? 6 * std::pow(static_cast<double>(tgt.kappa), m)
                       : static_cast<double>(index_.D) *
                             static_cast<double>(tgt.l[static_cast<size_t>(
                                 std::min(m - index_.p,
                                          static_cast<int>(tgt.l.size()) - 1))]);
    return bound <= static_cast<double>(R);
  };

  if (params_.concrete() && source_size_ <= budget) {
    out.exhaustive = true;
    std::vector<Generator> gens = generator_set(*params_.source);
    for (const Generator& g : gens) {
      if (g.kind == Generator::cursor && g.shift != 1) continue;
      CouplingAudit audit = distance_audit(g, budget);
      double total = 0;
      for (const AuditRow& r : audit.rows) total += mpz_get_d(r.count.get_mpz_t());
      double head = 0, seam = 0, tail = 0;
      for (const AuditRow& r : audit.rows) {
        if (!in_budget(r.m)) continue;
        double mass = weight(r.m) * mpz_get_d(r.count.get_mpz_t()) / total;
        if (r.m <= index_.p)
          head += mass;
        else if (r.m == index_.p + 1)
          seam += mass;
        else
          tail += mass;
      }
      out.head = std::max(out.head, head);
      out.seam = std::max(out.seam, seam);
      out.tail = std::max(out.tail, tail);
    }
    return out;
  }

  // closed majorants: enumeration bounds with |K|/|G| <= 4 q^2
  double ratio = 4.0 * tgt.q * tgt.q;
  for (int m = 3; m <= index_.p; ++m)
    out.head += weight(m) * ratio *
                std::exp(-std::pow(static_cast<double>(tgt.kappa), m - 1) * ln_q);
  for (int m = 1; m <= std::min<long>(n_ + 1, index_.p); ++m)
    out.head += weight(m) * ratio * std::exp(-m * ln_kappa);
  for (int m = static_cast<int>(n_) + 2; m <= index_.p; ++m)
    out.head +=
        weight(m) * ratio *
        std::exp(-n_ * ln_kappa +
                 (2.0 * static_cast<double>(box_) -
                  std::pow(static_cast<double>(tgt.kappa), m - 1)) *
                     ln_q);
  double seam_lamp = ratio * std::exp(-index_.D * ln_q);
  double seam_cursor =
      ratio * std::exp(-n_ * ln_kappa +
                       (2.0 * static_cast<double>(box_) - index_.D) * ln_q);
  out.seam = weight(index_.p + 1) * (seam_lamp + seam_cursor);
  for (int m = index_.p + 2; m <= index_.p + index_.M; ++m) {
    int lev = std::min(m - 1 - index_.p, static_cast<int>(tgt.l.size()) - 1);
    double damp = std::exp(-static_cast<double>(tgt.l[static_cast<size_t>(lev)]));
    out.tail += weight(m) * (seam_lamp + seam_cursor) * damp;
  }
  return out;
}

}  // namespace lab
