#include "lab/delta_core.hpp"

#include <algorithm>
#include <deque>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace lab {

DeltaParams::DeltaParams(int kappa_, std::vector<long> k_, MarkedGamma gamma0_,
                         std::vector<MarkedGamma> gammas_)
    : kappa(kappa_), k(std::move(k_)), gamma0(std::move(gamma0_)),
      gammas(std::move(gammas_)) {
  if (kappa < 2) throw std::invalid_argument("kappa too small");
  if (k.empty() || k[0] != 0) throw std::invalid_argument("k_0 must be 0");
  for (std::size_t m = 1; m < k.size(); ++m) {
    if (m >= 2 && k[m] < 2 * k[m - 1])
      throw std::invalid_argument("spacing must at least double");
    if (k[m] <= k[m - 1]) throw std::invalid_argument("k must increase");
  }
  if (gammas.size() + 1 != k.size())
    throw std::invalid_argument("one marked group per positive level");
  for (const auto& mg : gammas)
    if (mg.A.size() != gamma0.A.size() || mg.B.size() != gamma0.B.size())
      throw std::invalid_argument("marking orders differ from level 0");
}

int DeltaParams::ell(long n) const {
  int m = 0;
  while (m + 1 <= levels() && k[m + 1] <= n) ++m;
  return m;
}

DeltaParams DeltaParams::lamplighter(int a_order, int b_order) {
  return DeltaParams(3, {0}, marked_direct_product(a_order, b_order), {});
}

DeltaElement identity(const DeltaParams& p) {
  DeltaElement e;
  e.fprime.resize(p.levels());
  return e;
}

std::vector<Generator> generator_set(const DeltaParams& p) {
  std::vector<Generator> out;
  out.push_back({Generator::cursor, +1, 0});
  out.push_back({Generator::cursor, -1, 0});
  for (int i = 1; i < static_cast<int>(p.gamma0.A.size()); ++i)
    out.push_back({Generator::a_type, 0, i});
  for (int j = 1; j < static_cast<int>(p.gamma0.B.size()); ++j)
    out.push_back({Generator::b_type, 0, j});
  return out;
}

DeltaElement generator_element(const DeltaParams& p, const Generator& s) {
  DeltaElement e = identity(p);
  switch (s.kind) {
    case Generator::cursor:
      e.t = s.shift;
      break;
    case Generator::a_type:
      e.f0[0] = p.gamma0.A[s.power];
      break;
    case Generator::b_type:
      e.f0[0] = p.gamma0.B[s.power];
      break;
  }
  return e;
}

namespace {

void set_or_erase(std::map<long, int>& m, long site, int val, int identity_id) {
  if (val == identity_id)
    m.erase(site);
  else
    m[site] = val;
}

int map_at(const std::map<long, int>& m, long site, int identity_id) {
  auto it = m.find(site);
  return it == m.end() ? identity_id : it->second;
}

// theta^A_m / theta^B_m images in Gamma_m of a level-0 value.
int theta_a_in(const DeltaParams& p, int m, int f0val) {
  return p.gamma(m).A[p.gamma0.theta[f0val].first];
}
int theta_b_in(const DeltaParams& p, int m, int f0val) {
  return p.gamma(m).B[p.gamma0.theta[f0val].second];
}

}  // namespace

DeltaElement apply_generator(const DeltaParams& p, const DeltaElement& x,
                             const Generator& s) {
  DeltaElement out = x;
  if (s.kind == Generator::cursor) {
    out.t += s.shift;
    return out;
  }
  const FiniteGroup& G0 = p.gamma0.gamma;
  int gen = s.kind == Generator::a_type ? p.gamma0.A[s.power]
                                        : p.gamma0.B[s.power];
  int val = G0.prod(map_at(out.f0, out.t, G0.identity), gen);
  set_or_erase(out.f0, out.t, val, G0.identity);
  return out;
}

std::map<long, int> level_map(const DeltaParams& p, const DeltaElement& x, int m) {
  if (m == 0) return x.f0;
  const FiniteGroup& G = p.gamma(m).gamma;
  const long km = p.k[m];
  std::map<long, int> fm;
  auto touch = [&](long site) {
    if (fm.count(site)) return;
    int v = map_at(x.fprime[m - 1], site, G.identity);
    v = G.prod(v, theta_a_in(p, m, map_at(x.f0, site, p.gamma0.gamma.identity)));
    v = G.prod(v, theta_b_in(p, m, map_at(x.f0, site - km, p.gamma0.gamma.identity)));
    if (v != G.identity) fm[site] = v;
    else fm.emplace(site, G.identity);  // mark visited; pruned below
  };
  for (const auto& [site, _] : x.fprime[m - 1]) touch(site);
  for (const auto& [site, _] : x.f0) {
    touch(site);
    touch(site + km);
  }
  for (auto it = fm.begin(); it != fm.end();)
    it = it->second == G.identity ? fm.erase(it) : std::next(it);
  return fm;
}

namespace {

// Canonical data from full level maps: f'_m(x) = f_m(x) * (theta parts)^{-1}.
DeltaElement extract_canonical(const DeltaParams& p, long t,
                               const std::map<long, int>& h0,
                               const std::vector<std::map<long, int>>& h) {
  DeltaElement out;
  out.t = t;
  out.f0 = h0;
  out.fprime.resize(p.levels());
  for (int m = 1; m <= p.levels(); ++m) {
    const FiniteGroup& G = p.gamma(m).gamma;
    const long km = p.k[m];
    std::map<long, int> sites = h[m - 1];
    for (const auto& [site, _] : h0) {
      sites.emplace(site, G.identity);
      sites.emplace(site + km, G.identity);
    }
    for (const auto& [site, _] : sites) {
      int v = map_at(h[m - 1], site, G.identity);
      int th = G.prod(theta_a_in(p, m, map_at(h0, site, p.gamma0.gamma.identity)),
                      theta_b_in(p, m, map_at(h0, site - km, p.gamma0.gamma.identity)));
      int fp = G.prod(v, G.inv[th]);
      if (fp != G.identity) {
        if (!p.gamma(m).in_gamma_prime(fp))
          throw std::logic_error("derived part escapes gamma_prime");
        out.fprime[m - 1][site] = fp;
      }
    }
  }
  return out;
}

}  // namespace

DeltaElement multiply(const DeltaParams& p, const DeltaElement& x,
                      const DeltaElement& y) {
  const long shift = x.t;
  // level 0
  std::map<long, int> h0 = x.f0;
  const FiniteGroup& G0 = p.gamma0.gamma;
  for (const auto& [site, v] : y.f0) {
    int cur = map_at(h0, site + shift, G0.identity);
    set_or_erase(h0, site + shift, G0.prod(cur, v), G0.identity);
  }
  // positive levels: full maps, pointwise product with shift
  std::vector<std::map<long, int>> h(p.levels());
  for (int m = 1; m <= p.levels(); ++m) {
    const FiniteGroup& G = p.gamma(m).gamma;
    auto xm = level_map(p, x, m);
    auto ym = level_map(p, y, m);
    std::map<long, int> hm = xm;
    for (const auto& [site, v] : ym) {
      int cur = map_at(hm, site + shift, G.identity);
      set_or_erase(hm, site + shift, G.prod(cur, v), G.identity);
    }
    h[m - 1] = std::move(hm);
  }
  return extract_canonical(p, x.t + y.t, h0, h);
}

DeltaElement inverse(const DeltaParams& p, const DeltaElement& x) {
  std::map<long, int> h0;
  const FiniteGroup& G0 = p.gamma0.gamma;
  for (const auto& [site, v] : x.f0) h0[site - x.t] = G0.inv[v];
  std::vector<std::map<long, int>> h(p.levels());
  for (int m = 1; m <= p.levels(); ++m) {
    const FiniteGroup& G = p.gamma(m).gamma;
    for (const auto& [site, v] : level_map(p, x, m))
      h[m - 1][site - x.t] = G.inv[v];
  }
  return extract_canonical(p, -x.t, h0, h);
}

Interval range_interval(const DeltaParams& p, const DeltaElement& x) {
  Interval r{0, 0};
  auto grow = [&](long s) {
    r.lo = std::min(r.lo, s);
    r.hi = std::max(r.hi, s);
  };
  grow(x.t);
  for (const auto& [site, _] : x.f0) grow(site);
  for (int m = 1; m <= p.levels(); ++m)
    for (const auto& [site, _] : x.fprime[m - 1]) {
      grow(site);
      grow(site - p.k[m]);
    }
  return r;
}

long essential_contribution(const DeltaParams& p, const DeltaElement& x, int m) {
  if (m < 0 || m > p.levels()) throw std::out_of_range("level index");
  const long km = m == 0 ? 0 : p.k[m];
  if (km == 0) return 0;
  const long w = std::max<long>(km / 2, 1);  // window width floor(k_m / 2)
  const FiniteGroup& G = p.gamma(m).gamma;
  std::vector<int> gens;
  if (p.gamma(m).A.size() > 1) gens.push_back(p.gamma(m).a_gen);
  if (p.gamma(m).B.size() > 1) gens.push_back(p.gamma(m).b_gen);
  // word lengths in Gamma_m
  std::vector<int> dist(G.order, -1);
  {
    std::deque<int> q;
    dist[G.identity] = 0;
    q.push_back(G.identity);
    while (!q.empty()) {
      int u = q.front();
      q.pop_front();
      for (int g : gens)
        for (int v : {G.prod(u, g), G.prod(u, G.inv[g])})
          if (dist[v] < 0) {
            dist[v] = dist[u] + 1;
            q.push_back(v);
          }
    }
  }
  auto fm = level_map(p, x, m);
  // range of (f_m, t): hull of 0, t, supp(f_m)
  long lo = std::min<long>(0, x.t), hi = std::max<long>(0, x.t);
  for (const auto& [site, _] : fm) {
    lo = std::min(lo, site);
    hi = std::max(hi, site);
  }
  auto window_of = [&](long s) {
    // index j with s in [j w, (j+1) w - 1]
    long j = s >= 0 ? s / w : -(((-s) + w - 1) / w);
    return j;
  };
  long j_lo = window_of(lo), j_hi = window_of(hi);
  long total = 0;
  for (long j = j_lo; j <= j_hi; ++j) {
    long best = 0;
    for (long s = j * w; s < (j + 1) * w; ++s) {
      auto it = fm.find(s);
      if (it == fm.end()) continue;
      best = std::max<long>(best, std::max(0, dist[it->second] - 1));
    }
    total += best;
  }
  return km * total;
}

long word_length_upper(const DeltaParams& p, const DeltaElement& x) {
  Interval r = range_interval(p, x);
  long sum = 0;
  int top = p.ell(r.diam());
  for (int m = 0; m <= top; ++m) {
    auto fm = level_map(p, x, m);
    bool trivial = fm.empty() && x.t == 0;
    long range_card = trivial ? 0 : r.card();
    sum += 9 * (range_card + essential_contribution(p, x, m));
  }
  return 500 * sum;
}

namespace {

std::string element_key(const DeltaElement& x) {
  std::ostringstream os;
  os << x.t << '|';
  for (const auto& [s, v] : x.f0) os << s << ':' << v << ',';
  for (const auto& lvl : x.fprime) {
    os << ';';
    for (const auto& [s, v] : lvl) os << s << ':' << v << ',';
  }
  return os.str();
}

}  // namespace

std::optional<long> word_length_exact(const DeltaParams& p,
                                      const DeltaElement& x, long limit,
                                      long pad) {
  DeltaElement e = identity(p);
  if (x == e) return 0;
  Interval r = range_interval(p, x);
  const long lo = r.lo - pad, hi = r.hi + pad;
  auto in_window = [&](const DeltaElement& z) {
    if (z.t < lo || z.t > hi) return false;
    Interval rz = range_interval(p, z);
    return rz.lo >= lo && rz.hi <= hi;
  };
  std::vector<DeltaElement> gen_elts;
  for (const auto& g : generator_set(p)) gen_elts.push_back(generator_element(p, g));

  std::unordered_map<std::string, long> dist;
  std::deque<DeltaElement> frontier;
  dist[element_key(e)] = 0;
  frontier.push_back(e);
  while (!frontier.empty()) {
    DeltaElement u = std::move(frontier.front());
    frontier.pop_front();
    long du = dist[element_key(u)];
    if (du >= limit) return std::nullopt;
    for (const auto& g : gen_elts) {
      DeltaElement v = multiply(p, u, g);
      if (!in_window(v)) continue;
      std::string kv = element_key(v);
      if (dist.count(kv)) continue;
      dist[kv] = du + 1;
      if (v == x) return du + 1;
      frontier.push_back(v);
    }
  }
  return std::nullopt;
}

std::optional<long> distance_exact(const DeltaParams& p, const DeltaElement& x,
                                   const DeltaElement& y, long limit, long pad) {
  return word_length_exact(p, multiply(p, inverse(p, x), y), limit, pad);
}

long distance_upper(const DeltaParams& p, const DeltaElement& x,
                    const DeltaElement& y, DistanceMode mode) {
  if (mode == DistanceMode::interval) {
    if (x.fprime != y.fprime)
      throw std::invalid_argument("interval mode needs equal derived maps");
    if (x == y) return 0;
    long lo = std::min(x.t, y.t), hi = std::max(x.t, y.t);
    const int e0 = p.gamma0.gamma.identity;
    std::map<long, int> sites = x.f0;
    for (const auto& [s, v] : y.f0) sites.emplace(s, e0);
    for (const auto& [s, _] : sites)
      if (map_at(x.f0, s, e0) != map_at(y.f0, s, e0)) {
        lo = std::min(lo, s);
        hi = std::max(hi, s);
      }
    // diameter enters through the site count of I: a single differing lamp
    // still costs up to 3 moves
    return 3 * (hi - lo + 1);
  }
  // level mode
  Interval rx = range_interval(p, x), ry = range_interval(p, y);
  if (rx.lo < 0 || ry.lo < 0)
    throw std::invalid_argument("level mode needs range inside [0, D]");
  const long D = std::max(rx.hi, ry.hi);
  int i = 0;
  for (int m = 1; m <= p.levels(); ++m)
    if (x.fprime[m - 1] != y.fprime[m - 1]) i = m;
  if (i == 0)
    throw std::invalid_argument("level mode needs a differing derived map");
  long sum = 0;
  for (int m = 0; m <= i; ++m)
    sum += 9 * (D + static_cast<long>(p.l(m)) * (2 * D + 2 * p.k[m]));
  return sum + std::labs(x.t - y.t);
}

std::string element_to_text(const DeltaParams& p, const DeltaElement& x) {
  std::ostringstream os;
  os << "t " << x.t << "\n";
  os << "f0";
  for (const auto& [s, v] : x.f0) os << ' ' << s << ' ' << v;
  os << "\n";
  for (int m = 1; m <= p.levels(); ++m) {
    os << "f" << m;
    for (const auto& [s, v] : x.fprime[m - 1]) os << ' ' << s << ' ' << v;
    os << "\n";
  }
  return os.str();
}

DeltaElement element_from_text(const DeltaParams& p, const std::string& text) {
  DeltaElement x = identity(p);
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    if (tag == "t") {
      ls >> x.t;
    } else if (tag == "f0") {
      long s;
      int v;
      while (ls >> s >> v) x.f0[s] = v;
    } else if (tag.size() > 1 && tag[0] == 'f') {
      int m = std::stoi(tag.substr(1));
      if (m < 1 || m > p.levels()) throw std::invalid_argument("bad level tag");
      long s;
      int v;
      while (ls >> s >> v) x.fprime[m - 1][s] = v;
    } else {
      throw std::invalid_argument("bad element line");
    }
  }
  return x;
}

}  // namespace lab
