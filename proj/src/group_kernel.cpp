#include "lab/group_kernel.hpp"

#include <algorithm>
#include <deque>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace lab {

int FiniteGroup::element_order(int a) const {
  int k = 1, x = a;
  while (x != identity) {
    x = prod(x, a);
    ++k;
  }
  return k;
}

void FiniteGroup::check_axioms() const {
  if (order <= 0 || mul.size() != static_cast<std::size_t>(order) * order ||
      inv.size() != static_cast<std::size_t>(order))
    throw std::logic_error("malformed tables");
  for (int a = 0; a < order; ++a) {
    if (prod(identity, a) != a || prod(a, identity) != a)
      throw std::logic_error("identity law fails");
    if (prod(a, inv[a]) != identity || prod(inv[a], a) != identity)
      throw std::logic_error("inverse law fails");
  }
  if (order <= 512) {
    for (int a = 0; a < order; ++a)
      for (int b = 0; b < order; ++b)
        for (int c = 0; c < order; ++c)
          if (prod(prod(a, b), c) != prod(a, prod(b, c)))
            throw std::logic_error("associativity fails");
  } else {
    std::mt19937 rng(12345);
    std::uniform_int_distribution<int> pick(0, order - 1);
    for (int t = 0; t < 200000; ++t) {
      int a = pick(rng), b = pick(rng), c = pick(rng);
      if (prod(prod(a, b), c) != prod(a, prod(b, c)))
        throw std::logic_error("associativity fails");
    }
  }
}

FiniteGroup FiniteGroup::trivial() { return cyclic(1); }

FiniteGroup FiniteGroup::cyclic(int n) {
  if (n < 1) throw std::invalid_argument("cyclic order must be >= 1");
  FiniteGroup g;
  g.order = n;
  g.mul.resize(static_cast<std::size_t>(n) * n);
  g.inv.resize(n);
  for (int a = 0; a < n; ++a) {
    g.inv[a] = (n - a) % n;
    for (int b = 0; b < n; ++b) g.mul[static_cast<std::size_t>(a) * n + b] = (a + b) % n;
  }
  return g;
}

FiniteGroup FiniteGroup::direct_product(const FiniteGroup& g, const FiniteGroup& h) {
  FiniteGroup p;
  p.order = g.order * h.order;
  p.identity = g.identity * h.order + h.identity;
  p.mul.resize(static_cast<std::size_t>(p.order) * p.order);
  p.inv.resize(p.order);
  for (int a = 0; a < p.order; ++a) {
    int ag = a / h.order, ah = a % h.order;
    p.inv[a] = g.inv[ag] * h.order + h.inv[ah];
    for (int b = 0; b < p.order; ++b) {
      int bg = b / h.order, bh = b % h.order;
      p.mul[static_cast<std::size_t>(a) * p.order + b] =
          g.prod(ag, bg) * h.order + h.prod(ah, bh);
    }
  }
  return p;
}

namespace {

std::vector<int> perm_compose(const std::vector<int>& p, const std::vector<int>& q) {
  // (p ∘ q)(i) = p(q(i))
  std::vector<int> r(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) r[i] = p[q[i]];
  return r;
}

}  // namespace

FiniteGroup FiniteGroup::from_permutations(
    int n, const std::vector<std::vector<int>>& gens) {
  std::vector<int> id(n);
  for (int i = 0; i < n; ++i) id[i] = i;
  std::map<std::vector<int>, int> index;
  std::vector<std::vector<int>> elts;
  std::deque<int> queue;
  index[id] = 0;
  elts.push_back(id);
  queue.push_back(0);
  while (!queue.empty()) {
    int cur = queue.front();
    queue.pop_front();
    for (const auto& g : gens) {
      auto next = perm_compose(elts[cur], g);
      if (!index.count(next)) {
        index[next] = static_cast<int>(elts.size());
        elts.push_back(next);
        queue.push_back(index[next]);
      }
    }
  }
  FiniteGroup G;
  G.order = static_cast<int>(elts.size());
  G.identity = 0;
  G.mul.resize(static_cast<std::size_t>(G.order) * G.order);
  G.inv.resize(G.order);
  for (int a = 0; a < G.order; ++a) {
    for (int b = 0; b < G.order; ++b)
      G.mul[static_cast<std::size_t>(a) * G.order + b] =
          index.at(perm_compose(elts[a], elts[b]));
    std::vector<int> ai(n);
    for (int i = 0; i < n; ++i) ai[elts[a][i]] = i;
    G.inv[a] = index.at(ai);
  }
  return G;
}

std::vector<int> normal_closure(const FiniteGroup& G, const std::vector<int>& S) {
  std::vector<char> in(G.order, 0);
  std::deque<int> queue;
  auto add = [&](int x) {
    if (!in[x]) {
      in[x] = 1;
      queue.push_back(x);
    }
  };
  add(G.identity);
  for (int s : S) add(s);
  while (!queue.empty()) {
    int x = queue.front();
    queue.pop_front();
    add(G.inv[x]);
    for (int y = 0; y < G.order; ++y) {
      if (in[y]) add(G.prod(x, y));
      add(G.conj(y, x));
    }
  }
  std::vector<int> out;
  for (int x = 0; x < G.order; ++x)
    if (in[x]) out.push_back(x);
  return out;
}

namespace {

std::vector<int> bfs_distances(const FiniteGroup& G, const std::vector<int>& gens) {
  std::vector<int> step;
  for (int g : gens) {
    step.push_back(g);
    step.push_back(G.inv[g]);
  }
  std::vector<int> dist(G.order, -1);
  std::deque<int> queue;
  dist[G.identity] = 0;
  queue.push_back(G.identity);
  while (!queue.empty()) {
    int x = queue.front();
    queue.pop_front();
    for (int s : step) {
      int y = G.prod(x, s);
      if (dist[y] < 0) {
        dist[y] = dist[x] + 1;
        queue.push_back(y);
      }
    }
  }
  return dist;
}

}  // namespace

int diameter(const FiniteGroup& G, const std::vector<int>& gens) {
  auto dist = bfs_distances(G, gens);
  int d = 0;
  for (int x = 0; x < G.order; ++x) {
    if (dist[x] < 0) throw std::invalid_argument("generators do not generate");
    d = std::max(d, dist[x]);
  }
  return d;
}

int MarkedGamma::derived_part(int g) const {
  int t = gamma.prod(theta_a_elt(g), theta_b_elt(g));
  return gamma.prod(g, gamma.inv[t]);
}

bool MarkedGamma::in_gamma_prime(int g) const {
  return std::binary_search(gamma_prime.begin(), gamma_prime.end(), g);
}

int MarkedGamma::gamma_prime_index(int g) const {
  auto it = std::lower_bound(gamma_prime.begin(), gamma_prime.end(), g);
  if (it == gamma_prime.end() || *it != g)
    throw std::invalid_argument("element not in gamma_prime");
  return static_cast<int>(it - gamma_prime.begin());
}

std::vector<int> MarkedGamma::gamma_prime_bfs() const {
  std::vector<int> gens;
  if (static_cast<int>(A.size()) > 1) gens.push_back(a_gen);
  if (static_cast<int>(B.size()) > 1) gens.push_back(b_gen);
  auto dist = bfs_distances(gamma, gens);
  std::vector<int> order = gamma_prime;
  std::stable_sort(order.begin(), order.end(),
                   [&](int x, int y) { return dist[x] < dist[y]; });
  return order;
}

void MarkedGamma::finalize() {
  // gamma_prime = normal closure of all commutators [alpha, beta].
  std::vector<int> comms;
  for (int alpha : A)
    for (int beta : B) {
      int c = gamma.prod(gamma.prod(alpha, beta),
                         gamma.prod(gamma.inv[alpha], gamma.inv[beta]));
      comms.push_back(c);
    }
  gamma_prime = normal_closure(gamma, comms);

  // theta: find, for each g, the unique (alpha, beta) exponent pair with
  // g * (a^alpha b^beta)^{-1} in gamma_prime.
  const int na = static_cast<int>(A.size()), nb = static_cast<int>(B.size());
  if (static_cast<std::size_t>(na) * nb * gamma_prime.size() !=
      static_cast<std::size_t>(gamma.order))
    throw std::invalid_argument("quotient by gamma_prime is not A x B");
  theta.assign(gamma.order, {-1, -1});
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < nb; ++j) {
      int t = gamma.prod(A[i], B[j]);
      for (int gp : gamma_prime) {
        int g = gamma.prod(gp, t);
        if (theta[g].first >= 0)
          throw std::invalid_argument("coset representatives collide");
        theta[g] = {i, j};
      }
    }
  for (auto& th : theta)
    if (th.first < 0) throw std::invalid_argument("coset map incomplete");

  std::vector<int> gens;
  if (na > 1) gens.push_back(a_gen);
  if (nb > 1) gens.push_back(b_gen);
  diameter_l = gens.empty() ? 0 : diameter(gamma, gens);
}

MarkedGamma fiber_product_gamma(const FiniteGroup& H, int x, int y, int a_order,
                                int b_order) {
  if (a_order > 1 && H.element_order(x) != a_order)
    throw std::invalid_argument("x has wrong order");
  if (b_order > 1 && H.element_order(y) != b_order)
    throw std::invalid_argument("y has wrong order");
  (void)diameter(H, {x, y});  // throws when {x, y} fails to generate H
  FiniteGroup AB = FiniteGroup::direct_product(FiniteGroup::cyclic(a_order),
                                               FiniteGroup::cyclic(b_order));
  FiniteGroup big = FiniteGroup::direct_product(AB, H);
  // ids in big: (ab_id, h_id) -> ab_id * |H| + h_id
  int gen_a = (1 % a_order) * b_order * H.order + x;  // ((1,0), x)
  int gen_b = (1 % b_order) * H.order + y;            // ((0,1), y)

  // Closure of {gen_a, gen_b} in big, BFS from identity; reindex densely.
  std::vector<int> step = {gen_a, big.inv[gen_a], gen_b, big.inv[gen_b]};
  std::vector<int> newid(big.order, -1);
  std::vector<int> elems;
  std::deque<int> queue;
  newid[big.identity] = 0;
  elems.push_back(big.identity);
  queue.push_back(big.identity);
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    for (int s : step) {
      int v = big.prod(u, s);
      if (newid[v] < 0) {
        newid[v] = static_cast<int>(elems.size());
        elems.push_back(v);
        queue.push_back(v);
      }
    }
  }
  MarkedGamma mg;
  mg.gamma.order = static_cast<int>(elems.size());
  mg.gamma.identity = 0;
  mg.gamma.mul.resize(static_cast<std::size_t>(mg.gamma.order) * mg.gamma.order);
  mg.gamma.inv.resize(mg.gamma.order);
  for (int a = 0; a < mg.gamma.order; ++a) {
    mg.gamma.inv[a] = newid[big.inv[elems[a]]];
    for (int b = 0; b < mg.gamma.order; ++b)
      mg.gamma.mul[static_cast<std::size_t>(a) * mg.gamma.order + b] =
          newid[big.prod(elems[a], elems[b])];
  }
  mg.a_gen = newid[gen_a];
  mg.b_gen = newid[gen_b];
  mg.A = {0};
  for (int g = mg.a_gen; g != 0; g = mg.gamma.prod(g, mg.a_gen)) mg.A.push_back(g);
  mg.B = {0};
  for (int g = mg.b_gen; g != 0; g = mg.gamma.prod(g, mg.b_gen)) mg.B.push_back(g);
  if (static_cast<int>(mg.A.size()) != a_order ||
      static_cast<int>(mg.B.size()) != b_order)
    throw std::invalid_argument("marking subgroups have wrong order");
  mg.finalize();
  return mg;
}

MarkedGamma marked_direct_product(int a_order, int b_order) {
  MarkedGamma mg;
  mg.gamma = FiniteGroup::direct_product(FiniteGroup::cyclic(a_order),
                                         FiniteGroup::cyclic(b_order));
  // ids: (i, j) -> i * b_order + j
  mg.a_gen = (1 % a_order) * b_order;
  mg.b_gen = 1 % b_order;
  mg.A.clear();
  for (int i = 0; i < a_order; ++i) mg.A.push_back(i * b_order);
  mg.B.clear();
  for (int j = 0; j < b_order; ++j) mg.B.push_back(j);
  mg.finalize();
  return mg;
}

void export_marked(const MarkedGamma& mg, std::ostream& os) {
  os << mg.gamma.order << "\n";
  for (int a = 0; a < mg.gamma.order; ++a) {
    for (int b = 0; b < mg.gamma.order; ++b) {
      if (b) os << ' ';
      os << mg.gamma.prod(a, b);
    }
    os << "\n";
  }
  os << "A:";
  for (int g : mg.A) os << ' ' << g;
  os << "\nB:";
  for (int g : mg.B) os << ' ' << g;
  os << "\n";
}

MarkedGamma import_marked(std::istream& is) {
  MarkedGamma mg;
  int n;
  if (!(is >> n) || n <= 0) throw std::invalid_argument("bad order line");
  mg.gamma.order = n;
  mg.gamma.mul.resize(static_cast<std::size_t>(n) * n);
  for (auto& v : mg.gamma.mul)
    if (!(is >> v) || v < 0 || v >= n)
      throw std::invalid_argument("bad product entry");
  // identity: the unique e with e*x = x for all x.
  mg.gamma.identity = -1;
  for (int e = 0; e < n; ++e) {
    bool ok = true;
    for (int x = 0; x < n && ok; ++x) ok = mg.gamma.prod(e, x) == x;
    if (ok) {
      mg.gamma.identity = e;
      break;
    }
  }
  if (mg.gamma.identity < 0) throw std::invalid_argument("no identity");
  mg.gamma.inv.assign(n, -1);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (mg.gamma.prod(a, b) == mg.gamma.identity) mg.gamma.inv[a] = b;
  mg.gamma.check_axioms();

  auto read_marking = [&](char label) {
    std::string tag;
    if (!(is >> tag) || tag != std::string(1, label) + ":")
      throw std::invalid_argument("bad marking line");
    std::vector<int> ids;
    std::string rest;
    std::getline(is, rest);
    std::istringstream ss(rest);
    int v;
    while (ss >> v) {
      if (v < 0 || v >= n) throw std::invalid_argument("bad marking id");
      ids.push_back(v);
    }
    if (ids.empty()) throw std::invalid_argument("empty marking");
    return ids;
  };
  mg.A = read_marking('A');
  mg.B = read_marking('B');
  mg.a_gen = mg.A.size() > 1 ? mg.A[1] : mg.gamma.identity;
  mg.b_gen = mg.B.size() > 1 ? mg.B[1] : mg.gamma.identity;
  mg.finalize();
  return mg;
}

FiniteGroup symmetric_group(int n) {
  std::vector<std::vector<int>> gens;
  if (n >= 2) {
    std::vector<int> t(n), c(n);
    for (int i = 0; i < n; ++i) {
      t[i] = i;
      c[i] = (i + 1) % n;
    }
    std::swap(t[0], t[1]);
    gens = {t, c};
  }
  return FiniteGroup::from_permutations(std::max(n, 1), gens);
}

FiniteGroup alternating_group(int n) {
  std::vector<std::vector<int>> gens;
  for (int i = 0; i + 2 < n; ++i) {
    std::vector<int> c(n);
    for (int j = 0; j < n; ++j) c[j] = j;
    c[i] = i + 1;
    c[i + 1] = i + 2;
    c[i + 2] = i;  // 3-cycle (i, i+1, i+2)
    gens.push_back(c);
  }
  return FiniteGroup::from_permutations(std::max(n, 1), gens);
}

}  // namespace lab
