#include "lab/z_coupler.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
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

std::vector<long> base_kappa_digits(long t, long n, int kappa) {
  std::vector<long> d(static_cast<size_t>(n), 0);
  for (long i = 0; i < n; ++i) {
    d[static_cast<size_t>(i)] = t % kappa;
    t /= kappa;
  }
  return d;
}

}  // namespace

std::vector<Interval> block_intervals(long t, long n, int kappa) {
  mpz_class box = pow_z(kappa, n);
  if (t < 0 || box <= t) throw std::out_of_range("block_intervals: cursor");
  std::vector<long> d = base_kappa_digits(t, n, kappa);
  std::vector<Interval> out;
  for (long i = 0; i <= n; ++i) {
    long lo = 0, w = 1;
    for (long j = n - 1; j >= i; --j) lo = lo * kappa + d[static_cast<size_t>(j)];
    for (long j = 0; j < i; ++j) {
      lo *= kappa;
      w *= kappa;
    }
    out.push_back({lo, lo + w - 1});
  }
  return out;
}

int carry_position(long t, long n, int kappa) {
  std::vector<long> d = base_kappa_digits(t, n, kappa);
  for (long i = 0; i < n; ++i)
    if (d[static_cast<size_t>(i)] < kappa - 1) return static_cast<int>(i);
  throw std::domain_error("carry_position: saturated cursor");
}

double FunctionDescriptor::eval_ln(double ln_x) const {
  switch (kind) {
    case identity:
      return std::exp(ln_x);
    case power:
      return std::exp(p * ln_x);
    case rho_log:
      return rho.eval(ln_x);
  }
  return 0;
}

double FunctionDescriptor::eval(double x) const {
  if (x < 1) x = 1;
  return eval_ln(std::log(x));
}

std::string FunctionDescriptor::to_text() const {
  std::ostringstream os;
  switch (kind) {
    case identity:
      os << "identity";
      break;
    case power:
      os << "power " << p;
      break;
    case rho_log:
      os << "rho_log family " << static_cast<int>(rho.family);
      break;
  }
  return os.str();
}

FunctionDescriptor compose_integrability(const FunctionDescriptor& phi,
                                         const FunctionDescriptor& psi) {
  if (phi.kind == FunctionDescriptor::identity) return psi;
  if (psi.kind == FunctionDescriptor::identity) return phi;
  if (phi.kind == FunctionDescriptor::power &&
      psi.kind == FunctionDescriptor::power) {
    FunctionDescriptor out;
    out.kind = FunctionDescriptor::power;
    out.p = phi.p * psi.p;
    return out;
  }
  // rho(log(x^p)) = rho(p log x), equivalent to rho(log x) up to constants
  // for admitted profiles
  if (phi.kind == FunctionDescriptor::rho_log &&
      psi.kind == FunctionDescriptor::power) {
    return phi;
  }
  throw std::invalid_argument("compose_integrability: unsupported pair");
}

ZEncoder::ZEncoder(DeltaParams params, long n) : atlas_(std::move(params)), n_(n) {
  if (n < 1) throw std::invalid_argument("ZEncoder: n must be positive");
  int kappa = atlas_.params().kappa;
  mpz_class box = pow_z(kappa, n);
  if (!box.fits_slong_p()) throw std::invalid_argument("ZEncoder: box too large");
  box_ = box.get_si();
  full_ = atlas_.full_index(box_);
  size_ = atlas_.cardinality(full_);
  top_level_ = atlas_.params().ell(box_ - 1);

  long q = atlas_.params().q();
  std::vector<Int> radices;
  radices.push_back(q);  // nu_0
  for (long i = 1; i <= n; ++i) {
    radices.push_back(kappa);  // t_{i-1}
    mpz_class w;
    mpz_ui_pow_ui(w.get_mpz_t(), static_cast<unsigned long>(q),
                  static_cast<unsigned long>(pow_z(kappa, i).get_ui() -
                                             pow_z(kappa, i - 1).get_ui()));
    radices.push_back(w);  // nu_i
  }
  mpz_class lamp_total = box_ * pow_z(q, box_);
  radices.push_back(size_ / lamp_total);  // mu (max mu + 1)
  base_ = MixedRadixBase(std::move(radices));
  if (base_.product() != size_)
    throw std::logic_error("ZEncoder: base product mismatch");
}

bool ZEncoder::member(const DeltaElement& x) const {
  return atlas_.member(full_, x);
}

bool ZEncoder::interior(const DeltaElement& x) const {
  return member(x) && x.t >= 1 && x.t <= box_ - 2;
}

mpz_class ZEncoder::encode(const DeltaElement& x) const {
  if (!member(x)) throw std::domain_error("encode: element not in the set");
  const DeltaParams& p = atlas_.params();
  long q = p.q();
  std::vector<Interval> blocks = block_intervals(x.t, n_, p.kappa);
  std::vector<long> tdig = base_kappa_digits(x.t, n_, p.kappa);

  auto f0_at = [&](long site) -> long {
    auto it = x.f0.find(site);
    return it == x.f0.end() ? 0 : it->second;
  };

  std::vector<Int> digits(base_.size(), 0);
  digits[0] = f0_at(x.t);
  for (long i = 1; i <= n_; ++i) {
    digits[static_cast<size_t>(2 * i - 1)] = tdig[static_cast<size_t>(i - 1)];
    // window B_i \ B_{i-1}, sites ascending
    mpz_class nu = 0, w = 1;
    const Interval& big = blocks[static_cast<size_t>(i)];
    const Interval& small = blocks[static_cast<size_t>(i - 1)];
    for (long s = big.lo; s <= big.hi; ++s) {
      if (s >= small.lo && s <= small.hi) continue;
      nu += f0_at(s) * w;
      w *= q;
    }
    digits[static_cast<size_t>(2 * i)] = nu;
  }

  mpz_class mu = 0, w = 1;
  for (int m = 1; m <= top_level_; ++m) {
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
  digits.back() = mu;
  return recompose(DigitVector{std::move(digits), base_});
}

DeltaElement ZEncoder::decode(const mpz_class& z) const {
  if (z < 0 || z >= size_) throw std::domain_error("decode: value out of range");
  const DeltaParams& p = atlas_.params();
  long q = p.q();
  DigitVector d = lab::decompose(z, base_);

  long t = 0;
  for (long i = n_; i >= 1; --i)
    t = t * p.kappa + d.digits[static_cast<size_t>(2 * i - 1)].get_si();

  DeltaElement x;
  x.t = t;
  x.fprime.resize(static_cast<size_t>(p.levels()));

  std::vector<Interval> blocks = block_intervals(t, n_, p.kappa);
  auto set_f0 = [&](long site, long val) {
    if (val != 0) x.f0[site] = static_cast<int>(val);
  };
  set_f0(t, d.digits[0].get_si());
  for (long i = 1; i <= n_; ++i) {
    mpz_class nu = d.digits[static_cast<size_t>(2 * i)];
    const Interval& big = blocks[static_cast<size_t>(i)];
    const Interval& small = blocks[static_cast<size_t>(i - 1)];
    for (long s = big.lo; s <= big.hi; ++s) {
      if (s >= small.lo && s <= small.hi) continue;
      mpz_class digit = nu % q;
      set_f0(s, digit.get_si());
      nu /= q;
    }
  }

  mpz_class mu = d.digits.back();
  for (int m = 1; m <= top_level_; ++m) {
    const std::vector<int> order = p.gamma(m).gamma_prime_bfs();
    long G = static_cast<long>(order.size());
    for (long s = p.k[static_cast<size_t>(m)]; s <= box_ - 1; ++s) {
      mpz_class idx = mu % G;
      mu /= G;
      int val = order[static_cast<size_t>(idx.get_si())];
      if (val != p.gamma(m).gamma.identity)
        x.fprime[static_cast<size_t>(m - 1)][s] = val;
    }
  }
  return x;
}

mpz_class ZEncoder::neighbor_gap(const DeltaElement& x, const Generator& s) const {
  if (!interior(x)) throw std::domain_error("neighbor_gap: element not interior");
  DeltaElement y = apply_generator(atlas_.params(), x, s);
  mpz_class gap = encode(x) - encode(y);
  return abs(gap);
}

std::map<long, mpz_class> ZEncoder::carry_histogram() const {
  int kappa = atlas_.params().kappa;
  std::map<long, mpz_class> out;
  mpz_class per_cursor = size_ / box_;
  for (long m = 0; m < n_; ++m)
    out[m] = per_cursor * (kappa - 1) * pow_z(kappa, n_ - m - 1);
  return out;
}

IntegrabilitySummary ZEncoder::integrability_sum(long R,
                                                 const FunctionDescriptor& phi,
                                                 long budget) const {
  const DeltaParams& p = atlas_.params();
  IntegrabilitySummary out;
  double ln_q = std::log(static_cast<double>(p.q()));
  double ln_kappa = std::log(static_cast<double>(p.kappa));
  for (long m = 0; m < n_; ++m) {
    // gap bound kappa^{m+1} q^{kappa^{m+1}} for carry position m
    double ln_bound = (m + 1) * ln_kappa +
                      std::pow(static_cast<double>(p.kappa), double(m + 1)) * ln_q;
    out.cursor_majorant +=
        phi.eval_ln(ln_bound) / std::pow(static_cast<double>(p.kappa), double(m));
  }

  if (size_ <= budget) {
    out.lamp_exhaustive = true;
    out.cursor_exhaustive = true;
    std::vector<DeltaElement> set = atlas_.enumerate(full_, budget);
    double total = mpz_get_d(size_.get_mpz_t());
    std::vector<Generator> gens = generator_set(p);
    double cursor = 0;
    for (const Generator& g : gens) {
      if (g.kind == Generator::cursor && g.shift != 1) continue;
      double sum = 0;
      for (const DeltaElement& x : set) {
        if (!interior(x)) continue;
        mpz_class gap = neighbor_gap(x, g);
        if (gap > R) continue;
        sum += phi.eval(mpz_get_d(gap.get_mpz_t()));
      }
      sum /= total;
      if (g.kind == Generator::cursor)
        cursor = sum;
      else
        out.lamp_sum = std::max(out.lamp_sum, sum);
    }
    out.cursor_sum = cursor;
  } else {
    out.lamp_sum = phi.eval(static_cast<double>(p.q()));
    out.cursor_sum = out.cursor_majorant;
  }
  return out;
}

std::string ZEncoder::gap_csv(const Generator& s, const FunctionDescriptor& phi,
                              long budget) const {
  std::vector<DeltaElement> set = atlas_.enumerate(full_, budget);
  std::map<mpz_class, long> hist;
  long interior_count = 0;
  for (const DeltaElement& x : set) {
    if (!interior(x)) continue;
    ++interior_count;
    ++hist[neighbor_gap(x, s)];
  }
  std::ostringstream os;
  os << "r,count,fraction,phi_r,partial_sum\n";
  double partial = 0;
  for (const auto& [r, count] : hist) {
    double frac = double(count) / double(interior_count);
    double phi_r = phi.eval(mpz_get_d(r.get_mpz_t()));
    partial += phi_r * frac;
    os << r.get_str() << ',' << count << ',' << frac << ',' << phi_r << ','
       << partial << '\n';
  }
  return os.str();
}

std::string partial_sums_svg(
    const std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>>&
        series) {
  const double W = 640, H = 400, ML = 60, MR = 20, MT = 20, MB = 40;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& [name, pts] : series) {
    (void)name;
    for (const auto& [x, y] : pts) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  }
  if (xmin > xmax) xmin = 0, xmax = 1;
  if (ymin > ymax) ymin = 0, ymax = 1;
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;
  auto X = [&](double x) { return ML + (x - xmin) / (xmax - xmin) * (W - ML - MR); };
  auto Y = [&](double y) { return H - MB - (y - ymin) / (ymax - ymin) * (H - MT - MB); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
     << "\" height=\"" << H << "\">\n";
  os << "<line x1=\"" << ML << "\" y1=\"" << H - MB << "\" x2=\"" << W - MR
     << "\" y2=\"" << H - MB << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << ML << "\" y1=\"" << MT << "\" x2=\"" << ML
     << "\" y2=\"" << H - MB << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"" << H - 8 << "\">n</text>\n";
  os << "<text x=\"8\" y=\"" << MT + 10 << "\">partial sum</text>\n";
  int c = 0;
  for (const auto& [name, pts] : series) {
    os << "<polyline fill=\"none\" stroke=\"" << colors[c % 4] << "\" points=\"";
    for (const auto& [x, y] : pts) os << X(x) << ',' << Y(y) << ' ';
    os << "\"/>\n<text x=\"" << W - MR - 150 << "\" y=\"" << MT + 16 * (c + 1)
       << "\" fill=\"" << colors[c % 4] << "\">" << name << "</text>\n";
    ++c;
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace lab
