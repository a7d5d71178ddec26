#include "lab/profile_forge.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace lab {

namespace {

double table_eval(const std::vector<std::pair<double, double>>& table, double x) {
  if (table.empty()) throw std::invalid_argument("empty profile table");
  if (x <= table.front().first) return table.front().second;
  if (x >= table.back().first) {
    // extend with the last secant slope
    if (table.size() == 1) return table.back().second;
    auto [x0, y0] = table[table.size() - 2];
    auto [x1, y1] = table.back();
    return y1 + (x - x1) * (y1 - y0) / (x1 - x0);
  }
  auto it = std::lower_bound(
      table.begin(), table.end(), x,
      [](const std::pair<double, double>& p, double v) { return p.first < v; });
  auto [x1, y1] = *it;
  auto [x0, y0] = *(it - 1);
  return y0 + (x - x0) * (y1 - y0) / (x1 - x0);
}

}  // namespace

double ProfileSpec::eval(double x) const {
  x = std::max(x, 1.0);
  double v;
  switch (family) {
    case identity_map:
      v = x;
      break;
    case power:
      v = std::pow(x, 1.0 / (1.0 + alpha));
      break;
    case iterated_log:
      v = x;
      for (int i = 0; i < r; ++i) v = std::log(std::max(v, 1.0));
      break;
    case tabulated:
      v = table_eval(table, x);
      break;
  }
  return std::max(v, 1.0);
}

bool ProfileSpec::in_C(double x_max) const {
  double prev_x = 1.0, prev_rho = eval(1.0);
  for (double x = 1.0; x <= x_max; x *= 1.5) {
    double rx = eval(x);
    if (rx + 1e-12 < prev_rho) return false;
    if (x / rx + 1e-12 < prev_x / prev_rho) return false;
    prev_x = x;
    prev_rho = rx;
  }
  return true;
}

std::string DeltaSequences::to_text() const {
  std::ostringstream os;
  os << "kappa " << kappa << " lambda " << lambda
     << (infinite_tail ? " inf-tail" : " finite") << "\n";
  os << "k:";
  for (const auto& v : k) os << ' ' << v;
  os << "\nl:";
  for (const auto& v : l) os << ' ' << v;
  os << "\n";
  return os.str();
}

DeltaSequences DeltaSequences::from_text(const std::string& text) {
  DeltaSequences s;
  std::istringstream is(text);
  std::string tok;
  if (!(is >> tok) || tok != "kappa") throw std::invalid_argument("bad header");
  is >> s.kappa >> tok >> s.lambda >> tok;
  s.infinite_tail = tok == "inf-tail";
  auto read_row = [&](const char* tag, std::vector<mpz_class>& row) {
    std::string t;
    is >> t;
    if (t != tag) throw std::invalid_argument("bad row tag");
    std::string line;
    std::getline(is, line);
    std::istringstream ls(line);
    std::string v;
    while (ls >> v) row.emplace_back(v);
  };
  read_row("k:", s.k);
  read_row("l:", s.l);
  if (s.k.empty() || s.k[0] != 0 || s.l.empty())
    throw std::invalid_argument("bad sequence rows");
  return s;
}

namespace {

mpz_class pow_z(long base, const mpz_class& e) {
  mpz_class out;
  mpz_ui_pow_ui(out.get_mpz_t(), base, mpz_get_ui(e.get_mpz_t()));
  return out;
}

}  // namespace

DeltaSequences build_sequences(const ProfileSpec& rho, long kappa, long lambda,
                               int M) {
  if (kappa < 2 || lambda < 2)
    throw std::invalid_argument("kappa, lambda must be >= 2");
  if (!rho.in_C()) throw std::invalid_argument("profile not in the class C");
  DeltaSequences s;
  s.kappa = kappa;
  s.lambda = lambda;
  s.k = {0};
  s.l = {1};
  switch (rho.family) {
    case ProfileSpec::identity_map:
      s.infinite_tail = true;  // lamplighter: k_m = +inf for m >= 1
      break;
    case ProfileSpec::power:
      for (int m = 1; m <= M; ++m) {
        s.k.push_back(pow_z(kappa, m));
        // l_m = kappa^{alpha m}, rounded to nearest integer for fractional
        // alpha (exact for integer alpha)
        double e = rho.alpha * m;
        if (std::abs(e - std::llround(e)) < 1e-9) {
          s.l.push_back(pow_z(kappa, static_cast<long>(std::llround(e))));
        } else {
          s.l.push_back(mpz_class(
              static_cast<long>(std::llround(std::pow((double)kappa, e)))));
        }
      }
      break;
    case ProfileSpec::iterated_log:
      for (int m = 1; m <= M; ++m) {
        s.k.push_back(pow_z(kappa, m));
        // r-fold base-kappa exponential of kappa^m
        mpz_class v = pow_z(kappa, m);
        for (int i = 0; i < rho.r; ++i) v = pow_z(kappa, v);
        s.l.push_back(v);
      }
      break;
    case ProfileSpec::tabulated: {
      // greedy: l_m smallest lambda-power >= f(k_m l_{m-1}), f = x / rho(x);
      // k_{m+1} smallest kappa-power >= 2 k_m
      mpz_class km = 1;  // kappa^0; k_1 starts at kappa
      for (int m = 1; m <= M; ++m) {
        while (km < 2 * s.k[m - 1]) km *= kappa;
        if (km <= s.k[m - 1]) km *= kappa;
        s.k.push_back(km);
        double x = mpz_get_d(km.get_mpz_t()) *
                   mpz_get_d(s.l[m - 1].get_mpz_t());
        double f = x / rho.eval(x);
        mpz_class lm = s.l[m - 1];  // l nondecreasing
        while (mpz_get_d(lm.get_mpz_t()) < f) lm *= lambda;
        s.l.push_back(lm);
        km *= kappa;
      }
      break;
    }
  }
  for (std::size_t m = 2; m < s.k.size(); ++m)
    if (s.k[m] < 2 * s.k[m - 1])
      throw std::logic_error("spacing sequence fails to double");
  return s;
}

PiecewiseProfile::PiecewiseProfile(DeltaSequences s, Rat d)
    : seq(std::move(s)), delta(std::move(d)) {
  if (delta <= 0 || delta >= Rat(1, 2))
    throw std::invalid_argument("delta must lie in (0, 1/2)");
  // corners of rho_bij: for each m, (k_{m+1} - delta) l_m |-> k_{m+1} - delta
  // and (k_{m+1} + delta) l_{m+1} |-> k_{m+1} + delta
  for (std::size_t m = 0; m + 1 < seq.k.size(); ++m) {
    Rat km1(seq.k[m + 1]);
    Rat lm(seq.l[m]), lm1(seq.l[m + 1]);
    pts_.push_back({(km1 - delta) * lm, km1 - delta});
    pts_.push_back({(km1 + delta) * lm1, km1 + delta});
  }
}

Rat PiecewiseProfile::bar_f(const Rat& x_in) const {
  Rat x = std::max(x_in, Rat(1));
  for (std::size_t m = 0; m + 1 < seq.k.size(); ++m) {
    Rat km1(seq.k[m + 1]);
    if (x <= km1 * Rat(seq.l[m])) return Rat(seq.l[m]);
    if (x <= km1 * Rat(seq.l[m + 1])) return x / km1;
  }
  return Rat(seq.l.back());
}

Rat PiecewiseProfile::bar_rho(const Rat& x_in) const {
  Rat x = std::max(x_in, Rat(1));
  return x / bar_f(x);
}

Rat PiecewiseProfile::rho_bij(const Rat& x) const {
  if (pts_.empty() || x <= pts_.front().first) return x;  // slope 1 head
  // find the segment, interpolate; past the last corner the slope is 1/l_M
  for (std::size_t i = 0; i + 1 < pts_.size(); ++i)
    if (x <= pts_[i + 1].first) {
      const auto& [x0, y0] = pts_[i];
      const auto& [x1, y1] = pts_[i + 1];
      return y0 + (x - x0) * (y1 - y0) / (x1 - x0);
    }
  const auto& [xl, yl] = pts_.back();
  return yl + (x - xl) / Rat(seq.l.back());
}

Rat PiecewiseProfile::rho_bij_inverse(const Rat& y) const {
  if (pts_.empty() || y <= pts_.front().second) return y;
  for (std::size_t i = 0; i + 1 < pts_.size(); ++i)
    if (y <= pts_[i + 1].second) {
      const auto& [x0, y0] = pts_[i];
      const auto& [x1, y1] = pts_[i + 1];
      return x0 + (y - y0) * (x1 - x0) / (y1 - y0);
    }
  const auto& [xl, yl] = pts_.back();
  return xl + (y - yl) * Rat(seq.l.back());
}

std::string HypothesisReport::to_text() const {
  std::ostringstream os;
  os << "profile series: partial sum " << profile_partial_sum << ", "
     << (profile_summable ? "summable" : "not summable") << "\n";
  os << "diameter series: partial sum " << diameter_partial_sum << ", "
     << (diameter_summable ? "summable" : "not summable") << "\n";
  if (has_target)
    os << "composite exponent " << fitted_exponent << " (epsilon " << epsilon
       << ")\n";
  return os.str();
}

HypothesisReport hypothesis_report(const ProfileSpec& rho,
                                   const DeltaSequences& seq,
                                   const ProfileSpec* target_rho,
                                   const PiecewiseProfile* source_bij) {
  HypothesisReport rep;
  const int M = 24;
  double kp = 1;
  for (int m = 0; m <= M; ++m) {
    rep.profile_terms.push_back(rho.eval(kp) / kp);
    rep.profile_partial_sum += rep.profile_terms.back();
    kp *= static_cast<double>(seq.kappa);
  }
  {
    // ratio-test verdict on the tail
    double worst = 0;
    for (std::size_t m = rep.profile_terms.size() / 2;
         m + 1 < rep.profile_terms.size(); ++m)
      if (rep.profile_terms[m] > 0)
        worst = std::max(worst, rep.profile_terms[m + 1] / rep.profile_terms[m]);
    rep.profile_summable = worst < 0.95;
  }
  for (std::size_t m = 1; m < seq.l.size(); ++m) {
    // l_m exp(-l_{m-1}) computed in the log domain to dodge overflow
    double ln_lm = std::log(mpz_get_d(seq.l[m].get_mpz_t()));
    if (!std::isfinite(ln_lm))
      ln_lm = mpz_sizeinbase(seq.l[m].get_mpz_t(), 2) * std::log(2.0);
    double lprev = mpz_get_d(seq.l[m - 1].get_mpz_t());
    if (!std::isfinite(lprev)) lprev = 1e300;
    rep.diameter_terms.push_back(std::exp(ln_lm - lprev));
    rep.diameter_partial_sum += rep.diameter_terms.back();
  }
  {
    double worst = 0;
    for (std::size_t m = rep.diameter_terms.size() / 2;
         m + 1 < rep.diameter_terms.size(); ++m)
      if (rep.diameter_terms[m] > 1e-300)
        worst = std::max(worst,
                         rep.diameter_terms[m + 1] / rep.diameter_terms[m]);
    rep.diameter_summable = rep.diameter_terms.empty() ? false : worst < 0.95;
  }
  if (target_rho && source_bij) {
    rep.has_target = true;
    // least-squares slope of log target_rho(rho_bij^{-1}(x)) vs log x
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    double x = static_cast<double>(seq.kappa);
    for (int j = 1; j <= 18; ++j, x *= static_cast<double>(seq.kappa)) {
      Rat xin = source_bij->rho_bij_inverse(Rat(x));
      double pre = mpq_get_d(xin.get_mpq_t());
      if (!std::isfinite(pre) || pre <= 1) continue;
      double phi = target_rho->eval(pre);
      double lx = std::log(x), ly = std::log(phi);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
      ++n;
    }
    if (n >= 2) {
      rep.fitted_exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
      rep.epsilon = 1.0 - rep.fitted_exponent;
    }
  }
  return rep;
}

}  // namespace lab
