#pragma once

// Small-conductor zero oracle.  Locates zeros of Dirichlet L-functions on the
// critical line by sign changes of the rotated completed L-function
//
//   Z(t) = Re[ e^{i(theta_chi(t) - arg(eps)/2)} L(1/2 + it, chi) ],
//
// which is real-valued for real t.  L is evaluated through Hurwitz zeta
// values, L(s,chi) = d^{-s} sum_a chi(a) zeta(s, a/d), each computed by
// Euler-Maclaurin summation with per-residue caches of log(n + a/d) and
// (n + a/d)^{-1/2}.  Supported conductors: 1, 3, 4 (one real primitive
// character each) and 5 (a real character and one conjugate pair).
//
// This is a desk-grade locator, not a certification: ordinates are accurate
// to well under 1e-6 and the final count is checked against the two-sided
// zero-counting window, but no Turing-style verification is attempted.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "zero_counts.hpp"
#include "zeros_io.hpp"

namespace apb {

namespace oraclez {

using cd = std::complex<double>;

// Lanczos g=7 log-gamma, valid for Re z > 0 (all uses have Re z >= 1/8).
inline cd log_gamma(cd z) {
  static const double c[9] = {0.99999999999980993,     676.5203681218851,
                              -1259.1392167224028,     771.32342877765313,
                              -176.61502916214059,     12.507343278686905,
                              -0.13857109526572012,    9.9843695780195716e-6,
                              1.5056327351493116e-7};
  z -= 1.0;
  cd x = c[0];
  for (int i = 1; i < 9; ++i) x += c[i] / (z + (double)i);
  cd t = z + 7.5;
  return 0.5 * std::log(2.0 * M_PI) + (z + 0.5) * std::log(t) - t + std::log(x);
}

// B_{2k} / (2k)! for the Euler-Maclaurin correction terms.
inline const double* bern_over_fact() {
  static const double b[12] = {8.33333333333333287e-02,  -1.38888888888888894e-03,
                               3.30687830687830710e-05,  -8.26719576719576754e-07,
                               2.08767569878681002e-08,  -5.28419013868749322e-10,
                               1.33825365306846789e-11,  -3.38968029632258272e-13,
                               8.58606205627784517e-15,  -2.17486869855806192e-16,
                               5.50900282836022953e-18,  -1.39544646858125223e-19};
  return b;
}

// Per-residue cache for zeta(1/2 + it, alpha).
struct HurwitzCache {
  double alpha = 1.0;
  std::vector<double> lnr;    // log(n + alpha)
  std::vector<double> rsqi;   // (n + alpha)^{-1/2}

  explicit HurwitzCache(double a = 1.0) : alpha(a) {}

  void ensure(size_t n) {
    size_t old = lnr.size();
    if (n <= old) return;
    lnr.resize(n);
    rsqi.resize(n);
    for (size_t k = old; k < n; ++k) {
      double r = (double)k + alpha;
      lnr[k] = std::log(r);
      rsqi[k] = 1.0 / std::sqrt(r);
    }
  }
};

// zeta(1/2 + it, alpha) by Euler-Maclaurin with N ~ |t|/2 summed terms and
// 12 Bernoulli corrections; absolute accuracy ~1e-10 over the heights used.
inline cd hurwitz_half(double t, HurwitzCache& cache) {
  const cd s(0.5, t);
  size_t N = (size_t)std::ceil(0.5 * std::abs(t)) + 30;
  cache.ensure(N);
  double sr = 0, si = 0;
  for (size_t n = 0; n < N; ++n) {
    double ph = t * cache.lnr[n];
    sr += cache.rsqi[n] * std::cos(ph);
    si -= cache.rsqi[n] * std::sin(ph);
  }
  cd sum(sr, si);
  double P = (double)N + cache.alpha;
  double lp = std::log(P);
  cd Pms = std::exp(-s * lp);                  // P^{-s}
  sum += Pms * P / (s - 1.0);                  // P^{1-s}/(s-1)
  sum += 0.5 * Pms;
  const double* b = bern_over_fact();
  cd poch = s;                                 // s (s+1) ... incrementally
  cd Ppow = Pms / P;                           // P^{-s-1}, then * P^{-2} each step
  double invP2 = 1.0 / (P * P);
  for (int k = 1; k <= 12; ++k) {
    sum += b[k - 1] * poch * Ppow;
    poch *= (s + (double)(2 * k - 1)) * (s + (double)(2 * k));
    Ppow *= invP2;
  }
  return sum;
}

struct OracleCharacter {
  uint64_t conductor = 1;
  int index = 1;
  bool real = true;
  int parity = 0;  // 0 if chi(-1) = 1, 1 if chi(-1) = -1
  std::vector<cd> values;  // chi(r) for r = 0..d-1
};

inline std::vector<OracleCharacter> oracle_characters(uint64_t d) {
  const cd I(0, 1);
  switch (d) {
    case 1:
      return {{1, 1, true, 0, {cd(1, 0)}}};
    case 3:
      return {{3, 1, true, 1, {cd(0, 0), cd(1, 0), cd(-1, 0)}}};
    case 4:
      return {{4, 1, true, 1, {cd(0, 0), cd(1, 0), cd(0, 0), cd(-1, 0)}}};
    case 5:
      return {{5, 1, true, 0, {cd(0, 0), cd(1, 0), cd(-1, 0), cd(-1, 0), cd(1, 0)}},
              {5, 2, false, 1, {cd(0, 0), cd(1, 0), I, -I, cd(-1, 0)}}};
    default:
      throw std::domain_error("unsupported conductor " + std::to_string(d));
  }
}

// Real rotated completed L-function along the critical line.
class ZFunction {
 public:
  explicit ZFunction(const OracleCharacter& chi) : chi_(chi) {
    uint64_t d = chi_.conductor;
    for (uint64_t a = 1; a <= d; ++a)
      if (std::abs(chi_.values[a % d]) > 0.5) {
        residues_.push_back(a);
        caches_.emplace_back((double)a / (double)d);
      }
    // Root number eps = tau(chi) / (i^parity sqrt(d)); the rotation uses
    // arg(eps)/2 (zero for the real characters here).
    cd tau(0, 0);
    for (uint64_t n = 1; n <= d; ++n)
      tau += chi_.values[n % d] * std::exp(cd(0, 2.0 * M_PI * (double)n / (double)d));
    if (d == 1) tau = 1.0;
    cd eps = tau / (std::pow(cd(0, 1), chi_.parity) * std::sqrt((double)d));
    half_arg_eps_ = 0.5 * std::arg(eps);
    log_d_over_pi_ = std::log((double)d / M_PI);
  }

  double operator()(double t) const {
    uint64_t d = chi_.conductor;
    cd L(0, 0);
    for (size_t i = 0; i < residues_.size(); ++i) {
      cd z = hurwitz_half(t, caches_[i]);
      L += chi_.values[residues_[i] % d] * z;
    }
    // multiply by d^{-s}
    double ld = std::log((double)d);
    L *= std::exp(cd(-0.5 * ld, -t * ld));
    double a = chi_.parity;
    cd half = log_gamma(cd(0.25 + 0.5 * a, 0.5 * t));
    double theta = 0.5 * t * log_d_over_pi_ + half.imag();
    cd rot = std::exp(cd(0, theta - half_arg_eps_));
    return (rot * L).real();
  }

  const OracleCharacter& character() const { return chi_; }

 private:
  OracleCharacter chi_;
  std::vector<uint64_t> residues_;
  mutable std::vector<HurwitzCache> caches_;
  double half_arg_eps_ = 0;
  double log_d_over_pi_ = 0;
};

// Refine a bracketed sign change to ~1e-9 by bisection with a secant finish.
inline double refine_zero(const ZFunction& Z, double a, double b, double fa, double fb) {
  for (int i = 0; i < 18 && b - a > 1e-9; ++i) {
    double m = 0.5 * (a + b);
    double fm = Z(m);
    if (fm == 0.0) return m;
    if ((fa < 0) != (fm < 0)) {
      b = m;
      fb = fm;
    } else {
      a = m;
      fa = fm;
    }
  }
  for (int i = 0; i < 4 && fb != fa; ++i) {
    double m = b - fb * (b - a) / (fb - fa);
    if (!(m > a && m < b)) break;
    double fm = Z(m);
    if (fm == 0.0) return m;
    if ((fa < 0) != (fm < 0)) {
      b = m;
      fb = fm;
    } else {
      a = m;
      fa = fm;
    }
  }
  return 0.5 * (a + b);
}

// Collect the zeros of Z on [lo, hi] by a fixed-step scan with sign-change
// refinement, plus two guards against missed zeros: every same-sign local
// minimum of |Z| is rescanned at a finer step, as is every gap wider than
// about three mean spacings.
inline void scan_range(const ZFunction& Z, double lo, double hi, double step,
                       std::vector<double>& out) {
  struct Node {
    double t, f;
  };
  std::vector<double> found;
  auto subscan = [&](double a, double b, double st) -> void {
    if (st < 1e-7) return;
    double prev_t = a, prev_f = Z(a);
    for (double t = a + st; t < b + 0.5 * st; t += st) {
      double tt = std::min(t, b);
      double f = Z(tt);
      if (prev_f == 0.0)
        found.push_back(prev_t);
      else if ((prev_f < 0) != (f < 0))
        found.push_back(refine_zero(Z, prev_t, tt, prev_f, f));
      prev_t = tt;
      prev_f = f;
      if (tt >= b) break;
    }
  };
  // primary pass, keeping the sampled values for the dip guard
  std::vector<Node> grid;
  grid.reserve((size_t)((hi - lo) / step) + 2);
  for (double t = lo; t < hi + 0.5 * step; t += step) grid.push_back({std::min(t, hi), Z(std::min(t, hi))});
  for (size_t i = 0; i + 1 < grid.size(); ++i) {
    double fa = grid[i].f, fb = grid[i + 1].f;
    if (fa == 0.0)
      found.push_back(grid[i].t);
    else if ((fa < 0) != (fb < 0))
      found.push_back(refine_zero(Z, grid[i].t, grid[i + 1].t, fa, fb));
  }
  if (!grid.empty() && grid.back().f == 0.0) found.push_back(grid.back().t);
  // dip guard: same-sign local minima of |Z|
  for (size_t i = 1; i + 1 < grid.size(); ++i) {
    double f0 = std::fabs(grid[i - 1].f), f1 = std::fabs(grid[i].f), f2 = std::fabs(grid[i + 1].f);
    bool same_sign = (grid[i - 1].f < 0) == (grid[i].f < 0) && (grid[i].f < 0) == (grid[i + 1].f < 0);
    if (same_sign && f1 < f0 && f1 < f2 && f1 < 0.5 * std::min(f0, f2))
      subscan(grid[i - 1].t, grid[i + 1].t, step / 20.0);
  }
  std::sort(found.begin(), found.end());
  found.erase(std::unique(found.begin(), found.end(),
                          [](double x, double y) { return std::fabs(x - y) < 1e-7; }),
              found.end());
  // gap guard: rescan gaps wider than ~3 mean spacings
  double d = (double)Z.character().conductor;
  std::vector<std::pair<double, double>> gaps;
  for (size_t i = 0; i + 1 < found.size(); ++i) {
    double mid = 0.5 * (found[i] + found[i + 1]);
    double dens = std::log(d * (std::fabs(mid) + 10.0) / (2.0 * M_PI)) / (2.0 * M_PI);
    double mean_gap = 1.0 / std::max(dens, 1e-3);
    if (found[i + 1] - found[i] > 3.0 * mean_gap)
      gaps.push_back({found[i] + 1e-6, found[i + 1] - 1e-6});
  }
  for (auto& g : gaps) subscan(g.first, g.second, step / 20.0);
  std::sort(found.begin(), found.end());
  found.erase(std::unique(found.begin(), found.end(),
                          [](double x, double y) { return std::fabs(x - y) < 1e-7; }),
              found.end());
  out.insert(out.end(), found.begin(), found.end());
}

}  // namespace oraclez

// Ordinates for one archive file of conductor d: positive ordinates for a
// real character, |t| over both signs for one member of a conjugate pair.
// The count is validated against the two-sided zero-counting window.
inline ZeroList oracle_zero_list(uint64_t d, int index, double height, double step = 0.03) {
  auto chars = oraclez::oracle_characters(d);
  const oraclez::OracleCharacter* chi = nullptr;
  for (const auto& c : chars)
    if (c.index == index) chi = &c;
  if (!chi) throw std::domain_error("no character with index " + std::to_string(index) +
                                    " for conductor " + std::to_string(d));
  oraclez::ZFunction Z(*chi);
  std::vector<double> ts;
  double start = d == 1 ? 2.0 : 1e-4;  // zeta's first zero is far from t=0
  if (chi->real) {
    oraclez::scan_range(Z, start, height, step, ts);
  } else {
    std::vector<double> both;
    oraclez::scan_range(Z, -height, -start, step, both);
    oraclez::scan_range(Z, start, height, step, both);
    for (double t : both) ts.push_back(std::fabs(t));
    std::sort(ts.begin(), ts.end());
  }
  ts.erase(std::remove_if(ts.begin(), ts.end(), [&](double t) { return t > height; }), ts.end());
  // window check at the top: N(height, chi) must sit inside the two-sided
  // counting bound, else the scan missed zeros (or found spurious ones).
  long long N = chi->real ? 2 * (long long)ts.size() : (long long)ts.size();
  IV di = IV::exact((double)d), Ti = IV::exact(height);
  IV lo_ok, hi_ok;
  if (d == 1) {
    IV main = Ti / pi_iv() * log(Ti / (2.0 * pi_iv() * e_iv())) + 1.75;
    IV slack = IV::dec(0.34) * log(Ti) + IV::dec(3.996) + 25.0 / (24.0 * pi_iv() * Ti);
    lo_ok = main - slack;
    hi_ok = main + slack;
  } else {
    lo_ok = nt_general_main(di, Ti) - nt_general_slack(di, Ti);
    hi_ok = nt_general_main(di, Ti) + nt_general_slack(di, Ti);
  }
  if (!((double)N > lo_ok.lo && (double)N < hi_ok.hi))
    throw std::runtime_error("oracle count " + std::to_string(N) + " for conductor " +
                             std::to_string(d) + " falls outside the counting window");
  ZeroList z;
  z.conductor = d;
  z.index = index;
  z.real_character = chi->real;
  z.verified_height = height;
  z.ordinates = std::move(ts);
  return z;
}

// Contracted oracle entry point: the single primitive character for
// d in {1, 3, 4} at small heights.
inline std::vector<double> zero_oracle(uint64_t d, double height) {
  if (d != 1 && d != 3 && d != 4)
    throw std::domain_error("unsupported conductor " + std::to_string(d));
  return oracle_zero_list(d, 1, height).ordinates;
}

}  // namespace apb
