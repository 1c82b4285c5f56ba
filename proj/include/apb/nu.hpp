#pragma once

// The nu functions: data-assisted upper bounds for sums of 1/|rho| over low
// zeros of the L-functions modulo q.  For each divisor d of q the characters
// of conductor d contribute
//
//   nu0(d,h)    = sum over zeros with |gamma| <= h of 1/sqrt(gamma^2 + 1/4)
//   nu0bar(d,h) = the matching counterweight built from Theta and the count,
//
// aggregated so that nu2(q,H0) = sum_{d|q} (nu0 - nu0bar).  Archive files
// carry either the positive ordinates of a real character or one member of
// each conjugate pair, so every file enters with a factor 2.  The H0 = 0
// (no data) and 0 <= H0 < 1 branches use the window at height 1 with an exact
// integer floor.  nu3 collects the H-dependent remainder and
// nu = nu2 + nu3 feeds the T1 term of the master bound.

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "arithmetic.hpp"
#include "interval.hpp"
#include "zero_counts.hpp"
#include "zeros_io.hpp"

namespace apb {

struct NuDivisor {
  uint64_t d = 0;
  uint64_t phi_star = 0;
  double H0 = 0;
  IV nu0 = IV::exact(0.0);
  IV nu0_bar = IV::exact(0.0);
};

struct NuResult {
  IV nu2 = IV::exact(0.0);
  IV nu3 = IV::exact(0.0);
  IV nu = IV::exact(0.0);
  std::vector<NuDivisor> per_divisor;
};

namespace detail {

// Doubled per-file sums for conductor d up to height h: the 1/sqrt(g^2+1/4)
// sum and the zero count, each accounting for both halves / both pair
// members.  Requires full coverage of the conductor.
struct ConductorSums {
  IV inv_sum = IV::exact(0.0);
  uint64_t count2 = 0;
};

inline ConductorSums conductor_sums(const ZeroArchive& arch, uint64_t d, uint64_t phi_star_d,
                                    double h) {
  if (arch.covered_height(d, phi_star_d) < h)
    throw std::runtime_error("zero archive does not cover conductor " + std::to_string(d) +
                             " to height " + std::to_string(h));
  ConductorSums s;
  for (const ZeroList* z : arch.conductor_files(d)) {
    size_t n = z->count_below(h);
    for (size_t k = 0; k < n; ++k) {
      IV g = z->ordinate_iv(k);
      s.inv_sum = s.inv_sum + 1.0 / sqrt(g * g + 0.25);
    }
    s.count2 += 2 * n;
  }
  s.inv_sum = 2.0 * s.inv_sum;
  return s;
}

}  // namespace detail

// The floor that replaces N(1,chi) when no data is used:
// floor((1/pi) log(d/2pi e) + C1 log d + C2).
inline long long nu_window_floor(uint64_t d) {
  IV di = IV::exact((double)d);
  IV v = log(di / (2.0 * pi_iv() * e_iv())) / pi_iv() + C1_iv() * log(di) + C2_iv();
  return exact_floor(v);
}

inline NuResult nu_functions(const ModulusProfile& mp, const ZeroArchive& arch,
                             const std::map<uint64_t, double>& H0, double H) {
  if (!(H >= 1.0)) throw std::domain_error("nu_functions requires H >= 1");
  NuResult r;
  for (uint64_t d : mp.divisors) {
    uint64_t ps = mp.phi_star.at(d);
    if (ps == 0) continue;  // no characters with this conductor
    auto it = H0.find(d);
    double h = it == H0.end() ? 0.0 : it->second;
    if (h < 0) throw std::domain_error("H0 must be nonnegative");
    if (h > H) throw std::domain_error("H0 must not exceed H");
    NuDivisor nd;
    nd.d = d;
    nd.phi_star = ps;
    nd.H0 = h;
    if (h >= 1.0) {
      auto s = detail::conductor_sums(arch, d, ps, h);
      nd.nu0 = s.inv_sum;
      nd.nu0_bar = (double)ps * theta_antideriv(IV::exact((double)d), IV::exact(h)) +
                   (double)s.count2 / IV::exact(h);
    } else {
      detail::ConductorSums s;  // empty when h == 0
      if (h > 0) s = detail::conductor_sums(arch, d, ps, h);
      IV root = sqrt(IV::exact(h) * IV::exact(h) + 0.25);
      IV coef = 1.0 / root - 1.0;
      long long flr = nu_window_floor(d);
      nd.nu0 = s.inv_sum;
      nd.nu0_bar = (double)ps * theta_antideriv(IV::exact((double)d), IV::exact(1.0)) -
                   coef * (double)ps * (double)flr + (double)s.count2 / root;
    }
    r.nu2 = r.nu2 + (nd.nu0 - nd.nu0_bar);
    r.per_divisor.push_back(nd);
  }
  IV Hi = IV::exact(H);
  IV sum_logs = IV::exact(0.0);
  for (uint64_t d : mp.divisors) {
    uint64_t ps = mp.phi_star.at(d);
    if (ps == 0) continue;
    IV l = log((double)d * Hi / (2.0 * pi_iv()));
    sum_logs = sum_logs + (double)ps * l * l;
  }
  r.nu3 = -(double)mp.phi * (1.0 / (2.0 * pi_iv()) + C1_iv() / Hi) + sum_logs / (2.0 * pi_iv());
  r.nu = r.nu2 + r.nu3;
  return r;
}

// Engine default H0 assignment: the largest of {0, 10, 10^2, 10^3, 10^4} that
// is both below H and fully covered by the archive for that conductor.
inline std::map<uint64_t, double> default_H0(const ModulusProfile& mp, const ZeroArchive& arch,
                                             double H) {
  std::map<uint64_t, double> h0;
  for (uint64_t d : mp.divisors) {
    uint64_t ps = mp.phi_star.at(d);
    if (ps == 0) continue;
    double pick = 0;
    double cover = arch.covered_height(d, ps);
    for (double v : {1e4, 1e3, 1e2, 10.0}) {
      if (v < H && v <= cover) {
        pick = v;
        break;
      }
    }
    h0[d] = pick;
  }
  return h0;
}

// The published tables' H0 assignment: heights were computed to 10^4 for
// d <= 12, 10^3 for d <= 1000, 10^2 for d <= 2500 and 10 for d <= 10^4; use
// the largest such value below H.
inline std::map<uint64_t, double> reference_H0(const ModulusProfile& mp, double H) {
  std::map<uint64_t, double> h0;
  for (uint64_t d : mp.divisors) {
    if (mp.phi_star.at(d) == 0) continue;
    double cap = d <= 12 ? 1e4 : d <= 1000 ? 1e3 : d <= 2500 ? 1e2 : d <= 10000 ? 10.0 : 0.0;
    double pick = 0;
    for (double v : {1e4, 1e3, 1e2, 10.0})
      if (v <= cap && v < H) {
        pick = v;
        break;
      }
    h0[d] = pick;
  }
  return h0;
}

}  // namespace apb
