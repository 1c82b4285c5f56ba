#pragma once
// Machinery for moduli beyond the zero-data range (q > 1e5): a lower bound
// for L(1,chi) of quadratic characters via Pell fundamental units, an upper
// bound for exceptional (Siegel-type) real zeros, bounds for L'(sigma,chi)
// and the Laurent constant b(chi), the two-prong psi/theta upper bound in
// log space, the kappa-feasibility test behind the x/(log x)^Z envelopes,
// and the x0(q) validity thresholds.  Parameters x live far beyond double
// range here, so every bound is carried as a logarithm.

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "apb/arithmetic.hpp"

namespace apb {

inline constexpr double kR1 = 9.645908801;

namespace detail {

inline double logsumexp(double a, double b) {
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

inline double log_mpz(const mpz_class& z) {
  long e = 0;
  double m = mpz_get_d_2exp(&e, z.get_mpz_t());
  return std::log(m) + (double)e * std::log(2.0);
}

// Fundamental solution of x^2 - d y^2 = +-1 by the continued fraction of
// sqrt(d); returns the norm through `n1`.
inline void pell_unit(const mpz_class& d, mpz_class& x1, mpz_class& y1, int& n1) {
  mpz_class a0 = sqrt(d);
  mpz_class P = 0, Q = 1, a = a0;
  mpz_class p_prev = 1, p_cur = a0, q_prev = 0, q_cur = 1;
  for (int k = 1;; ++k) {
    P = a * Q - P;
    Q = (d - P * P) / Q;
    if (Q == 1) {
      x1 = p_cur;
      y1 = q_cur;
      n1 = (k % 2 == 0) ? 1 : -1;
      return;
    }
    a = (a0 + P) / Q;
    mpz_class pn = a * p_cur + p_prev, qn = a * q_cur + q_prev;
    p_prev = p_cur;
    p_cur = pn;
    q_prev = q_cur;
    q_cur = qn;
  }
}

}  // namespace detail

struct PellSolution {
  uint64_t d = 0;
  mpz_class v0, u0;  // minimal positive integers with v0^2 - d u0^2 = 4
  double log_eta = 0;  // log((v0 + u0 sqrt(d))/2)
};

// Minimal positive solution of v^2 - d u^2 = 4.  Solutions correspond to
// norm-one units (v + u sqrt(d))/2 of a quadratic ring: for d = 0 mod 4 the
// substitution v = 2w reduces to w^2 - (d/4) u^2 = 1; for d = 5 mod 8 the
// ring Z[(1+sqrt(d))/2] may contain a unit whose cube is the fundamental
// unit of Z[sqrt(d)], recovered here by solving b(db^2 + 3n) = 2 y1 exactly;
// in every other congruence class v and u are forced even, so the minimum
// is twice the fundamental solution of the norm-one Pell equation.
inline PellSolution pell_fundamental(uint64_t d_in) {
  if (d_in == 0) throw std::domain_error("pell_fundamental: d must be positive");
  mpz_class d((unsigned long)d_in);
  if (mpz_perfect_square_p(d.get_mpz_t()))
    throw std::domain_error("pell_fundamental: d is a perfect square");

  mpz_class v0, u0;
  if (d % 4 == 0) {
    mpz_class e = d / 4, x1, y1;
    int n1 = 0;
    detail::pell_unit(e, x1, y1, n1);
    if (n1 == -1) {
      mpz_class xs = x1 * x1 + e * y1 * y1, ys = 2 * x1 * y1;
      x1 = xs;
      y1 = ys;
    }
    v0 = 2 * x1;
    u0 = y1;
  } else {
    mpz_class x1, y1;
    int n1 = 0;
    detail::pell_unit(d, x1, y1, n1);

    bool half = false;
    if (d % 8 == 5) {
      // look for the cube root (a + b sqrt(d))/2 of x1 + y1 sqrt(d)
      mpz_class rhs = 2 * y1;
      mpz_class lo = 1, hi = rhs / d + 2;
      mpz_root(hi.get_mpz_t(), hi.get_mpz_t(), 3);
      hi += 2;
      while (lo <= hi) {
        mpz_class b = (lo + hi) / 2;
        mpz_class f = b * (d * b * b + 3 * n1);
        if (f == rhs) {
          mpz_class den = d * b * b + n1;
          if (den > 0 && (2 * x1) % den == 0) {
            mpz_class aa = 2 * x1 / den;
            if (mpz_odd_p(aa.get_mpz_t()) && mpz_odd_p(b.get_mpz_t()) &&
                aa * aa - d * b * b == 4 * n1) {
              if (n1 == 1) {
                v0 = aa;
                u0 = b;
              } else {
                v0 = (aa * aa + d * b * b) / 2;
                u0 = aa * b;
              }
              half = true;
            }
          }
          break;
        }
        if (f < rhs)
          lo = b + 1;
        else
          hi = b - 1;
      }
    }
    if (!half) {
      if (n1 == -1) {
        mpz_class xs = x1 * x1 + d * y1 * y1, ys = 2 * x1 * y1;
        x1 = xs;
        y1 = ys;
      }
      v0 = 2 * x1;
      u0 = 2 * y1;
    }
  }

  if (v0 * v0 - d * u0 * u0 != 4)
    throw std::logic_error("pell_fundamental: internal identity check failed");

  PellSolution s;
  s.d = d_in;
  s.v0 = v0;
  s.u0 = u0;
  double lv = detail::log_mpz(v0);
  double lu = detail::log_mpz(u0) + 0.5 * std::log((double)d_in);
  s.log_eta = detail::logsumexp(lv, lu) - std::log(2.0);
  return s;
}

// Lower bound for L(1,chi) of a primitive quadratic character of modulus q:
// min{46 pi, max{log((sqrt(q+4)+sqrt(q))/2), 12}} / sqrt(q).  The max switches
// branches near q = e^24 - 2 and the min near q = e^(92 pi) - 2.
inline double l1_lower(uint64_t q) {
  if (q < 400000) throw std::domain_error("l1_lower: need q >= 4e5");
  double sq = std::sqrt((double)q);
  double logterm = std::log(0.5 * (std::sqrt((double)q + 4.0) + sq));
  return std::min(46.0 * M_PI, std::max(logterm, 12.0)) / sq;
}

struct ExceptionalCap {
  double beta_max = 0;  // every real zero satisfies beta <= beta_max
  bool vacuous = false;  // q small enough that no real zeros exist at all
};

// Upper bound for real zeros of quadratic L-functions mod q.  Below 4e5 the
// verified absence of real zeros makes the statement vacuous, which is
// reported through the flag.
inline ExceptionalCap exceptional_zero_cap(uint64_t q) {
  if (q < 3) throw std::domain_error("exceptional_zero_cap: need q >= 3");
  double lq = std::log((double)q);
  ExceptionalCap c;
  c.beta_max = 1.0 - 40.0 / (std::sqrt((double)q) * lq * lq);
  c.vacuous = q <= 400000;
  return c;
}

// Upper bound for sum over all critical-strip zeros of 2/|rho(2-rho)|.
inline double zero_sum_bound(uint64_t q) {
  if (q < 100000) throw std::domain_error("zero_sum_bound: need q >= 1e5");
  double lq = std::log((double)q);
  return std::sqrt((double)q) * lq * lq / 40.0 + 3.4596 * lq * lq + 15.01 * lq +
         16.126;
}

// |L'(sigma,chi)| <= 0.27356 log^2 q near sigma = 1.
inline double lprime_bound(uint64_t q) {
  if (q < 400000) throw std::domain_error("lprime_bound: need q >= 4e5");
  double lq = std::log((double)q);
  return 0.27356 * lq * lq;
}

// |b(chi)| <= 0.2515 q log q for the Laurent constant at s = 0.
inline double bchi_bound(uint64_t q) {
  if (q < 100000) throw std::domain_error("bchi_bound: need q >= 1e5");
  double lq = std::log((double)q);
  return 0.2515 * (double)q * lq;
}

// The character-sum remainder of the truncated explicit formula:
// (phi(q)/x)(log q log x / log 2 + 0.2516 q log q).
inline double epsilon1(uint64_t q, double x) {
  if (q < 100000) throw std::domain_error("epsilon1: need q >= 1e5");
  if (!(x > 2.0)) throw std::domain_error("epsilon1: need x > 2");
  double lq = std::log((double)q);
  double phi = (double)build_profile(q).phi;
  return phi / x * (lq * std::log(x) / std::log(2.0) + 0.2516 * (double)q * lq);
}

struct LargeQBound {
  double log_psi = 0;    // log of the bound on |psi(x;q,a) - x/phi(q)|
  double log_theta = 0;  // log of the bound on |theta(x;q,a) - x/phi(q)|
  double X = 0;          // sqrt(log x / R1)
  double alpha = 0;      // X / log q - 1
  double log_H = 0;      // X - log q, the truncation height in logs
  bool exceptional_term = false;
};

// Two-prong upper bound for q >= 1e5 and x >= e^(4 R1 log^2 q), in logs:
//   psi:   [1.012/phi(q) x^(1 - 40/(sqrt(q) log^2 q))] + 1.4579 x X e^(-X)
//   theta: the same plus 1.001 sqrt(x),
// where the bracketed term is present only if an exceptional zero is allowed.
inline LargeQBound largeq_psi_theta_bound(uint64_t q, double log_x,
                                          bool exceptional_allowed) {
  if (q < 100000) throw std::domain_error("largeq_psi_theta_bound: need q >= 1e5");
  double lq = std::log((double)q);
  if (!(log_x >= 4.0 * kR1 * lq * lq))
    throw std::domain_error("largeq_psi_theta_bound: x below e^(4 R1 log^2 q)");

  LargeQBound b;
  b.X = std::sqrt(log_x / kR1);
  b.alpha = b.X / lq - 1.0;
  b.log_H = b.X - lq;
  b.exceptional_term = exceptional_allowed;

  double envelope = std::log(1.4579) + log_x + std::log(b.X) - b.X;
  if (exceptional_allowed) {
    double phi = (double)build_profile(q).phi;
    double cap = 1.0 - 40.0 / (std::sqrt((double)q) * lq * lq);
    double siegel = std::log(1.012) - std::log(phi) + cap * log_x;
    b.log_psi = detail::logsumexp(siegel, envelope);
  } else {
    b.log_psi = envelope;
  }
  b.log_theta = detail::logsumexp(b.log_psi, std::log(1.001) + 0.5 * log_x);
  return b;
}

struct KappaFeasibility {
  bool feasible = false;
  double slack1 = 0, slack2 = 0, slack3 = 0;  // branch value minus Z
};

// Feasibility of the envelope exponent Z against the three kappa branches:
//   Z <= min{ 460.516 k1/(log k1 + 13.087),
//             (sqrt(k2/R1) - 0.85317)/log k2 - 1/2,
//             (k3 - 6.44)/(2 log k3) }.
inline KappaFeasibility kappa_feasible(double Z, double k1, double k2, double k3) {
  if (!(k1 >= 0.0132)) throw std::domain_error("kappa_feasible: need kappa1 >= 0.0132");
  if (!(k2 > 1.0)) throw std::domain_error("kappa_feasible: need kappa2 > 1");
  if (!(k3 > 1.0)) throw std::domain_error("kappa_feasible: need kappa3 > 1");
  double b1 = 460.516 * k1 / (std::log(k1) + 13.087);
  double b2 = (std::sqrt(k2 / kR1) - 0.85317) / std::log(k2) - 0.5;
  double b3 = (k3 - 6.44) / (2.0 * std::log(k3));
  KappaFeasibility f;
  f.slack1 = b1 - Z;
  f.slack2 = b2 - Z;
  f.slack3 = b3 - Z;
  f.feasible = Z <= b1 && Z <= b2 && Z <= b3;
  return f;
}

// log x0(q) = 0.03 A sqrt(q) log^3 q, the validity threshold of the uniform
// x/(log x)^A bounds.
inline double x0_log_threshold(uint64_t q, double A = 1.0) {
  if (q < 100000) throw std::domain_error("x0_log_threshold: need q >= 1e5");
  if (!(A >= 1.0 && A <= 8.0)) throw std::domain_error("x0_log_threshold: need 1 <= A <= 8");
  double lq = std::log((double)q);
  return 0.03 * A * std::sqrt((double)q) * lq * lq * lq;
}

// Validity check for the pi conversion at large q:
// x/(log x)^(Z+1) >= 2000 exp(max{k1 sqrt(q) log^3 q, k2, k3, Z + 28}).
inline bool pi_threshold_ok(uint64_t q, double log_x, double Z, double k1,
                            double k2, double k3) {
  if (q < 100000) throw std::domain_error("pi_threshold_ok: need q >= 1e5");
  if (!(log_x > 1.0)) throw std::domain_error("pi_threshold_ok: need log x > 1");
  double lq = std::log((double)q);
  double floor_log = std::max(std::max(k1 * std::sqrt((double)q) * lq * lq * lq, Z + 28.0),
                              std::max(k2, k3));
  return log_x - (Z + 1.0) * std::log(log_x) >= std::log(2000.0) + floor_log;
}

}  // namespace apb
