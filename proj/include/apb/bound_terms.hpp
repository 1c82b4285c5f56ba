#pragma once
// Building blocks of the explicit psi error bound, per divisor (= conductor):
// closed forms for the low-zero envelopes g1/g2/g3, the boundary envelopes
// B1/B2/B, the x-dependent tail envelopes P and their maxima Q, the assembled
// per-character tail bound S, the divisor aggregation G, and the small
// correction W.  Everything rigorous is interval-valued.

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <vector>

#include "apb/arithmetic.hpp"
#include "apb/interval.hpp"
#include "apb/special.hpp"
#include "apb/zero_counts.hpp"

namespace apb {

inline IV iv_max(const IV& a, const IV& b) {
  return IV(std::max(a.lo, b.lo), std::max(a.hi, b.hi));
}

// Smallest admissible H for each m.
inline double H1_min(int m) {
  static const double table[] = {1011, 391, 231, 168, 137, 120, 109};
  if (m < 3) throw std::domain_error("H1_min: m < 3");
  return m <= 9 ? table[m - 3] : 102;
}

// Verified-GRH height for a given conductor; the d=1 value is the height of
// the large zeta verification, others scale as 1e8/d (rounded up so that
// d * h3(d) >= 1e8 certainly holds).
inline double h3_height(uint64_t d) {
  if (d == 0 || d > 100000) throw std::domain_error("h3_height: conductor out of range");
  if (d == 1) return 30610046000.0;
  double h = (IV::exact(1e8) / IV::exact((double)d)).hi;
  while ((IV::exact((double)d) * IV::exact(h)).lo < 1e8)
    h = std::nextafter(h, std::numeric_limits<double>::infinity());
  return h;
}

inline std::map<uint64_t, double> h3_policy(const ModulusProfile& mp) {
  std::map<uint64_t, double> h2;
  for (uint64_t d : mp.divisors) h2[d] = h3_height(d);
  return h2;
}

// Envelope for the partial-summation bound on zeros with H < |gamma| <= H2:
//   g1(H,H2) = H^{m+1} * ( M_d(H,H2)/H2^{m+1} + (m+1) Int_H^{H2} M_d(H,t)/t^{m+2} dt ).
inline IV g1_term(const IV& d, int m, const IV& H, const IV& H2) {
  if (m < 1) throw std::domain_error("g1_term: m < 1");
  IV two_pi = 2.0 * pi_iv();
  IV ratio_m = powi(H / H2, m);
  IV m2 = IV::exact((double)(m * m));
  IV first = H / (pi_iv() * m2) *
             ((1.0 + (double)m * log(d * H / two_pi)) -
              ratio_m * (1.0 + (double)m * log(d * H2 / two_pi)));
  IV second = (2.0 * log(d * H) +
               (1.0 - ratio_m * (H / H2)) / (double)(m + 1)) * C1_iv();
  return first + second + 2.0 * C2_iv();
}

// Envelope for the flat part of the tail above H2:
//   g2(H,H2) = H^{m+1} * (m+1)/2 * Int_{H2}^inf M_d(H2,t)/t^{m+2} dt.
inline IV g2_term(const IV& d, int m, const IV& H, const IV& H2) {
  if (m < 1) throw std::domain_error("g2_term: m < 1");
  IV two_pi = 2.0 * pi_iv();
  IV ratio_m = powi(H / H2, m);
  IV ratio_m1 = ratio_m * (H / H2);
  IV m2 = IV::exact((double)(m * m));
  IV first = ratio_m * H / (two_pi * m2) * (1.0 + (double)m * log(d * H2 / two_pi));
  IV second = ratio_m1 * (IV::exact(0.5) / (double)(m + 1) + log(d * H2)) * C1_iv();
  return first + second + ratio_m1 * C2_iv();
}

// x-decaying combination entering the divisor sum.
inline IV g3_term(const IV& d, int m, const IV& R, const IV& x, const IV& H, const IV& H2) {
  IV lx = log(x);
  IV decay = exp(lx / (R * log(d * H2)) - lx);
  return g1_term(d, m, H, H2) / sqrt(x) + g2_term(d, m, H, H2) * decay;
}

// Tail integrand u^{-(m+1)} x^{-1/(R log du)}, taken with log x as argument.
inline IV Y_func(const IV& d, int m, const IV& R, const IV& logx, const IV& u) {
  return exp(-logx / (R * log(d * u))) / powi(u, m + 1);
}

// Boundary envelopes for the tail integral, in terms of log x.
inline IV B1_term(const IV& d, int m, const IV& r, const IV& R, const IV& logx, const IV& H2) {
  IV lam = log(d * H2);
  IV md = 2.0 * (C1_iv() * lam + C2_iv());
  return md / powi(H2, m + 1) * exp(r * log(logx) - logx / (R * lam));
}

inline IV B2_term(const IV& d, int m, const IV& r, const IV& R, const IV& logx) {
  IV m1 = IV::exact((double)(m + 1));
  IV root = sqrt(R * m1);
  return powi(d, m) / pi_iv() * exp((r + 0.5) * log(logx)) / root *
         exp(-(2.0 * (double)m + 1.0) / root * sqrt(logx));
}

// Uniform (x-free) bound dominating H^{m+1} B1 always and H^{m+1} B2 in the
// regime where B2 applies.
inline IV B_term(const IV& d, int m, const IV& r, const IV& H, const IV& H2, const IV& R) {
  IV lam = log(d * H2);
  IV md = 2.0 * (C1_iv() * lam + C2_iv());
  IV e = exp(IV::exact(1.0));
  IV left = md * pow(r / e, r);
  IV right = pow(IV::exact((double)(m + 1)), r) * pow(lam, r + 1.0) /
             (pi_iv() * powi(d, m + 1) * powi(H2, m));
  return powi(H / H2, m + 1) * pow(R, r) * pow(lam, r) * iv_max(left, right);
}

namespace detail {
inline void check_r(const IV& r, int m) {
  if (!(r.lo > 0.25) || !(r.hi <= (double)(m + 1)))
    throw std::domain_error("tail envelope: need 1/4 < r <= m+1");
}
}  // namespace detail

// x-dependent tail envelopes (lam = log(d*H2); logx as argument so that the
// huge maximizers stay representable).
inline IV P1a_term(const IV& logx, int m, const IV& r, const IV& lam, const IV& H2, const IV& R) {
  detail::check_r(r, m);
  IV mm = IV::exact((double)m);
  IV decay = exp(-logx / (R * lam));
  IV t1 = 3.0 * pow(R, 0.25) * sqrt(lam) * pow(logx, r - 0.25) / (16.0 * pow(mm, 0.75));
  IV t2 = pow(logx, r) / (2.0 * mm);
  return (t1 + t2) * decay / powi(H2, m);
}

inline IV P1b_term(const IV& logx, int m, const IV& r, const IV& lam, const IV& H2, const IV& R) {
  detail::check_r(r, m);
  IV mm = IV::exact((double)m);
  IV decay = exp(-logx / (R * lam));
  IV t1 = pow(logx, r + 0.25) / (2.0 * pow(mm, 0.75) * pow(R, 0.25));
  IV t2 = 3.0 * pow(R, 0.25) * pow(logx, r - 0.25) / (32.0 * pow(mm, 1.25));
  return omega_m(m) * (t1 + t2) * decay / powi(H2, m);
}

inline IV P2a_term(const IV& logx, int m, const IV& r, const IV& lam, const IV& H2, const IV& R) {
  detail::check_r(r, m);
  IV mm = IV::exact((double)m);
  IV decay = exp(-logx / (R * lam));
  IV t1 = pow(logx, r + 1.0) / (2.0 * lam * mm * mm * R);
  IV t2 = 135.0 * sqrt(lam) * pow(logx, r + 0.25) / (256.0 * pow(mm, 1.25) * pow(R, 0.25));
  IV t3 = (mm * lam + 1.0) * pow(logx, r) / (2.0 * mm * mm);
  IV t4 = 35.0 * (2.0 * mm * lam + 3.0) * sqrt(lam) * pow(R, 0.25) * pow(logx, r - 0.25) /
          (512.0 * pow(mm, 1.75));
  return (t1 + t2 + t3 + t4) * decay / powi(H2, m);
}

inline IV P2b_term(const IV& logx, int m, const IV& r, const IV& lam, const IV& H2, const IV& R) {
  detail::check_r(r, m);
  IV mm = IV::exact((double)m);
  IV decay = exp(-logx / (R * lam));
  IV t1 = pow(logx, r + 0.75) / (2.0 * pow(mm, 1.25) * pow(R, 0.75));
  IV t2 = 15.0 * pow(logx, r + 0.25) / (32.0 * pow(mm, 1.75) * pow(R, 0.25));
  IV t3 = 105.0 * pow(R, 0.25) * pow(logx, r - 0.25) / (1024.0 * pow(mm, 2.25));
  return omega_m(m) * (t1 + t2 + t3) * decay / powi(H2, m);
}

// Maxima of the P envelopes over all x > 1.
inline IV Q1a_term(int m, const IV& r, const IV& lam, const IV& H2, const IV& R) {
  detail::check_r(r, m);
  IV mm = IV::exact((double)m);
  IV e4 = exp(IV::exact(0.25));
  IV t1 = 3.0 * e4 * pow(r - 0.25, r - 0.25) * pow(lam, r + 0.25) / (16.0 * pow(mm, 0.75));
  IV t2 = pow(r, r) * pow(lam, r) / (2.0 * mm);
  return pow(R, r) / (exp(r) * powi(H2, m)) * (t1 + t2);
}

inline IV Q1b_term(int m, const IV& r, const IV& lam, const IV& H2, const IV& R) {
  detail::check_r(r, m);
  IV mm = IV::exact((double)m);
  IV e4 = exp(IV::exact(0.25));
  IV t1 = pow(r + 0.25, r + 0.25) * pow(lam, r + 0.25) / (2.0 * e4 * pow(mm, 0.75));
  IV t2 = 3.0 * e4 * pow(r - 0.25, r - 0.25) * pow(lam, r - 0.25) / (32.0 * pow(mm, 1.25));
  return omega_m(m) * pow(R, r) / (exp(r) * powi(H2, m)) * (t1 + t2);
}

inline IV Q2a_term(int m, const IV& r, const IV& lam, const IV& H2, const IV& R) {
  detail::check_r(r, m);
  IV mm = IV::exact((double)m);
  IV e = exp(IV::exact(1.0));
  IV e4 = exp(IV::exact(0.25));
  IV t1 = pow(r + 1.0, r + 1.0) * pow(lam, r) / (2.0 * e * mm * mm);
  IV t2 = 135.0 * pow(r + 0.25, r + 0.25) * pow(lam, r + 0.75) / (256.0 * e4 * pow(mm, 1.25));
  IV t3 = (mm * lam + 1.0) * pow(r, r) * pow(lam, r) / (2.0 * mm * mm);
  IV t4 = 35.0 * e4 * (2.0 * mm * lam + 3.0) * pow(r - 0.25, r - 0.25) * pow(lam, r + 0.25) /
          (512.0 * pow(mm, 1.75));
  return pow(R, r) / (exp(r) * powi(H2, m)) * (t1 + t2 + t3 + t4);
}

inline IV Q2b_term(int m, const IV& r, const IV& lam, const IV& H2, const IV& R) {
  detail::check_r(r, m);
  IV mm = IV::exact((double)m);
  IV e4 = exp(IV::exact(0.25));
  IV e34 = exp(IV::exact(0.75));
  IV t1 = pow(r + 0.75, r + 0.75) * pow(lam, r + 0.75) / (2.0 * e34 * pow(mm, 1.25));
  IV t2 = 15.0 * pow(r + 0.25, r + 0.25) * pow(lam, r + 0.25) / (32.0 * e4 * pow(mm, 1.75));
  IV t3 = 105.0 * e4 * pow(r - 0.25, r - 0.25) * pow(lam, r - 0.25) / (1024.0 * pow(mm, 2.25));
  return omega_m(m) * pow(R, r) / (exp(r) * powi(H2, m)) * (t1 + t2 + t3);
}

inline IV Q1_term(int m, const IV& r, const IV& lam, const IV& H2, const IV& R) {
  return Q1a_term(m, r, lam, H2, R) + Q1b_term(m, r, lam, H2, R);
}
inline IV Q2_term(int m, const IV& r, const IV& lam, const IV& H2, const IV& R) {
  return Q2a_term(m, r, lam, H2, R) + Q2b_term(m, r, lam, H2, R);
}

// log of the height past which the erfc-bearing envelopes are decreasing.
inline IV x3_log(int m, const IV& d, const IV& H2, const IV& R) {
  IV lam = log(d * H2);
  IV s = sqrt((double)m * lam) - IV::dec(tau_m(m));
  return R * lam * s * s;
}

// Assembled x-free bound for H^{m+1} * (tail sum over |gamma| > H2) * log^r x.
inline IV S_term(const IV& d, int m, const IV& r, const IV& H, const IV& H2, const IV& R) {
  if ((d * H2).lo < 1e8) throw std::domain_error("S_term: need d*H2 >= 1e8");
  if (!(H.lo >= 15.0) || !(H.hi <= H2.hi)) throw std::domain_error("S_term: need 15 <= H <= H2");
  IV lam = log(d * H2);
  IV hm1 = powi(H, m + 1);
  IV coef = C1_iv() / H2 - log(2.0 * pi_iv()) / pi_iv();
  return B_term(d, m, r, H, H2, R) + Q2_term(m, r, lam, H2, R) * hm1 / pi_iv() +
         coef * Q1_term(m, r, lam, H2, R) * hm1;
}

// Divisor aggregation: per-divisor share and total of
//   sum_d phi*(d) ( g3(x2) log^r x2 + S/2 ).
struct GPart {
  uint64_t d = 0;
  IV g3_with_log;
  IV half_S;
};

struct GValue {
  IV total;
  std::vector<GPart> parts;
};

inline GValue G_value(const ModulusProfile& mp, int m, const IV& R, double x2, const IV& r,
                      double H, const std::map<uint64_t, double>& H2) {
  GValue out;
  out.total = IV::exact(0.0);
  IV x = IV::exact(x2);
  IV lxr = pow(log(x), r);
  IV Hiv = IV::exact(H);
  for (uint64_t d : mp.divisors) {
    uint64_t ps = mp.phi_star.at(d);
    if (ps == 0) continue;
    IV div = IV::exact((double)d);
    IV h2 = IV::exact(H2.at(d));
    GPart part;
    part.d = d;
    part.g3_with_log = g3_term(div, m, R, x, Hiv, h2) * lxr;
    part.half_S = 0.5 * S_term(div, m, r, Hiv, h2, R);
    out.total = out.total + (double)ps * (part.g3_with_log + part.half_S);
    out.parts.push_back(part);
  }
  return out;
}

// Small correction absorbing the difference between psi on prime powers and
// the weighted residue count.
inline IV W_term(const ModulusProfile& mp, double x) {
  IV sum = IV::exact(0.5);
  for (const auto& [p, e] : mp.factorization) {
    (void)e;
    sum = sum + IV::exact(1.0) / IV::exact((double)(p - 1));
  }
  IV xi = IV::exact(x);
  IV lq = log(IV::exact((double)mp.q));
  return (double)mp.phi / xi * (sum * log(xi) + 4.0 * lq + IV::dec(13.4));
}

}  // namespace apb
