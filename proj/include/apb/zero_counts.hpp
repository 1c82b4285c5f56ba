#pragma once

// Vertical-distribution estimates for zeros of Dirichlet L-functions: the
// zero-counting windows, their antiderivative Theta, the between-heights
// majorant M_d, and the computational audit of the principal-character count
// against a zero archive.

#include <cmath>
#include <stdexcept>
#include <string>

#include "interval.hpp"
#include "zeros_io.hpp"

namespace apb {

inline IV C1_iv() { return IV::dec(0.399); }
inline IV C2_iv() { return IV::dec(5.338); }

// Floor of an interval that encloses a non-integer; exactness is required, so
// an interval straddling an integer is an error rather than a guess.
inline long long exact_floor(const IV& v) {
  double flo = std::floor(v.lo), fhi = std::floor(v.hi);
  if (flo != fhi) throw std::runtime_error("floor is ambiguous for interval enclosure");
  return (long long)flo;
}

// Main term of the general zero-counting window, (T/pi) log(dT/2pi e).
inline IV nt_general_main(const IV& d, const IV& T) {
  return T / pi_iv() * log(d * T / (2.0 * pi_iv() * e_iv()));
}

// Half-width of the general window, C1 log(dT) + C2.
inline IV nt_general_slack(const IV& d, const IV& T) { return C1_iv() * log(d * T) + C2_iv(); }

// Antiderivative of the upper bound on N(T,chi)/T^2:
//   Theta(d,t) = (1/2pi) log^2(dt/2pi e) - (C1 log(e d t) + C2)/t,
// so that d/dt Theta = (1/t^2)((t/pi) log(dt/2pi e) + C1 log(dt) + C2).
inline IV theta_antideriv(const IV& d, const IV& t) {
  IV l = log(d * t / (2.0 * pi_iv() * e_iv()));
  return l * l / (2.0 * pi_iv()) - (C1_iv() * (log(d * t) + 1.0) + C2_iv()) / t;
}
inline IV theta_antideriv(double d, double t) {
  return theta_antideriv(IV::exact(d), IV::exact(t));
}

// Majorant for N(u,chi) - N(ell,chi) when chi has conductor d and
// 1 <= ell <= u.  Collapses to 2(C1 log(d ell) + C2) at ell = u.
inline IV M_d(const IV& d, const IV& ell, const IV& u) {
  if (!(d.lo >= 1.0)) throw std::domain_error("M_d requires d >= 1");
  if (!(ell.lo >= 1.0)) throw std::domain_error("M_d requires ell >= 1");
  if (ell.lo > u.hi) throw std::domain_error("M_d requires ell <= u");
  IV two_pi_e = 2.0 * pi_iv() * e_iv();
  return u / pi_iv() * log(d * u / two_pi_e) - ell / pi_iv() * log(d * ell / two_pi_e) +
         C1_iv() * log(d * d * ell * u) + 2.0 * C2_iv();
}
inline IV M_d(double d, double ell, double u) {
  if (ell > u) throw std::domain_error("M_d requires ell <= u");
  return M_d(IV::exact(d), IV::exact(ell), IV::exact(u));
}

// Principal-character count bound, valid for T > e:
//   |N(T,chi0) - ((T/pi) log(T/2pi e) + 7/4)| < 0.34 log T + 3.996 + 25/(24 pi T).
// Returns the margin (slack minus deviation) as an enclosure; the bound holds
// when the margin is certainly positive.
inline IV nt_principal_margin(double T, long long N) {
  IV Ti = IV::exact(T);
  IV main = Ti / pi_iv() * log(Ti / (2.0 * pi_iv() * e_iv())) + IV::exact(1.75);
  IV slack = IV::dec(0.34) * log(Ti) + IV::dec(3.996) + 25.0 / (24.0 * pi_iv() * Ti);
  return slack - abs(IV::exact((double)N) - main);
}

struct NTPrincipalReport {
  size_t ordinates_checked = 0;
  double min_margin_left = 1e300;   // over the limits from below (N = 2(k-1))
  double min_margin_right = 1e300;  // over the limits from above (N = 2k)
  double argmin_T = 0;
  bool pass = false;
};

// Walk the zeta ordinates up to T_max and check both one-sided limits of
// N(T,chi0) = 2 N(T) at every jump.
inline NTPrincipalReport check_NT_principal(const ZeroArchive& arch, double T_max) {
  auto files = arch.conductor_files(1);
  if (files.size() != 1)
    throw std::runtime_error("check_NT_principal needs exactly one conductor-1 archive entry");
  const ZeroList& z = *files.front();
  if (z.verified_height < T_max)
    throw std::runtime_error("archive height " + std::to_string(z.verified_height) +
                             " is below requested T_max " + std::to_string(T_max));
  NTPrincipalReport rep;
  rep.pass = true;
  for (size_t k = 0; k < z.ordinates.size() && z.ordinates[k] <= T_max; ++k) {
    double T = z.ordinates[k];
    IV left = nt_principal_margin(T, 2 * (long long)k);
    IV right = nt_principal_margin(T, 2 * (long long)(k + 1));
    double worst = std::min(left.lo, right.lo);
    if (worst < std::min(rep.min_margin_left, rep.min_margin_right)) rep.argmin_T = T;
    rep.min_margin_left = std::min(rep.min_margin_left, left.lo);
    rep.min_margin_right = std::min(rep.min_margin_right, right.lo);
    if (!(left.lo > 0.0 && right.lo > 0.0)) rep.pass = false;
    ++rep.ordinates_checked;
  }
  return rep;
}

}  // namespace apb
