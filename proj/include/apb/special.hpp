#pragma once

// Calculus toolkit behind the zero-sum bounds: two-sided erfc estimates,
// incomplete modified Bessel functions (quadrature oracles), their closed-form
// J envelopes, the generic decreasing-function maximizer, and the decay
// machinery for the erfc-bearing envelope Xi together with its tau/omega
// constants.

#include <cmath>
#include <stdexcept>

#include "interval.hpp"
#include "quad.hpp"

namespace apb {

// tau_m table; the final row covers every m >= 13.
inline double tau_m(int m) {
  static const double tab[12] = {4.0726, 5.2067, 6.1454,  6.9631,  7.6967,  8.3675,
                                 8.9891, 9.5709, 10.1197, 10.6405, 11.1371, 11.6126};
  if (m < 2) throw std::domain_error("tau_m: m >= 2 required");
  return tab[(m < 13 ? m : 13) - 2];
}

inline IV omega_m(int m) {
  IV t = IV::dec(tau_m(m));
  return 2.0 / (t + sqrt(t * t + 4.0 / pi_iv()));
}

// Enclosure of erfc(u) from the algebraic sandwich
//   1/(u+sqrt(u^2+2)) < e^{u^2} (sqrt(pi)/2) erfc(u) <= 1/(u+sqrt(u^2+4/pi)),
// reflected through erfc(-u) = 2 - erfc(u) for negative arguments.
inline IV erfc_iv(double u) {
  if (u >= 0.0) {
    IV uv = IV::exact(u);
    IV pref = 2.0 / sqrt(pi_iv());
    IV damp = exp(-(uv * uv));
    IV lo = pref * damp / (uv + sqrt(uv * uv + 2.0));
    IV hi = pref * damp / (uv + sqrt(uv * uv + 4.0 / pi_iv()));
    return IV(lo.lo, hi.hi);
  }
  IV pos = erfc_iv(-u);
  return IV(std::max(1.0, sub_dn(2.0, pos.hi)), 2.0);
}

inline IV erfc_iv(const IV& u) { return hull(erfc_iv(u.lo), erfc_iv(u.hi)); }

// ---------------------------------------------------------------------------
// Quadrature oracles (plain double, relative tolerance ~1e-10).  The change
// of variables u = y e^w tames both tails.
// ---------------------------------------------------------------------------

// K_n(z;y) = 1/2 int_y^inf u^{n-1} exp(-(z/2)(u+1/u)) du
inline double bessel_K_quad(double n, double z, double y, double rel_tol = 1e-11) {
  if (!(n > 0) || !(z > 0) || !(y > 0)) throw std::domain_error("bessel_K_quad: positive args");
  auto g = [&](double w) {
    double u = y * std::exp(w);
    return 0.5 * std::pow(u, n) * std::exp(-0.5 * z * (u + 1.0 / u));
  };
  // beyond W the damping factor has underflowed
  double W = std::log(std::max(4.0, 1700.0 / (z * y)));
  return adaptive_simpson(g, 0.0, W + 8.0, rel_tol);
}

// I_{n,m}(alpha,beta;ell) = int_ell^inf (log bu)^{n-1} u^{-(m+1)} exp(-alpha/log bu) du
inline double bessel_I_quad(double n, double m, double alpha, double beta, double ell,
                            double rel_tol = 1e-11) {
  if (!(n > 0) || !(m > 0) || !(alpha > 0) || !(beta > 0) || !(ell > 0))
    throw std::domain_error("bessel_I_quad: positive args");
  double L = std::log(beta * ell);
  if (!(L > 0)) throw std::domain_error("bessel_I_quad: beta*ell > 1 required");
  double scale = std::pow(ell, -m);
  auto g = [&](double w) {
    return std::pow(L + w, n - 1.0) * scale * std::exp(-m * w - alpha / (L + w));
  };
  double W = 130.0 / m + 10.0;
  return adaptive_simpson(g, 0.0, W, rel_tol);
}

// ---------------------------------------------------------------------------
// Closed-form envelopes: K_1(z;y) <= J1a+J1b and K_2(z;y) <= J2a+J2b.
// ---------------------------------------------------------------------------

struct JVals {
  IV j1a, j1b, j2a, j2b;
};

inline JVals J_envelopes(const IV& z, const IV& y) {
  IV sy = sqrt(y);
  IV damp = exp(z * (y + 1.0 / y) / 2.0);
  IV ez = exp(z);
  IV spi = sqrt(pi_iv());
  IV s2 = sqrt(IV::exact(2.0));
  IV ec = erfc_iv(sqrt(z / 2.0) * (sy - 1.0 / sy));

  JVals r;
  r.j1a = (3.0 * sy + 8.0) / (16.0 * z * damp);
  r.j1b = spi * ec * (8.0 * z + 3.0) / (16.0 * s2 * pow(z, 1.5) * ez);
  r.j2a = ((35.0 * pow(y, 1.5) + 128.0 * y + 135.0 * sy + 128.0 / y) * z + 105.0 * sy + 256.0) /
          (256.0 * z * z * damp);
  r.j2b = spi * ec * (128.0 * z * z + 240.0 * z + 105.0) / (256.0 * s2 * pow(z, 2.5) * ez);
  return r;
}

// ---------------------------------------------------------------------------
// Maximum of Phi(u) = c1 exp(-c2 log^lam u) log^mu u over u >= 1:
// attained at u0 = exp((mu/(lam c2))^{1/lam}) with value c1 (mu/(e lam c2))^{mu/lam}.
// ---------------------------------------------------------------------------

struct PhiMax {
  IV u0, value;
};

inline PhiMax phi_max(const IV& c1, const IV& c2, const IV& lam, const IV& mu) {
  if (!(c1.lo > 0 && c2.lo > 0 && lam.lo > 0 && mu.lo > 0))
    throw std::domain_error("phi_max: positive parameters required");
  IV ratio = mu / (lam * c2);
  PhiMax r;
  r.u0 = exp(pow(ratio, 1.0 / lam));
  r.value = c1 * pow(ratio / e_iv(), mu / lam);
  return r;
}

// ---------------------------------------------------------------------------
// Xi_{m,lam,mu,R}(x) = sqrt(pi) erfc(sqrt(m lam) - sqrt(log x/(R lam)))
//                      * exp(-2 sqrt(m log x/R)) log^mu x.
// Below the threshold exp(R lam (sqrt(m lam)-tau_m)^2) it is dominated by
// omega_m e^{-m lam} exp(-log x/(R lam)) log^mu x; beyond it, it decreases.
// The threshold overflows double for typical parameters, so it is returned
// as a logarithm.
// ---------------------------------------------------------------------------

struct XiDecay {
  IV value_bound;         // valid for log x <= log_decreasing_from
  IV log_decreasing_from; // log of the threshold
};

inline XiDecay xi_decay(int m, const IV& lam, const IV& mu, const IV& R, double x) {
  if (m < 2) throw std::domain_error("xi_decay: m >= 2 required");
  if (!(mu.hi <= m + 1.75)) throw std::domain_error("xi_decay: mu <= m + 7/4 required");
  if (!(lam.lo >= log_dn(1e8))) throw std::domain_error("xi_decay: lambda >= log(10^8) required");
  if (!(x > 1.0)) throw std::domain_error("xi_decay: x > 1 required");
  IV t = IV::dec(tau_m(m));
  IV s = sqrt((double)m * lam) - t;
  IV lx = log(IV::exact(x));
  XiDecay r;
  r.log_decreasing_from = R * lam * s * s;
  r.value_bound = omega_m(m) * exp(-((double)m * lam) - lx / (R * lam)) * pow(lx, mu);
  return r;
}

}  // namespace apb
