#pragma once

// Adaptive Simpson quadrature.  Plain double precision: this backs the
// oracle-grade operations (incomplete Bessel evaluations) that cross-check
// the certified closed forms but never feed the constant-producing path.

#include <cmath>
#include <stdexcept>

namespace apb {

template <typename F>
double adaptive_simpson_rec(const F& f, double a, double b, double fa, double fm, double fb,
                            double whole, double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

// Integral over [a,b]; tol is relative to a two-pass scale estimate.
template <typename F>
double adaptive_simpson(const F& f, double a, double b, double rel_tol) {
  if (!(b > a)) return 0.0;
  double fa = f(a), fb = f(b);
  // coarse scale estimate over a few panels
  double scale = 0.0;
  const int panels = 16;
  double prev = fa;
  for (int i = 1; i <= panels; ++i) {
    double x = a + (b - a) * i / panels;
    double fx = f(x);
    scale += 0.5 * (prev + fx) * (b - a) / panels;
    prev = fx;
  }
  double tol = std::fabs(scale) * rel_tol;
  if (!(tol > 0.0)) tol = rel_tol;
  double fm = f(0.5 * (a + b));
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, 52);
}

}  // namespace apb
