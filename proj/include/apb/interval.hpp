#pragma once

// Outward-rounded interval arithmetic on doubles, plus an exact fixed-point
// accumulator for long sums of logarithms.
//
// Directed rounding is done by nudging results outward with nextafter rather
// than by switching the FPU rounding mode: it is immune to compiler constant
// folding and costs little at our operation counts.  libm's log/exp are
// documented to within a couple of ulps on this platform; we nudge by 3 ulps
// around them and by 2 around arithmetic, which keeps every interval a true
// enclosure at the price of a few ulps of width per operation.

#include <cassert>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

namespace apb {

using i128 = __int128;
using u128 = unsigned __int128;

inline double nudge_up(double x, int ulps = 2) {
  for (int i = 0; i < ulps; ++i) x = std::nextafter(x, std::numeric_limits<double>::infinity());
  return x;
}
inline double nudge_dn(double x, int ulps = 2) {
  for (int i = 0; i < ulps; ++i) x = std::nextafter(x, -std::numeric_limits<double>::infinity());
  return x;
}

// Directed scalar helpers for hot loops (scan expressions).
inline double add_up(double a, double b) { return nudge_up(a + b); }
inline double add_dn(double a, double b) { return nudge_dn(a + b); }
inline double sub_up(double a, double b) { return nudge_up(a - b); }
inline double sub_dn(double a, double b) { return nudge_dn(a - b); }
inline double mul_up(double a, double b) { return nudge_up(a * b); }
inline double mul_dn(double a, double b) { return nudge_dn(a * b); }
inline double div_up(double a, double b) { return nudge_up(a / b); }
inline double div_dn(double a, double b) { return nudge_dn(a / b); }
inline double log_up(double x) { return nudge_up(std::log(x), 3); }
inline double log_dn(double x) { return nudge_dn(std::log(x), 3); }
inline double sqrt_up(double x) { return nudge_up(std::sqrt(x), 1); }
inline double sqrt_dn(double x) { return std::max(0.0, nudge_dn(std::sqrt(x), 1)); }

struct IV {
  double lo = 0.0, hi = 0.0;

  IV() = default;
  IV(double lo_, double hi_) : lo(lo_), hi(hi_) { assert(!(lo > hi)); }

  // A value that is exact in binary (integers, halves, ...).
  static IV exact(double x) { return IV(x, x); }
  // A printed decimal constant: the nearest double is within 1 ulp, so a
  // 1-ulp outward bracket encloses the intended decimal value.
  static IV dec(double x) { return IV(nudge_dn(x, 1), nudge_up(x, 1)); }

  double width() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool contains(double x) const { return lo <= x && x <= hi; }
  bool contains(const IV& o) const { return lo <= o.lo && o.hi <= hi; }
  bool strictly_positive() const { return lo > 0.0; }
  bool strictly_negative() const { return hi < 0.0; }
};

// 1-ulp brackets of the usual constants (the true values sit within half an
// ulp of the printed doubles).
inline IV pi_iv() { return IV::dec(3.141592653589793); }
inline IV e_iv() { return IV::dec(2.718281828459045); }

inline bool operator==(const IV& a, const IV& b) { return a.lo == b.lo && a.hi == b.hi; }
inline bool operator!=(const IV& a, const IV& b) { return !(a == b); }

inline IV operator-(const IV& a) { return IV(-a.hi, -a.lo); }
inline IV operator+(const IV& a, const IV& b) { return IV(add_dn(a.lo, b.lo), add_up(a.hi, b.hi)); }
inline IV operator-(const IV& a, const IV& b) { return IV(sub_dn(a.lo, b.hi), sub_up(a.hi, b.lo)); }

inline IV operator*(const IV& a, const IV& b) {
  double p1 = a.lo * b.lo, p2 = a.lo * b.hi, p3 = a.hi * b.lo, p4 = a.hi * b.hi;
  double lo = std::min(std::min(p1, p2), std::min(p3, p4));
  double hi = std::max(std::max(p1, p2), std::max(p3, p4));
  return IV(nudge_dn(lo), nudge_up(hi));
}

inline IV operator/(const IV& a, const IV& b) {
  assert(!(b.lo <= 0.0 && b.hi >= 0.0) && "interval division by a range containing zero");
  double p1 = a.lo / b.lo, p2 = a.lo / b.hi, p3 = a.hi / b.lo, p4 = a.hi / b.hi;
  double lo = std::min(std::min(p1, p2), std::min(p3, p4));
  double hi = std::max(std::max(p1, p2), std::max(p3, p4));
  return IV(nudge_dn(lo), nudge_up(hi));
}

inline IV operator+(const IV& a, double b) { return a + IV::exact(b); }
inline IV operator+(double a, const IV& b) { return IV::exact(a) + b; }
inline IV operator-(const IV& a, double b) { return a - IV::exact(b); }
inline IV operator-(double a, const IV& b) { return IV::exact(a) - b; }
inline IV operator*(const IV& a, double b) { return a * IV::exact(b); }
inline IV operator*(double a, const IV& b) { return IV::exact(a) * b; }
inline IV operator/(const IV& a, double b) { return a / IV::exact(b); }
inline IV operator/(double a, const IV& b) { return IV::exact(a) / b; }

inline IV sqrt(const IV& a) {
  assert(a.lo >= 0.0);
  return IV(sqrt_dn(a.lo), sqrt_up(a.hi));
}
inline IV log(const IV& a) {
  assert(a.lo > 0.0);
  return IV(log_dn(a.lo), log_up(a.hi));
}
inline IV exp(const IV& a) {
  return IV(std::max(0.0, nudge_dn(std::exp(a.lo), 3)), nudge_up(std::exp(a.hi), 3));
}
inline IV abs(const IV& a) {
  if (a.lo >= 0.0) return a;
  if (a.hi <= 0.0) return -a;
  return IV(0.0, std::max(-a.lo, a.hi));
}
inline IV hull(const IV& a, const IV& b) { return IV(std::min(a.lo, b.lo), std::max(a.hi, b.hi)); }
inline IV max(const IV& a, const IV& b) { return IV(std::max(a.lo, b.lo), std::max(a.hi, b.hi)); }
inline IV min(const IV& a, const IV& b) { return IV(std::min(a.lo, b.lo), std::min(a.hi, b.hi)); }

// Integer power by repeated multiplication (tight for the small exponents in
// the bound formulas).
inline IV powi(const IV& a, int n) {
  if (n == 0) return IV::exact(1.0);
  if (n < 0) return IV::exact(1.0) / powi(a, -n);
  IV r = IV::exact(1.0), base = a;
  while (n > 0) {
    if (n & 1) r = r * base;
    base = base * base;
    n >>= 1;
  }
  return r;
}

// Real power for positive base.
inline IV pow(const IV& a, const IV& y) {
  assert(a.lo > 0.0);
  return exp(y * log(a));
}
inline IV pow(const IV& a, double y) { return pow(a, IV::exact(y)); }

// ---------------------------------------------------------------------------
// Exact fixed-point accumulation (scale 2^-80).
//
// Scan accumulators for psi/theta hold sums of tens of millions of log p
// terms.  Each term is converted once to a 2^-80-scaled 128-bit integer with
// floor/ceil as appropriate; from then on addition is exact and associative,
// which makes parallel segment combination bit-identical to a serial scan and
// keeps interval widths equal to the sum of the per-term conversion widths.
// Headroom: |log p| < 64, so a term is < 2^86; 2^41 terms fit below 2^127.
// ---------------------------------------------------------------------------

constexpr int kFixedShift = 80;

inline i128 fixed_from_double_dn(double d) {
  if (d == 0.0) return 0;
  int e = 0;
  double m = std::frexp(d, &e);           // d = m * 2^e, |m| in [0.5, 1)
  i128 im = (i128)std::llround(m * 9007199254740992.0);  // m * 2^53 (exact)
  int shift = e - 53 + kFixedShift;
  if (shift >= 0) return im << shift;
  // Right shift with floor semantics for negatives.
  i128 q = im >> (-shift);
  return q;  // arithmetic shift floors
}
inline i128 fixed_from_double_up(double d) {
  if (d == 0.0) return 0;
  int e = 0;
  double m = std::frexp(d, &e);
  i128 im = (i128)std::llround(m * 9007199254740992.0);
  int shift = e - 53 + kFixedShift;
  if (shift >= 0) return im << shift;
  i128 q = im >> (-shift);
  i128 rem_mask = ((i128)1 << (-shift)) - 1;
  if (im & rem_mask) q += 1;  // ceil
  return q;
}

// Conversion back to double on the magnitude (so no cancellation between the
// halves); the relative error is then < 2 ulps and an outward nudge restores
// the enclosure.
inline double fixed_magnitude(i128 v) {
  u128 w = v < 0 ? (u128)(-v) : (u128)v;
  uint64_t hi64 = (uint64_t)(w >> 64), lo64 = (uint64_t)w;
  double s = (double)hi64 * 18446744073709551616.0 + (double)lo64;
  return v < 0 ? -s : s;
}
inline double fixed_to_double_dn(i128 v) { return nudge_dn(std::ldexp(fixed_magnitude(v), -kFixedShift)); }
inline double fixed_to_double_up(i128 v) { return nudge_up(std::ldexp(fixed_magnitude(v), -kFixedShift)); }

// An interval held in exact fixed point: addition never widens.
struct FixedIV {
  i128 lo = 0, hi = 0;

  void add(const IV& x) {
    lo += fixed_from_double_dn(x.lo);
    hi += fixed_from_double_up(x.hi);
  }
  void add(const FixedIV& o) {
    lo += o.lo;
    hi += o.hi;
  }
  void sub(const FixedIV& o) {
    lo -= o.hi;
    hi -= o.lo;
  }
  IV to_iv() const { return IV(fixed_to_double_dn(lo), fixed_to_double_up(hi)); }
};

// Conversions for exact wide integers (alpha coefficients, Pell checks).
inline IV iv_from_u128(u128 v) {
  if (v <= ((u128)1 << 53)) return IV::exact((double)(uint64_t)v);
  uint64_t hi64 = (uint64_t)(v >> 64), lo64 = (uint64_t)v;
  double s = (double)hi64 * 18446744073709551616.0 + (double)lo64;
  return IV(nudge_dn(s), nudge_up(s));
}

inline std::string u128_to_string(u128 v) {
  if (v == 0) return "0";
  std::string s;
  while (v > 0) {
    s.insert(s.begin(), char('0' + (int)(v % 10)));
    v /= 10;
  }
  return s;
}

}  // namespace apb
