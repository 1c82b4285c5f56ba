#pragma once

// Modulus bookkeeping (factorization, totients, primitive-character counts),
// k-th power residue counts, the prime-power correction Delta, and the
// binomial-type coefficients used by the master bound.  Everything here is
// exact integer arithmetic except Delta, which returns enclosures.

#include <algorithm>
#include <cstdint>
#include <map>

#include <gmpxx.h>
#include <numeric>
#include <vector>

#include "interval.hpp"

namespace apb {

struct ModulusProfile {
  uint64_t q = 1;
  std::vector<std::pair<uint64_t, int>> factorization;  // ascending primes
  uint64_t phi = 1;
  std::vector<uint64_t> divisors;                 // ascending
  std::map<uint64_t, uint64_t> phi_star;          // d -> # primitive characters of conductor d
  int omega = 0;

  std::vector<uint64_t> coprime_residues() const {
    std::vector<uint64_t> r;
    for (uint64_t a = 1; a <= q; ++a)
      if (std::gcd(a, q) == 1) r.push_back(a % q);
    if (q == 1) r = {0};  // the single class mod 1
    return r;
  }
};

inline uint64_t euler_phi_prime_power(uint64_t p, int e) {
  uint64_t v = 1;
  for (int i = 1; i < e; ++i) v *= p;
  return v * (p - 1);
}

// Number of primitive characters with conductor p^e.
inline uint64_t phi_star_prime_power(uint64_t p, int e) {
  if (e == 1) return p == 2 ? 0 : p - 2;  // no primitive character mod 2
  // phi(p^e) - phi(p^(e-1))
  return euler_phi_prime_power(p, e) - euler_phi_prime_power(p, e - 1);
}

inline ModulusProfile build_profile(uint64_t q) {
  ModulusProfile mp;
  mp.q = q;
  uint64_t n = q;
  for (uint64_t p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      int e = 0;
      while (n % p == 0) n /= p, ++e;
      mp.factorization.push_back({p, e});
    }
  }
  if (n > 1) mp.factorization.push_back({n, 1});
  std::sort(mp.factorization.begin(), mp.factorization.end());
  mp.omega = (int)mp.factorization.size();

  mp.phi = 1;
  for (auto [p, e] : mp.factorization) mp.phi *= euler_phi_prime_power(p, e);

  // Divisors and phi_star by multiplicativity.
  mp.divisors = {1};
  std::map<uint64_t, uint64_t> ps = {{1, 1}};
  for (auto [p, e] : mp.factorization) {
    std::vector<uint64_t> newdivs;
    std::map<uint64_t, uint64_t> newps;
    for (uint64_t d : mp.divisors) {
      uint64_t pk = 1;
      for (int k = 0; k <= e; ++k) {
        newdivs.push_back(d * pk);
        newps[d * pk] = ps[d] * (k == 0 ? 1 : phi_star_prime_power(p, k));
        pk *= p;
      }
    }
    mp.divisors = std::move(newdivs);
    ps = std::move(newps);
  }
  std::sort(mp.divisors.begin(), mp.divisors.end());
  mp.phi_star = std::move(ps);
  return mp;
}

// ---------------------------------------------------------------------------
// k-th roots of unity mod q.
// ---------------------------------------------------------------------------

// xi_k(p^e): size of the kernel of x -> x^k on (Z/p^e)^*.
inline uint64_t xi_k_prime_power(uint64_t k, uint64_t p, int e) {
  if (p == 2) {
    if (e == 1) return 1;
    uint64_t g2 = std::gcd(k, (uint64_t)2);
    uint64_t pow2 = (uint64_t)1 << (e - 2);
    return g2 * std::gcd(k, pow2);
  }
  return std::gcd(k, euler_phi_prime_power(p, e));
}

inline uint64_t xi_k(const ModulusProfile& mp, uint64_t k) {
  uint64_t v = 1;
  for (auto [p, e] : mp.factorization) v *= xi_k_prime_power(k, p, e);
  return v;
}

inline uint64_t pow_mod(uint64_t b, uint64_t e, uint64_t mod) {
  uint64_t r = 1 % mod;
  b %= mod;
  while (e) {
    if (e & 1) r = (u128)r * b % mod;
    b = (u128)b * b % mod;
    e >>= 1;
  }
  return r;
}

// Is a (coprime to p^e) a k-th power mod p^e?
inline bool is_kth_power_prime_power(uint64_t a, uint64_t k, uint64_t p, int e) {
  uint64_t pe = 1;
  for (int i = 0; i < e; ++i) pe *= p;
  a %= pe;
  if (p != 2) {
    // cyclic group: a is a k-th power iff a^(phi/g) = 1, g = gcd(k, phi)
    uint64_t phi = euler_phi_prime_power(p, e);
    uint64_t g = std::gcd(k, phi);
    return pow_mod(a, phi / g, pe) == 1;
  }
  if (e == 1) return true;
  if (e == 2) return (k % 2 == 1) || (a % 4 == 1);
  // (Z/2^e)^* = <-1> x <5>.  Write a = (-1)^s 5^t; a is a k-th power iff
  // (k odd) or (s = 0 and gcd(k, 2^(e-2)) | t).
  uint64_t order5 = pe >> 2;
  uint64_t x = 1, t = 0;
  int s = -1;
  for (uint64_t j = 0; j < order5; ++j) {
    if (x == a) { t = j; s = 0; break; }
    if (pe - x == a) { t = j; s = 1; break; }
    x = (u128)x * 5 % pe;
  }
  if (s < 0) return false;  // not reachable for coprime a
  if (k % 2 == 1) return true;
  if (s == 1) return false;
  return t % std::gcd(k, order5) == 0;
}

// xi_k(q, a): number of solutions of x^k = a mod q; either 0 or xi_k(q).
inline uint64_t xi_k_at(const ModulusProfile& mp, uint64_t k, uint64_t a) {
  if (std::gcd(a, mp.q) != 1) return 0;
  for (auto [p, e] : mp.factorization)
    if (!is_kth_power_prime_power(a, k, p, e)) return 0;
  return xi_k(mp, k);
}

// ---------------------------------------------------------------------------
// Delta(x; q): the prime-power correction converting psi bounds to theta
// bounds.  Upper enclosure; callers use the upper endpoint.
// ---------------------------------------------------------------------------

// Largest k with 2^k <= x (x >= 4).
inline int delta_kmax(double x) {
  int k = 2;
  while (std::ldexp(1.0, k + 1) <= x) ++k;
  return k;
}

inline IV delta_term(const ModulusProfile& mp, double x, int k) {
  IV lx = log(IV::exact(x));
  IV second = 1.0 + IV::exact((double)k) / (2.0 * lx);
  // q^k as interval (exact while q^k < 2^53, enclosed beyond)
  IV qk = powi(IV::exact((double)mp.q), k);
  if (mp.q > 1 && qk.hi < x) {
    IV ratio = IV::exact((double)(2 * xi_k(mp, k))) / IV::exact((double)mp.phi);
    IV first = ratio * (1.0 + log(qk) / log(IV::exact(x) / qk));
    return min(first, second);
  }
  return second;
}

inline IV Delta(const ModulusProfile& mp, double x) {
  IV lx = log(IV::exact(x));
  IV sum = IV::exact(0.0);
  int kmax = delta_kmax(x);
  for (int k = 2; k <= kmax; ++k) {
    // log x / x^(1 - 1/k) = log x * x^(1/k) / x
    IV weight = lx * exp(lx / (double)k) / IV::exact(x);
    sum = sum + weight * delta_term(mp, x, k);
  }
  return sum;
}

// ---------------------------------------------------------------------------
// alpha coefficients: alpha_{m,k} = C(m+1,k) * sum_j C(m,j) j^k, k = 0..m+1.
// Exact big integers (the m = 25 row tops out near 2.2e39, past 128 bits).
// ---------------------------------------------------------------------------

inline IV iv_from_mpz(const mpz_class& v) {
  double d = v.get_d();  // rounds toward zero, < 1 ulp off
  return IV(nudge_dn(d), nudge_up(d));
}

inline std::vector<mpz_class> alpha_coeffs(int m) {
  std::vector<mpz_class> binom_m(m + 1), binom_m1(m + 2);
  binom_m[0] = 1;
  for (int j = 1; j <= m; ++j) binom_m[j] = binom_m[j - 1] * (m - j + 1) / j;
  binom_m1[0] = 1;
  for (int j = 1; j <= m + 1; ++j) binom_m1[j] = binom_m1[j - 1] * (m + 2 - j) / j;

  std::vector<mpz_class> alpha(m + 2);
  for (int k = 0; k <= m + 1; ++k) {
    mpz_class inner = 0;
    for (int j = 0; j <= m; ++j) {
      mpz_class jk = 1;
      for (int i = 0; i < k; ++i) jk *= j;  // 0^0 = 1
      inner += binom_m[j] * jk;
    }
    alpha[k] = binom_m1[k] * inner;
  }
  return alpha;
}

// A_m(delta) = sum_k alpha_{m,k} delta^(k-m), as an enclosure.
inline IV A_m(int m, const IV& delta) {
  auto alpha = alpha_coeffs(m);
  IV sum = IV::exact(0.0);
  for (int k = 0; k <= m + 1; ++k) sum = sum + iv_from_mpz(alpha[k]) * powi(delta, k - m);
  return sum;
}

}  // namespace apb
