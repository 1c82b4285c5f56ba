#pragma once
// Assembly of the certified error constants: the psi-bound D as T1..T4 over a
// chosen (m, H, x2, R), conversions to the theta and pi constants, the default
// x2 schedule, and a deterministic optimizer over (m, H).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "apb/arithmetic.hpp"
#include "apb/bound_terms.hpp"
#include "apb/interval.hpp"
#include "apb/nu.hpp"
#include "apb/zeros_io.hpp"

namespace apb {

// Default start of the asymptotic regime; q = 2 mod 4 inherits from q/2.
inline double x2_schedule(uint64_t q) {
  if (q == 0 || q > 100000) throw std::domain_error("x2_schedule: q out of range");
  if (q % 4 == 2) q /= 2;
  if (q == 1) return 1e12;
  if (q <= 5) return 4e13;
  if (q <= 100) return 1e13;
  if (q <= 10000) return 1e12;
  return 1e11;
}

struct BoundParams {
  int m = 8;
  double H = 0;
  double x2 = 0;                   // 0 -> x2_schedule(q)
  IV R = IV::dec(5.6);
  std::map<uint64_t, double> H2;   // empty -> h3_policy
  std::map<uint64_t, double> H0;   // missing conductors count as 0
};

struct ConstantReport {
  uint64_t q = 0;
  int m = 0;
  double H = 0;
  double x2 = 0;
  double R = 0;
  IV T1 = IV::exact(0.0), T2 = IV::exact(0.0), T3 = IV::exact(0.0), T4 = IV::exact(0.0);
  IV nu = IV::exact(0.0);
  IV c_psi = IV::exact(0.0);
  bool has_theta = false;
  IV delta_correction = IV::exact(0.0);
  IV c_theta = IV::exact(0.0);
  bool has_pi = false;
  double pi_x3 = 0;
  IV pi_factor = IV::exact(0.0);
  IV c_pi = IV::exact(0.0);
  std::vector<std::string> assumptions;
  double x_min = 0;
};

namespace detail {

inline IV r_of_k(int m, int k) {
  if (k == 0) return IV::exact((double)(m + 1));
  return IV::exact((double)(m + 1)) / IV::exact((double)(k + 1));
}

}  // namespace detail

// The psi error constant for explicit parameters: |psi(x;q,a) - x/phi(q)| is
// at most c_psi * x/log x for all x >= x2, provided every character modulus q
// has only critical-line zeros up to H2(conductor) and the R zero-free region
// beyond.
inline ConstantReport D_constant(const ModulusProfile& mp, const BoundParams& p,
                                 const ZeroArchive& arch) {
  if (mp.q < 3 || mp.q > 100000) throw std::domain_error("D_constant: need 3 <= q <= 1e5");
  if (p.m < 3 || p.m > 25) throw std::domain_error("D_constant: need 3 <= m <= 25");
  if (!(p.R.lo >= 0.435)) throw std::domain_error("D_constant: need R >= 0.435");
  double x2 = p.x2 > 0 ? p.x2 : x2_schedule(mp.q);
  IV lx2 = log(IV::exact(x2));
  if (!(lx2.lo >= 2.0 * p.m + 2.0)) throw std::domain_error("D_constant: x2 < e^(2m+2)");
  if (!(p.H >= H1_min(p.m))) throw std::domain_error("D_constant: H below H1(m)");

  std::map<uint64_t, double> H2 = p.H2.empty() ? h3_policy(mp) : p.H2;
  for (uint64_t d : mp.divisors) {
    if (mp.phi_star.at(d) == 0) continue;
    double h2 = H2.at(d);
    if (!(h2 >= p.H) || (IV::exact((double)d) * IV::exact(h2)).lo < 1e8)
      throw std::domain_error("D_constant: need H2(d) >= max(H, 1e8/d)");
  }

  NuResult nur = nu_functions(mp, arch, p.H0, p.H);

  IV sqrt_x2 = sqrt(IV::exact(x2));
  IV one_plus = 1.0 + nur.nu / sqrt_x2;
  IV Hi = IV::exact(p.H);
  IV m1 = IV::exact((double)(p.m + 1));
  auto alpha = alpha_coeffs(p.m);

  // G at every exponent r = (m+1)/(k+1) used by the terms below
  std::vector<IV> G(p.m + 2);
  for (int k = 0; k <= p.m + 1; ++k)
    G[k] = G_value(mp, p.m, p.R, x2, detail::r_of_k(p.m, k), p.H, H2).total;

  ConstantReport rep;
  rep.q = mp.q;
  rep.m = p.m;
  rep.H = p.H;
  rep.x2 = x2;
  rep.R = p.R.hi;
  rep.nu = nur.nu;
  rep.x_min = x2;

  rep.T1 = nur.nu * lx2 / sqrt_x2;
  rep.T2 = m1 / Hi * pow(G[0], 1.0 / m1) * pow(one_plus, IV::exact((double)p.m) / m1);
  rep.T3 = IV::exact(0.0);
  for (int k = 1; k <= p.m; ++k) {
    IV term = iv_from_mpz(alpha[k]) / (std::ldexp(1.0, p.m - k) * powi(Hi, k + 1)) *
              pow(G[k], IV::exact((double)(k + 1)) / m1) *
              pow(one_plus, IV::exact((double)(p.m - k)) / m1);
    rep.T3 = rep.T3 + term;
  }
  rep.T4 = 2.0 * iv_from_mpz(alpha[p.m + 1]) / powi(Hi, p.m + 2) *
               pow(G[p.m + 1], IV::exact((double)(p.m + 2)) / m1) +
           W_term(mp, x2) * lx2;

  rep.c_psi = (rep.T1 + rep.T2 + rep.T3 + rep.T4) / (double)mp.phi;

  char buf[160];
  std::snprintf(buf, sizeof buf,
                "all zeros of L-functions for characters of conductor d | %llu with "
                "|gamma| <= H2(d) lie on the critical line",
                (unsigned long long)mp.q);
  rep.assumptions.push_back(buf);
  std::snprintf(buf, sizeof buf,
                "zeros with |gamma| > H2(d) satisfy beta <= 1 - 1/(%.6g log(d |gamma|))",
                p.R.hi);
  rep.assumptions.push_back(buf);
  if (p.R.hi == IV::dec(5.6).hi)
    rep.assumptions.push_back(
        "R = 5.6 and H2 = h3 hold unconditionally for q <= 1e5 "
        "(Platt; Kadiri; Mossinghoff-Trudgian)");
  else
    rep.assumptions.push_back(
        "nonstandard R: the zero-free region hypothesis is the caller's responsibility");
  return rep;
}

// theta constant: the prime-power correction Delta plus the jump allowance.
inline ConstantReport theta_constant(ConstantReport rep) {
  auto mp = build_profile(rep.q);
  IV lx2 = log(IV::exact(rep.x2));
  rep.delta_correction = Delta(mp, rep.x2) + 6.0 * lx2 / IV::exact(rep.x2);
  rep.c_theta = rep.c_psi + rep.delta_correction;
  rep.has_theta = true;
  return rep;
}

// pi constant via partial summation from the theta bound at x3.  Requires the
// boundary-term inequality |E(x3;q,a)| <= c_theta x3 / ((log x3 - 2) log^2 x3)
// to have been verified externally, and the theta bound to hold down to x3.
inline ConstantReport pi_constant(ConstantReport rep, double x3, bool e_hypothesis_verified) {
  if (!rep.has_theta) throw std::domain_error("pi_constant: run theta_constant first");
  if (!e_hypothesis_verified)
    throw std::domain_error("pi_constant: E-hypothesis at x3 not verified");
  if (!(x3 > std::exp(2.0))) throw std::domain_error("pi_constant: x3 too small");
  IV lx3 = log(IV::exact(x3));
  rep.pi_x3 = x3;
  rep.pi_factor = (lx3 - 1.0) / (lx3 - 2.0);
  rep.c_pi = rep.c_theta * rep.pi_factor;
  rep.has_pi = true;
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "|E(x3;q,a)| <= c_theta x3/((log x3 - 2) log^2 x3) and the theta bound "
                "holds for x >= x3 = %.6g",
                x3);
  rep.assumptions.push_back(buf);
  return rep;
}

struct OptimizeOptions {
  int m_lo = 3, m_hi = 12;
  double x2 = 0;                   // 0 -> schedule
  IV R = IV::dec(5.6);
  int grid = 256;
  int workers = 1;
};

// Deterministic minimization of c_psi over m and H: a log-spaced H grid per m,
// then golden-section refinement around the grid winner (kept only if it
// improves on the grid).  Ties break toward smaller m, then smaller H.
inline ConstantReport optimize(const ModulusProfile& mp, const ZeroArchive& arch,
                               const OptimizeOptions& opt = {}) {
  double x2 = opt.x2 > 0 ? opt.x2 : x2_schedule(mp.q);
  double lx2 = std::log(x2);
  double Hmax = 1e300;
  for (uint64_t d : mp.divisors)
    if (mp.phi_star.at(d) != 0) Hmax = std::min(Hmax, h3_height(d));

  auto eval = [&](int m, double H) {
    BoundParams p;
    p.m = m;
    p.H = H;
    p.x2 = x2;
    p.R = opt.R;
    p.H0 = default_H0(mp, arch, H);
    return D_constant(mp, p, arch);
  };

  bool found = false;
  ConstantReport best;
  auto consider = [&](const ConstantReport& r) {
    if (!found || r.c_psi.hi < best.c_psi.hi ||
        (r.c_psi.hi == best.c_psi.hi && (r.m < best.m || (r.m == best.m && r.H < best.H)))) {
      best = r;
      found = true;
    }
  };

  for (int m = opt.m_lo; m <= opt.m_hi; ++m) {
    if (m < 3 || m > 25) continue;
    if (!(lx2 >= 2.0 * m + 2.0)) continue;
    double Hmin = H1_min(m);
    if (!(Hmin <= Hmax)) continue;
    int n = std::max(2, opt.grid);
    std::vector<double> Hs(n), cs(n);
    double la = std::log(Hmin), lb = std::log(Hmax);
    for (int i = 0; i < n; ++i) {
      double H = std::exp(la + (lb - la) * i / (n - 1));
      Hs[i] = std::min(std::max(H, Hmin), Hmax);
    }
    int workers = std::max(1, std::min(opt.workers, n));
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (int i = w; i < n; i += workers) cs[i] = eval(m, Hs[i]).c_psi.hi;
      });
    for (auto& t : pool) t.join();

    int ibest = 0;
    for (int i = 1; i < n; ++i)
      if (cs[i] < cs[ibest]) ibest = i;
    ConstantReport grid_best = eval(m, Hs[ibest]);
    consider(grid_best);

    // golden-section in log H on the bracket around the grid winner
    double a = std::log(Hs[std::max(0, ibest - 1)]);
    double b = std::log(Hs[std::min(n - 1, ibest + 1)]);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double u = b - gr * (b - a), v = a + gr * (b - a);
    double fu = eval(m, std::exp(u)).c_psi.hi, fv = eval(m, std::exp(v)).c_psi.hi;
    for (int it = 0; it < 80 && (b - a) > 1e-10; ++it) {
      if (fu <= fv) {
        b = v;
        v = u;
        fv = fu;
        u = b - gr * (b - a);
        fu = eval(m, std::exp(u)).c_psi.hi;
      } else {
        a = u;
        u = v;
        fu = fv;
        v = a + gr * (b - a);
        fv = eval(m, std::exp(v)).c_psi.hi;
      }
    }
    double Hr = std::min(std::max(std::exp(0.5 * (a + b)), Hmin), Hmax);
    ConstantReport refined = eval(m, Hr);
    if (refined.c_psi.hi < grid_best.c_psi.hi) consider(refined);
  }
  if (!found) throw std::runtime_error("optimize: no feasible (m, H)");
  return best;
}

namespace detail {

inline void json_num(std::string& out, const char* key, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "\"%s\":%.17g,", key, v);
  out += buf;
}

}  // namespace detail

// Deterministic single-line JSON rendering; certified quantities are reported
// by their upper bounds.
inline std::string report_json(const ConstantReport& r) {
  std::string out = "{";
  detail::json_num(out, "q", (double)r.q);
  detail::json_num(out, "m", (double)r.m);
  detail::json_num(out, "H", r.H);
  detail::json_num(out, "x2", r.x2);
  detail::json_num(out, "R", r.R);
  detail::json_num(out, "c_psi", r.c_psi.hi);
  if (r.has_theta) detail::json_num(out, "c_theta", r.c_theta.hi);
  if (r.has_pi) detail::json_num(out, "c_pi", r.c_pi.hi);
  detail::json_num(out, "T1", r.T1.hi);
  detail::json_num(out, "T2", r.T2.hi);
  detail::json_num(out, "T3", r.T3.hi);
  detail::json_num(out, "T4", r.T4.hi);
  detail::json_num(out, "nu", r.nu.hi);
  if (r.has_theta) detail::json_num(out, "delta_correction", r.delta_correction.hi);
  if (r.has_pi) detail::json_num(out, "pi_factor", r.pi_factor.hi);
  out += "\"assumptions\":[";
  for (size_t i = 0; i < r.assumptions.size(); ++i) {
    out += '"';
    out += r.assumptions[i];
    out += i + 1 < r.assumptions.size() ? "\"," : "\"";
  }
  out += "],";
  detail::json_num(out, "x_min", r.x_min);
  out.pop_back();
  out += "}";
  return out;
}

}  // namespace apb
