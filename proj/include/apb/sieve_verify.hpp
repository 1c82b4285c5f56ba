#pragma once
// Segmented prime/prime-power sieve and the desk-scale verification scans
// built on it: normalized error extrema for psi/theta/pi in progressions,
// envelope crossing points, last-violation abscissae, single-point hypothesis
// checks, and the Chebyshev-type inequality scans.
//
// All function values are accumulated in exact fixed point (FixedIV), so a
// parallel segmented scan combines to exactly the serial accumulator states
// and every evaluation is bit-identical to a single-threaded pass.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "apb/arithmetic.hpp"
#include "apb/ei.hpp"
#include "apb/interval.hpp"

namespace apb {

// ---------------------------------------------------------------------------
// sieve_stream: emit every prime power p^n in [lo, hi] in ascending order.
// ---------------------------------------------------------------------------

struct PrimePower {
  uint64_t value = 0;  // p^n
  uint64_t p = 0;
  int n = 0;
};

constexpr uint64_t kSieveMax = 100000000000000ull;  // 1e14

namespace sieve_detail {

// odd primes <= n
inline std::vector<uint32_t> odd_primes_to(uint64_t n) {
  std::vector<uint32_t> out;
  if (n < 3) return out;
  std::vector<uint8_t> comp((n + 1) / 2, 0);  // index i <-> 2i+1
  for (uint64_t i = 1; (2 * i + 1) * (2 * i + 1) <= n; ++i) {
    if (comp[i]) continue;
    uint64_t p = 2 * i + 1;
    for (uint64_t j = p * p; j <= n; j += 2 * p) comp[(j - 1) / 2] = 1;
  }
  for (uint64_t i = 1; 2 * i + 1 <= n; ++i)
    if (!comp[i]) out.push_back((uint32_t)(2 * i + 1));
  return out;
}

}  // namespace sieve_detail

template <typename F>
void sieve_stream(uint64_t lo, uint64_t hi, F&& emit) {
  if (lo < 2 || lo > hi) throw std::domain_error("sieve_stream: need 2 <= lo <= hi");
  if (hi > kSieveMax) throw std::domain_error("sieve_stream: range beyond 1e14");

  uint64_t root = (uint64_t)std::sqrt((double)hi);
  while (root * root > hi) --root;
  while ((root + 1) * (root + 1) <= hi) ++root;
  std::vector<uint32_t> base = sieve_detail::odd_primes_to(root);

  // 2 and all higher prime powers, collected up front and merged in.
  std::vector<PrimePower> pows;
  if (lo <= 2) pows.push_back({2, 2, 1});
  {
    uint64_t v = 4;
    for (int n = 2; v <= hi; v *= 2, ++n)
      if (v >= lo) pows.push_back({v, 2, n});
  }
  for (uint32_t p : base) {
    uint64_t pp = (uint64_t)p * p;
    if (pp > hi) break;
    uint64_t v = pp;
    for (int n = 2;; ++n) {
      if (v >= lo) pows.push_back({v, p, n});
      if (v > hi / p) break;
      v *= p;
    }
  }
  std::sort(pows.begin(), pows.end(),
            [](const PrimePower& a, const PrimePower& b) { return a.value < b.value; });
  size_t pidx = 0;
  auto flush_below = [&](uint64_t v) {
    while (pidx < pows.size() && pows[pidx].value < v) emit(pows[pidx++]);
  };

  constexpr uint64_t kSegOdds = 1ull << 21;  // odd numbers per segment
  std::vector<uint8_t> mark(kSegOdds);
  uint64_t start = std::max<uint64_t>(lo, 3) | 1;
  for (uint64_t seg_lo = start; seg_lo <= hi; seg_lo += 2 * kSegOdds) {
    uint64_t seg_hi = std::min(hi, seg_lo + 2 * (kSegOdds - 1));
    uint64_t odds = (seg_hi - seg_lo) / 2 + 1;
    std::fill(mark.begin(), mark.begin() + odds, 0);
    for (uint32_t p : base) {
      uint64_t pp = (uint64_t)p * p;
      if (pp > seg_hi) break;
      uint64_t m = std::max(pp, (seg_lo + p - 1) / p * p);
      if ((m & 1) == 0) m += p;
      for (; m <= seg_hi; m += 2 * p) mark[(m - seg_lo) / 2] = 1;
    }
    for (uint64_t i = 0; i < odds; ++i) {
      if (mark[i]) continue;
      uint64_t v = seg_lo + 2 * i;
      flush_below(v);
      emit(PrimePower{v, v, 1});
    }
  }
  flush_below(hi + 1);
}

// ---------------------------------------------------------------------------
// Normalized error expressions at one abscissa for one residue class.
// ---------------------------------------------------------------------------

// Index into the seven tracked expressions:
//   kBPsi    (1/sqrt x)|psi - x/phi|          kSPsi  (log x / x)|psi - x/phi|
//   kBTheta  (1/sqrt x)|theta - x/phi|        kSTheta(log x / x)|theta - x/phi|
//   kBThetaH (1/sqrt x)|theta# - x/phi|       kSPi   (log^2 x / x)|pi - Li/phi|
//   kBPi     (log x / sqrt x)|pi - Li/phi|
enum ExprIndex { kBPsi = 0, kBTheta, kBThetaH, kBPi, kSPsi, kSTheta, kSPi, kExprCount };

using NormEval = std::array<IV, kExprCount>;

// Shared per-abscissa quantities; building one context and evaluating many
// classes (or both limits at one event) against it avoids recomputing the
// expensive log / Li enclosures.
struct EvalCtx {
  IV x, sx, lx, li;
  bool has_li = false;
};

inline EvalCtx make_ctx(const IV& x) {
  EvalCtx c;
  c.x = x;
  c.sx = sqrt(x);
  if (x.lo == x.hi) {
    double l = std::log(x.lo);
    c.lx = IV(nudge_dn(l, 3), nudge_up(l, 3));
  } else {
    c.lx = log(x);
  }
  if (x.lo > 1.0) {
    c.li = EiTable::instance().li_from_log(c.lx);
    c.has_li = true;
  }
  return c;
}

inline NormEval evaluate_class(const EvalCtx& c, const IV& psi, const IV& theta, uint64_t pi_count,
                               uint64_t phi, uint64_t xi2) {
  double phid = (double)phi;
  IV xphi = c.x / phid;
  IV dpsi = psi - xphi;
  IV dth = theta - xphi;
  IV dthh = dth + (double)xi2 * c.sx / phid;
  NormEval e;
  e[kBPsi] = abs(dpsi) / c.sx;
  e[kBTheta] = abs(dth) / c.sx;
  e[kBThetaH] = abs(dthh) / c.sx;
  e[kSPsi] = abs(dpsi) * c.lx / c.x;
  e[kSTheta] = abs(dth) * c.lx / c.x;
  if (c.has_li) {
    IV dpi = IV::exact((double)pi_count) - c.li / phid;
    e[kBPi] = abs(dpi) * c.lx / c.sx;
    e[kSPi] = abs(dpi) * c.lx * c.lx / c.x;
  } else {
    // x = 1: log x vanishes faster than Li blows up, both pi terms tend to 0
    e[kBPi] = IV::exact(0.0);
    e[kSPi] = IV::exact(0.0);
  }
  return e;
}

inline NormEval evaluate_class(const IV& x, const IV& psi, const IV& theta, uint64_t pi_count,
                               uint64_t phi, uint64_t xi2) {
  return evaluate_class(make_ctx(x), psi, theta, pi_count, phi, xi2);
}

// ---------------------------------------------------------------------------
// Scan state: per-class accumulators plus running extrema.
// ---------------------------------------------------------------------------

struct Extremum {
  double value = -std::numeric_limits<double>::infinity();  // certified upper end
  double value_lo = -std::numeric_limits<double>::infinity();
  double x = 0.0;      // abscissa of the winning evaluation
  bool left = false;   // limit from below at x (otherwise the value at x)

  void offer(const IV& v, double ax, bool from_left) {
    if (v.hi > value) {
      value = v.hi;
      value_lo = v.lo;
      x = ax;
      left = from_left;
    }
  }
  // merging later-segment extrema keeps the earlier winner on ties, exactly
  // like the serial first-wins update
  void merge(const Extremum& o) {
    if (o.value > value) *this = o;
  }
};

namespace scan_detail {

struct Acc {
  FixedIV psi, theta;
  uint64_t pi = 0;
  void add(const Acc& o) {
    psi.add(o.psi);
    theta.add(o.theta);
    pi += o.pi;
  }
};

struct Special {
  double trigger = 0.0;  // evaluate once the stream moves strictly past this
  IV x;                  // abscissa enclosure used in the evaluation
};

}  // namespace scan_detail

using Ext7 = std::array<Extremum, kExprCount>;

struct ScanState {
  uint64_t q = 0;
  uint64_t phi = 1;
  uint64_t x_min = 1;   // window start: extrema are tracked on [x_min, x_done]
  uint64_t x_done = 0;  // accumulated through all prime powers <= x_done
  std::vector<uint64_t> residues;  // ascending; {1} for q <= 2
  std::vector<uint64_t> xi2;       // square-root counts per class
  std::vector<int32_t> class_of;   // residue -> class index (q >= 3)
  std::vector<scan_detail::Acc> acc;
  std::vector<Ext7> ext;

  int32_t class_index(uint64_t v) const {
    if (q == 1) return 0;
    if (q == 2) return (v & 1) ? 0 : -1;
    return class_of[v % q];
  }
};

inline ScanState init_scan(uint64_t q, uint64_t x_min = 1) {
  if (q == 0) throw std::domain_error("init_scan: q must be positive");
  if (q > 1000000) throw std::domain_error("init_scan: q beyond 1e6 unsupported");
  if (x_min == 0) throw std::domain_error("init_scan: window starts at x >= 1");
  ScanState st;
  st.q = q;
  st.x_min = x_min;
  if (q <= 2) {
    st.phi = 1;
    st.residues = {1};
    st.xi2 = {1};
  } else {
    ModulusProfile mp = build_profile(q);
    st.phi = mp.phi;
    st.class_of.assign(q, -1);
    for (uint64_t a = 1; a < q; ++a) {
      if (std::gcd(a, q) != 1) continue;
      st.class_of[a] = (int32_t)st.residues.size();
      st.residues.push_back(a);
      st.xi2.push_back(xi_k_at(mp, 2, a));
    }
  }
  st.acc.assign(st.residues.size(), {});
  st.ext.assign(st.residues.size(), {});
  return st;
}

namespace scan_detail {

// Process every prime power in [lo, hi] against the given accumulators.
// With ext != nullptr, offer left/right evaluations of the event's own class
// inside the window and evaluate all classes at each special abscissa once
// the stream passes it (or at the end of the range).  With ext == nullptr
// this is a pure accumulation pass over a zero-initialized delta.
inline void walk(const ScanState& st, std::vector<Acc>& acc, std::vector<Ext7>* ext,
                 uint64_t lo, uint64_t hi, const std::vector<Special>& specials) {
  size_t si = 0;
  auto offer_class = [&](const EvalCtx& ctx, size_t c, double ax, bool from_left) {
    NormEval ne =
        evaluate_class(ctx, acc[c].psi.to_iv(), acc[c].theta.to_iv(), acc[c].pi, st.phi, st.xi2[c]);
    for (int i = 0; i < kExprCount; ++i) (*ext)[c][i].offer(ne[i], ax, from_left);
  };
  auto eval_all = [&](const IV& x, double ax) {
    EvalCtx ctx = make_ctx(x);
    for (size_t c = 0; c < acc.size(); ++c) offer_class(ctx, c, ax, false);
  };
  sieve_stream(lo, hi, [&](const PrimePower& e) {
    if (ext) {
      while (si < specials.size() && (double)e.value > specials[si].trigger) {
        eval_all(specials[si].x, specials[si].trigger);
        ++si;
      }
    }
    int32_t c = st.class_index(e.value);
    if (c < 0) return;
    IV lp = log(IV::exact((double)e.p));
    bool in_window = ext && e.value >= st.x_min;
    if (in_window) {
      EvalCtx ctx = make_ctx(IV::exact((double)e.value));
      if (e.value > st.x_min) offer_class(ctx, c, (double)e.value, true);
      acc[c].psi.add(lp);
      if (e.n == 1) {
        acc[c].theta.add(lp);
        acc[c].pi += 1;
      }
      offer_class(ctx, c, (double)e.value, false);
    } else {
      acc[c].psi.add(lp);
      if (e.n == 1) {
        acc[c].theta.add(lp);
        acc[c].pi += 1;
      }
    }
  });
  if (ext) {
    while (si < specials.size() && specials[si].trigger <= (double)hi) {
      eval_all(specials[si].x, specials[si].trigger);
      ++si;
    }
  }
}

}  // namespace scan_detail

// Extend the accumulated range to x_max, tracking extrema on [x_min, x_max].
// workers <= 1 runs one serial pass; workers > 1 splits the new range into
// one chunk per worker, accumulates exact per-chunk deltas in parallel, then
// rescans chunks from their exact entry states.  Results are bit-identical.
inline void extend(ScanState& st, uint64_t x_max, int workers = 1) {
  if (st.q == 0) throw std::domain_error("extend: uninitialized state");
  if (x_max < 2) throw std::domain_error("extend: x_max below 2");
  if (x_max < st.x_done) throw std::domain_error("extend: cannot shrink a scan");
  if (x_max == st.x_done) return;

  std::vector<scan_detail::Special> specials;
  double lo_open = (double)st.x_done;  // specials strictly above the done mark
  if (x_max >= st.x_min && (double)st.x_min > lo_open)
    specials.push_back({(double)st.x_min, IV::exact((double)st.x_min)});
  IV e2 = e_iv() * e_iv();
  if ((double)st.x_min <= e2.lo && e2.hi <= (double)x_max && e2.lo > lo_open)
    specials.push_back({e2.hi, e2});

  uint64_t lo = std::max<uint64_t>(2, st.x_done + 1);
  if (workers <= 1) {
    scan_detail::walk(st, st.acc, &st.ext, lo, x_max, specials);
  } else {
    int w = std::min(workers, 64);
    uint64_t span = (x_max - lo) / (uint64_t)w + 1;
    struct Chunk {
      uint64_t lo = 0, hi = 0;
      std::vector<scan_detail::Acc> delta, entry;
      std::vector<Ext7> ext;
      std::vector<scan_detail::Special> specials;
    };
    std::vector<Chunk> chunks;
    for (uint64_t c_lo = lo; c_lo <= x_max; c_lo += span) {
      Chunk ck;
      ck.lo = c_lo;
      ck.hi = std::min(x_max, c_lo + span - 1);
      chunks.push_back(std::move(ck));
    }
    size_t si = 0;
    for (auto& ck : chunks)
      while (si < specials.size() && specials[si].trigger <= (double)ck.hi)
        ck.specials.push_back(specials[si++]);

    std::vector<std::thread> pool;
    for (auto& ck : chunks) {
      ck.delta.assign(st.residues.size(), {});
      pool.emplace_back([&st, &ck] { scan_detail::walk(st, ck.delta, nullptr, ck.lo, ck.hi, {}); });
    }
    for (auto& t : pool) t.join();
    pool.clear();

    std::vector<scan_detail::Acc> prefix = st.acc;
    for (auto& ck : chunks) {
      ck.entry = prefix;
      for (size_t c = 0; c < prefix.size(); ++c) prefix[c].add(ck.delta[c]);
    }
    for (auto& ck : chunks) {
      ck.ext.assign(st.residues.size(), {});
      pool.emplace_back(
          [&st, &ck] { scan_detail::walk(st, ck.entry, &ck.ext, ck.lo, ck.hi, ck.specials); });
    }
    for (auto& t : pool) t.join();

    st.acc = std::move(prefix);
    for (auto& ck : chunks)
      for (size_t c = 0; c < st.ext.size(); ++c)
        for (int i = 0; i < kExprCount; ++i) st.ext[c][i].merge(ck.ext[c][i]);
  }

  if (x_max >= st.x_min) {
    EvalCtx ctx = make_ctx(IV::exact((double)x_max));
    for (size_t c = 0; c < st.acc.size(); ++c) {
      NormEval ne = evaluate_class(ctx, st.acc[c].psi.to_iv(), st.acc[c].theta.to_iv(),
                                   st.acc[c].pi, st.phi, st.xi2[c]);
      for (int i = 0; i < kExprCount; ++i) st.ext[c][i].offer(ne[i], (double)x_max, false);
    }
  }
  st.x_done = x_max;
}

inline ScanState accumulate(uint64_t q, uint64_t x_max, uint64_t x_min = 1, int workers = 1) {
  ScanState st = init_scan(q, x_min);
  extend(st, x_max, workers);
  return st;
}

// ---------------------------------------------------------------------------
// Extrema reports.
// ---------------------------------------------------------------------------

struct ExprWorst {
  Extremum e;
  uint64_t residue = 0;
};

inline ExprWorst worst_class(const ScanState& st, int expr) {
  ExprWorst w;
  for (size_t c = 0; c < st.ext.size(); ++c) {
    if (st.ext[c][expr].value > w.e.value) {
      w.e = st.ext[c][expr];
      w.residue = st.residues[c];
    }
  }
  return w;
}

struct BConstants {
  ExprWorst psi, theta, thetah, pi;
};

inline BConstants b_constants(const ScanState& st) {
  return {worst_class(st, kBPsi), worst_class(st, kBTheta), worst_class(st, kBThetaH),
          worst_class(st, kBPi)};
}

// Round the certified upper end up in the sixth decimal, "%.6f".
inline std::string fmt_up6(double value) {
  double r = std::ceil(value * 1e6) / 1e6;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6f", r);
  return buf;
}

// Round up to `sig` significant figures (table convention for x1).
inline double round_up_sig(double v, int sig) {
  if (!(v > 0)) throw std::domain_error("round_up_sig: positive input expected");
  double mag = std::pow(10.0, std::floor(std::log10(v)) - (sig - 1));
  return std::ceil(v / mag) * mag;
}

// ---------------------------------------------------------------------------
// Envelope crossing x1: smallest x beyond which the proved c-bound dominates
// the scanned sqrt-normalized supremum b.
// ---------------------------------------------------------------------------

enum class Variant { psi, theta, thetah, pi };

inline double x1_bisect(uint64_t q, double b, double c, Variant var) {
  if (q == 0 || !(b > 0.0) || !(c > 0.0)) throw std::domain_error("x1_bisect: bad arguments");
  bool half = (q % 4) == 2;  // q = 2k with odd k: scanned via q and a doubling step
  auto g = [&](double x) {
    double lx = std::log(x), sx = std::sqrt(x);
    switch (var) {
      case Variant::psi:
        return c * x / lx - b * sx - (half ? lx : 0.0);
      case Variant::theta:
      case Variant::thetah:
        return c * x / lx - b * sx - (half ? 1.0 : 0.0);
      case Variant::pi:
        return c * x / (lx * lx) - b * sx / lx - (half ? 1.0 : 0.0);
    }
    return 0.0;
  };
  double lo = 7.5, hi = 1e20;
  if (!(g(lo) < 0.0) || !(g(hi) > 0.0)) throw std::domain_error("x1_bisect: no crossing in bracket");
  for (int it = 0; it < 200; ++it) {
    double mid = std::exp(0.5 * (std::log(lo) + std::log(hi)));
    if (mid <= lo || mid >= hi) break;
    (g(mid) < 0.0 ? lo : hi) = mid;
  }
  return hi;
}

// ---------------------------------------------------------------------------
// x_star: the largest abscissa at which |f(x) - x/phi| still exceeds the
// envelope c x/log x (c x/log^2 x for pi).  Certified by interval arithmetic;
// crossing tails between events are refined by integer bisection.
// ---------------------------------------------------------------------------

struct XStar {
  uint64_t x = 0;
  uint64_t residue = 0;
  uint64_t ambiguous = 0;     // interval verdicts that straddled the envelope
  bool end_violation = false; // still violating at the end of the scan
};

namespace scan_detail {

struct XsClass {
  FixedIV f;          // psi or theta sum as needed by the variant
  uint64_t cnt = 0;   // pi count
  bool pending = false;
  uint64_t pend_v = 0;
  IV pend_base;       // frozen f enclosure at the pending event
  uint64_t pend_cnt = 0;
  uint64_t best = 0;
};

}  // namespace scan_detail

inline XStar x_star(uint64_t q, double c, Variant var, double x1) {
  if (!(c > 0.0)) throw std::domain_error("x_star: positive envelope constant expected");
  if (!(x1 >= 10.0) || x1 > (double)kSieveMax) throw std::domain_error("x_star: bad scan bound");
  ScanState meta = init_scan(q, 1);
  uint64_t x_end = (uint64_t)std::floor(x1);
  std::vector<scan_detail::XsClass> cls(meta.residues.size());
  const EiTable& ei = EiTable::instance();
  double phid = (double)meta.phi;
  XStar out;

  struct XCtx {
    IV x, lx, li;
  };
  auto xctx = [&](uint64_t n) {
    XCtx c;
    c.x = IV::exact((double)n);
    double l = std::log((double)n);
    c.lx = IV(nudge_dn(l, 3), nudge_up(l, 3));
    if (var == Variant::pi) c.li = ei.li_from_log(c.lx);
    return c;
  };
  auto dev_abs = [&](const XCtx& xc, const IV& base, uint64_t cnt, uint64_t c_idx) {
    switch (var) {
      case Variant::psi:
      case Variant::theta:
        return abs(base - xc.x / phid);
      case Variant::thetah:
        return abs(base + (double)meta.xi2[c_idx] * sqrt(xc.x) / phid - xc.x / phid);
      case Variant::pi:
        return abs(IV::exact((double)cnt) - xc.li / phid);
    }
    return IV::exact(0.0);
  };
  auto envelope = [&](const XCtx& xc) {
    return var == Variant::pi ? c * xc.x / (xc.lx * xc.lx) : c * xc.x / xc.lx;
  };
  // 1 = violating, 0 = clean; straddles count as violating and are tallied
  auto verdict = [&](const IV& d, const IV& e) {
    if (d.lo > e.hi) return 1;
    if (d.hi <= e.lo) return 0;
    ++out.ambiguous;
    return 1;
  };
  // smallest clean integer in (viol, clean], against a frozen class state
  auto resolve = [&](scan_detail::XsClass& cs, uint64_t clean_at, uint64_t c_idx) {
    uint64_t a = cs.pend_v, b = clean_at;
    while (b - a > 1) {
      uint64_t m = a + (b - a) / 2;
      XCtx xc = xctx(m);
      if (verdict(dev_abs(xc, cs.pend_base, cs.pend_cnt, c_idx), envelope(xc)) == 1)
        a = m;
      else
        b = m;
    }
    cs.best = std::max(cs.best, a);
    cs.pending = false;
  };

  sieve_stream(2, x_end, [&](const PrimePower& e) {
    if (var != Variant::psi && e.n != 1) return;  // theta/pi change at primes only
    int32_t ci = meta.class_index(e.value);
    if (ci < 0) return;
    scan_detail::XsClass& cs = cls[ci];
    XCtx xc = xctx(e.value);
    IV env = envelope(xc);
    if (verdict(dev_abs(xc, cs.f.to_iv(), cs.cnt, ci), env) == 1) {
      cs.best = std::max(cs.best, e.value);
      cs.pending = false;
    } else if (cs.pending) {
      resolve(cs, e.value, ci);
    }
    if (var == Variant::pi) {
      cs.cnt += 1;
    } else {
      cs.f.add(log(IV::exact((double)e.p)));
    }
    IV after = cs.f.to_iv();
    if (verdict(dev_abs(xc, after, cs.cnt, ci), env) == 1) {
      cs.pending = true;
      cs.pend_v = e.value;
      cs.pend_base = after;
      cs.pend_cnt = cs.cnt;
    } else {
      cs.pending = false;
    }
  });

  for (size_t ci = 0; ci < cls.size(); ++ci) {
    scan_detail::XsClass& cs = cls[ci];
    XCtx xc = xctx(x_end);
    if (verdict(dev_abs(xc, cs.f.to_iv(), cs.cnt, ci), envelope(xc)) == 1) {
      out.end_violation = true;
      cs.best = std::max(cs.best, x_end);
    } else if (cs.pending) {
      resolve(cs, x_end, ci);
    }
    if (cs.best > out.x) {
      out.x = cs.best;
      out.residue = meta.residues[ci];
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Single-point hypothesis check for the theta -> pi transfer term.
// ---------------------------------------------------------------------------

struct ECheck {
  double max_abs = 0.0;   // certified upper end of max_a |E(x; q, a)|
  uint64_t residue = 0;
  double rhs = 0.0;       // lower end of c_theta x / ((log x - 2) log^2 x)
  bool ok = false;
};

// E(u; q, a) = pi(u; q, a) - Li(u)/phi - (theta(u; q, a) - u/phi)/log u,
// evaluated at u = st.x_done.
inline ECheck E_check(const ScanState& st, double c_theta) {
  if (st.x_done < 8) throw std::domain_error("E_check: scan too short");
  if (!(c_theta > 0.0)) throw std::domain_error("E_check: positive c_theta expected");
  IV x = IV::exact((double)st.x_done);
  IV lx = log(x);
  IV lix = EiTable::instance().li(x);
  double phid = (double)st.phi;
  ECheck r;
  for (size_t c = 0; c < st.acc.size(); ++c) {
    IV e = (IV::exact((double)st.acc[c].pi) - lix / phid) -
           (st.acc[c].theta.to_iv() - x / phid) / lx;
    if (abs(e).hi > r.max_abs) {
      r.max_abs = abs(e).hi;
      r.residue = st.residues[c];
    }
  }
  IV rhs = c_theta * x / ((lx - 2.0) * lx * lx);
  r.rhs = rhs.lo;
  r.ok = r.max_abs <= r.rhs;
  return r;
}

// ---------------------------------------------------------------------------
// Chebyshev-type inequality scan: last failures of the four pi / p_n bounds.
// ---------------------------------------------------------------------------

struct PiPnScan {
  // last failing abscissa of:
  //   [0] x/(phi log x) < pi(x; q, a)
  //   [1] pi(x; q, a) < x/(phi log x) (1 + 5/(2 log x))
  //   [2] n phi log(n phi) < p_n(q, a)
  //   [3] p_n(q, a) < n phi (log(n phi) + (4/3) log log(n phi))
  double last_fail[4] = {0.0, 0.0, 0.0, 0.0};
};

namespace scan_detail {

// largest t with g(t) <= 0, for increasing g with g(lo) <= 0 < g(hi)
template <typename G>
double cross_up(double lo, double hi, G&& g) {
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (g(mid) <= 0.0 ? lo : hi) = mid;
  }
  return hi;
}

}  // namespace scan_detail

inline PiPnScan pi_pn_scan(uint64_t q, uint64_t x_max) {
  if (q < 3 || q > 1200) throw std::domain_error("pi_pn_scan: 3 <= q <= 1200");
  ScanState meta = init_scan(q, 1);
  std::vector<uint64_t> cnt(meta.residues.size(), 0);
  double phid = (double)meta.phi;
  PiPnScan out;
  auto note = [&](int i, double x) { out.last_fail[i] = std::max(out.last_fail[i], x); };

  sieve_stream(2, x_max, [&](const PrimePower& e) {
    if (e.n != 1) return;
    int32_t c = meta.class_index(e.value);
    if (c < 0) return;
    double x = (double)e.value, lx = std::log(x);
    double low = x / (phid * lx);
    double nL = (double)cnt[c];
    if (nL <= low) note(0, x);  // lower bound still failing as x -> p^-
    cnt[c] += 1;
    double n = (double)cnt[c];
    if (n <= low) {
      // failing beyond the jump; the failure ends where t/(phi log t) = n
      double t = scan_detail::cross_up(x, (double)x_max * 2.0 + 16.0,
                                       [&](double u) { return u / (phid * std::log(u)) - n; });
      note(0, std::min(t, (double)x_max));
    }
    auto upper = [&](double u) {
      double lu = std::log(u);
      return u / (phid * lu) * (1.0 + 2.5 / lu);
    };
    if (n >= upper(x)) {
      double t = scan_detail::cross_up(x, (double)x_max * 2.0 + 16.0,
                                       [&](double u) { return upper(u) - n; });
      note(1, std::min(t, (double)x_max));
    }
    double np = n * phid, lnp = std::log(np);
    if (x <= np * lnp) note(2, x);
    if (x >= np * (lnp + (4.0 / 3.0) * std::log(lnp))) note(3, x);
  });
  return out;
}

// ---------------------------------------------------------------------------
// Worst small-x normalized errors over a range of moduli.
// ---------------------------------------------------------------------------

struct SmallWorst {
  Extremum e;
  uint64_t q = 0;
  uint64_t residue = 0;
};

struct SmallXScan {
  SmallWorst psi, theta, pi;
};

inline SmallXScan smallx_scan(uint64_t q_max, uint64_t x_floor, uint64_t x_cap, int workers = 1) {
  if (q_max < 1) throw std::domain_error("smallx_scan: q_max must be positive");
  if (x_floor < 2 || x_cap <= x_floor) throw std::domain_error("smallx_scan: bad window");
  SmallXScan out;
  auto take = [](SmallWorst& w, const ExprWorst& cand, uint64_t q) {
    if (cand.e.value > w.e.value) {
      w.e = cand.e;
      w.q = q;
      w.residue = cand.residue;
    }
  };
  for (uint64_t q = 1; q <= q_max; ++q) {
    ScanState st = accumulate(q, x_cap, x_floor, workers);
    take(out.psi, worst_class(st, kSPsi), q);
    take(out.theta, worst_class(st, kSTheta), q);
    take(out.pi, worst_class(st, kSPi), q);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Transfer bounds between modulus 2k (k odd) and modulus k.
// ---------------------------------------------------------------------------

struct TransferBound {
  double psi = 0.0, theta = 0.0, pi = 0.0;
};

inline TransferBound mod2mod4_transfer(uint64_t k, double x) {
  if (k < 3 || k % 2 == 0) throw std::domain_error("mod2mod4_transfer: odd k >= 3 expected");
  if (!(x >= 2.0)) throw std::domain_error("mod2mod4_transfer: x >= 2 expected");
  double l2 = std::log(2.0);
  return {(1.0 + std::log(x / 2.0) / std::log((double)k + 1.0)) * l2, l2, 1.0};
}

// ---------------------------------------------------------------------------
// Deterministic CSV reports.
// ---------------------------------------------------------------------------

inline std::string fmt_abscissa(const Extremum& e) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.0f%s", e.x, e.left ? "-" : "+");
  return buf;
}

inline void write_b_constants_csv(const std::string& path,
                                  const std::vector<std::pair<uint64_t, BConstants>>& rows) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << "q,b_psi,x_psi,b_theta,x_theta,b_thetasharp,x_thetasharp,b_pi,x_pi\n";
  for (const auto& [q, b] : rows) {
    os << q;
    for (const ExprWorst* w : {&b.psi, &b.theta, &b.thetah, &b.pi})
      os << ',' << fmt_up6(w->e.value) << ',' << fmt_abscissa(w->e);
    os << '\n';
  }
}

inline void write_x_star_csv(const std::string& path,
                             const std::vector<std::pair<uint64_t, std::array<uint64_t, 4>>>& rows) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << "q,x_psi,x_theta,x_thetasharp,x_pi\n";
  for (const auto& [q, xs] : rows)
    os << q << ',' << xs[0] << ',' << xs[1] << ',' << xs[2] << ',' << xs[3] << '\n';
}

inline void write_scan_max_csv(const std::string& path, const SmallXScan& s, uint64_t x_floor,
                               uint64_t x_cap) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << "expr,x_floor,x_cap,q,residue,x,value\n";
  auto row = [&](const char* name, const SmallWorst& w) {
    os << name << ',' << x_floor << ',' << x_cap << ',' << w.q << ',' << w.residue << ','
       << fmt_abscissa(w.e) << ',' << fmt_up6(w.e.value) << '\n';
  };
  row("psi", s.psi);
  row("theta", s.theta);
  row("pi", s.pi);
}

// ---------------------------------------------------------------------------
// Checkpoints: byte-exact snapshots of a ScanState.
// ---------------------------------------------------------------------------

namespace scan_detail {

inline void put_u64(std::ostream& os, uint64_t v) { os.write((const char*)&v, 8); }
inline void put_f64(std::ostream& os, double v) { os.write((const char*)&v, 8); }
inline void put_i128(std::ostream& os, i128 v) {
  put_u64(os, (uint64_t)(u128)v);
  put_u64(os, (uint64_t)((u128)v >> 64));
}
inline uint64_t get_u64(std::istream& is) {
  uint64_t v = 0;
  is.read((char*)&v, 8);
  return v;
}
inline double get_f64(std::istream& is) {
  double v = 0;
  is.read((char*)&v, 8);
  return v;
}
inline i128 get_i128(std::istream& is) {
  uint64_t lo = get_u64(is), hi = get_u64(is);
  return (i128)(((u128)hi << 64) | lo);
}

}  // namespace scan_detail

inline void save_checkpoint(const std::string& path, const ScanState& st) {
  using namespace scan_detail;
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  os.write("APBSCAN1", 8);
  put_u64(os, 1);  // version
  put_u64(os, st.q);
  put_u64(os, st.x_min);
  put_u64(os, st.x_done);
  put_u64(os, st.residues.size());
  for (size_t c = 0; c < st.residues.size(); ++c) {
    put_u64(os, st.residues[c]);
    put_u64(os, st.xi2[c]);
    put_i128(os, st.acc[c].psi.lo);
    put_i128(os, st.acc[c].psi.hi);
    put_i128(os, st.acc[c].theta.lo);
    put_i128(os, st.acc[c].theta.hi);
    put_u64(os, st.acc[c].pi);
    for (int i = 0; i < kExprCount; ++i) {
      const Extremum& e = st.ext[c][i];
      put_f64(os, e.value);
      put_f64(os, e.value_lo);
      put_f64(os, e.x);
      put_u64(os, e.left ? 1 : 0);
    }
  }
  if (!os) throw std::runtime_error("short write to " + path);
}

inline ScanState load_checkpoint(const std::string& path) {
  using namespace scan_detail;
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read " + path);
  char magic[8] = {};
  is.read(magic, 8);
  if (std::memcmp(magic, "APBSCAN1", 8) != 0) throw std::runtime_error("not a scan checkpoint: " + path);
  if (get_u64(is) != 1) throw std::runtime_error("unsupported checkpoint version in " + path);
  uint64_t q = get_u64(is), x_min = get_u64(is), x_done = get_u64(is);
  ScanState st = init_scan(q, x_min);
  uint64_t n = get_u64(is);
  if (n != st.residues.size()) throw std::runtime_error("corrupt checkpoint: " + path);
  for (size_t c = 0; c < n; ++c) {
    if (get_u64(is) != st.residues[c] || get_u64(is) != st.xi2[c])
      throw std::runtime_error("corrupt checkpoint: " + path);
    st.acc[c].psi.lo = get_i128(is);
    st.acc[c].psi.hi = get_i128(is);
    st.acc[c].theta.lo = get_i128(is);
    st.acc[c].theta.hi = get_i128(is);
    st.acc[c].pi = get_u64(is);
    for (int i = 0; i < kExprCount; ++i) {
      Extremum& e = st.ext[c][i];
      e.value = get_f64(is);
      e.value_lo = get_f64(is);
      e.x = get_f64(is);
      e.left = get_u64(is) != 0;
    }
  }
  st.x_done = x_done;
  if (!is) throw std::runtime_error("short read from " + path);
  return st;
}

}  // namespace apb
