#pragma once

// Enclosures for the exponential integral Ei and the logarithmic integral
// Li(x) = Ei(log x) - Ei(log 2), via a precomputed node table on [0, 33]
// (covering x up to e^33 > 2e14) with cubic Taylor evaluation between nodes
// and a Lagrange remainder enclosure.

#include <cassert>
#include <cmath>
#include <vector>

#include "interval.hpp"

namespace apb {

// Euler-Mascheroni constant, correctly rounded decimal; bracketed outward.
inline IV euler_gamma() { return IV(nudge_dn(0.5772156649015328606, 2), nudge_up(0.5772156649015328606, 2)); }

// Ei(u) for u > 0 by the ascending series gamma + ln u + sum u^k/(k k!).
// Terms are enclosed; the tail is bounded geometrically once the term ratio
// u/(k+1) drops below 1/2.
inline IV ei_series(double u) {
  assert(u > 0.0);
  IV uv = IV::exact(u);
  IV sum = euler_gamma() + log(uv);
  IV pow = uv;                 // u^k
  IV fact = IV::exact(1.0);    // k!
  for (int k = 1;; ++k) {
    if (k > 1) {
      pow = pow * uv;
      fact = fact * IV::exact((double)k);
    }
    IV term = pow / (fact * IV::exact((double)k));
    sum = sum + term;
    if (k > 2 * u + 8 && term.hi < 1e-18 * std::max(1.0, std::fabs(sum.hi))) {
      // tail <= term.hi * r/(1-r) with r = u/(k+2) <= 1/2
      double r = u / (k + 2);
      double tail = nudge_up(term.hi * r / (1.0 - r));
      sum = sum + IV(0.0, tail);
      break;
    }
    if (k > 400) {  // unreachable for u <= 40; safety stop
      sum = sum + IV(0.0, 1e-6);
      break;
    }
  }
  return sum;
}

class EiTable {
 public:
  double grid_step = 1e-3;
  double max_u = 33.0;

  struct Node {
    double u;
    IV ei;
    IV c1, c2, c3;  // Taylor coefficients: e^u/u, e^u(u-1)/(2u^2), e^u(u^2-2u+2)/(6u^3)
  };

  explicit EiTable(double max_u_ = 33.0, double step = 1e-3) : grid_step(step), max_u(max_u_) {
    int n = (int)std::llround(max_u_ / step);
    nodes_.resize(n + 1);
    // Build Ei by marching the series once per node; coefficients reuse exp(u).
    for (int i = 1; i <= n; ++i) {
      double u = i * step;
      Node& nd = nodes_[i];
      nd.u = u;
      nd.ei = ei_series(u);
      IV uv = IV::exact(u), eu = exp(uv);
      nd.c1 = eu / uv;
      nd.c2 = eu * (uv - 1.0) / (2.0 * uv * uv);
      nd.c3 = eu * (uv * uv - 2.0 * uv + 2.0) / (6.0 * uv * uv * uv);
    }
  }

  static const EiTable& instance() {
    static EiTable t;
    return t;
  }

  // Enclosure of Ei(u), u > 0.  Below half a grid step from the first node we
  // fall back to the series directly.
  IV ei(double u) const {
    assert(u > 0.0 && u <= max_u + 0.5 * grid_step);
    if (u < 0.5) return ei_series(u);
    int i = (int)std::llround(u / grid_step);
    i = std::min(std::max(i, 1), (int)nodes_.size() - 1);
    const Node& nd = nodes_[i];
    IV h = IV::exact(u) - IV::exact(nd.u);
    IV val = nd.ei + nd.c1 * h + nd.c2 * (h * h) + nd.c3 * (h * h * h);
    // Lagrange remainder: |Ei''''| on [u, v] is at most
    // e^(t_hi) (1/t + 3/t^2 + 6/t^3 + 6/t^4) at t = t_lo.
    double t_lo = std::min(u, nd.u), t_hi = std::max(u, nd.u);
    IV tl = IV::exact(t_lo);
    IV mag = exp(IV::exact(t_hi)) * (1.0 / tl + 3.0 / (tl * tl) + 6.0 / (tl * tl * tl) + 6.0 / (tl * tl * tl * tl));
    IV h4 = h * h * h * h;
    double rbound = nudge_up((mag * h4).hi / 24.0);
    return val + IV(-rbound, rbound);
  }

  // Enclosure of Li(x) = Ei(log x) - Ei(log 2), x >= 2 (negative and tiny for
  // x slightly below 2 is also handled since Ei is evaluated on log x > 0).
  IV li(const IV& x) const {
    assert(x.lo > 1.0);
    return li_from_log(log(x));
  }
  IV li(double x) const { return li(IV::exact(x)); }

  // Same enclosure from an already-computed enclosure of log x (> 0).
  IV li_from_log(const IV& lx) const {
    assert(lx.lo > 0.0);
    IV top = hull(ei(lx.lo), ei(lx.hi));  // Ei increasing on u > 0
    return top - ei_log2();
  }

 private:
  std::vector<Node> nodes_;

  const IV& ei_log2() const {
    static IV v = [this] {
      IV l2 = log(IV::exact(2.0));
      return hull(ei_series(l2.lo), ei_series(l2.hi));
    }();
    return v;
  }
};

}  // namespace apb
