#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "apb/ei.hpp"
#include "oracles.hpp"

using apb::EiTable;
using apb::IV;

TEST_CASE("li vanishes at 2", "[ei]") {
  IV v = EiTable::instance().li(2.0);
  REQUIRE(v.lo <= 0.0);
  REQUIRE(v.hi >= 0.0);
  REQUIRE(v.width() < 1e-12);
}

TEST_CASE("li matches adaptive quadrature", "[ei]") {
  const EiTable& t = EiTable::instance();
  auto invlog = [](double u) { return 1.0 / std::log(u); };

  IV million = t.li(1.0e6);
  REQUIRE(million.lo <= 78626.50399568207);
  REQUIRE(million.hi >= 78626.50399568206);

  auto gen = oracle::rng(47);
  std::uniform_real_distribution<double> expo(1.0, 10.0);
  for (int i = 0; i < 20; ++i) {
    double x = std::pow(10.0, expo(gen));
    double est = x / std::log(x);
    double ref = oracle::integrate(invlog, 2.0, x, 1e-11 * est);
    IV v = t.li(x);
    INFO("x=" << x << " ref=" << ref << " lo=" << v.lo << " hi=" << v.hi);
    REQUIRE(v.lo <= ref + 1e-9 * est);
    REQUIRE(v.hi >= ref - 1e-9 * est);
    REQUIRE(v.width() / std::fabs(v.mid()) < 1e-9);
  }
}

TEST_CASE("li inequalities at classic checkpoints", "[ei]") {
  const EiTable& t = EiTable::instance();
  {
    double x = 190.0, L = std::log(190.0);
    double four_term = x / L + x / (L * L) + 2 * x / (L * L * L) + 6 * x / (L * L * L * L);
    REQUIRE(t.li(x).lo > four_term);
  }
  {
    double x = 1865.0, L = std::log(1865.0);
    REQUIRE(t.li(x).hi < x / L + 3 * x / (2 * L * L));
  }
}

TEST_CASE("table and series paths agree", "[ei]") {
  const EiTable& t = EiTable::instance();
  for (double u : {0.3, 0.49, 0.501, 0.75, 1.0, 2.5, 5.0}) {
    IV a = t.ei(u);
    IV b = apb::ei_series(u);
    INFO("u=" << u);
    REQUIRE(a.lo <= b.hi);
    REQUIRE(b.lo <= a.hi);
    REQUIRE(a.width() < 1e-10 * std::max(1.0, std::fabs(a.mid())));
  }
  // strictly increasing on a grid
  double prev = t.ei(0.2).hi;
  for (double u = 0.7; u <= 32.5; u += 0.5) {
    IV v = t.ei(u);
    REQUIRE(v.lo > prev);
    prev = v.hi;
  }
}

TEST_CASE("li on intervals is the hull of the endpoints", "[ei]") {
  const EiTable& t = EiTable::instance();
  IV wide = t.li(IV(100.0, 1000.0));
  REQUIRE(wide.lo <= t.li(100.0).lo);
  REQUIRE(wide.hi >= t.li(1000.0).hi);
  REQUIRE(wide.lo >= t.li(100.0).lo - 1e-9);
  REQUIRE(wide.hi <= t.li(1000.0).hi + 1e-9);
}
