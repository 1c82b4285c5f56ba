#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "apb/special.hpp"
#include "oracles.hpp"

using apb::IV;

TEST_CASE("tau and omega tables", "[special]") {
  REQUIRE(apb::tau_m(2) == 4.0726);
  REQUIRE(apb::tau_m(3) == 5.2067);
  REQUIRE(apb::tau_m(4) == 6.1454);
  REQUIRE(apb::tau_m(5) == 6.9631);
  REQUIRE(apb::tau_m(6) == 7.6967);
  REQUIRE(apb::tau_m(7) == 8.3675);
  REQUIRE(apb::tau_m(8) == 8.9891);
  REQUIRE(apb::tau_m(9) == 9.5709);
  REQUIRE(apb::tau_m(10) == 10.1197);
  REQUIRE(apb::tau_m(11) == 10.6405);
  REQUIRE(apb::tau_m(12) == 11.1371);
  REQUIRE(apb::tau_m(13) == 11.6126);
  REQUIRE(apb::tau_m(25) == 11.6126);
  REQUIRE_THROWS_AS(apb::tau_m(1), std::domain_error);

  for (int m = 2; m <= 25; ++m) {
    double t = apb::tau_m(m);
    double w = 2.0 / (t + std::sqrt(t * t + 4.0 / M_PI));
    IV wi = apb::omega_m(m);
    REQUIRE(std::fabs(wi.mid() - w) < 1e-6);
    REQUIRE(wi.width() < 1e-12);
  }
}

TEST_CASE("erfc sandwich", "[special]") {
  SECTION("erfc(0) = 1 sits within the bounds") {
    IV v = apb::erfc_iv(0.0);
    REQUIRE(v.lo <= 1.0);
    REQUIRE(v.hi >= 1.0);
  }

  SECTION("u = 1 brackets the quadrature value") {
    double ref = 2.0 / std::sqrt(M_PI) * oracle::integrate([](double t) { return std::exp(-t * t); }, 1.0, 12.0, 1e-14);
    IV v = apb::erfc_iv(1.0);
    REQUIRE(v.lo <= ref);
    REQUIRE(v.hi >= ref);
  }

  SECTION("sqrt(pi) erfc(tau_2) <= omega_2 exp(-tau_2^2)") {
    double u = apb::tau_m(2);
    IV lhs = sqrt(apb::pi_iv()) * apb::erfc_iv(u);
    IV rhs = apb::omega_m(2) * exp(-IV::exact(u) * IV::exact(u));
    REQUIRE(lhs.hi <= rhs.hi * (1 + 1e-12));
  }

  SECTION("positive, ordered bounds on [-5, 20]") {
    for (double u = -5.0; u <= 20.0; u += 0.125) {
      IV v = apb::erfc_iv(u);
      REQUIRE(v.lo > 0.0);
      REQUIRE(v.hi > v.lo);
      REQUIRE(v.hi <= 2.0);
    }
  }
}

TEST_CASE("incomplete Bessel quadrature", "[special]") {
  SECTION("K_1(1;1) matches an independent improper integral") {
    double lib = apb::bessel_K_quad(1.0, 1.0, 1.0);
    double ref = oracle::integrate_to_inf(
        [](double u) { return 0.5 * std::exp(-0.5 * (u + 1.0 / u)); }, 1.0, 1e-13);
    REQUIRE(std::fabs(lib / ref - 1.0) < 1e-8);
  }

  SECTION("K is positive and decreasing in y") {
    double prev = apb::bessel_K_quad(2.0, 1.5, 0.5);
    REQUIRE(prev > 0.0);
    for (double y = 1.0; y <= 8.0; y += 0.75) {
      double cur = apb::bessel_K_quad(2.0, 1.5, y);
      REQUIRE(cur > 0.0);
      REQUIRE(cur < prev);
      prev = cur;
    }
  }

  SECTION("I reduces to K under the change of variables") {
    auto gen = oracle::rng(53);
    std::uniform_real_distribution<double> nd(1.0, 3.0), md(1.5, 5.0), ad(1.0, 30.0),
        bd(1.0, 10.0), ld(2.0, 50.0);
    for (int i = 0; i < 5; ++i) {
      double n = nd(gen), m = md(gen), alpha = ad(gen), beta = bd(gen), ell = ld(gen);
      double I = apb::bessel_I_quad(n, m, alpha, beta, ell);
      double K = apb::bessel_K_quad(n, 2.0 * std::sqrt(alpha * m),
                                    std::sqrt(m / alpha) * std::log(beta * ell));
      double rhs = 2.0 * std::pow(beta, m) * std::pow(alpha / m, n / 2.0) * K;
      INFO("n=" << n << " m=" << m << " alpha=" << alpha << " beta=" << beta << " ell=" << ell);
      REQUIRE(std::fabs(I / rhs - 1.0) < 1e-7);
    }
  }
}

TEST_CASE("J envelopes dominate K", "[special]") {
  SECTION("J1a(1,1) = 11/(16e)") {
    apb::JVals j = apb::J_envelopes(IV::exact(1.0), IV::exact(1.0));
    double want = 11.0 / (16.0 * std::exp(1.0));
    REQUIRE(j.j1a.lo <= want);
    REQUIRE(j.j1a.hi >= want);
    REQUIRE(j.j1a.width() < 1e-12);
  }

  SECTION("random (z,y): K_1 <= J1a+J1b and K_2 <= J2a+J2b, all positive") {
    auto gen = oracle::rng(59);
    std::uniform_real_distribution<double> zd(0.5, 50.0), yd(0.5, 20.0);
    for (int i = 0; i < 20; ++i) {
      double z = zd(gen), y = yd(gen);
      apb::JVals j = apb::J_envelopes(IV::exact(z), IV::exact(y));
      REQUIRE(j.j1a.lo > 0.0);
      REQUIRE(j.j1b.lo > 0.0);
      REQUIRE(j.j2a.lo > 0.0);
      REQUIRE(j.j2b.lo > 0.0);
      double K1 = apb::bessel_K_quad(1.0, z, y);
      double K2 = apb::bessel_K_quad(2.0, z, y);
      INFO("z=" << z << " y=" << y);
      REQUIRE((j.j1a + j.j1b).hi >= K1 * (1 - 1e-9));
      REQUIRE((j.j2a + j.j2b).hi >= K2 * (1 - 1e-9));
    }
  }
}

TEST_CASE("closed-form maximizer", "[special]") {
  SECTION("lam = 1 gives u0 = exp(mu/c2)") {
    apb::PhiMax r = apb::phi_max(IV::exact(2.0), IV::exact(0.5), IV::exact(1.0), IV::exact(3.0));
    double want = std::exp(3.0 / 0.5);
    REQUIRE(r.u0.lo <= want);
    REQUIRE(r.u0.hi >= want);
  }

  SECTION("dominates a log-spaced grid and peaks strictly at u0") {
    auto gen = oracle::rng(61);
    std::uniform_real_distribution<double> c1d(0.1, 10.0), c2d(0.05, 5.0), lamd(0.3, 3.0),
        mud(0.2, 8.0);
    int done = 0;
    while (done < 30) {
      double c1 = c1d(gen), c2 = c2d(gen), lam = lamd(gen), mu = mud(gen);
      double expo = std::pow(mu / (lam * c2), 1.0 / lam);
      if (expo > 500.0) continue;  // u0 would overflow
      ++done;
      auto phi = [&](double u) {
        double L = std::log(u);
        return c1 * std::exp(-c2 * std::pow(L, lam)) * std::pow(L, mu);
      };
      apb::PhiMax r =
          apb::phi_max(IV::exact(c1), IV::exact(c2), IV::exact(lam), IV::exact(mu));
      double u0 = r.u0.mid();
      for (int i = 1; i <= 10000; ++i) {
        double u = std::exp(std::log(10.0 * u0) * i / 10000.0);
        if (u <= 1.0) continue;
        REQUIRE(phi(u) <= r.value.hi * (1 + 1e-12));
      }
      REQUIRE(phi(u0 * 1.001) < phi(u0));
      REQUIRE(phi(u0 * 0.999) < phi(u0));
    }
  }
}

TEST_CASE("Xi decay envelope", "[special]") {
  SECTION("threshold matches the closed form") {
    auto gen = oracle::rng(67);
    std::uniform_real_distribution<double> dh2(1e8, 3e10), Rd(0.435, 5.6);
    std::uniform_int_distribution<int> md(2, 12);
    for (int i = 0; i < 20; ++i) {
      int m = md(gen);
      double lam = std::log(dh2(gen)), R = Rd(gen), mu = 0.5 + (m + 1);
      apb::XiDecay r = apb::xi_decay(m, IV::exact(lam), IV::exact(std::min(mu, m + 1.75)),
                                     IV::exact(R), 100.0);
      double want = R * lam * std::pow(std::sqrt(m * lam) - apb::tau_m(m), 2);
      REQUIRE(std::fabs(r.log_decreasing_from.mid() / want - 1.0) < 1e-12);
    }
  }

  SECTION("value bound dominates the direct evaluation below the threshold") {
    auto gen = oracle::rng(71);
    std::uniform_real_distribution<double> dh2(1e8, 3e10), Rd(0.435, 5.6), frac(0.05, 0.999);
    std::uniform_int_distribution<int> md(2, 12);
    for (int i = 0; i < 20; ++i) {
      int m = md(gen);
      double lam = std::log(dh2(gen)), R = Rd(gen);
      double mu = std::min(frac(gen) * (m + 1.75), m + 1.75);
      double logx3 = R * lam * std::pow(std::sqrt(m * lam) - apb::tau_m(m), 2);
      double lx = frac(gen) * std::min(700.0, logx3);
      if (lx <= 1.0) lx = 1.5;
      double x = std::exp(lx);
      apb::XiDecay r = apb::xi_decay(m, IV::exact(lam), IV::exact(mu), IV::exact(R), x);
      double arg = std::sqrt(m * lam) - std::sqrt(lx / (R * lam));
      double direct = std::sqrt(M_PI) * apb::erfc_iv(arg).hi *
                      std::exp(-2.0 * std::sqrt(m * lx / R)) * std::pow(lx, mu);
      INFO("m=" << m << " lam=" << lam << " R=" << R << " mu=" << mu << " lx=" << lx);
      REQUIRE(r.value_bound.hi >= direct * (1 - 1e-9));
      REQUIRE(r.value_bound.lo > 0.0);
    }
  }

  SECTION("hypothesis violations are rejected") {
    IV lam = IV::exact(std::log(2e8)), R = IV::exact(5.6);
    REQUIRE_THROWS_AS(apb::xi_decay(6, lam, IV::exact(8.0), R, 100.0), std::domain_error);
    REQUIRE_THROWS_AS(apb::xi_decay(6, IV::exact(std::log(1e7)), IV::exact(2.0), R, 100.0),
                      std::domain_error);
    REQUIRE_THROWS_AS(apb::xi_decay(1, lam, IV::exact(1.0), R, 100.0), std::domain_error);
  }
}
