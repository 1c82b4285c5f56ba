#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "apb/interval.hpp"
#include "oracles.hpp"

using apb::FixedIV;
using apb::IV;

namespace {
bool contains_ld(const IV& v, long double x) {
  return (long double)v.lo <= x && x <= (long double)v.hi;
}
}  // namespace

TEST_CASE("interval arithmetic encloses the exact result", "[interval]") {
  auto gen = oracle::rng(17);
  std::uniform_real_distribution<double> mag(-1e6, 1e6);

  for (int i = 0; i < 20000; ++i) {
    double a = mag(gen), b = mag(gen);
    IV ia = IV::exact(a), ib = IV::exact(b);
    REQUIRE(contains_ld(ia + ib, (long double)a + b));
    REQUIRE(contains_ld(ia - ib, (long double)a - b));
    REQUIRE(contains_ld(ia * ib, (long double)a * b));
    if (b != 0.0) REQUIRE(contains_ld(ia / ib, (long double)a / b));
  }

  SECTION("mixed-sign products take the right corners") {
    IV a(-3.0, 2.0), b(-5.0, 7.0);
    IV p = a * b;
    REQUIRE(p.lo <= -21.0);
    REQUIRE(p.hi >= 15.0);
    REQUIRE(p.lo > -21.0000001);
    REQUIRE(p.hi < 15.0000001);
  }
}

TEST_CASE("elementary functions enclose long-double references", "[interval]") {
  auto gen = oracle::rng(23);
  std::uniform_real_distribution<double> pos(1e-6, 1e8);
  for (int i = 0; i < 20000; ++i) {
    double x = pos(gen);
    REQUIRE(contains_ld(log(IV::exact(x)), logl((long double)x)));
    REQUIRE(contains_ld(sqrt(IV::exact(x)), sqrtl((long double)x)));
  }
  std::uniform_real_distribution<double> ex(-50.0, 50.0);
  for (int i = 0; i < 20000; ++i) {
    double x = ex(gen);
    REQUIRE(contains_ld(exp(IV::exact(x)), expl((long double)x)));
  }
}

TEST_CASE("decimal constants bracket their true values", "[interval]") {
  REQUIRE(contains_ld(IV::dec(0.1), 0.1L));
  REQUIRE(contains_ld(IV::dec(0.399), 0.399L));
  REQUIRE(contains_ld(IV::dec(5.338), 5.338L));
  REQUIRE(contains_ld(IV::dec(0.5772156649015329), 0.5772156649015328606L));
  REQUIRE(IV::dec(0.399).width() < 1e-15);
}

TEST_CASE("integer powers", "[interval]") {
  REQUIRE(contains_ld(powi(IV::exact(2.0), 10), 1024.0L));
  REQUIRE(powi(IV::exact(2.0), 10).width() < 1e-9);
  REQUIRE(contains_ld(powi(IV::exact(2.0), -2), 0.25L));
  REQUIRE(contains_ld(powi(IV::exact(-2.0), 3), -8.0L));
  REQUIRE(powi(IV::exact(7.5), 0) == IV::exact(1.0));
  REQUIRE(contains_ld(pow(IV::exact(4.0), 0.5), 2.0L));
  REQUIRE(contains_ld(pow(IV::exact(3.0), 5.0), 243.0L));
  // pow and powi agree on an overlap
  for (int n = 1; n <= 12; ++n) {
    IV a = powi(IV::dec(1.7), n), b = pow(IV::dec(1.7), (double)n);
    REQUIRE(a.lo <= b.hi);
    REQUIRE(b.lo <= a.hi);
  }
}

TEST_CASE("fixed-point conversion is a sandwich", "[interval]") {
  auto gen = oracle::rng(31);
  std::uniform_real_distribution<double> mag(-1e5, 1e5);
  for (int i = 0; i < 20000; ++i) {
    double d = mag(gen);
    apb::i128 lo = apb::fixed_from_double_dn(d), hi = apb::fixed_from_double_up(d);
    REQUIRE(lo <= hi);
    REQUIRE(apb::fixed_to_double_dn(lo) <= d);
    REQUIRE(d <= apb::fixed_to_double_up(hi));
  }
  // dyadic values convert exactly
  for (double d : {1.5, -3.25, 1024.0, 0.0, -0.001953125}) {
    REQUIRE(apb::fixed_from_double_dn(d) == apb::fixed_from_double_up(d));
  }
}

TEST_CASE("fixed accumulators are exact and order-independent", "[interval]") {
  auto gen = oracle::rng(37);
  std::uniform_int_distribution<int64_t> coin(-1000, 1000);
  std::vector<double> terms(100000);
  int64_t exact_sum = 0;
  for (auto& t : terms) {
    int64_t v = coin(gen);
    t = (double)v;
    exact_sum += v;
  }

  FixedIV serial;
  for (double t : terms) serial.add(IV::exact(t));

  SECTION("integer terms give a zero-width fixed sum at the exact value") {
    REQUIRE(serial.lo == serial.hi);
    REQUIRE(serial.lo == (apb::i128)exact_sum << apb::kFixedShift);
    IV out = serial.to_iv();
    REQUIRE(contains_ld(out, (long double)exact_sum));
    REQUIRE(out.width() <= 4 * std::ldexp(std::fabs((double)exact_sum) + 1, -52));
  }

  SECTION("chunked combination is bit-identical to serial") {
    std::shuffle(terms.begin(), terms.end(), gen);
    FixedIV shuffled;
    for (double t : terms) shuffled.add(IV::exact(t));

    std::vector<FixedIV> chunks(7);
    for (size_t i = 0; i < terms.size(); ++i) chunks[i % 7].add(IV::exact(terms[i]));
    FixedIV combined;
    for (auto& c : chunks) combined.add(c);

    REQUIRE(serial.lo == shuffled.lo);
    REQUIRE(serial.hi == shuffled.hi);
    REQUIRE(serial.lo == combined.lo);
    REQUIRE(serial.hi == combined.hi);
  }

  SECTION("generic doubles stay narrow") {
    std::uniform_real_distribution<double> mag(-50.0, 50.0);
    FixedIV acc;
    long double ref = 0.0L;
    for (int i = 0; i < 100000; ++i) {
      double t = mag(gen);
      acc.add(IV::exact(t));
      ref += (long double)t;
    }
    IV out = acc.to_iv();
    REQUIRE(contains_ld(out, ref));
    REQUIRE(out.width() < 1e-9);
  }
}

TEST_CASE("wide integer helpers", "[interval]") {
  REQUIRE(apb::u128_to_string(0) == "0");
  REQUIRE(apb::u128_to_string(987654321) == "987654321");
  apb::u128 big = (apb::u128)1234567890123456789ULL * 10000000000ULL + 123;
  REQUIRE(apb::u128_to_string(big) == "12345678901234567890000000123");

  REQUIRE(apb::iv_from_u128((apb::u128)1 << 52) == IV::exact(std::ldexp(1.0, 52)));
  IV p100 = apb::iv_from_u128((apb::u128)1 << 100);
  REQUIRE(contains_ld(p100, powl(2.0L, 100)));
  REQUIRE(p100.width() / p100.lo < 1e-15);
}
