#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "apb/nu.hpp"
#include "apb/zero_counts.hpp"
#include "apb/zero_oracle.hpp"
#include "apb/zeros_io.hpp"
#include "oracles.hpp"

using namespace apb;
namespace fs = std::filesystem;

namespace {

ZeroArchive archive_from_lists(std::vector<ZeroList> lists) {
  ZeroArchive a;
  for (auto& z : lists) a.entries.emplace(std::make_pair(z.conductor, z.index), std::move(z));
  return a;
}

struct TempDir {
  fs::path path;
  TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("apb_test_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("Theta antiderivative matches its derivative and constants") {
  SECTION("window constants") {
    REQUIRE(C1_iv().lo <= 0.399);
    REQUIRE(C1_iv().hi >= 0.399);
    REQUIRE(C1_iv().hi - C1_iv().lo < 1e-14);
    REQUIRE(C2_iv().lo <= 5.338);
    REQUIRE(C2_iv().hi >= 5.338);
  }
  SECTION("finite difference against the stated derivative") {
    auto rng = oracle::rng(20260816);
    std::uniform_real_distribution<double> uld(0.0, 1.0);
    for (int i = 0; i < 20; ++i) {
      double d = std::exp(uld(rng) * std::log(1e5));
      double t = std::exp(std::log(2.0) + uld(rng) * (std::log(1e6) - std::log(2.0)));
      double h = t * 1e-5;
      double diff = (theta_antideriv(d, t + h).mid() - theta_antideriv(d, t - h).mid()) / (2 * h);
      double want =
          (t / M_PI * std::log(d * t / (2 * M_PI * M_E)) + 0.399 * std::log(d * t) + 5.338) /
          (t * t);
      REQUIRE(diff == Catch::Approx(want).epsilon(1e-6));
    }
  }
  SECTION("continuity on a sampled grid") {
    for (double d : {1.0, 12.0, 99991.0})
      for (double t = 1.0; t < 1e4; t *= 3.7) {
        double step = t * 1e-9;
        double a = theta_antideriv(d, t).mid(), b = theta_antideriv(d, t + step).mid();
        REQUIRE(std::fabs(b - a) < 1e-6 * (1.0 + std::fabs(a)));
      }
  }
}

TEST_CASE("between-heights zero-count majorant") {
  SECTION("collapses to the boundary value at ell = u") {
    for (double d : {1.0, 3.0, 17.0}) {
      double h2 = 1e8 / d;
      IV got = M_d(d, h2, h2);
      IV want = 2.0 * (C1_iv() * log(IV::exact(d) * IV::exact(h2)) + C2_iv());
      REQUIRE(got.lo <= want.hi);
      REQUIRE(want.lo <= got.hi);
      REQUIRE(std::fabs(got.mid() - want.mid()) < 1e-9);
    }
  }
  SECTION("rejects ell > u") {
    REQUIRE_THROWS_AS(M_d(3.0, 10.0, 5.0), std::domain_error);
    REQUIRE_THROWS_AS(M_d(3.0, 0.5, 5.0), std::domain_error);
    REQUIRE_THROWS_AS(M_d(0.5, 2.0, 5.0), std::domain_error);
  }
  SECTION("simpler upper bound for ell >= 15") {
    for (double d : {1.0, 2.0, 7.0, 101.0, 99991.0})
      for (double ell : {15.0, 40.0, 300.0, 5e4})
        for (double mult : {1.0, 1.5, 8.0, 1e3}) {
          double u = ell * mult;
          IV lhs = M_d(d, ell, u);
          IV rhs = IV::exact(u) / pi_iv() * log(IV::exact(d) * IV::exact(u));
          REQUIRE(lhs.hi < rhs.lo);
        }
  }
  SECTION("dominates observed zeta counts between heights") {
    auto zeros = zero_oracle(1, 200.0);
    auto count_upto = [&](double x) {
      return (long long)(std::upper_bound(zeros.begin(), zeros.end(), x) - zeros.begin());
    };
    auto rng = oracle::rng(7);
    std::uniform_real_distribution<double> uld(15.0, 200.0);
    for (int i = 0; i < 40; ++i) {
      double a = uld(rng), b = uld(rng);
      if (a > b) std::swap(a, b);
      long long diff = 2 * (count_upto(b) - count_upto(a));
      REQUIRE((double)diff < M_d(1.0, a, b).lo + 1e-9);
    }
  }
}

TEST_CASE("small-conductor zero oracle") {
  SECTION("first zeta ordinate") {
    auto z = zero_oracle(1, 20.0);
    REQUIRE(z.size() == 1);
    REQUIRE(z[0] == Catch::Approx(14.134725).margin(1e-4));
  }
  SECTION("first ordinate for conductor 4") {
    auto z = zero_oracle(4, 10.0);
    REQUIRE(!z.empty());
    REQUIRE(z[0] == Catch::Approx(6.0209489).margin(1e-3));
  }
  SECTION("first ordinate for conductor 3") {
    auto z = zero_oracle(3, 10.0);
    REQUIRE(!z.empty());
    REQUIRE(z[0] == Catch::Approx(8.0397372).margin(1e-3));
  }
  SECTION("conductor 3 count to height 50 sits in the counting window") {
    auto z = zero_oracle(3, 50.0);
    long long N = 2 * (long long)z.size();
    IV main = nt_general_main(IV::exact(3.0), IV::exact(50.0));
    IV slack = nt_general_slack(IV::exact(3.0), IV::exact(50.0));
    REQUIRE((double)N > (main - slack).lo);
    REQUIRE((double)N < (main + slack).hi);
  }
  SECTION("unsupported conductor is rejected") {
    REQUIRE_THROWS_AS(zero_oracle(2, 10.0), std::domain_error);
    REQUIRE_THROWS_AS(zero_oracle(7, 10.0), std::domain_error);
    REQUIRE_THROWS_AS(oracle_zero_list(6, 1, 10.0), std::domain_error);
  }
}

TEST_CASE("principal-character count audit") {
  auto arch = archive_from_lists({oracle_zero_list(1, 1, 1020.0)});
  SECTION("full check to 1014") {
    auto rep = check_NT_principal(arch, 1014.0);
    REQUIRE(rep.pass);
    REQUIRE(rep.ordinates_checked > 600);
    REQUIRE(rep.min_margin_left > 0.0);
    REQUIRE(rep.min_margin_right > 0.0);
  }
  SECTION("point below the first ordinate with N = 0") {
    REQUIRE(nt_principal_margin(10.0, 0).lo > 0.0);
    REQUIRE(nt_principal_margin(2.72, 0).lo > 0.0);
  }
  SECTION("insufficient archive height is an error") {
    REQUIRE_THROWS_AS(check_NT_principal(arch, 5000.0), std::runtime_error);
  }
}

TEST_CASE("zero archive ingestion") {
  SECTION("empty directory gives an empty archive and H0 = 0 everywhere") {
    TempDir dir("empty");
    ZeroArchive a = ingest_zeros(dir.path);
    REQUIRE(a.empty());
    auto mp = build_profile(12);
    auto h0 = default_H0(mp, a, 1e6);
    for (auto& [d, v] : h0) REQUIRE(v == 0.0);
  }
  SECTION("roundtrip with the oracle and idempotence") {
    TempDir dir("roundtrip");
    ZeroList z = oracle_zero_list(1, 1, 100.0);
    write_zero_file(dir.path, z);
    ZeroArchive a = ingest_zeros(dir.path);
    ZeroArchive b = ingest_zeros(dir.path);
    REQUIRE(a.entries.size() == 1);
    const ZeroList& got = a.entries.at({1, 1});
    REQUIRE(got.ordinates.size() == z.ordinates.size());
    REQUIRE(got.real_character);
    REQUIRE(got.verified_height == Catch::Approx(100.0));
    for (size_t i = 0; i < z.ordinates.size(); ++i)
      REQUIRE(got.ordinates[i] == Catch::Approx(z.ordinates[i]).margin(1e-9));
    REQUIRE(b.entries.at({1, 1}).ordinates == got.ordinates);
  }
  SECTION("out-of-order ordinates are rejected naming the line") {
    TempDir dir("order");
    std::ofstream f(dir.path / "d3_chi1.txt");
    f << "# conductor=3\n# index=1\n# real=1\n# height=50\n# count=2\n";
    f << "11.25\n8.04\n";
    f.close();
    try {
      ingest_zeros(dir.path);
      FAIL("expected rejection");
    } catch (const std::runtime_error& e) {
      std::string msg = e.what();
      REQUIRE(msg.find(":7:") != std::string::npos);
      REQUIRE(msg.find("ascending") != std::string::npos);
    }
  }
  SECTION("ordinate above the declared height is rejected") {
    TempDir dir("height");
    std::ofstream f(dir.path / "d3_chi1.txt");
    f << "# conductor=3\n# index=1\n# real=1\n# height=10\n# count=1\n";
    f << "11.25\n";
    f.close();
    REQUIRE_THROWS_WITH(ingest_zeros(dir.path), Catch::Matchers::ContainsSubstring("height"));
  }
  SECTION("missing header is rejected") {
    TempDir dir("header");
    std::ofstream f(dir.path / "d3_chi1.txt");
    f << "# conductor=3\n# index=1\n# height=50\n# count=1\n8.04\n";
    f.close();
    REQUIRE_THROWS_WITH(ingest_zeros(dir.path), Catch::Matchers::ContainsSubstring("header"));
  }
  SECTION("count mismatch and malformed ordinates are rejected") {
    TempDir dir("count");
    {
      std::ofstream f(dir.path / "d3_chi1.txt");
      f << "# conductor=3\n# index=1\n# real=1\n# height=50\n# count=3\n8.04\n11.25\n";
    }
    REQUIRE_THROWS_WITH(ingest_zeros(dir.path), Catch::Matchers::ContainsSubstring("count"));
    {
      std::ofstream f(dir.path / "d3_chi1.txt", std::ios::trunc);
      f << "# conductor=3\n# index=1\n# real=1\n# height=50\n# count=1\n8.0x4\n";
    }
    REQUIRE_THROWS_WITH(ingest_zeros(dir.path), Catch::Matchers::ContainsSubstring("malformed"));
  }
  SECTION("coverage bookkeeping for a conductor with a conjugate pair") {
    ZeroList a = oracle_zero_list(5, 1, 40.0);
    ZeroList b = oracle_zero_list(5, 2, 40.0);
    ZeroArchive partial = archive_from_lists({a});
    REQUIRE(partial.covered_height(5, 3) == 0.0);  // real file alone covers 1 of 3
    ZeroArchive full = archive_from_lists({a, b});
    REQUIRE(full.characters_covered(5) == 3);
    REQUIRE(full.covered_height(5, 3) == Catch::Approx(40.0));
  }
}

TEST_CASE("nu functions") {
  SECTION("nu3 closed form at q = 3, H = 1e8/3") {
    double H = 1e8 / 3.0;
    auto mp = build_profile(3);
    ZeroArchive empty;
    auto r = nu_functions(mp, empty, {}, H);
    double l1 = std::log(H / (2 * M_PI)), l3 = std::log(3 * H / (2 * M_PI));
    double want = -2.0 * (1.0 / (2 * M_PI) + 0.399 / H) + (l1 * l1 + l3 * l3) / (2 * M_PI);
    REQUIRE(r.nu3.mid() == Catch::Approx(want).epsilon(1e-12));
    REQUIRE(r.nu3.hi - r.nu3.lo < 1e-9);
  }
  SECTION("no-data branch uses the floor with unit coefficient") {
    auto mp = build_profile(3);
    ZeroArchive empty;
    auto r = nu_functions(mp, empty, {}, 1000.0);
    REQUIRE(r.per_divisor.size() == 2);
    for (const auto& nd : r.per_divisor) {
      REQUIRE(nd.H0 == 0.0);
      REQUIRE(nd.nu0.hi == 0.0);
      double theta1 = theta_antideriv((double)nd.d, 1.0).mid();
      double flr = (double)nu_window_floor(nd.d);
      // at H0 = 0 the coefficient 1/sqrt(H0^2+1/4) - 1 equals exactly 1
      REQUIRE(nd.nu0_bar.mid() == Catch::Approx(theta1 - flr).epsilon(1e-12));
    }
  }
  SECTION("window floors are exact integers") {
    REQUIRE(nu_window_floor(1) == 4);
    REQUIRE(nu_window_floor(3) == 5);
    REQUIRE(exact_floor(IV::dec(4.3)) == 4);
    REQUIRE_THROWS(exact_floor(IV(3.9999999999, 4.0000000001)));
  }
  SECTION("per-divisor breakdown adds up to nu2") {
    auto mp = build_profile(12);
    ZeroArchive empty;
    auto r = nu_functions(mp, empty, {}, 500.0);
    IV sum = IV::exact(0.0);
    for (const auto& nd : r.per_divisor) sum = sum + (nd.nu0 - nd.nu0_bar);
    REQUIRE(sum.lo == Catch::Approx(r.nu2.lo).margin(1e-12));
    REQUIRE(sum.hi == Catch::Approx(r.nu2.hi).margin(1e-12));
    // divisors 2 and 6 have no primitive characters and do not appear
    for (const auto& nd : r.per_divisor) REQUIRE((nd.d != 2 && nd.d != 6));
  }
  SECTION("data-assisted branch reproduces the lemma combination") {
    auto arch = archive_from_lists({oracle_zero_list(1, 1, 200.0)});
    auto mp = build_profile(1);
    auto r = nu_functions(mp, arch, {{1, 100.0}}, 200.0);
    REQUIRE(r.per_divisor.size() == 1);
    const ZeroList& z = arch.entries.at({1, 1});
    double sum = 0;
    long long n = 0;
    for (double g : z.ordinates)
      if (g <= 100.0) {
        sum += 2.0 / std::sqrt(g * g + 0.25);
        n += 2;
      }
    double want = sum - (theta_antideriv(1.0, 100.0).mid() + (double)n / 100.0);
    double got = (r.per_divisor[0].nu0 - r.per_divisor[0].nu0_bar).mid();
    REQUIRE(got == Catch::Approx(want).margin(1e-10));
  }
  SECTION("partial-summation soundness against the direct sum") {
    double H = 200.0;
    auto arch = archive_from_lists({oracle_zero_list(1, 1, H)});
    auto mp = build_profile(1);
    const ZeroList& z = arch.entries.at({1, 1});
    double direct = 0;
    for (double g : z.ordinates) direct += 2.0 / std::sqrt(g * g + 0.25);
    for (double h0 : {0.0, 15.0, 100.0}) {
      auto r = nu_functions(mp, arch, {{1, h0}}, H);
      IV nu1 = r.per_divisor[0].nu0 - r.per_divisor[0].nu0_bar;
      IV lH = log(IV::exact(H) / (2.0 * pi_iv()));
      IV rhs = nu1 + lH * lH / (2.0 * pi_iv()) - 1.0 / (2.0 * pi_iv()) - C1_iv() / H;
      REQUIRE(direct < rhs.lo);
    }
  }
  SECTION("more data never worsens nu") {
    auto arch = archive_from_lists({oracle_zero_list(1, 1, 200.0), oracle_zero_list(3, 1, 200.0)});
    auto mp = build_profile(3);
    double H = 300.0;
    double prev = 1e300;
    for (double h0 : {0.0, 10.0, 100.0}) {
      auto r = nu_functions(mp, arch, {{1, h0}, {3, h0}}, H);
      REQUIRE(r.nu.hi <= prev + 1e-12);
      prev = r.nu.hi;
    }
  }
  SECTION("archive shortfall and bad H0 are errors") {
    auto arch = archive_from_lists({oracle_zero_list(1, 1, 100.0)});
    auto mp = build_profile(1);
    REQUIRE_THROWS_AS(nu_functions(mp, arch, {{1, 150.0}}, 200.0), std::runtime_error);
    REQUIRE_THROWS_AS(nu_functions(mp, arch, {{1, 90.0}}, 50.0), std::domain_error);
    REQUIRE_THROWS_AS(nu_functions(mp, ZeroArchive{}, {{1, 10.0}}, 50.0), std::runtime_error);
  }
  SECTION("H0 assignment policies") {
    auto arch = archive_from_lists({oracle_zero_list(1, 1, 150.0), oracle_zero_list(3, 1, 150.0)});
    auto mp = build_profile(3);
    auto h0 = default_H0(mp, arch, 492130.0);
    REQUIRE(h0.at(1) == 100.0);  // archive covers only to 150
    REQUIRE(h0.at(3) == 100.0);
    auto h0b = default_H0(mp, arch, 50.0);
    REQUIRE(h0b.at(1) == 10.0);  // must stay below H
    auto ref = reference_H0(mp, 492130.0);
    REQUIRE(ref.at(1) == 1e4);
    REQUIRE(ref.at(3) == 1e4);
    auto mp2 = build_profile(99991);
    auto ref2 = reference_H0(mp2, 1e6);
    REQUIRE(ref2.at(99991) == 0.0);  // beyond the computed tables
    REQUIRE(ref2.at(1) == 1e4);
    // the worked example: with H = 120 the pick drops to 100
    auto ref3 = reference_H0(mp, 120.0);
    REQUIRE(ref3.at(3) == 100.0);
  }
}

TEST_CASE("shipped zero archive", "[archive]") {
  auto arch = ingest_zeros(fs::path(APB_SOURCE_DIR) / "data" / "zeros");
  REQUIRE(arch.entries.size() == 5);

  SECTION("coverage and first ordinates") {
    std::map<uint64_t, uint64_t> phis{{1, 1}, {3, 1}, {4, 1}, {5, 3}};
    for (auto [d, ps] : phis) {
      REQUIRE(arch.covered_height(d, ps) >= 1e4);
    }
    REQUIRE(arch.entries.at({1, 1}).ordinates.front() == Catch::Approx(14.134725).margin(1e-5));
    REQUIRE(arch.entries.at({3, 1}).ordinates.front() == Catch::Approx(8.0397372).margin(1e-5));
    REQUIRE(arch.entries.at({4, 1}).ordinates.front() == Catch::Approx(6.0209489).margin(1e-5));
    REQUIRE(arch.entries.at({5, 1}).ordinates.front() == Catch::Approx(6.6484535).margin(1e-5));
    REQUIRE(arch.entries.at({5, 2}).ordinates.front() == Catch::Approx(4.1329037).margin(1e-5));
  }

  SECTION("principal count audit over the full archive") {
    auto rep = check_NT_principal(arch, 9990.0);
    REQUIRE(rep.pass);
    REQUIRE(rep.ordinates_checked > 10000);
    REQUIRE(rep.min_margin_left > 0.0);
    REQUIRE(rep.min_margin_right > 0.0);
  }

  SECTION("stored counts satisfy the general count bound") {
    for (const auto& [key, z] : arch.entries) {
      if (key.first == 1) continue;
      double T = z.verified_height;
      // two-sided zero count of one character with this conductor
      double twosided = (z.real_character ? 2.0 : 1.0) * (double)z.ordinates.size();
      IV main = nt_general_main(IV::exact((double)key.first), IV::exact(T));
      IV slack = nt_general_slack(IV::exact((double)key.first), IV::exact(T));
      REQUIRE(std::abs(twosided - main.mid()) < slack.lo + 1.0);
    }
  }

  SECTION("count differences stay under the between-heights majorant") {
    std::mt19937_64 rng(77);
    for (auto d : {uint64_t{3}, uint64_t{4}, uint64_t{5}}) {
      for (int it = 0; it < 12; ++it) {
        double a = 15.0 + 8000.0 * (double)(rng() % 1000) / 1000.0;
        double b = a + 10.0 + 1500.0 * (double)(rng() % 1000) / 1000.0;
        for (const auto& [key, z] : arch.entries) {
          if (key.first != d) continue;
          double count = 0;
          for (double g : z.ordinates)
            if (g > a && g <= b) count += z.real_character ? 2.0 : 1.0;
          REQUIRE(count <= M_d((double)d, a, b).hi);
        }
      }
    }
  }

  SECTION("nu with shipped data at the optimum H for q = 3") {
    auto mp = build_profile(3);
    double H = 492130.0;
    auto ref = reference_H0(mp, H);
    REQUIRE(ref.at(1) == 1e4);
    auto r = nu_functions(mp, arch, ref, H);
    REQUIRE(r.nu.lo > 0.0);
    REQUIRE(r.nu.width() < 1e-4);
    // richer data beats the data-free evaluation
    auto bare = nu_functions(mp, ZeroArchive{}, {}, H);
    REQUIRE(r.nu.hi < bare.nu.lo);
    auto h0 = default_H0(mp, arch, H);
    REQUIRE(h0.at(1) == 1e4);
    REQUIRE(h0.at(3) == 1e4);
  }
}
