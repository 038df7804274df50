#include <cmath>

#include "doctest.h"
#include "dosefind/beta.hpp"
#include "dosefind/designs.hpp"
#include "oracles.hpp"

using namespace dosefind;

TEST_CASE("BOIN boundaries at phi = 0.30") {
  const Boundaries b = boin_boundaries(0.30);
  // The published interval truncates to three decimals: lambda_d = 0.35852.
  CHECK(std::floor(b.lambda_e * 1000) / 1000 == doctest::Approx(0.236));
  CHECK(std::floor(b.lambda_d * 1000) / 1000 == doctest::Approx(0.358));
  CHECK(b.lambda_e == doctest::Approx(0.2365).epsilon(2e-4));
  CHECK(b.lambda_d == doctest::Approx(0.3585).epsilon(2e-4));
}

TEST_CASE("BOIN boundaries equal the likelihood crossings") {
  for (double phi : {0.1, 0.2, 0.25, 0.3, 0.33, 0.4, 0.5}) {
    const Boundaries b = boin_boundaries(phi);
    CHECK(b.lambda_e == doctest::Approx(oracle::likelihood_crossing(0.6 * phi, phi)).epsilon(1e-10));
    CHECK(b.lambda_d == doctest::Approx(oracle::likelihood_crossing(phi, 1.4 * phi)).epsilon(1e-10));
    CHECK(b.lambda_e < phi);
    CHECK(phi < b.lambda_d);
  }
  // phi = 0.25 gives the widely tabulated (0.197, 0.298).
  const Boundaries q = boin_boundaries(0.25);
  CHECK(std::round(q.lambda_e * 1000) / 1000 == doctest::Approx(0.197));
  CHECK(std::round(q.lambda_d * 1000) / 1000 == doctest::Approx(0.298));
}

TEST_CASE("BOIN boundaries reject phi outside (0, 1)") {
  CHECK_THROWS_AS(boin_boundaries(0.0), DomainError);
  CHECK_THROWS_AS(boin_boundaries(1.0), DomainError);
  CHECK_THROWS_AS(boin_boundaries(0.9), DomainError);  // phi2 = 1.26
}

TEST_CASE("keyboard partition at phi = 0.30") {
  const KeyPartition k = keyboard_partition(0.30);
  CHECK(k.target.lo == doctest::Approx(0.25));
  CHECK(k.target.hi == doctest::Approx(0.35));
  REQUIRE(k.lower.size() == 2);
  CHECK(k.lower[0].lo == doctest::Approx(0.05));
  CHECK(k.lower[0].hi == doctest::Approx(0.15));
  CHECK(k.lower[1].lo == doctest::Approx(0.15));
  CHECK(k.lower[1].hi == doctest::Approx(0.25));
  REQUIRE(k.upper.size() == 6);
  CHECK(k.upper.front().lo == doctest::Approx(0.35));
  CHECK(k.upper.back().hi == doctest::Approx(0.95));
  for (const Key& key : k.lower) CHECK(key.hi - key.lo == doctest::Approx(0.1));
  for (const Key& key : k.upper) CHECK(key.hi - key.lo == doctest::Approx(0.1));
  for (std::size_t i = 1; i < k.upper.size(); ++i) CHECK(k.upper[i].lo == k.upper[i - 1].hi);
  CHECK(k.lower.back().hi == k.target.lo);
  CHECK(k.upper.front().lo == k.target.hi);
}

TEST_CASE("keyboard partition at phi = 0.20") {
  const KeyPartition k = keyboard_partition(0.20);
  CHECK(k.target.lo == doctest::Approx(0.15));
  CHECK(k.target.hi == doctest::Approx(0.25));
  REQUIRE(k.lower.size() == 1);
  CHECK(k.lower[0].lo == doctest::Approx(0.05));
  CHECK_THROWS_AS(keyboard_partition(0.05), DomainError);
  CHECK_THROWS_AS(keyboard_partition(0.97), DomainError);
}

TEST_CASE("region classification, boundary convention") {
  const RegionRule boin = RegionRule::for_boin(boin_boundaries(0.3));
  // lambda_e = 0.23648, so 0.2365 itself lies just inside the interval.
  CHECK(boin.classify(0.2364) == Region::Lower);
  CHECK(boin.classify(0.2365) == Region::Target);
  CHECK(boin.classify(boin_boundaries(0.3).lambda_e) == Region::Lower);
  CHECK(boin.classify(boin_boundaries(0.3).lambda_d) == Region::Upper);
  CHECK(boin.classify(1.0 / 3.0) == Region::Target);
  CHECK(boin.classify(0.0) == Region::Lower);
  CHECK(boin.classify(1.0) == Region::Upper);

  const RegionRule kb = RegionRule::for_keyboard(keyboard_partition(0.3));
  CHECK(kb.classify(0.30) == Region::Target);
  CHECK(kb.classify(0.25) == Region::Lower);
  CHECK(kb.classify(0.35) == Region::Upper);
  CHECK(kb.classify(0.03) == Region::Lower);
  CHECK(kb.classify(0.97) == Region::Upper);
  CHECK(classify_region(0.03, kb) == Region::Lower);
}

TEST_CASE("classification is total and exclusive over [0, 1]") {
  const RegionRule rules[] = {RegionRule::for_boin(boin_boundaries(0.3)),
                              RegionRule::for_keyboard(keyboard_partition(0.3))};
  for (const RegionRule& r : rules) {
    for (int i = 0; i <= 10000; ++i) {
      const double p = i / 10000.0;
      const Region g = r.classify(p);
      const int hits = (p <= r.lower_edge) + (p > r.lower_edge && p < r.upper_edge) +
                       (p >= r.upper_edge);
      CHECK(hits == 1);
      CHECK(g != Region::Excluded);
    }
  }
}

TEST_CASE("policy classification can drop keyboard edge strips") {
  const RegionRule kb = RegionRule::for_keyboard(keyboard_partition(0.3));
  CHECK(kb.classify_for_policy(0.03, true) == Region::Excluded);
  CHECK(kb.classify_for_policy(0.96, true) == Region::Excluded);
  CHECK(kb.classify_for_policy(0.05, true) == Region::Lower);
  CHECK(kb.classify_for_policy(0.03, false) == Region::Lower);
  CHECK(kb.classify_for_policy(0.30, true) == Region::Target);
}

TEST_CASE("BOIN baseline decisions") {
  const Boundaries b = boin_boundaries(0.3);
  CHECK(boin_baseline_decision(3, 1, b) == Decision::Retain);
  CHECK(boin_baseline_decision(3, 0, b) == Decision::Escalate);
  CHECK(boin_baseline_decision(3, 2, b) == Decision::DeEscalate);
  CHECK_THROWS_AS(boin_baseline_decision(0, 0, b), DomainError);
  CHECK_THROWS_AS(boin_baseline_decision(3, 4, b), DomainError);
}

TEST_CASE("BOIN baseline agrees with a brute-force table for n <= 12") {
  for (double phi : {0.2, 0.25, 0.3}) {
    const double le = oracle::likelihood_crossing(0.6 * phi, phi);
    const double ld = oracle::likelihood_crossing(phi, 1.4 * phi);
    const Boundaries b = boin_boundaries(phi);
    for (int n = 1; n <= 12; ++n) {
      for (int m = 0; m <= n; ++m) {
        // Integer form of the comparisons: m <= n*le etc.
        Decision want = Decision::Retain;
        if (m <= n * le + 1e-9) want = Decision::Escalate;
        else if (m >= n * ld - 1e-9) want = Decision::DeEscalate;
        CHECK(boin_baseline_decision(n, m, b) == want);
      }
    }
  }
}

TEST_CASE("keyboard baseline decisions") {
  const KeyPartition k = keyboard_partition(0.3);
  const KeyMasses masses = key_masses(3, 0, k);
  // Beta(1, 4): F(x) = 1 - (1 - x)^4.
  auto F = [](double x) { return 1 - std::pow(1 - x, 4); };
  CHECK(masses.lower[0] == doctest::Approx(F(0.15) - F(0.05)).epsilon(1e-10));
  CHECK(masses.lower[0] == doctest::Approx(0.2925).epsilon(1e-3));
  CHECK(masses.target == doctest::Approx(0.1379).epsilon(1e-3));
  CHECK(keyboard_baseline_decision(3, 0, k) == Decision::Escalate);
  CHECK(keyboard_baseline_decision(3, 3, k) == Decision::DeEscalate);
  CHECK(keyboard_baseline_decision(6, 2, k) == Decision::Retain);
  CHECK_THROWS_AS(keyboard_baseline_decision(0, 0, k), DomainError);
}

TEST_CASE("key masses sum to one minus the edge-strip mass") {
  const KeyPartition k = keyboard_partition(0.3);
  for (int n = 1; n <= 36; ++n) {
    for (int m = 0; m <= n; ++m) {
      const KeyMasses km = key_masses(n, m, k);
      double total = km.target;
      for (double v : km.lower) total += v;
      for (double v : km.upper) total += v;
      const BetaParams post = BetaParams::posterior(n, m);
      const double strips = beta_cdf(0.05, post) + 1.0 - beta_cdf(0.95, post);
      CHECK(total <= 1.0 + 1e-12);
      CHECK(total == doctest::Approx(1.0 - strips).epsilon(1e-10));
    }
  }
}

TEST_CASE("elimination rule") {
  CHECK(elimination_check(3, 3, 0.3));
  CHECK_FALSE(elimination_check(3, 2, 0.3));
  CHECK_FALSE(elimination_check(0, 0, 0.3));
  CHECK_FALSE(elimination_check(2, 2, 0.3));  // below the n >= 3 guard
  CHECK(1 - beta_cdf(0.3, BetaParams::posterior(3, 3)) == doctest::Approx(1 - std::pow(0.3, 4)));
  CHECK(1 - beta_cdf(0.3, BetaParams::posterior(3, 2)) ==
        doctest::Approx(1 - (4 * 0.027 - 3 * 0.0081)).epsilon(1e-12));
}

TEST_CASE("elimination is monotone in m") {
  for (int n = 0; n <= 36; ++n) {
    bool seen = false;
    for (int m = 0; m <= n; ++m) {
      const bool e = elimination_check(n, m, 0.3);
      if (seen) CHECK(e);
      seen = seen || e;
    }
  }
}
