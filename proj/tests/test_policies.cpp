#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "dosefind/beta.hpp"
#include "dosefind/policies.hpp"

using namespace dosefind;

namespace {

std::vector<Region> classify_all(const std::vector<double>& v, const RegionRule& r) {
  std::vector<Region> out;
  for (double x : v) out.push_back(r.classify(x));
  return out;
}

const RegionRule kBoin = RegionRule::for_boin(boin_boundaries(0.3));

}  // namespace

TEST_CASE("deterministic policy values") {
  RngStream rng(1, 1);
  const std::vector<DoseCounts> d = {{3, 1}};
  CHECK(policy_values(d, PolicyKind::greedy(), rng)[0] == doctest::Approx(0.4));
  CHECK(policy_values(d, PolicyKind::median(), rng)[0] == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("TS-eps with a tiny window collapses onto the observed rate") {
  RngStream rng(2, 2);
  const std::vector<DoseCounts> d = {{6, 2}};
  for (int i = 0; i < 100; ++i) {
    CHECK(std::fabs(policy_values(d, PolicyKind::thompson_eps(1e-6), rng)[0] - 1.0 / 3.0) <= 1e-6);
  }
}

TEST_CASE("policy values reject untreated doses and bad epsilon") {
  RngStream rng(3, 3);
  const std::vector<DoseCounts> d = {{3, 0}, {0, 0}};
  CHECK_THROWS(policy_values(d, PolicyKind::greedy(), rng));
  CHECK_THROWS(PolicyKind::thompson_eps(0.0));
  CHECK_THROWS(PolicyKind::thompson_eps(1.5));
}

TEST_CASE("policy slugs") {
  CHECK(PolicyKind::thompson().slug() == "ts");
  CHECK(PolicyKind::thompson_eps(0.05).slug() == "ts-eps:0.05");
  CHECK(PolicyKind::greedy().slug() == "greedy");
  CHECK(PolicyKind::median().slug() == "median");
}

TEST_CASE("bandit_select worked examples") {
  {
    const std::vector<double> v = {0.10};
    CHECK(bandit_select(v, classify_all(v, kBoin), 6).dose == 2);
  }
  {
    const std::vector<double> v = {0.10, 0.30, 0.50};
    const BanditChoice c = bandit_select(v, classify_all(v, kBoin), 6);
    CHECK(c.dose == 2);
    CHECK(c.branch == Region::Target);
  }
  {
    const std::vector<double> v = {0.40, 0.45, 0.50};
    const BanditChoice c = bandit_select(v, classify_all(v, kBoin), 6);
    CHECK(c.dose == 1);
    CHECK(c.branch == Region::Upper);
  }
  {
    // Escalation is capped by admissibility.
    const std::vector<double> v = {0.10, 0.15};
    CHECK(bandit_select(v, classify_all(v, kBoin), 2).dose == 2);
  }
}

TEST_CASE("bandit_select selection rules differ only inside a branch") {
  const std::vector<double> v = {0.30, 0.25, 0.05};
  const auto r = classify_all(v, kBoin);  // Target, Target, Lower
  CHECK(bandit_select(v, r, 6, {SelectionRule::DoseLevel, EscalationReference::Selected}).dose == 2);
  CHECK(bandit_select(v, r, 6, {SelectionRule::SampledValue, EscalationReference::Selected}).dose == 1);

  const std::vector<double> w = {0.05, 0.20, 0.10};  // all Lower
  const auto rw = classify_all(w, kBoin);
  CHECK(bandit_select(w, rw, 6, {SelectionRule::DoseLevel, EscalationReference::Selected}).dose == 4);
  CHECK(bandit_select(w, rw, 6, {SelectionRule::SampledValue, EscalationReference::Selected}).dose == 3);
}

TEST_CASE("bandit_select ties go to the lower dose under SampledValue") {
  const std::vector<double> v = {0.0, 0.0, 0.5};
  const auto r = classify_all(v, kBoin);
  const BanditChoice c = bandit_select(v, r, 6, {SelectionRule::SampledValue, EscalationReference::Selected});
  CHECK(c.selected == 1);
  CHECK(c.dose == 2);
}

TEST_CASE("bandit_select frontier reference") {
  const std::vector<double> v = {0.05, 0.5, 0.6};  // Lower, Upper, Upper
  const auto r = classify_all(v, kBoin);
  CHECK(bandit_select(v, r, 6, {SelectionRule::DoseLevel, EscalationReference::Selected}).dose == 2);
  CHECK(bandit_select(v, r, 6, {SelectionRule::DoseLevel, EscalationReference::Frontier}).dose == 4);
}

TEST_CASE("bandit_select with every value excluded escalates from the frontier") {
  const std::vector<double> v = {0.01, 0.02};
  const std::vector<Region> r = {Region::Excluded, Region::Excluded};
  const BanditChoice c = bandit_select(v, r, 6);
  CHECK(c.dose == 3);
  CHECK(c.branch == Region::Excluded);
  CHECK(bandit_select(v, r, 2).dose == 2);
}

TEST_CASE("branch exhaustiveness, bounds and no skipping over random draws") {
  RngStream rng(21, 0);
  const RegionRule rules[] = {kBoin, RegionRule::for_keyboard(keyboard_partition(0.3))};
  for (int trial = 0; trial < 20000; ++trial) {
    const int kmax = 1 + static_cast<int>(rng.uniform() * 6);
    const int admissible = std::max(1, std::min(6, kmax + static_cast<int>(rng.uniform() * 3) - 1));
    std::vector<double> v(kmax);
    for (double& x : v) x = rng.uniform();
    for (const RegionRule& rule : rules) {
      for (bool exclude : {false, true}) {
        std::vector<Region> r;
        for (double x : v) r.push_back(rule.classify_for_policy(x, exclude));
        for (auto sel : {SelectionRule::DoseLevel, SelectionRule::SampledValue}) {
          for (auto ref : {EscalationReference::Selected, EscalationReference::Frontier}) {
            const BanditChoice c = bandit_select(v, r, admissible, {sel, ref});
            const bool any_target = std::count(r.begin(), r.end(), Region::Target) > 0;
            const bool any_lower = std::count(r.begin(), r.end(), Region::Lower) > 0;
            const bool any_upper = std::count(r.begin(), r.end(), Region::Upper) > 0;
            Region want = Region::Excluded;
            if (any_target) want = Region::Target;
            else if (any_lower) want = Region::Lower;
            else if (any_upper) want = Region::Upper;
            CHECK(c.branch == want);
            CHECK(c.dose >= 1);
            CHECK(c.dose <= admissible);
            CHECK(c.dose <= kmax + 1);
          }
        }
      }
    }
  }
}

TEST_CASE("greedy and median ignore the rng") {
  const std::vector<DoseCounts> d = {{6, 0}, {6, 1}, {3, 2}};
  for (auto kind : {PolicyKind::greedy(), PolicyKind::median()}) {
    RngStream a(1, 1);
    RngStream b(999, 5);
    CHECK(policy_values(d, kind, a) == policy_values(d, kind, b));
  }
}

TEST_CASE("TS-eps with eps = 1 matches plain TS (KS distance)") {
  const std::vector<DoseCounts> d = {{4, 2}};  // p_hat = 0.5
  RngStream r1(31, 1);
  RngStream r2(31, 2);
  constexpr int kDraws = 100000;
  std::vector<double> a(kDraws);
  std::vector<double> b(kDraws);
  for (int i = 0; i < kDraws; ++i) {
    a[i] = policy_values(d, PolicyKind::thompson(), r1)[0];
    b[i] = policy_values(d, PolicyKind::thompson_eps(1.0), r2)[0];
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  // Two-sample KS statistic over the merged sample.
  std::size_t i = 0;
  std::size_t j = 0;
  double ks = 0.0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j]) ++i;
    else ++j;
    ks = std::max(ks, std::fabs(double(i) / kDraws - double(j) / kDraws));
  }
  CHECK(ks < 0.01);
}

TEST_CASE("TS-eps with eps = 1e-9 classifies like Median") {
  RngStream rng(41, 0);
  const RegionRule rules[] = {kBoin, RegionRule::for_keyboard(keyboard_partition(0.3))};
  for (int t = 0; t < 5000; ++t) {
    const int kmax = 1 + static_cast<int>(rng.uniform() * 6);
    std::vector<DoseCounts> d(kmax);
    for (DoseCounts& c : d) {
      c.n = 3 * (1 + static_cast<int>(rng.uniform() * 6));
      c.m = static_cast<int>(rng.uniform() * (c.n + 1));
    }
    const auto med = policy_values(d, PolicyKind::median(), rng);
    const auto tse = policy_values(d, PolicyKind::thompson_eps(1e-9), rng);
    for (const RegionRule& rule : rules) {
      for (int k = 0; k < kmax; ++k) {
        CHECK(std::fabs(med[k] - tse[k]) <= 1e-9);
        CHECK(rule.classify(med[k]) == rule.classify(tse[k]));
      }
    }
  }
}
