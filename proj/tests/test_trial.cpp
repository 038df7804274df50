#include <sstream>

#include "doctest.h"
#include "dosefind/beta.hpp"
#include "dosefind/event_log.hpp"
#include "dosefind/scenarios.hpp"
#include "dosefind/trial.hpp"

using namespace dosefind;

namespace {

DesignParams params(const std::string& label) { return with_design(DesignParams{}, label); }

TrialState run(const Design& d, std::initializer_list<CohortOutcome> cohorts) {
  TrialState s = new_trial(d);
  for (const CohortOutcome& c : cohorts) s = project_cohort(s, d, c.dose, c.dlt_count);
  return s;
}

const char* kAllDesigns[] = {"boin",          "boin-ts",         "boin-ts-eps:0.05",
                             "boin-greedy",   "boin-median",     "keyboard",
                             "keyboard-ts",   "keyboard-ts-eps:0.05", "keyboard-greedy",
                             "keyboard-median"};

}  // namespace

TEST_CASE("new trial") {
  const Design d(params("boin"));
  const TrialState s = new_trial(d);
  CHECK(s.total_patients() == 0);
  CHECK(s.current_dose == 1);
  CHECK(s.status == TrialStatus::Active);

  DesignParams one = params("boin");
  one.num_doses = 1;
  CHECK(new_trial(Design(one)).num_doses() == 1);

  DesignParams bad = params("boin");
  bad.sample_size = 35;
  CHECK_THROWS_AS(Design{bad}, ConfigError);
  bad = params("boin");
  bad.phi = 1.2;
  CHECK_THROWS_AS(Design{bad}, ConfigError);
}

TEST_CASE("design labels round trip") {
  for (const char* label : kAllDesigns) CHECK(params(label).design_label() == label);
  CHECK(params("boin-g").design_label() == "boin-greedy");
  CHECK(params("keyboard-m").design_label() == "keyboard-median");
  CHECK_THROWS_AS(params("crm"), ConfigError);
  CHECK_THROWS_AS(params("boin-ucb"), ConfigError);
  CHECK_THROWS_AS(params("boin-ts-eps:abc"), ConfigError);
  CHECK_THROWS_AS(params("boin-ts-eps:0"), ConfigError);
}

TEST_CASE("record_cohort: toxicity stop, completion and upward closure") {
  const Design d(params("boin"));
  const TrialState stopped = run(d, {{1, 3}});
  CHECK(stopped.eliminated[0]);
  CHECK(stopped.status == TrialStatus::StoppedToxicity);

  TrialState s = new_trial(d);
  for (int i = 0; i < 12; ++i) s = project_cohort(s, d, 1, 1);
  CHECK(s.status == TrialStatus::Completed);
  CHECK(s.total_patients() == 36);

  const TrialState e = run(d, {{1, 0}, {2, 0}, {3, 3}});
  CHECK_FALSE(e.eliminated[1]);
  for (int k = 2; k < 6; ++k) CHECK(e.eliminated[k]);
  CHECK(e.admissible_max() == 2);
  CHECK(e.k_max == 2);
}

TEST_CASE("record_cohort errors") {
  const Design d(params("boin"));
  const TrialState s = new_trial(d);
  CHECK_THROWS_AS(record_cohort(s, d, {2, 0}), StateError);
  CHECK_THROWS_AS(record_cohort(s, d, {1, 4}), DomainError);
  CHECK_THROWS_AS(record_cohort(s, d, {1, -1}), DomainError);
  const TrialState stopped = run(d, {{1, 3}});
  CHECK_THROWS_AS(record_cohort(stopped, d, {1, 0}), StateError);
  CHECK_THROWS_AS(assign_dose(s, 3), StateError);  // skips untried doses
}

TEST_CASE("without early stopping the lowest dose is never eliminated") {
  DesignParams p = params("boin");
  p.early_stopping = false;
  const Design d(p);
  const TrialState s = run(d, {{1, 3}});
  CHECK_FALSE(s.eliminated[0]);
  CHECK(s.status == TrialStatus::Active);
  const TrialState t = run(d, {{1, 0}, {2, 3}});
  CHECK(t.eliminated[1]);
}

TEST_CASE("next_dose: BOIN baseline examples") {
  const Design d(params("boin"));
  RngStream rng(1, 1);
  CHECK(next_dose(new_trial(d), d, rng) == 1);
  CHECK(next_dose(run(d, {{1, 0}}), d, rng) == 2);
  // Dose 3 eliminated, 3/0 at dose 2: escalation is clamped.
  const TrialState s = run(d, {{1, 0}, {2, 0}, {3, 3}, {2, 0}});
  REQUIRE(s.current_dose == 2);
  CHECK(next_dose(s, d, rng) == 2);
  CHECK(next_dose(run(d, {{1, 0}, {2, 2}}), d, rng) == 1);
}

TEST_CASE("next_dose: BOIN-Greedy with (3,0), (3,1)") {
  const Design d(params("boin-greedy"));
  const TrialState s = run(d, {{1, 0}, {2, 1}});
  RngStream rng(1, 1);
  const DoseDecision dec = decide_next(s, d, rng);
  REQUIRE(dec.values.size() == 2);
  CHECK(dec.values[0] == doctest::Approx(0.2));
  CHECK(dec.values[1] == doctest::Approx(0.4));
  CHECK(dec.regions[0] == Region::Lower);
  CHECK(dec.regions[1] == Region::Upper);
  // The Lower branch has priority over the Upper branch, so the rule
  // escalates from dose 1 to dose 2.
  REQUIRE(dec.bandit);
  CHECK(dec.bandit->branch == Region::Lower);
  CHECK(dec.dose == 2);
}

TEST_CASE("next_dose refuses finished trials") {
  const Design d(params("boin"));
  RngStream rng(1, 1);
  CHECK_THROWS_AS(next_dose(run(d, {{1, 3}}), d, rng), StateError);
}

TEST_CASE("select_mtd") {
  DesignParams p = params("boin");
  p.num_doses = 3;
  p.sample_size = 9;
  const Design d(p);
  // p_hat = (0, 1/3, 2/3).
  TrialState s = run(d, {{1, 0}, {2, 1}, {3, 2}});
  REQUIRE(s.status == TrialStatus::Completed);
  CHECK(select_mtd(s, d) == 2);

  CHECK_FALSE(select_mtd(run(Design(params("boin")), {{1, 3}}), Design(params("boin"))).has_value());
  CHECK_THROWS_AS(select_mtd(new_trial(d), d), StateError);
}

TEST_CASE("select_mtd tie-breaks") {
  DesignParams q = params("boin");
  q.num_doses = 2;
  q.sample_size = 40;
  q.cohort_size = 4;
  const Design d(q);
  TrialState s = new_trial(d);
  s.status = TrialStatus::Completed;
  // 0.35 is not attainable with n = 12, so equal samples use n = 20.
  s.doses = {{20, 5}, {20, 7}};  // 0.25 vs 0.35: equal distance and n
  CHECK(select_mtd(s, d) == 1);
  s.doses = {{12, 3}, {20, 7}};  // equal distance, larger n wins
  CHECK(select_mtd(s, d) == 2);
  s.doses = {{12, 3}, {12, 4}};  // 1/3 is closer than 1/4
  CHECK(select_mtd(s, d) == 2);
  s.eliminated = {false, true};
  CHECK(select_mtd(s, d) == 1);
}

TEST_CASE("simulate_trial extremes") {
  const std::vector<double> zero(6, 0.0);
  const std::vector<double> one(6, 1.0);
  for (const char* label : {"boin", "keyboard", "boin-greedy", "boin-median",
                            "keyboard-greedy", "keyboard-median"}) {
    CAPTURE(label);
    const Design d(params(label));
    RngStream rng(5, 5);
    const TrialState s = simulate_trial(d, zero, rng);
    REQUIRE(s.status == TrialStatus::Completed);
    const std::vector<int> want = {1, 2, 3, 4, 5, 6, 6, 6, 6, 6, 6, 6};
    std::vector<int> got;
    for (const CohortOutcome& c : s.history) got.push_back(c.dose);
    CHECK(got == want);
    CHECK(select_mtd(s, d) == 6);
  }
  for (const char* label : kAllDesigns) {
    CAPTURE(label);
    const Design d(params(label));
    RngStream rng(6, 6);
    const TrialState s = simulate_trial(d, one, rng);
    CHECK(s.status == TrialStatus::StoppedToxicity);
    CHECK(s.history.size() == 1);
    CHECK_FALSE(select_mtd(s, d).has_value());
  }
}

TEST_CASE("simulate_trial is deterministic for a fixed stream") {
  const Design d(params("boin-greedy"));
  const auto s4 = builtin_scenarios()[3].true_tox;
  RngStream a(2024, 17);
  RngStream b(2024, 17);
  CHECK(simulate_trial(d, s4, a) == simulate_trial(d, s4, b));
  CHECK_THROWS_AS(simulate_trial(d, std::vector<double>{0.1, 0.2}, a), ConfigError);
}

TEST_CASE("trial invariants over many simulated trials") {
  const auto scenarios = builtin_scenarios();
  for (const char* label : kAllDesigns) {
    for (bool early : {true, false}) {
      DesignParams p = params(label);
      p.early_stopping = early;
      const Design d(p);
      for (const Scenario& sc : scenarios) {
        for (std::uint64_t r = 0; r < 40; ++r) {
          RngStream rng(7, replicate_stream_id(label, sc.name, r));
          TrialState s = new_trial(d);
          int max_given = 0;
          while (s.status == TrialStatus::Active) {
            const int dose = next_dose(s, d, rng);
            REQUIRE(dose >= 1);
            REQUIRE(dose <= max_given + 1);       // no skipping
            REQUIRE_FALSE(s.eliminated[dose - 1]);  // never an eliminated dose
            s = project_cohort(s, d, dose, rng.binomial(p.cohort_size, sc.true_tox[dose - 1]));
            max_given = std::max(max_given, dose);
            // Upward closure and counts.
            bool seen = false;
            for (int k = 0; k < s.num_doses(); ++k) {
              if (seen) REQUIRE(s.eliminated[k]);
              seen = seen || s.eliminated[k];
              REQUIRE(s.doses[k].m <= s.doses[k].n);
            }
            REQUIRE(s.total_patients() <= p.sample_size);
          }
          // Conservation: full sample iff Completed.
          CHECK((s.total_patients() == p.sample_size) == (s.status == TrialStatus::Completed));
          // Replay equality, directly and through the event log.
          CHECK(replay(d, s.history) == s);
          std::stringstream log;
          write_event_log(log, d, s);
          CHECK(replay_events(d, read_event_log(log)) == s);
        }
      }
    }
  }
}
