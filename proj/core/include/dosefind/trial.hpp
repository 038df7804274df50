#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dosefind/designs.hpp"
#include "dosefind/policies.hpp"
#include "dosefind/rng.hpp"

namespace dosefind {

/// Invalid design parameters or scenario definitions.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Operation not permitted in the trial's current state.
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct DesignParams {
  double phi = 0.30;
  int num_doses = 6;
  int sample_size = 36;
  int cohort_size = 3;
  Family family = Family::Boin;
  std::optional<PolicyKind> policy;  // empty: the family's baseline rule
  double elimination_threshold = 0.95;
  int elimination_min_n = 3;
  SelectionRule selection_rule = SelectionRule::DoseLevel;
  EscalationReference escalation_reference = EscalationReference::Selected;
  /// Keyboard bandits ignore decision values in the uncovered edge strips.
  bool exclude_key_strips = true;
  /// When false the lowest dose is never eliminated, so every trial accrues
  /// the full sample size.
  bool early_stopping = true;
  double phi1_factor = 0.6;
  double phi2_factor = 1.4;

  /// Throws ConfigError on violated invariants.
  void validate() const;

  /// Canonical design label, e.g. "boin", "keyboard-ts-eps:0.05".
  std::string design_label() const;
};

/// Parses a design label ("boin", "boin-ts", "boin-ts-eps:0.05",
/// "keyboard-greedy", "keyboard-median", ...) into family and policy fields
/// of `base`.
DesignParams with_design(DesignParams base, const std::string& label);

/// Validated parameters plus the derived decision machinery.
class Design {
 public:
  explicit Design(DesignParams params);

  const DesignParams& params() const { return params_; }
  const Boundaries& boundaries() const { return boundaries_; }
  const std::optional<KeyPartition>& keys() const { return keys_; }
  const RegionRule& region_rule() const { return rule_; }

 private:
  DesignParams params_;
  Boundaries boundaries_;
  std::optional<KeyPartition> keys_;
  RegionRule rule_;
};

enum class TrialStatus { Active, Completed, StoppedToxicity };

std::string_view to_string(TrialStatus s);

struct CohortOutcome {
  int dose;  // 1-based
  int dlt_count;
};

/// Trial snapshot. Dose-indexed vectors use index 0 for dose 1.
struct TrialState {
  std::vector<DoseCounts> doses;
  std::vector<bool> eliminated;  // upward closed
  int current_dose = 1;          // dose for the pending cohort
  int k_max = 0;                 // highest administered, non-eliminated dose
  std::vector<CohortOutcome> history;
  TrialStatus status = TrialStatus::Active;

  int num_doses() const { return static_cast<int>(doses.size()); }
  int total_patients() const;
  /// Lowest eliminated dose, if any.
  std::optional<int> lowest_eliminated() const;
  /// Highest dose that may still be administered (0 if dose 1 eliminated).
  int admissible_max() const;

  friend bool operator==(const TrialState&, const TrialState&) = default;
};

bool operator==(const CohortOutcome& a, const CohortOutcome& b);

TrialState new_trial(const Design& design);

/// Returns a copy of `state` with the pending cohort assigned to `dose`.
TrialState assign_dose(const TrialState& state, int dose);

/// Records a cohort at the current dose, applies the elimination rule to that
/// dose and updates the trial status.
TrialState record_cohort(const TrialState& state, const Design& design,
                         const CohortOutcome& outcome);

/// State after a hypothetical cohort with `dlt_count` DLTs at `dose`. The
/// dose must be assignable from `state`; the input is not modified.
TrialState project_cohort(const TrialState& state, const Design& design,
                          int dose, int dlt_count);

/// Full account of a next-dose decision.
struct DoseDecision {
  enum class Source { Start, Baseline, Bandit };

  int dose = 1;
  Source source = Source::Start;
  std::optional<Decision> baseline;  // Source::Baseline
  std::optional<BanditChoice> bandit;  // Source::Bandit
  std::vector<double> values;          // p*_k for k = 1..k_max (bandit)
  std::vector<Region> regions;         // region of each value (bandit)
};

DoseDecision decide_next(const TrialState& state, const Design& design,
                         RngStream& rng);

int next_dose(const TrialState& state, const Design& design, RngStream& rng);

/// Dose whose observed toxicity rate is closest to the target among
/// administered, non-eliminated doses; ties go to the larger sample, then the
/// lower dose. Empty when the trial stopped for toxicity.
std::optional<int> select_mtd(const TrialState& state, const Design& design);

/// Same rule applied to an unfinished trial, as if it ended now.
std::optional<int> preview_mtd(const TrialState& state, const Design& design);

/// Runs one trial to termination against true per-dose toxicity rates.
TrialState simulate_trial(const Design& design, std::span<const double> true_tox,
                          RngStream& rng);

/// Rebuilds a trial by folding record_cohort over a history.
TrialState replay(const Design& design, std::span<const CohortOutcome> history);

}  // namespace dosefind
