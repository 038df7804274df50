#pragma once

#include <span>
#include <string>
#include <vector>

#include "dosefind/designs.hpp"
#include "dosefind/rng.hpp"

namespace dosefind {

/// Bandit policy producing one decision value per administered dose.
struct PolicyKind {
  enum class Kind { ThompsonSampling, ThompsonSamplingEps, Greedy, Median };

  Kind kind = Kind::ThompsonSampling;
  double epsilon = 0.0;  // ThompsonSamplingEps only; in (0, 1]

  static PolicyKind thompson() { return {Kind::ThompsonSampling, 0.0}; }
  static PolicyKind thompson_eps(double eps);
  static PolicyKind greedy() { return {Kind::Greedy, 0.0}; }
  static PolicyKind median() { return {Kind::Median, 0.0}; }

  bool deterministic() const {
    return kind == Kind::Greedy || kind == Kind::Median;
  }

  /// Short slug: "ts", "ts-eps:0.05", "greedy", "median".
  std::string slug() const;

  friend bool operator==(const PolicyKind&, const PolicyKind&) = default;
};

/// Patients and DLTs observed at one dose.
struct DoseCounts {
  int n = 0;
  int m = 0;

  friend bool operator==(const DoseCounts&, const DoseCounts&) = default;
};

/// Decision values p*_k for k = 1..k_max (index 0 is dose 1).
std::vector<double> policy_values(std::span<const DoseCounts> doses,
                                  const PolicyKind& kind, RngStream& rng);

/// How a branch of the bandit rule picks its dose among the candidates that
/// fall in the branch's region.
enum class SelectionRule {
  DoseLevel,     // highest Target / highest Lower / lowest Upper dose level
  SampledValue,  // largest / largest / smallest decision value
};

/// Which dose the escalation/de-escalation branches move relative to.
enum class EscalationReference {
  Selected,  // one level from the dose picked inside the branch
  Frontier,  // one level from the highest administered dose
};

struct BanditOptions {
  SelectionRule rule = SelectionRule::DoseLevel;
  EscalationReference reference = EscalationReference::Selected;
};

struct BanditChoice {
  int dose;       // 1-based
  Region branch;  // branch that fired; Excluded when no value was classified
  int selected;   // 1-based dose picked inside the branch, 0 if none
};

/// Three-branch bandit selection over decision values and their regions.
///  1. any Target: treat the selected Target dose;
///  2. else any Lower: one above the selected Lower dose, capped at
///     admissible_max;
///  3. else any Upper: one below the selected Upper dose, floored at 1.
/// Doses marked Excluded take no part. If every dose is Excluded the rule
/// escalates one above the frontier. Under SelectionRule::SampledValue, ties
/// go to the lower dose level.
BanditChoice bandit_select(std::span<const double> draw,
                           std::span<const Region> regions, int admissible_max,
                           const BanditOptions& options = {});

}  // namespace dosefind
