#pragma once

#include <string_view>
#include <vector>

namespace dosefind {

enum class Family { Boin, Keyboard };

std::string_view to_string(Family f);

/// Toxicity region of a decision value relative to the target. Excluded marks
/// a keyboard value inside an edge strip that no full key covers; it is only
/// produced by RegionRule::classify_for_policy.
enum class Region { Lower, Target, Upper, Excluded };

std::string_view to_string(Region r);

enum class Decision { Escalate, Retain, DeEscalate };

std::string_view to_string(Decision d);

/// BOIN escalation / de-escalation boundaries.
struct Boundaries {
  double lambda_e;
  double lambda_d;
};

/// Optimal BOIN boundaries for target phi, with the sub- and over-therapeutic
/// toxicity rates at phi1_factor * phi and phi2_factor * phi.
Boundaries boin_boundaries(double phi, double phi1_factor = 0.6,
                           double phi2_factor = 1.4);

/// Half-open key interval.
struct Key {
  double lo;
  double hi;
};

/// Keyboard partition: the target key (phi - 0.05, phi + 0.05) plus full
/// width-0.1 keys tiling outward on each side. Edge strips narrower than a
/// key are not part of the partition.
struct KeyPartition {
  static constexpr double kWidth = 0.1;

  Key target;
  std::vector<Key> lower;  // ascending
  std::vector<Key> upper;  // ascending
};

KeyPartition keyboard_partition(double phi);

/// Point classification shared by both families: Lower iff p <= lower_edge,
/// Upper iff p >= upper_edge, Target otherwise. Edges belong to the outer
/// regions.
///
/// [covered_lo, covered_hi) is the span of the keyboard's full keys; BOIN
/// covers all of [0, 1].
struct RegionRule {
  double lower_edge;
  double upper_edge;
  double covered_lo = 0.0;
  double covered_hi = 1.0;

  static RegionRule for_boin(const Boundaries& b);
  static RegionRule for_keyboard(const KeyPartition& k);

  /// Total over [0, 1]; never returns Excluded.
  Region classify(double pstar) const;

  /// As classify, but returns Excluded outside the covered span when
  /// `exclude_strips` is set.
  Region classify_for_policy(double pstar, bool exclude_strips) const;
};

Region classify_region(double pstar, const RegionRule& rule);

/// BOIN rule at one dose: compares m / n with the boundaries.
Decision boin_baseline_decision(int n, int m, const Boundaries& b);

/// Keyboard rule at one dose: picks the key of highest posterior mass.
Decision keyboard_baseline_decision(int n, int m, const KeyPartition& keys);

/// Posterior Beta(m + 1, n - m + 1) mass of each key; used by the keyboard
/// rule and exposed for rationale output.
struct KeyMasses {
  double target;
  std::vector<double> lower;
  std::vector<double> upper;
};

KeyMasses key_masses(int n, int m, const KeyPartition& keys);

/// Safety rule: true iff n >= min_n and Pr(p > phi | n, m) > threshold.
bool elimination_check(int n, int m, double phi, double threshold = 0.95,
                       int min_n = 3);

/// Rounds x to 12 decimals so that boundaries such as 0.3 - 0.05 land on the
/// same double as the rational toxicity rates compared against them.
double snap_edge(double x);

}  // namespace dosefind
