#include "dosefind/designs.hpp"

#include <algorithm>
#include <cmath>

#include "dosefind/beta.hpp"

namespace dosefind {

namespace {

void check_counts(int n, int m) {
  if (n < 1) throw DomainError("decision requires at least one patient");
  if (m < 0 || m > n) throw DomainError("DLT count must lie in [0, n]");
}

Decision from_region(Region r) {
  switch (r) {
    case Region::Lower:
      return Decision::Escalate;
    case Region::Target:
      return Decision::Retain;
    case Region::Upper:
    case Region::Excluded:
      return Decision::DeEscalate;
  }
  return Decision::Retain;
}

}  // namespace

std::string_view to_string(Family f) {
  return f == Family::Boin ? "boin" : "keyboard";
}

std::string_view to_string(Region r) {
  switch (r) {
    case Region::Lower:
      return "lower";
    case Region::Target:
      return "target";
    case Region::Upper:
      return "upper";
    case Region::Excluded:
      return "excluded";
  }
  return "?";
}

std::string_view to_string(Decision d) {
  switch (d) {
    case Decision::Escalate:
      return "escalate";
    case Decision::Retain:
      return "retain";
    case Decision::DeEscalate:
      return "de-escalate";
  }
  return "?";
}

double snap_edge(double x) { return std::round(x * 1e12) / 1e12; }

Boundaries boin_boundaries(double phi, double phi1_factor,
                           double phi2_factor) {
  if (!(phi > 0.0 && phi < 1.0)) {
    throw DomainError("target toxicity must lie in (0, 1)");
  }
  const double phi1 = phi1_factor * phi;
  const double phi2 = phi2_factor * phi;
  if (!(phi1 > 0.0 && phi1 < phi && phi2 > phi && phi2 < 1.0)) {
    throw DomainError("require 0 < phi1 < phi < phi2 < 1");
  }
  const double le = std::log((1.0 - phi1) / (1.0 - phi)) /
                    std::log(phi * (1.0 - phi1) / (phi1 * (1.0 - phi)));
  const double ld = std::log((1.0 - phi) / (1.0 - phi2)) /
                    std::log(phi2 * (1.0 - phi) / (phi * (1.0 - phi2)));
  return {le, ld};
}

KeyPartition keyboard_partition(double phi) {
  if (!(phi > 0.05 && phi < 0.95)) {
    throw DomainError("keyboard target toxicity must lie in (0.05, 0.95)");
  }
  constexpr double kTol = 1e-9;
  KeyPartition kp;
  kp.target = {snap_edge(phi - 0.05), snap_edge(phi + 0.05)};
  for (int i = 1;; ++i) {
    const double lo = snap_edge(kp.target.lo - KeyPartition::kWidth * i);
    if (lo < -kTol) break;
    kp.lower.insert(kp.lower.begin(),
                    Key{std::max(lo, 0.0),
                        snap_edge(kp.target.lo - KeyPartition::kWidth * (i - 1))});
  }
  for (int i = 1;; ++i) {
    const double hi = snap_edge(kp.target.hi + KeyPartition::kWidth * i);
    if (hi > 1.0 + kTol) break;
    kp.upper.push_back(
        Key{snap_edge(kp.target.hi + KeyPartition::kWidth * (i - 1)),
            std::min(hi, 1.0)});
  }
  return kp;
}

RegionRule RegionRule::for_boin(const Boundaries& b) {
  return {snap_edge(b.lambda_e), snap_edge(b.lambda_d)};
}

RegionRule RegionRule::for_keyboard(const KeyPartition& k) {
  return {k.target.lo, k.target.hi,
          k.lower.empty() ? k.target.lo : k.lower.front().lo,
          k.upper.empty() ? k.target.hi : k.upper.back().hi};
}

Region RegionRule::classify(double pstar) const {
  // Edges belong to Lower / Upper. Values within 1e-9 of an edge count as on
  // it, so a TS-eps draw collapsed onto an atom such as 3/12 = 0.25 lands in
  // the same region as the atom itself.
  constexpr double kTol = 1e-9;
  if (pstar <= lower_edge + kTol) return Region::Lower;
  if (pstar >= upper_edge - kTol) return Region::Upper;
  return Region::Target;
}

Region RegionRule::classify_for_policy(double pstar,
                                       bool exclude_strips) const {
  if (exclude_strips && (pstar < covered_lo || pstar >= covered_hi)) {
    return Region::Excluded;
  }
  return classify(pstar);
}

Region classify_region(double pstar, const RegionRule& rule) {
  return rule.classify(pstar);
}

Decision boin_baseline_decision(int n, int m, const Boundaries& b) {
  check_counts(n, m);
  const double phat = static_cast<double>(m) / n;
  return from_region(RegionRule::for_boin(b).classify(phat));
}

KeyMasses key_masses(int n, int m, const KeyPartition& keys) {
  const BetaParams post = BetaParams::posterior(n, m);
  auto mass = [&](const Key& k) {
    return beta_cdf(k.hi, post) - beta_cdf(k.lo, post);
  };
  KeyMasses out;
  out.target = mass(keys.target);
  for (const Key& k : keys.lower) out.lower.push_back(mass(k));
  for (const Key& k : keys.upper) out.upper.push_back(mass(k));
  return out;
}

Decision keyboard_baseline_decision(int n, int m, const KeyPartition& keys) {
  check_counts(n, m);
  const KeyMasses masses = key_masses(n, m, keys);
  // The target key wins ties; among the other keys the first maximum in
  // ascending toxicity order wins.
  double best = masses.target;
  Decision decision = Decision::Retain;
  for (double v : masses.lower) {
    if (v > best) {
      best = v;
      decision = Decision::Escalate;
    }
  }
  for (double v : masses.upper) {
    if (v > best) {
      best = v;
      decision = Decision::DeEscalate;
    }
  }
  return decision;
}

bool elimination_check(int n, int m, double phi, double threshold,
                       int min_n) {
  if (n < min_n || n <= 0) return false;
  const double over = 1.0 - beta_cdf(phi, BetaParams::posterior(n, m));
  return over > threshold;
}

}  // namespace dosefind
