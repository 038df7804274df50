#include "dosefind/policies.hpp"

#include <algorithm>
#include <cstdio>

#include "dosefind/beta.hpp"

namespace dosefind {

PolicyKind PolicyKind::thompson_eps(double eps) {
  if (!(eps > 0.0 && eps <= 1.0)) {
    throw DomainError("Thompson sampling epsilon must lie in (0, 1]");
  }
  return {Kind::ThompsonSamplingEps, eps};
}

std::string PolicyKind::slug() const {
  switch (kind) {
    case Kind::ThompsonSampling:
      return "ts";
    case Kind::ThompsonSamplingEps: {
      char buf[48];
      std::snprintf(buf, sizeof buf, "ts-eps:%g", epsilon);
      return buf;
    }
    case Kind::Greedy:
      return "greedy";
    case Kind::Median:
      return "median";
  }
  return "?";
}

std::vector<double> policy_values(std::span<const DoseCounts> doses,
                                  const PolicyKind& kind, RngStream& rng) {
  std::vector<double> values;
  values.reserve(doses.size());
  for (const DoseCounts& d : doses) {
    if (d.n < 1) {
      throw DomainError("policy values need every dose up to k_max treated");
    }
    const double phat = static_cast<double>(d.m) / d.n;
    switch (kind.kind) {
      case PolicyKind::Kind::ThompsonSampling:
        values.push_back(beta_sample(BetaParams::posterior(d.n, d.m), rng));
        break;
      case PolicyKind::Kind::ThompsonSamplingEps:
        values.push_back(beta_sample_truncated(BetaParams::posterior(d.n, d.m),
                                               phat - kind.epsilon,
                                               phat + kind.epsilon, rng));
        break;
      case PolicyKind::Kind::Greedy:
        values.push_back((d.m + 1.0) / (d.n + 2.0));
        break;
      case PolicyKind::Kind::Median:
        values.push_back(phat);
        break;
    }
  }
  return values;
}

BanditChoice bandit_select(std::span<const double> draw,
                           std::span<const Region> regions, int admissible_max,
                           const BanditOptions& options) {
  if (draw.empty()) throw DomainError("bandit_select needs a non-empty draw");
  if (draw.size() != regions.size()) {
    throw DomainError("draw and regions must be aligned");
  }
  if (admissible_max < 1) throw DomainError("admissible_max must be >= 1");

  const int k_max = static_cast<int>(draw.size());
  const int cap = std::min(admissible_max, k_max + 1);
  const bool by_level = options.rule == SelectionRule::DoseLevel;

  // Returns a 0-based index or -1. `high` asks for the largest value (or the
  // highest dose level); strict comparisons keep the lower dose on ties.
  auto pick = [&](Region want, bool high) {
    int best = -1;
    for (int k = 0; k < k_max; ++k) {
      if (regions[k] != want) continue;
      if (best < 0) {
        best = k;
      } else if (by_level) {
        if (high) best = k;
      } else if (high ? draw[k] > draw[best] : draw[k] < draw[best]) {
        best = k;
      }
    }
    return best;
  };
  auto origin = [&](int k) {
    return options.reference == EscalationReference::Selected ? k + 1 : k_max;
  };

  if (const int k = pick(Region::Target, true); k >= 0) {
    return {std::min(k + 1, cap), Region::Target, k + 1};
  }
  if (const int k = pick(Region::Lower, true); k >= 0) {
    return {std::min(origin(k) + 1, cap), Region::Lower, k + 1};
  }
  if (const int k = pick(Region::Upper, false); k >= 0) {
    return {std::clamp(origin(k) - 1, 1, cap), Region::Upper, k + 1};
  }
  return {std::min(k_max + 1, cap), Region::Excluded, 0};
}

}  // namespace dosefind
