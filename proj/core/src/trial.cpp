#include "dosefind/trial.hpp"

#include <algorithm>
#include <cmath>
#include <string_view>

#include "dosefind/beta.hpp"

namespace dosefind {

namespace {

bool starts_with(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

PolicyKind parse_policy(std::string_view slug, const std::string& label) {
  if (slug == "ts") return PolicyKind::thompson();
  if (slug == "greedy" || slug == "g") return PolicyKind::greedy();
  if (slug == "median" || slug == "m") return PolicyKind::median();
  if (starts_with(slug, "ts-eps:")) {
    const std::string num(slug.substr(7));
    std::size_t used = 0;
    double eps = 0.0;
    try {
      eps = std::stod(num, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != num.size()) {
      throw ConfigError("bad epsilon in design '" + label + "'");
    }
    if (!(eps > 0.0 && eps <= 1.0)) {
      throw ConfigError("epsilon must lie in (0, 1] in design '" + label + "'");
    }
    return PolicyKind::thompson_eps(eps);
  }
  throw ConfigError("unknown policy in design '" + label + "'");
}

}  // namespace

void DesignParams::validate() const {
  if (!(phi > 0.0 && phi < 1.0)) throw ConfigError("phi must lie in (0, 1)");
  if (num_doses < 1) throw ConfigError("number of doses must be >= 1");
  if (cohort_size < 1) throw ConfigError("cohort size must be >= 1");
  if (sample_size < 1 || sample_size % cohort_size != 0) {
    throw ConfigError("sample size must be a positive multiple of cohort size");
  }
  if (!(elimination_threshold > 0.0 && elimination_threshold < 1.0)) {
    throw ConfigError("elimination threshold must lie in (0, 1)");
  }
  if (elimination_min_n < 0) {
    throw ConfigError("elimination minimum n must be >= 0");
  }
  if (family == Family::Keyboard && !(phi > 0.05 && phi < 0.95)) {
    throw ConfigError("keyboard designs need phi in (0.05, 0.95)");
  }
  if (policy && policy->kind == PolicyKind::Kind::ThompsonSamplingEps &&
      !(policy->epsilon > 0.0 && policy->epsilon <= 1.0)) {
    throw ConfigError("epsilon must lie in (0, 1]");
  }
  if (family == Family::Boin) {
    const double p1 = phi1_factor * phi;
    const double p2 = phi2_factor * phi;
    if (!(p1 > 0.0 && p1 < phi && p2 > phi && p2 < 1.0)) {
      throw ConfigError("BOIN requires 0 < phi1 < phi < phi2 < 1");
    }
  }
}

std::string DesignParams::design_label() const {
  std::string label(to_string(family));
  if (policy) label += "-" + policy->slug();
  return label;
}

DesignParams with_design(DesignParams base, const std::string& label) {
  std::string_view rest;
  if (starts_with(label, "boin")) {
    base.family = Family::Boin;
    rest = std::string_view(label).substr(4);
  } else if (starts_with(label, "keyboard")) {
    base.family = Family::Keyboard;
    rest = std::string_view(label).substr(8);
  } else {
    throw ConfigError("unknown design family in '" + label + "'");
  }
  if (rest.empty()) {
    base.policy.reset();
  } else if (rest.front() == '-') {
    base.policy = parse_policy(rest.substr(1), label);
  } else {
    throw ConfigError("malformed design '" + label + "'");
  }
  return base;
}

Design::Design(DesignParams params)
    : params_(std::move(params)), boundaries_{0.0, 0.0}, rule_{0.0, 0.0} {
  params_.validate();
  if (params_.family == Family::Boin) {
    boundaries_ = boin_boundaries(params_.phi, params_.phi1_factor,
                                  params_.phi2_factor);
    rule_ = RegionRule::for_boin(boundaries_);
  } else {
    keys_ = keyboard_partition(params_.phi);
    rule_ = RegionRule::for_keyboard(*keys_);
    boundaries_ = {keys_->target.lo, keys_->target.hi};
  }
}

std::string_view to_string(TrialStatus s) {
  switch (s) {
    case TrialStatus::Active:
      return "active";
    case TrialStatus::Completed:
      return "completed";
    case TrialStatus::StoppedToxicity:
      return "stopped_toxicity";
  }
  return "?";
}

bool operator==(const CohortOutcome& a, const CohortOutcome& b) {
  return a.dose == b.dose && a.dlt_count == b.dlt_count;
}

int TrialState::total_patients() const {
  int total = 0;
  for (const DoseCounts& d : doses) total += d.n;
  return total;
}

std::optional<int> TrialState::lowest_eliminated() const {
  for (int k = 0; k < num_doses(); ++k) {
    if (eliminated[k]) return k + 1;
  }
  return std::nullopt;
}

int TrialState::admissible_max() const {
  const auto low = lowest_eliminated();
  return low ? *low - 1 : num_doses();
}

TrialState new_trial(const Design& design) {
  const int K = design.params().num_doses;
  TrialState s;
  s.doses.assign(K, DoseCounts{});
  s.eliminated.assign(K, false);
  s.current_dose = 1;
  s.k_max = 0;
  s.status = TrialStatus::Active;
  return s;
}

TrialState assign_dose(const TrialState& state, int dose) {
  if (state.status != TrialStatus::Active) {
    throw StateError("cannot assign a dose in a finished trial");
  }
  if (dose < 1 || dose > state.admissible_max()) {
    throw StateError("dose " + std::to_string(dose) + " is not admissible");
  }
  if (dose > state.k_max + 1) {
    throw StateError("dose " + std::to_string(dose) + " skips untried doses");
  }
  TrialState next = state;
  next.current_dose = dose;
  return next;
}

TrialState record_cohort(const TrialState& state, const Design& design,
                         const CohortOutcome& outcome) {
  const DesignParams& p = design.params();
  if (state.status != TrialStatus::Active) {
    throw StateError("trial is not active");
  }
  if (outcome.dose != state.current_dose) {
    throw StateError("cohort dose " + std::to_string(outcome.dose) +
                     " differs from the assigned dose " +
                     std::to_string(state.current_dose));
  }
  if (outcome.dose < 1 || outcome.dose > state.admissible_max()) {
    throw StateError("cohort dose is eliminated or out of range");
  }
  if (outcome.dlt_count < 0 || outcome.dlt_count > p.cohort_size) {
    throw DomainError("DLT count must lie in [0, cohort size]");
  }

  TrialState next = state;
  const int idx = outcome.dose - 1;
  next.doses[idx].n += p.cohort_size;
  next.doses[idx].m += outcome.dlt_count;
  next.k_max = std::max(next.k_max, outcome.dose);
  next.history.push_back(outcome);

  const DoseCounts& d = next.doses[idx];
  const bool may_eliminate = p.early_stopping || idx > 0;
  if (may_eliminate && elimination_check(d.n, d.m, p.phi,
                                         p.elimination_threshold,
                                         p.elimination_min_n)) {
    for (int k = idx; k < next.num_doses(); ++k) next.eliminated[k] = true;
    next.k_max = std::min(next.k_max, idx);
  }

  // A trial that has accrued its full sample is complete even if the last
  // cohort eliminated dose 1; select_mtd then finds no candidate.
  if (next.total_patients() >= p.sample_size) {
    next.status = TrialStatus::Completed;
  } else if (next.eliminated[0]) {
    next.status = TrialStatus::StoppedToxicity;
  }
  return next;
}

TrialState project_cohort(const TrialState& state, const Design& design,
                          int dose, int dlt_count) {
  return record_cohort(assign_dose(state, dose), design, {dose, dlt_count});
}

DoseDecision decide_next(const TrialState& state, const Design& design,
                         RngStream& rng) {
  if (state.status != TrialStatus::Active) {
    throw StateError("next dose requested for a finished trial");
  }
  const DesignParams& p = design.params();
  const int admissible = state.admissible_max();
  DoseDecision out;

  if (state.history.empty()) {
    out.dose = state.current_dose;
    out.source = DoseDecision::Source::Start;
    return out;
  }

  if (!p.policy) {
    const int cur = state.current_dose;
    const DoseCounts& d = state.doses[cur - 1];
    const Decision decision =
        p.family == Family::Boin
            ? boin_baseline_decision(d.n, d.m, design.boundaries())
            : keyboard_baseline_decision(d.n, d.m, *design.keys());
    int dose = cur;
    if (decision == Decision::Escalate) dose = cur + 1;
    if (decision == Decision::DeEscalate) dose = cur - 1;
    out.dose = std::clamp(dose, 1, std::max(admissible, 1));
    out.source = DoseDecision::Source::Baseline;
    out.baseline = decision;
    return out;
  }

  const std::span<const DoseCounts> treated(state.doses.data(),
                                            static_cast<std::size_t>(state.k_max));
  out.values = policy_values(treated, *p.policy, rng);
  out.regions.reserve(out.values.size());
  const bool exclude = p.family == Family::Keyboard && p.exclude_key_strips;
  for (double v : out.values) {
    out.regions.push_back(design.region_rule().classify_for_policy(v, exclude));
  }
  const BanditChoice choice =
      bandit_select(out.values, out.regions, admissible,
                    {p.selection_rule, p.escalation_reference});
  out.dose = choice.dose;
  out.source = DoseDecision::Source::Bandit;
  out.bandit = choice;
  return out;
}

int next_dose(const TrialState& state, const Design& design, RngStream& rng) {
  return decide_next(state, design, rng).dose;
}

std::optional<int> preview_mtd(const TrialState& state, const Design& design) {
  if (state.status == TrialStatus::StoppedToxicity) return std::nullopt;
  const double phi = design.params().phi;
  std::optional<int> best;
  double best_dist = 0.0;
  int best_n = 0;
  for (int k = 0; k < state.num_doses(); ++k) {
    const DoseCounts& d = state.doses[k];
    if (d.n == 0 || state.eliminated[k]) continue;
    const double dist = std::fabs(static_cast<double>(d.m) / d.n - phi);
    // Distances within 1e-12 are ties (e.g. 0.25 and 0.35 around 0.30).
    const bool closer = !best || dist < best_dist - 1e-12;
    const bool tie_more_data =
        best && std::fabs(dist - best_dist) <= 1e-12 && d.n > best_n;
    if (closer || tie_more_data) {
      best = k + 1;
      best_dist = dist;
      best_n = d.n;
    }
  }
  return best;
}

std::optional<int> select_mtd(const TrialState& state, const Design& design) {
  if (state.status == TrialStatus::Active) {
    throw StateError("MTD selection requires a finished trial");
  }
  return preview_mtd(state, design);
}

TrialState simulate_trial(const Design& design, std::span<const double> true_tox,
                          RngStream& rng) {
  const DesignParams& p = design.params();
  if (static_cast<int>(true_tox.size()) != p.num_doses) {
    throw ConfigError("scenario length differs from the number of doses");
  }
  for (double t : true_tox) {
    if (!(t >= 0.0 && t <= 1.0)) {
      throw ConfigError("true toxicity rates must lie in [0, 1]");
    }
  }
  TrialState state = new_trial(design);
  while (state.status == TrialStatus::Active) {
    const int dose = next_dose(state, design, rng);
    state = assign_dose(state, dose);
    const int dlts = rng.binomial(p.cohort_size, true_tox[dose - 1]);
    state = record_cohort(state, design, {dose, dlts});
  }
  return state;
}

TrialState replay(const Design& design, std::span<const CohortOutcome> history) {
  TrialState state = new_trial(design);
  for (const CohortOutcome& c : history) {
    state = record_cohort(assign_dose(state, c.dose), design, c);
  }
  return state;
}

}  // namespace dosefind
