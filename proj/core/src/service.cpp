#include "dosefind/service.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>

#include "dosefind/event_log.hpp"

namespace dosefind {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kSessionSuffix = ".session.json";
constexpr const char* kEventsSuffix = ".events.jsonl";

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

bool valid_id(const std::string& id) {
  if (id.empty() || id.size() > 64) return false;
  for (char c : id) {
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
  }
  return true;
}

std::string_view to_string(SelectionRule r) {
  return r == SelectionRule::DoseLevel ? "dose_level" : "sampled_value";
}

std::string_view to_string(EscalationReference r) {
  return r == EscalationReference::Selected ? "selected" : "frontier";
}

std::string_view to_string(DoseDecision::Source s) {
  switch (s) {
    case DoseDecision::Source::Start:
      return "start";
    case DoseDecision::Source::Baseline:
      return "baseline";
    case DoseDecision::Source::Bandit:
      return "bandit";
  }
  return "?";
}

Region branch_of(Decision d) {
  switch (d) {
    case Decision::Escalate:
      return Region::Lower;
    case Decision::Retain:
      return Region::Target;
    case Decision::DeEscalate:
      return Region::Upper;
  }
  return Region::Target;
}

json boundaries_json(const Design& design) {
  json j{{"lambda_e", design.boundaries().lambda_e},
         {"lambda_d", design.boundaries().lambda_d}};
  if (design.keys()) {
    auto key = [](const Key& k) { return json::array({k.lo, k.hi}); };
    json lower = json::array();
    json upper = json::array();
    for (const Key& k : design.keys()->lower) lower.push_back(key(k));
    for (const Key& k : design.keys()->upper) upper.push_back(key(k));
    j["target_key"] = key(design.keys()->target);
    j["lower_keys"] = lower;
    j["upper_keys"] = upper;
  }
  return j;
}

std::vector<int> eliminated_levels(const TrialState& s) {
  std::vector<int> out;
  for (int k = 0; k < s.num_doses(); ++k) {
    if (s.eliminated[k]) out.push_back(k + 1);
  }
  return out;
}

json optional_dose(std::optional<int> d) { return d ? json(*d) : json(nullptr); }

json recommendation_json(const Design& design, const TrialState& state,
                         std::uint64_t policy_seed) {
  const int cohort_index = static_cast<int>(state.history.size());
  json j{{"cohort_index", cohort_index}};
  if (state.status != TrialStatus::Active) {
    j["stop"] = true;
    j["reason"] = std::string(to_string(state.status));
    return j;
  }
  RngStream rng(policy_seed, static_cast<std::uint64_t>(cohort_index));
  const DoseDecision d = decide_next(state, design, rng);
  j["stop"] = false;
  j["dose"] = d.dose;

  json r{{"source", std::string(to_string(d.source))},
         {"boundaries", boundaries_json(design)}};
  if (d.baseline) {
    const DoseCounts& c = state.doses[state.current_dose - 1];
    r["decision"] = std::string(to_string(*d.baseline));
    r["branch"] = std::string(to_string(branch_of(*d.baseline)));
    r["current_dose"] = state.current_dose;
    r["n"] = c.n;
    r["m"] = c.m;
    r["p_hat"] = static_cast<double>(c.m) / c.n;
  }
  if (d.bandit) {
    const PolicyKind& policy = *design.params().policy;
    json regions = json::array();
    for (Region reg : d.regions) regions.push_back(std::string(to_string(reg)));
    r["branch"] = std::string(to_string(d.bandit->branch));
    r["selected"] = d.bandit->selected;
    r["policy"] = policy.slug();
    r["deterministic"] = policy.deterministic();
    r["values"] = d.values;
    r["regions"] = regions;
  }
  j["rationale"] = r;
  return j;
}

}  // namespace

json params_to_json(const DesignParams& p) {
  return json{{"design", p.design_label()},
              {"family", std::string(to_string(p.family))},
              {"policy", p.policy ? json(p.policy->slug()) : json(nullptr)},
              {"phi", p.phi},
              {"num_doses", p.num_doses},
              {"sample_size", p.sample_size},
              {"cohort_size", p.cohort_size},
              {"elimination_threshold", p.elimination_threshold},
              {"elimination_min_n", p.elimination_min_n},
              {"selection_rule", std::string(to_string(p.selection_rule))},
              {"escalation_reference",
               std::string(to_string(p.escalation_reference))},
              {"exclude_key_strips", p.exclude_key_strips},
              {"early_stopping", p.early_stopping},
              {"phi1_factor", p.phi1_factor},
              {"phi2_factor", p.phi2_factor}};
}

DesignParams params_from_json(const json& j) {
  if (!j.is_object()) throw ServiceError(400, "request body must be a JSON object");
  try {
    DesignParams p;
    if (j.contains("design")) {
      p = with_design(p, j.at("design").get<std::string>());
    } else {
      std::string label = j.value("family", std::string("boin"));
      if (j.contains("policy") && !j.at("policy").is_null()) {
        label += "-" + j.at("policy").get<std::string>();
      }
      p = with_design(p, label);
    }
    p.phi = j.value("phi", p.phi);
    p.num_doses = j.value("num_doses", p.num_doses);
    p.sample_size = j.value("sample_size", p.sample_size);
    p.cohort_size = j.value("cohort_size", p.cohort_size);
    p.elimination_threshold = j.value("elimination_threshold", p.elimination_threshold);
    p.elimination_min_n = j.value("elimination_min_n", p.elimination_min_n);
    p.exclude_key_strips = j.value("exclude_key_strips", p.exclude_key_strips);
    p.early_stopping = j.value("early_stopping", p.early_stopping);
    p.phi1_factor = j.value("phi1_factor", p.phi1_factor);
    p.phi2_factor = j.value("phi2_factor", p.phi2_factor);
    if (j.contains("selection_rule")) {
      const auto s = j.at("selection_rule").get<std::string>();
      if (s == "dose_level") {
        p.selection_rule = SelectionRule::DoseLevel;
      } else if (s == "sampled_value") {
        p.selection_rule = SelectionRule::SampledValue;
      } else {
        throw ConfigError("unknown selection_rule '" + s + "'");
      }
    }
    if (j.contains("escalation_reference")) {
      const auto s = j.at("escalation_reference").get<std::string>();
      if (s == "selected") {
        p.escalation_reference = EscalationReference::Selected;
      } else if (s == "frontier") {
        p.escalation_reference = EscalationReference::Frontier;
      } else {
        throw ConfigError("unknown escalation_reference '" + s + "'");
      }
    }
    p.validate();
    return p;
  } catch (const ConfigError& e) {
    throw ServiceError(422, e.what());
  } catch (const json::exception& e) {
    throw ServiceError(422, std::string("invalid parameter: ") + e.what());
  }
}

struct TrialService::Session {
  Session(std::string id_, const DesignParams& params, std::uint64_t seed)
      : id(std::move(id_)), design(params), policy_seed(seed),
        state(new_trial(design)) {}

  json meta() const {
    return json{{"id", id},
                {"params", params_to_json(design.params())},
                {"policy_seed", policy_seed},
                {"created", created},
                {"updated", updated}};
  }

  json view() const {
    json doses = json::array();
    for (int k = 0; k < state.num_doses(); ++k) {
      const DoseCounts& d = state.doses[k];
      doses.push_back({{"level", k + 1},
                       {"n", d.n},
                       {"m", d.m},
                       {"p_hat", d.n > 0 ? json(static_cast<double>(d.m) / d.n)
                                         : json(nullptr)},
                       {"eliminated", static_cast<bool>(state.eliminated[k])}});
    }
    json history = json::array();
    for (std::size_t i = 0; i < state.history.size(); ++i) {
      history.push_back({{"cohort_index", i},
                         {"dose", state.history[i].dose},
                         {"dlt_count", state.history[i].dlt_count}});
    }
    return json{{"id", id},
                {"params", params_to_json(design.params())},
                {"policy_seed", policy_seed},
                {"created", created},
                {"status", std::string(to_string(state.status))},
                {"current_dose", state.current_dose},
                {"k_max", state.k_max},
                {"total_patients", state.total_patients()},
                {"doses", doses},
                {"history", history},
                {"recommendation", recommendation_json(design, state, policy_seed)}};
  }

  std::string id;
  Design design;
  std::uint64_t policy_seed;
  TrialState state;
  std::string created;
  std::string updated;
  mutable std::mutex mu;
};

namespace {

void write_atomically(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << content;
    out.flush();
    if (!out) throw ServiceError(500, "cannot write " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw ServiceError(500, "cannot rename " + tmp.string() + ": " + ec.message());
}

}  // namespace

TrialService::TrialService(fs::path data_dir, Clock clock)
    : data_dir_(std::move(data_dir)), clock_(clock ? std::move(clock) : utc_now) {
  if (!data_dir_.empty()) {
    fs::create_directories(data_dir_);
    load_all();
  }
}

TrialService::~TrialService() = default;

void TrialService::load_all() {
  for (const auto& entry : fs::directory_iterator(data_dir_)) {
    const std::string name = entry.path().filename().string();
    const std::string suffix = kSessionSuffix;
    if (name.size() <= suffix.size() ||
        name.compare(name.size() - suffix.size(), suffix.size(), suffix) != 0) {
      continue;
    }
    std::ifstream in(entry.path());
    const json meta = json::parse(in);
    const std::string id = meta.at("id").get<std::string>();
    auto s = std::make_shared<Session>(id, params_from_json(meta.at("params")),
                                       meta.at("policy_seed").get<std::uint64_t>());
    s->created = meta.at("created").get<std::string>();
    s->updated = meta.at("updated").get<std::string>();
    std::ifstream events(data_dir_ / (id + kEventsSuffix));
    if (events) s->state = replay_events(s->design, read_event_log(events));
    sessions_.emplace(id, std::move(s));
  }
}

std::string TrialService::new_id() {
  std::random_device rd;
  std::uniform_int_distribution<std::uint64_t> dist;
  for (;;) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%016llx%016llx",
                  static_cast<unsigned long long>(dist(rd)),
                  static_cast<unsigned long long>(dist(rd)));
    if (!sessions_.contains(buf)) return buf;
  }
}

std::shared_ptr<TrialService::Session> TrialService::find(const std::string& id) const {
  if (valid_id(id)) {
    std::shared_lock lock(store_mutex_);
    if (auto it = sessions_.find(id); it != sessions_.end()) return it->second;
  }
  throw ServiceError(404, "unknown trial '" + id + "'");
}

json TrialService::create(const json& body) {
  const DesignParams params = params_from_json(body);
  std::uint64_t seed = 0;
  if (body.contains("policy_seed")) {
    const json& ps = body.at("policy_seed");
    if (!ps.is_number_integer() || (!ps.is_number_unsigned() && ps.get<std::int64_t>() < 0)) {
      throw ServiceError(422, "policy_seed must be a non-negative integer");
    }
    seed = body.at("policy_seed").get<std::uint64_t>();
  } else {
    std::random_device rd;
    seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  }

  std::unique_lock lock(store_mutex_);
  auto s = std::make_shared<Session>(new_id(), params, seed);
  s->created = s->updated = clock_();
  if (!data_dir_.empty()) {
    std::ofstream(data_dir_ / (s->id + kEventsSuffix), std::ios::app);
    write_atomically(data_dir_ / (s->id + kSessionSuffix), s->meta().dump(2) + "\n");
  }
  sessions_.emplace(s->id, s);
  std::lock_guard session_lock(s->mu);
  return s->view();
}

json TrialService::view(const std::string& id) const {
  auto s = find(id);
  std::lock_guard lock(s->mu);
  return s->view();
}

json TrialService::post_cohort(const std::string& id, const json& body) {
  auto s = find(id);
  if (!body.is_object() || !body.contains("dlt_count") ||
      !body.at("dlt_count").is_number_integer()) {
    throw ServiceError(422, "body must contain an integer dlt_count");
  }
  const int dlt = body.at("dlt_count").get<int>();

  std::lock_guard lock(s->mu);
  if (s->state.status != TrialStatus::Active) {
    throw ServiceError(409, "trial is " + std::string(to_string(s->state.status)));
  }
  if (dlt < 0 || dlt > s->design.params().cohort_size) {
    throw ServiceError(422, "dlt_count must lie in [0, " +
                                std::to_string(s->design.params().cohort_size) + "]");
  }
  RngStream rng(s->policy_seed, s->state.history.size());
  const int dose = next_dose(s->state, s->design, rng);
  if (body.contains("dose") && body.at("dose") != dose) {
    throw ServiceError(409, "recommended dose is " + std::to_string(dose));
  }
  TrialState next = project_cohort(s->state, s->design, dose, dlt);
  const std::string now = clock_();
  if (!data_dir_.empty()) {
    std::ofstream log(data_dir_ / (id + kEventsSuffix), std::ios::app);
    append_event(log, make_event(next));
    if (!log) throw ServiceError(500, "cannot append to event log of " + id);
    json meta = s->meta();
    meta["updated"] = now;
    write_atomically(data_dir_ / (id + kSessionSuffix), meta.dump(2) + "\n");
  }
  s->state = std::move(next);
  s->updated = now;
  return s->view();
}

json TrialService::recommendation(const std::string& id) const {
  auto s = find(id);
  std::lock_guard lock(s->mu);
  return recommendation_json(s->design, s->state, s->policy_seed);
}

json TrialService::whatif(const std::string& id, std::optional<int> dose) const {
  auto s = find(id);
  std::lock_guard lock(s->mu);
  const TrialState& state = s->state;
  if (state.status != TrialStatus::Active) {
    throw ServiceError(409, "trial is " + std::string(to_string(state.status)));
  }
  int pending = 0;
  if (dose) {
    pending = *dose;
    if (pending < 1 || pending > state.admissible_max() || pending > state.k_max + 1) {
      throw ServiceError(422, "dose " + std::to_string(pending) + " cannot be assigned");
    }
  } else {
    RngStream rng(s->policy_seed, state.history.size());
    pending = next_dose(state, s->design, rng);
  }
  json outcomes = json::array();
  for (int d = 0; d <= s->design.params().cohort_size; ++d) {
    const TrialState after = project_cohort(state, s->design, pending, d);
    const DoseCounts& c = after.doses[pending - 1];
    outcomes.push_back(
        {{"dlt_count", d},
         {"n", c.n},
         {"m", c.m},
         {"status", std::string(to_string(after.status))},
         {"eliminated", eliminated_levels(after)},
         {"recommendation", recommendation_json(s->design, after, s->policy_seed)},
         {"mtd_preview", optional_dose(preview_mtd(after, s->design))}});
  }
  return json{{"cohort_index", state.history.size()},
              {"dose", pending},
              {"outcomes", outcomes}};
}

json TrialService::mtd(const std::string& id) const {
  auto s = find(id);
  std::lock_guard lock(s->mu);
  return json{{"status", std::string(to_string(s->state.status))},
              {"final", s->state.status != TrialStatus::Active},
              {"mtd", optional_dose(preview_mtd(s->state, s->design))}};
}

std::size_t TrialService::size() const {
  std::shared_lock lock(store_mutex_);
  return sessions_.size();
}

}  // namespace dosefind
