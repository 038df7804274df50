#include "dosefind/event_log.hpp"

#include <istream>
#include <ostream>
#include <stdexcept>

#include "json.hpp"

namespace dosefind {

using nlohmann::json;

TrialStatus parse_status(const std::string& s) {
  if (s == "active") return TrialStatus::Active;
  if (s == "completed") return TrialStatus::Completed;
  if (s == "stopped_toxicity") return TrialStatus::StoppedToxicity;
  throw std::runtime_error("unknown trial status '" + s + "'");
}

CohortEvent make_event(const TrialState& state) {
  if (state.history.empty()) {
    throw StateError("no cohort has been recorded");
  }
  CohortEvent e;
  e.cohort_index = static_cast<int>(state.history.size()) - 1;
  e.dose = state.history.back().dose;
  e.dlt_count = state.history.back().dlt_count;
  for (int k = 0; k < state.num_doses(); ++k) {
    if (state.eliminated[k]) e.eliminated_after.push_back(k + 1);
  }
  e.status_after = state.status;
  return e;
}

std::string to_json_line(const CohortEvent& e) {
  json j;
  j["cohort_index"] = e.cohort_index;
  j["dose"] = e.dose;
  j["dlt_count"] = e.dlt_count;
  j["eliminated_after"] = e.eliminated_after;
  j["status_after"] = std::string(to_string(e.status_after));
  return j.dump();
}

CohortEvent parse_event_line(const std::string& line) {
  try {
    const json j = json::parse(line);
    CohortEvent e;
    e.cohort_index = j.at("cohort_index").get<int>();
    e.dose = j.at("dose").get<int>();
    e.dlt_count = j.at("dlt_count").get<int>();
    e.eliminated_after = j.at("eliminated_after").get<std::vector<int>>();
    e.status_after = parse_status(j.at("status_after").get<std::string>());
    return e;
  } catch (const json::exception& ex) {
    throw std::runtime_error(std::string("malformed event line: ") + ex.what());
  }
}

std::vector<CohortEvent> read_event_log(std::istream& in) {
  std::vector<CohortEvent> events;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    events.push_back(parse_event_line(line));
  }
  return events;
}

void append_event(std::ostream& out, const CohortEvent& e) {
  out << to_json_line(e) << '\n';
  out.flush();
}

TrialState replay_events(const Design& design,
                         const std::vector<CohortEvent>& events) {
  TrialState state = new_trial(design);
  for (std::size_t i = 0; i < events.size(); ++i) {
    const CohortEvent& e = events[i];
    if (e.cohort_index != static_cast<int>(i)) {
      throw std::runtime_error("event log out of order at line " +
                               std::to_string(i + 1));
    }
    state = record_cohort(assign_dose(state, e.dose), design,
                          {e.dose, e.dlt_count});
    if (make_event(state) != e) {
      throw std::runtime_error("event log diverges from replay at cohort " +
                               std::to_string(i));
    }
  }
  return state;
}

void write_event_log(std::ostream& out, const Design& design,
                     const TrialState& state) {
  TrialState s = new_trial(design);
  for (const CohortOutcome& c : state.history) {
    s = record_cohort(assign_dose(s, c.dose), design, c);
    append_event(out, make_event(s));
  }
}

}  // namespace dosefind
