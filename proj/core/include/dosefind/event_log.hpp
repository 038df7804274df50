#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dosefind/trial.hpp"

namespace dosefind {

/// One line of the append-only trial event log.
struct CohortEvent {
  int cohort_index = 0;  // 0-based
  int dose = 0;
  int dlt_count = 0;
  std::vector<int> eliminated_after;  // eliminated dose levels, ascending
  TrialStatus status_after = TrialStatus::Active;

  friend bool operator==(const CohortEvent&, const CohortEvent&) = default;
};

/// Event describing the last cohort recorded in `state`.
CohortEvent make_event(const TrialState& state);

/// Serializes to a single JSON object without a trailing newline.
std::string to_json_line(const CohortEvent& e);

/// Parses one log line; throws std::runtime_error on malformed input.
CohortEvent parse_event_line(const std::string& line);

/// Reads every non-empty line of a log.
std::vector<CohortEvent> read_event_log(std::istream& in);

/// Writes one event as a line and flushes.
void append_event(std::ostream& out, const CohortEvent& e);

/// Replays a log, verifying that each event's recorded aftermath matches the
/// recomputed state. Throws std::runtime_error on divergence.
TrialState replay_events(const Design& design,
                         const std::vector<CohortEvent>& events);

/// Writes the whole history of `state` as a log.
void write_event_log(std::ostream& out, const Design& design,
                     const TrialState& state);

TrialStatus parse_status(const std::string& s);

}  // namespace dosefind
