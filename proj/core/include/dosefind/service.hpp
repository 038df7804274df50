#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>

#include "dosefind/trial.hpp"
#include "json.hpp"

namespace dosefind {

/// Request failure carrying an HTTP status (400, 404, 409, 422, 500).
class ServiceError : public std::runtime_error {
 public:
  ServiceError(int status, const std::string& message)
      : std::runtime_error(message), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

nlohmann::json params_to_json(const DesignParams& p);

/// Accepts either a "design" label ("boin-ts-eps:0.05") or explicit "family"
/// and "policy" fields, plus optional numeric overrides. Missing fields take
/// DesignParams defaults. Throws ServiceError(422) on invalid values.
DesignParams params_from_json(const nlohmann::json& j);

/// Live trial sessions, persisted under a data directory as
///   <id>.session.json   parameters, policy seed, timestamps
///   <id>.events.jsonl   append-only cohort event log
/// With an empty data directory sessions live in memory only.
///
/// Thompson-sampling recommendations for the pending cohort are drawn from
/// RngStream(policy_seed, cohort_index), so they are stable across refreshes
/// and restarts.
class TrialService {
 public:
  using Clock = std::function<std::string()>;

  explicit TrialService(std::filesystem::path data_dir = {},
                        Clock clock = nullptr);
  ~TrialService();
  TrialService(const TrialService&) = delete;
  TrialService& operator=(const TrialService&) = delete;

  /// Body: design parameters (see params_from_json) and optional
  /// "policy_seed". Returns the session view.
  nlohmann::json create(const nlohmann::json& body);

  nlohmann::json view(const std::string& id) const;

  /// Records the pending cohort at the recommended dose. An optional "dose"
  /// in the body must match the recommendation (409 otherwise).
  nlohmann::json post_cohort(const std::string& id, const nlohmann::json& body);

  nlohmann::json recommendation(const std::string& id) const;

  /// One projection per possible DLT count of the pending cohort. `dose`
  /// overrides the pending dose (it must be assignable).
  nlohmann::json whatif(const std::string& id,
                        std::optional<int> dose = std::nullopt) const;

  /// MTD under the final-selection rule applied to the current data.
  nlohmann::json mtd(const std::string& id) const;

  std::size_t size() const;

  const std::filesystem::path& data_dir() const { return data_dir_; }

 private:
  struct Session;

  std::shared_ptr<Session> find(const std::string& id) const;
  void load_all();
  std::string new_id();

  std::filesystem::path data_dir_;
  Clock clock_;
  mutable std::shared_mutex store_mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
};

}  // namespace dosefind
