#pragma once

#include <functional>
#include <memory>
#include <string>

#include "dosefind/service.hpp"

namespace dosefind {

/// JSON-over-HTTP front end for TrialService:
///   POST /trials                         create
///   GET  /trials/{id}                    session view
///   POST /trials/{id}/cohorts            record {"dlt_count": d}
///   GET  /trials/{id}/recommendation
///   GET  /trials/{id}/whatif[?dose=k]
///   GET  /trials/{id}/mtd
class HttpFrontend {
 public:
  using Logger = std::function<void(const std::string&)>;

  explicit HttpFrontend(TrialService& service, Logger log = nullptr);
  ~HttpFrontend();

  /// Binds and serves until stop(); returns false if binding fails.
  bool listen(const std::string& host, int port);
  /// Binds to a free port and returns it (or -1); call serve() afterwards.
  int bind_any(const std::string& host);
  bool serve();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace dosefind
