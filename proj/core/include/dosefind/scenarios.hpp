#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dosefind {

struct Scenario {
  std::string name;
  std::vector<double> true_tox;
  int true_mtd = 1;  // 1-based

  /// Throws ConfigError on out-of-range rates or MTD.
  void validate() const;
};

/// The six reference scenarios (K = 6, target 0.30).
std::vector<Scenario> builtin_scenarios();

/// JSON array of {name, true_tox[], true_mtd}.
std::vector<Scenario> parse_scenarios(std::istream& in);
std::vector<Scenario> load_scenarios(const std::string& path);

}  // namespace dosefind
