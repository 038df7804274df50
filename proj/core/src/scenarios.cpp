#include "dosefind/scenarios.hpp"

#include <fstream>

#include "dosefind/trial.hpp"
#include "json.hpp"

namespace dosefind {

void Scenario::validate() const {
  if (true_tox.empty()) {
    throw ConfigError("scenario '" + name + "' has no doses");
  }
  for (double t : true_tox) {
    if (!(t >= 0.0 && t <= 1.0)) {
      throw ConfigError("scenario '" + name + "' has a rate outside [0, 1]");
    }
  }
  if (true_mtd < 1 || true_mtd > static_cast<int>(true_tox.size())) {
    throw ConfigError("scenario '" + name + "' has an MTD outside 1..K");
  }
}

std::vector<Scenario> builtin_scenarios() {
  return {
      {"S1", {0.05, 0.06, 0.08, 0.11, 0.19, 0.32}, 6},
      {"S2", {0.06, 0.08, 0.12, 0.18, 0.30, 0.41}, 5},
      {"S3", {0.05, 0.10, 0.20, 0.29, 0.50, 0.70}, 4},
      {"S4", {0.08, 0.15, 0.29, 0.43, 0.50, 0.57}, 3},
      {"S5", {0.13, 0.28, 0.41, 0.50, 0.60, 0.70}, 2},
      {"S6", {0.28, 0.42, 0.49, 0.61, 0.76, 0.87}, 1},
  };
}

std::vector<Scenario> parse_scenarios(std::istream& in) {
  std::vector<Scenario> out;
  try {
    const nlohmann::json j = nlohmann::json::parse(in);
    if (!j.is_array()) throw ConfigError("scenario file must hold a JSON array");
    for (const auto& item : j) {
      Scenario s;
      s.name = item.at("name").get<std::string>();
      s.true_tox = item.at("true_tox").get<std::vector<double>>();
      s.true_mtd = item.at("true_mtd").get<int>();
      s.validate();
      out.push_back(std::move(s));
    }
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError(std::string("malformed scenario file: ") + ex.what());
  }
  return out;
}

std::vector<Scenario> load_scenarios(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
  return parse_scenarios(in);
}

}  // namespace dosefind
