#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "saa/attack.hpp"
#include "saa/components.hpp"
#include "saa/mask_design.hpp"

namespace saa {

struct DetectorEntry {
  std::string name;
  nlohmann::json options = nlohmann::json::object();
};

struct RunConfig {
  std::filesystem::path input_dir;
  std::filesystem::path output_dir;
  std::filesystem::path report_path;  // empty: <output_dir>/report.json
  std::vector<DetectorEntry> detectors;
  double budget_fraction = 0.02;
  int image_height = 500;
  int image_width = 500;
  std::vector<ScheduleTier> schedule = StepSchedule::defaults().tiers();
  PhaseConfig phases;
  int iteration_cap = 0;
  ThicknessPolicy thickness;
  Connectivity connectivity = Connectivity::eight;
  std::uint64_t seed = 0;
  int workers = 1;
};

struct ConfigViolation {
  std::string path;  // JSON pointer of the offending field
  std::string message;
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<ConfigViolation> violations);
  const std::vector<ConfigViolation>& violations() const { return violations_; }

 private:
  std::vector<ConfigViolation> violations_;
};

/// Step sizes are given either as numbers or as "p/q" fraction strings.
std::optional<double> parse_step(const nlohmann::json& value);

/// Checks every field of a config document; an empty result means valid.
std::vector<ConfigViolation> validate_config(const nlohmann::json& doc);

/// Validates, then converts. Throws ConfigError listing every violation.
RunConfig run_config_from_json(const nlohmann::json& doc);

nlohmann::json run_config_to_json(const RunConfig& config);

}  // namespace saa
