#include "saa/config.hpp"

#include <cmath>
#include <sstream>

namespace saa {

namespace {

std::string describe(const std::vector<ConfigViolation>& violations) {
  std::ostringstream out;
  out << "invalid run config:";
  for (const ConfigViolation& v : violations) out << "\n  " << v.path << ": " << v.message;
  return out.str();
}

class Checker {
 public:
  explicit Checker(const nlohmann::json& doc) : doc_(doc) {}

  void fail(std::string path, std::string message) {
    violations_.push_back({std::move(path), std::move(message)});
  }

  // Returns the field if present with the expected type; records a violation
  // when present with the wrong type.
  const nlohmann::json* field(const nlohmann::json& obj, const std::string& key,
                              const std::string& path, nlohmann::json::value_t type) {
    if (!obj.contains(key)) return nullptr;
    const nlohmann::json& value = obj.at(key);
    const bool ok = type == nlohmann::json::value_t::number_float ? value.is_number()
                    : type == nlohmann::json::value_t::number_integer ? value.is_number_integer()
                                                                       : value.type() == type;
    if (!ok) {
      fail(path, "wrong type");
      return nullptr;
    }
    return &value;
  }

  std::vector<ConfigViolation> run() {
    if (!doc_.is_object()) {
      fail("", "config must be a JSON object");
      return violations_;
    }
    using T = nlohmann::json::value_t;
    for (const char* key : {"input_dir", "output_dir"}) {
      const auto* value = field(doc_, key, std::string("/") + key, T::string);
      if (!doc_.contains(key)) fail(std::string("/") + key, "required");
      else if (value && value->get<std::string>().empty()) fail(std::string("/") + key, "must not be empty");
    }
    field(doc_, "report", "/report", T::string);

    if (doc_.contains("detectors")) {
      const auto& dets = doc_.at("detectors");
      if (!dets.is_array()) {
        fail("/detectors", "must be an array");
      } else {
        if (dets.empty()) fail("/detectors", "at least one detector is required");
        for (std::size_t i = 0; i < dets.size(); ++i) {
          const std::string path = "/detectors/" + std::to_string(i);
          if (dets[i].is_string()) continue;
          if (!dets[i].is_object() || !dets[i].contains("name") || !dets[i].at("name").is_string()) {
            fail(path, "must be a name or an object with a string \"name\"");
            continue;
          }
          for (const char* key : {"score_threshold", "nms_threshold"}) {
            if (const auto* v = field(dets[i], key, path + "/" + key, T::number_float)) {
              const double t = v->get<double>();
              if (!(t >= 0.0 && t <= 1.0)) fail(path + "/" + key, "must lie in [0,1]");
            }
          }
        }
      }
    }

    if (const auto* v = field(doc_, "budget_fraction", "/budget_fraction", T::number_float)) {
      const double f = v->get<double>();
      if (!(f > 0.0 && f <= 1.0)) fail("/budget_fraction", "must lie in (0, 1]");
    }

    if (doc_.contains("image_size")) {
      const auto& size = doc_.at("image_size");
      if (!size.is_array() || size.size() != 2 || !size[0].is_number_integer() ||
          !size[1].is_number_integer() || size[0].get<int>() < 1 || size[1].get<int>() < 1) {
        fail("/image_size", "must be [height, width] with positive integers");
      }
    }

    check_schedule();

    if (const auto* phases = field(doc_, "phases", "/phases", T::object)) {
      for (const char* key : {"phase1_iters", "iteration_cap"}) {
        if (const auto* v = field(*phases, key, std::string("/phases/") + key, T::number_integer)) {
          if (v->get<long>() < 0) fail(std::string("/phases/") + key, "must be >= 0");
        }
      }
    }

    if (const auto* thickness = field(doc_, "thickness", "/thickness", T::object)) {
      for (const char* key : {"thick", "medium", "thin"}) {
        if (const auto* v = field(*thickness, key, std::string("/thickness/") + key, T::number_integer)) {
          const long t = v->get<long>();
          if (t < 1 || t % 2 == 0) fail(std::string("/thickness/") + key, "must be odd and >= 1");
        }
      }
      for (const char* key : {"thick_max_objects", "medium_max_objects"}) {
        if (const auto* v = field(*thickness, key, std::string("/thickness/") + key, T::number_integer)) {
          if (v->get<long>() < 0) fail(std::string("/thickness/") + key, "must be >= 0");
        }
      }
      const long thick_max = thickness->value("thick_max_objects", 2L);
      const long medium_max = thickness->value("medium_max_objects", 5L);
      if (medium_max < thick_max) fail("/thickness/medium_max_objects", "must be >= thick_max_objects");
    }

    if (const auto* v = field(doc_, "connectivity", "/connectivity", T::number_integer)) {
      const long c = v->get<long>();
      if (c != 4 && c != 8) fail("/connectivity", "must be 4 or 8");
    }
    if (doc_.contains("seed")) {
      const auto& seed = doc_.at("seed");
      if (!seed.is_number_integer()) fail("/seed", "wrong type");
      else if (seed.is_number_integer() && !seed.is_number_unsigned() && seed.get<long long>() < 0) fail("/seed", "must be >= 0");
    }
    if (const auto* v = field(doc_, "workers", "/workers", T::number_integer)) {
      if (v->get<long>() < 1) fail("/workers", "must be >= 1");
    }
    return violations_;
  }

 private:
  void check_schedule() {
    if (!doc_.contains("schedule")) return;
    const auto& tiers = doc_.at("schedule");
    if (!tiers.is_array() || tiers.empty()) {
      fail("/schedule", "must be a non-empty array of tiers");
      return;
    }
    double previous = INFINITY;
    for (std::size_t i = 0; i < tiers.size(); ++i) {
      const std::string path = "/schedule/" + std::to_string(i);
      const auto& tier = tiers[i];
      if (!tier.is_object()) {
        fail(path, "must be an object {step, iters}");
        continue;
      }
      if (!tier.contains("step")) {
        fail(path + "/step", "required");
      } else if (const auto step = parse_step(tier.at("step")); !step) {
        fail(path + "/step", "must be a number or a \"p/q\" fraction");
      } else {
        if (!is_lattice_step(*step)) fail(path + "/step", "not a positive integer multiple of 1/255");
        if (!(*step < previous)) fail(path + "/step", "steps must strictly decrease");
        previous = *step;
      }
      if (!tier.contains("iters") || !tier.at("iters").is_number_integer() ||
          tier.at("iters").get<long>() < 1) {
        fail(path + "/iters", "must be a positive integer");
      }
    }
  }

  const nlohmann::json& doc_;
  std::vector<ConfigViolation> violations_;
};

}  // namespace

ConfigError::ConfigError(std::vector<ConfigViolation> violations)
    : std::runtime_error(describe(violations)), violations_(std::move(violations)) {}

std::optional<double> parse_step(const nlohmann::json& value) {
  if (value.is_number()) return value.get<double>();
  if (!value.is_string()) return std::nullopt;
  const std::string text = value.get<std::string>();
  const auto slash = text.find('/');
  try {
    if (slash == std::string::npos) return std::stod(text);
    std::size_t used = 0;
    const double num = std::stod(text.substr(0, slash), &used);
    if (used != slash) return std::nullopt;
    const std::string den_text = text.substr(slash + 1);
    const double den = std::stod(den_text, &used);
    if (used != den_text.size() || den == 0.0) return std::nullopt;
    return num / den;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

std::vector<ConfigViolation> validate_config(const nlohmann::json& doc) {
  return Checker(doc).run();
}

RunConfig run_config_from_json(const nlohmann::json& doc) {
  if (auto violations = validate_config(doc); !violations.empty()) {
    throw ConfigError(std::move(violations));
  }
  RunConfig config;
  config.input_dir = doc.at("input_dir").get<std::string>();
  config.output_dir = doc.at("output_dir").get<std::string>();
  config.report_path = doc.value("report", std::string{});
  if (doc.contains("detectors")) {
    for (const auto& item : doc.at("detectors")) {
      if (item.is_string()) {
        config.detectors.push_back({item.get<std::string>(), nlohmann::json::object()});
      } else {
        config.detectors.push_back({item.at("name").get<std::string>(), item});
      }
    }
  } else {
    config.detectors = {{"toy_one_stage", nlohmann::json::object()},
                        {"toy_two_stage", nlohmann::json::object()}};
  }
  config.budget_fraction = doc.value("budget_fraction", config.budget_fraction);
  if (doc.contains("image_size")) {
    config.image_height = doc.at("image_size").at(0).get<int>();
    config.image_width = doc.at("image_size").at(1).get<int>();
  }
  if (doc.contains("schedule")) {
    config.schedule.clear();
    for (const auto& tier : doc.at("schedule")) {
      config.schedule.push_back({*parse_step(tier.at("step")), tier.at("iters").get<int>()});
    }
  }
  if (doc.contains("phases")) {
    const auto& phases = doc.at("phases");
    config.phases.phase1_iters = phases.value("phase1_iters", config.phases.phase1_iters);
    config.iteration_cap = phases.value("iteration_cap", config.iteration_cap);
  }
  if (doc.contains("thickness")) {
    const auto& t = doc.at("thickness");
    config.thickness.thick = t.value("thick", config.thickness.thick);
    config.thickness.medium = t.value("medium", config.thickness.medium);
    config.thickness.thin = t.value("thin", config.thickness.thin);
    config.thickness.thick_max_objects = t.value("thick_max_objects", config.thickness.thick_max_objects);
    config.thickness.medium_max_objects = t.value("medium_max_objects", config.thickness.medium_max_objects);
  }
  config.connectivity = doc.value("connectivity", 8) == 4 ? Connectivity::four : Connectivity::eight;
  config.seed = doc.value("seed", std::uint64_t{0});
  config.workers = doc.value("workers", 1);
  return config;
}

nlohmann::json run_config_to_json(const RunConfig& config) {
  nlohmann::json detectors = nlohmann::json::array();
  for (const DetectorEntry& entry : config.detectors) {
    nlohmann::json item = entry.options.is_object() ? entry.options : nlohmann::json::object();
    item["name"] = entry.name;
    detectors.push_back(item);
  }
  nlohmann::json schedule = nlohmann::json::array();
  for (const ScheduleTier& tier : config.schedule) {
    schedule.push_back({{"step", std::to_string(std::lround(tier.step * 255.0)) + "/255"},
                        {"iters", tier.max_iters}});
  }
  nlohmann::json doc = {
      {"input_dir", config.input_dir.string()},
      {"output_dir", config.output_dir.string()},
      {"detectors", detectors},
      {"budget_fraction", config.budget_fraction},
      {"image_size", {config.image_height, config.image_width}},
      {"schedule", schedule},
      {"phases", {{"phase1_iters", config.phases.phase1_iters}, {"iteration_cap", config.iteration_cap}}},
      {"thickness",
       {{"thick", config.thickness.thick},
        {"medium", config.thickness.medium},
        {"thin", config.thickness.thin},
        {"thick_max_objects", config.thickness.thick_max_objects},
        {"medium_max_objects", config.thickness.medium_max_objects}}},
      {"connectivity", static_cast<int>(config.connectivity)},
      {"seed", config.seed},
      {"workers", config.workers}};
  if (!config.report_path.empty()) doc["report"] = config.report_path.string();
  return doc;
}

}  // namespace saa
