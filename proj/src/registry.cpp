#include "saa/registry.hpp"

#include <algorithm>

#include "saa/toy_detectors.hpp"

namespace saa {

namespace {

ToyDetectorConfig toy_config_from_json(const nlohmann::json& doc) {
  ToyDetectorConfig config;
  if (doc.is_null()) return config;
  config.label = doc.value("label", std::string{});
  if (doc.contains("native_size")) {
    config.native_height = doc.at("native_size").at(0).get<int>();
    config.native_width = doc.at("native_size").at(1).get<int>();
  }
  config.score_threshold = doc.value("score_threshold", config.score_threshold);
  config.nms_threshold = doc.value("nms_threshold", config.nms_threshold);
  return config;
}

}  // namespace

DetectorRegistry& DetectorRegistry::global() {
  static DetectorRegistry* registry = [] {
    auto* r = new DetectorRegistry;
    r->add("toy_one_stage", [](const nlohmann::json& doc) {
      return make_toy_one_stage(toy_config_from_json(doc));
    });
    r->add("toy_two_stage", [](const nlohmann::json& doc) {
      return make_toy_two_stage(toy_config_from_json(doc));
    });
    return r;
  }();
  return *registry;
}

void DetectorRegistry::add(const std::string& name, AdapterFactory factory) {
  std::lock_guard lock(mutex_);
  auto it = std::find_if(factories_.begin(), factories_.end(),
                         [&](const auto& entry) { return entry.first == name; });
  if (it != factories_.end()) {
    it->second = std::move(factory);
  } else {
    factories_.emplace_back(name, std::move(factory));
  }
}

bool DetectorRegistry::contains(const std::string& name) const {
  std::lock_guard lock(mutex_);
  return std::any_of(factories_.begin(), factories_.end(),
                     [&](const auto& entry) { return entry.first == name; });
}

std::vector<std::string> DetectorRegistry::names() const {
  std::lock_guard lock(mutex_);
  std::vector<std::string> out;
  for (const auto& entry : factories_) out.push_back(entry.first);
  return out;
}

std::unique_ptr<DetectorAdapter> DetectorRegistry::create(const std::string& name,
                                                          const nlohmann::json& config) const {
  AdapterFactory factory;
  {
    std::lock_guard lock(mutex_);
    auto it = std::find_if(factories_.begin(), factories_.end(),
                           [&](const auto& entry) { return entry.first == name; });
    if (it == factories_.end()) throw AdapterError("no detector backend registered as '" + name + "'");
    factory = it->second;
  }
  try {
    return factory(config);
  } catch (const AdapterError&) {
    throw;
  } catch (const std::exception& e) {
    throw AdapterError("cannot construct detector '" + name + "': " + e.what());
  }
}

}  // namespace saa
