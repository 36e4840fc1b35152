#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "saa/detector.hpp"

namespace saa {

using AdapterFactory = std::function<std::unique_ptr<DetectorAdapter>(const nlohmann::json&)>;

/// Named detector backends. The global instance ships with "toy_one_stage"
/// and "toy_two_stage"; heavier backends register themselves at startup.
class DetectorRegistry {
 public:
  static DetectorRegistry& global();

  void add(const std::string& name, AdapterFactory factory);
  bool contains(const std::string& name) const;
  std::vector<std::string> names() const;

  /// Throws AdapterError when no backend is registered under `name` or the
  /// factory rejects its config.
  std::unique_ptr<DetectorAdapter> create(const std::string& name,
                                          const nlohmann::json& config = nlohmann::json::object()) const;

 private:
  mutable std::mutex mutex_;
  std::vector<std::pair<std::string, AdapterFactory>> factories_;
};

}  // namespace saa
