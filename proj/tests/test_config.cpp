#include <doctest.h>

#include <algorithm>

#include "saa/config.hpp"

using namespace saa;

namespace {

nlohmann::json minimal() { return {{"input_dir", "in"}, {"output_dir", "out"}}; }

bool has_violation(const nlohmann::json& doc, const std::string& path) {
  const auto violations = validate_config(doc);
  return std::any_of(violations.begin(), violations.end(),
                     [&](const ConfigViolation& v) { return v.path == path; });
}

}  // namespace

TEST_CASE("a minimal config takes the defaults") {
  const RunConfig config = run_config_from_json(minimal());
  CHECK(config.budget_fraction == 0.02);
  CHECK(config.image_height == 500);
  CHECK(config.detectors.size() == 2);
  CHECK(config.detectors[0].name == "toy_one_stage");
  CHECK(config.schedule == StepSchedule::defaults().tiers());
  CHECK(config.phases.phase1_iters == 150);
  CHECK(config.connectivity == Connectivity::eight);
  CHECK(config.workers == 1);
}

TEST_CASE("budget fraction must lie in (0, 1]") {
  auto doc = minimal();
  doc["budget_fraction"] = 0.02;
  CHECK(validate_config(doc).empty());
  doc["budget_fraction"] = 1.0;
  CHECK(validate_config(doc).empty());
  doc["budget_fraction"] = 0.0;
  CHECK(has_violation(doc, "/budget_fraction"));
  doc["budget_fraction"] = 1.5;
  CHECK(has_violation(doc, "/budget_fraction"));
  doc["budget_fraction"] = "2%";
  CHECK(has_violation(doc, "/budget_fraction"));
}

TEST_CASE("schedule steps must be decreasing multiples of 1/255") {
  auto doc = minimal();
  doc["schedule"] = {{{"step", "8/255"}, {"iters", 10}}, {{"step", 2.0 / 255.0}, {"iters", 5}}};
  CHECK(validate_config(doc).empty());
  CHECK(run_config_from_json(doc).schedule[0].step == doctest::Approx(8.0 / 255.0));

  doc["schedule"] = {{{"step", "3/510"}, {"iters", 10}}};
  CHECK(has_violation(doc, "/schedule/0/step"));
  doc["schedule"] = {{{"step", "4/255"}, {"iters", 10}}, {{"step", "4/255"}, {"iters", 10}}};
  CHECK(has_violation(doc, "/schedule/1/step"));
  doc["schedule"] = {{{"step", "4/255"}, {"iters", 0}}};
  CHECK(has_violation(doc, "/schedule/0/iters"));
  doc["schedule"] = {{{"step", "four"}, {"iters", 3}}};
  CHECK(has_violation(doc, "/schedule/0/step"));
  doc["schedule"] = nlohmann::json::array();
  CHECK(has_violation(doc, "/schedule"));
}

TEST_CASE("parse_step accepts numbers and fractions only") {
  CHECK(*parse_step(0.25) == 0.25);
  CHECK(*parse_step("16/255") == doctest::Approx(16.0 / 255.0));
  CHECK(*parse_step("0.5") == 0.5);
  CHECK_FALSE(parse_step("1/0"));
  CHECK_FALSE(parse_step("1/2x"));
  CHECK_FALSE(parse_step(true));
}

TEST_CASE("every violation is reported with its path") {
  nlohmann::json doc = {{"output_dir", ""},
                        {"detectors", {"toy_one_stage", {{"label", "x"}}}},
                        {"image_size", {0, 10}},
                        {"connectivity", 6},
                        {"thickness", {{"thin", 2}}},
                        {"phases", {{"phase1_iters", -1}}},
                        {"seed", -3},
                        {"workers", 0}};
  const auto violations = validate_config(doc);
  for (const char* path : {"/input_dir", "/output_dir", "/detectors/1", "/image_size", "/connectivity",
                           "/thickness/thin", "/phases/phase1_iters", "/seed", "/workers"}) {
    CHECK_MESSAGE(has_violation(doc, path), path);
  }
  CHECK_THROWS_AS(run_config_from_json(doc), ConfigError);
  try {
    run_config_from_json(doc);
  } catch (const ConfigError& e) {
    CHECK(e.violations().size() == violations.size());
  }
  CHECK(has_violation(nlohmann::json::array(), ""));
}

TEST_CASE("config survives a json round trip") {
  auto doc = minimal();
  doc["detectors"] = {"toy_two_stage", {{"name", "toy_one_stage"}, {"label", "Y"}}};
  doc["schedule"] = {{{"step", "8/255"}, {"iters", 3}}};
  doc["phases"] = {{"phase1_iters", 7}, {"iteration_cap", 9}};
  doc["connectivity"] = 4;
  doc["seed"] = 12;
  const RunConfig a = run_config_from_json(doc);
  const RunConfig b = run_config_from_json(run_config_to_json(a));
  CHECK(run_config_to_json(a) == run_config_to_json(b));
  CHECK(b.detectors[1].options["label"] == "Y");
  CHECK(b.iteration_cap == 9);
  CHECK(b.connectivity == Connectivity::four);
  CHECK(b.seed == 12);
}
