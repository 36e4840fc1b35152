// Command-line driver: sparse-patch evasion runs over a directory of PNGs,
// plus helpers to synthesize toy scenes and audit emitted artifacts.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "saa/config.hpp"
#include "saa/detector.hpp"
#include "saa/evaluation.hpp"
#include "saa/mask_design.hpp"
#include "saa/pipeline.hpp"
#include "saa/png_io.hpp"
#include "saa/synthetic.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

std::vector<std::string> split_names(const std::string& text) {
  std::vector<std::string> names;
  std::stringstream stream(text);
  for (std::string item; std::getline(stream, item, ',');) {
    if (!item.empty()) names.push_back(item);
  }
  return names;
}

int synthesize(const fs::path& output, int count, int height, int width, int max_objects,
               std::uint64_t seed) {
  fs::create_directories(output);
  for (int i = 0; i < count; ++i) {
    const int objects = 1 + static_cast<int>((seed + i) % max_objects);
    const auto scene = saa::make_synthetic_scene(height, width, objects, seed + i);
    std::ostringstream name;
    name << "scene_" << std::setw(4) << std::setfill('0') << i << ".png";
    saa::write_png(output / name.str(), scene.image);
  }
  std::cout << "wrote " << count << " scenes to " << output.string() << '\n';
  return kExitOk;
}

// Recounts changed pixels of every *_adv.png against its source image.
int audit(const fs::path& input, const fs::path& output, int height, int width, double fraction) {
  const long budget = saa::pixel_budget(height, width, fraction);
  int checked = 0;
  int violations = 0;
  for (const auto& entry : fs::directory_iterator(input)) {
    if (entry.path().extension() != ".png") continue;
    const std::string id = entry.path().stem().string();
    const fs::path adv = saa::artifact_paths(output, id).adversarial_png;
    if (!fs::exists(adv)) continue;
    const saa::ImagePlane clean = saa::load_clean_image(entry.path(), height, width);
    const long changed = saa::difference_mask(clean, saa::read_png(adv)).popcount();
    ++checked;
    if (changed > budget) {
      ++violations;
      std::cout << "VIOLATION " << id << ": " << changed << " > " << budget << '\n';
    }
  }
  std::cout << "audited " << checked << " images, " << violations << " over budget\n";
  return violations == 0 ? kExitOk : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse cruciform-patch evasion attacks on object detectors"};
  app.require_subcommand(0, 1);

  std::string config_path;
  std::string input_dir;
  std::string output_dir;
  std::string detectors;
  std::string report_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> budget;
  std::optional<int> workers;
  app.add_option("--config", config_path, "JSON run config")->check(CLI::ExistingFile);
  app.add_option("--input", input_dir, "directory of input PNGs");
  app.add_option("--output", output_dir, "directory for artifacts");
  app.add_option("--detectors", detectors, "comma-separated detector names");
  app.add_option("--seed", seed, "run seed");
  app.add_option("--budget", budget, "perturbable fraction of pixels");
  app.add_option("--report", report_path, "report JSON path (CSV is written alongside)");
  app.add_option("--workers", workers, "images processed in parallel");

  auto* synth = app.add_subcommand("synth", "write synthetic toy-detector scenes");
  std::string synth_out;
  int synth_count = 10;
  int synth_size = 500;
  int synth_objects = 3;
  std::uint64_t synth_seed = 0;
  synth->add_option("--output", synth_out, "destination directory")->required();
  synth->add_option("--count", synth_count, "number of scenes");
  synth->add_option("--size", synth_size, "square image side");
  synth->add_option("--max-objects", synth_objects, "objects per scene cycle 1..N");
  synth->add_option("--seed", synth_seed, "scene seed");

  auto* audit_cmd = app.add_subcommand("audit", "check emitted adversarial PNGs against the l0 budget");
  std::string audit_in;
  std::string audit_out;
  int audit_size = 500;
  double audit_budget = 0.02;
  audit_cmd->add_option("--input", audit_in, "clean input directory")->required();
  audit_cmd->add_option("--output", audit_out, "artifact directory")->required();
  audit_cmd->add_option("--size", audit_size, "square working size");
  audit_cmd->add_option("--budget", audit_budget, "perturbable fraction of pixels");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (synth->parsed()) {
      return synthesize(synth_out, synth_count, synth_size, synth_size, std::max(1, synth_objects),
                        synth_seed);
    }
    if (audit_cmd->parsed()) {
      return audit(audit_in, audit_out, audit_size, audit_size, audit_budget);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }

  nlohmann::json doc = nlohmann::json::object();
  if (!config_path.empty()) {
    try {
      std::ifstream in(config_path);
      doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      std::cerr << "error: cannot parse " << config_path << ": " << e.what() << '\n';
      return kExitConfig;
    }
  }
  if (doc.is_object()) {
    if (!input_dir.empty()) doc["input_dir"] = input_dir;
    if (!output_dir.empty()) doc["output_dir"] = output_dir;
    if (!report_path.empty()) doc["report"] = report_path;
    if (!detectors.empty()) doc["detectors"] = split_names(detectors);
    if (seed) doc["seed"] = *seed;
    if (budget) doc["budget_fraction"] = *budget;
    if (workers) doc["workers"] = *workers;
  }

  saa::RunConfig config;
  try {
    config = saa::run_config_from_json(doc);
  } catch (const saa::ConfigError& e) {
    std::cerr << e.what() << '\n';
    return kExitConfig;
  }

  try {
    const saa::PipelineSummary summary = saa::run_pipeline(config, std::cerr);
    for (std::size_t d = 0; d < summary.report.detectors.size(); ++d) {
      std::cout << summary.report.detectors[d] << "\t" << summary.report.totals[d] << '\n';
    }
    std::cout << "report: " << summary.report_json.string() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}
