#include "saa/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <iomanip>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <thread>

#include "saa/png_io.hpp"
#include "saa/registry.hpp"

namespace saa {

namespace fs = std::filesystem;

ImageArtifacts artifact_paths(const fs::path& output_dir, const std::string& image_id) {
  return {output_dir / (image_id + "_adv.png"), output_dir / (image_id + "_mask.png"),
          output_dir / (image_id + "_layout.json"), output_dir / (image_id + "_trace.jsonl")};
}

ImagePlane load_clean_image(const fs::path& path, int height, int width) {
  ImagePlane image = read_png(path);
  if (image.height() != height || image.width() != width) {
    image = quantize_patch(resize_bilinear(image, height, width));
  }
  return image;
}

namespace {

struct WorkItem {
  std::string image_id;
  fs::path source;
  std::optional<ImagePlane> clean;
  std::optional<AttackResult> result;
  std::string warning;
};

void write_trace(const fs::path& path, const AttackResult& result) {
  std::ofstream out(path);
  for (const PhaseTrace& phase : result.phases) {
    for (const TraceEntry& entry : phase.entries) {
      nlohmann::json line = {{"phase", phase.phase},
                             {"iteration", entry.iteration},
                             {"step", entry.step},
                             {"loss", entry.loss}};
      out << line.dump() << '\n';
    }
  }
}

void process(WorkItem& item, const RunConfig& config, const AttackOptions& options,
             std::span<const DetectorAdapter* const> adapters) {
  try {
    item.clean = load_clean_image(item.source, config.image_height, config.image_width);
  } catch (const ImageIoError& e) {
    item.warning = e.what();
    return;
  }
  const ImagePlane& clean = *item.clean;
  std::vector<Box> boxes;
  for (const Detection& det : adapters.front()->detect(clean)) boxes.push_back(det.box);
  const PatchLayout layout =
      layout_from_detections(boxes, clean.height(), clean.width(),
                             pixel_budget(clean.height(), clean.width(), config.budget_fraction),
                             config.thickness);
  item.result = run_attack(clean, adapters, layout, options);

  const ImageArtifacts paths = artifact_paths(config.output_dir, item.image_id);
  write_png(paths.adversarial_png, item.result->adversarial_image);
  write_mask_png(paths.mask_png, item.result->mask);
  std::ofstream(paths.layout_json) << layout_to_json(layout).dump(2) << '\n';
  write_trace(paths.trace_jsonl, *item.result);
}

}  // namespace

PipelineSummary run_pipeline(const RunConfig& config, std::ostream& log) {
  std::vector<std::unique_ptr<DetectorAdapter>> owned;
  for (const DetectorEntry& entry : config.detectors) {
    owned.push_back(DetectorRegistry::global().create(entry.name, entry.options));
  }
  std::vector<const DetectorAdapter*> adapters;
  for (const auto& adapter : owned) adapters.push_back(adapter.get());
  if (adapters.empty()) throw AdapterError("no detectors configured");

  AttackOptions options;
  options.schedule = StepSchedule(config.schedule);
  options.phases = config.phases;
  options.iteration_cap = config.iteration_cap;

  std::vector<WorkItem> items;
  if (!fs::is_directory(config.input_dir)) {
    throw ImageIoError("input directory not found: " + config.input_dir.string());
  }
  for (const auto& entry : fs::directory_iterator(config.input_dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext != ".png") continue;
    items.push_back({entry.path().stem().string(), entry.path(), {}, {}, {}});
  }
  std::sort(items.begin(), items.end(),
            [](const WorkItem& a, const WorkItem& b) { return a.image_id < b.image_id; });
  fs::create_directories(config.output_dir);

  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr failure;
  auto worker = [&] {
    for (std::size_t i = next++; i < items.size(); i = next++) {
      {
        std::lock_guard lock(error_mutex);
        if (failure) return;
      }
      try {
        process(items[i], config, options, adapters);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  const int workers = std::max(1, std::min<int>(config.workers, static_cast<int>(items.size())));
  {
    std::vector<std::jthread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);

  PipelineSummary summary;
  std::vector<CorpusEntry> entries;
  for (const WorkItem& item : items) {
    if (!item.warning.empty()) {
      log << "warning: skipping " << item.source.string() << ": " << item.warning << '\n';
      summary.skipped_inputs.push_back(item.image_id);
      continue;
    }
    entries.push_back({item.image_id, &*item.clean, &*item.result});
  }
  std::vector<std::string> labels;
  for (const DetectorAdapter* adapter : adapters) labels.push_back(adapter->label());
  summary.report = score_corpus(entries, labels, config.connectivity, config.budget_fraction);

  summary.report_json = config.report_path.empty() ? config.output_dir / "report.json" : config.report_path;
  summary.report_csv = fs::path(summary.report_json).replace_extension(".csv");
  if (summary.report_json.has_parent_path()) fs::create_directories(summary.report_json.parent_path());
  nlohmann::json doc = report_to_json(summary.report);
  doc["seed"] = config.seed;
  doc["unreadable"] = summary.skipped_inputs;
  std::ofstream(summary.report_json) << doc.dump(2) << '\n';
  std::ofstream csv(summary.report_csv);
  write_report_csv(csv, summary.report);
  return summary;
}

}  // namespace saa
