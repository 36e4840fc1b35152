#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "saa/config.hpp"
#include "saa/evaluation.hpp"

namespace saa {

/// Files written for one input image.
struct ImageArtifacts {
  std::filesystem::path adversarial_png;
  std::filesystem::path mask_png;
  std::filesystem::path layout_json;
  std::filesystem::path trace_jsonl;
};

ImageArtifacts artifact_paths(const std::filesystem::path& output_dir, const std::string& image_id);

struct PipelineSummary {
  CorpusReport report;
  std::vector<std::string> skipped_inputs;  // unreadable files
  std::filesystem::path report_json;
  std::filesystem::path report_csv;
};

/// Loads an input image the way the pipeline does: decode, bilinear resize to
/// the configured size, snap to the 8-bit lattice.
ImagePlane load_clean_image(const std::filesystem::path& path, int height, int width);

/// For every *.png in the input directory (sorted by name): resize, detect on
/// the first configured detector, lay out crosses, attack the whole
/// ensemble, write artifacts, and finally the score report.
///
/// Throws AdapterError before touching any image if a detector cannot be
/// built; unreadable images are skipped with a warning on `log`.
PipelineSummary run_pipeline(const RunConfig& config, std::ostream& log);

}  // namespace saa
