#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "saa/attack.hpp"
#include "saa/components.hpp"
#include "saa/imaging.hpp"

namespace saa {

struct EvasionScoreInput {
  int clean_boxes = 0;
  int adv_boxes = 0;
  std::vector<long> component_sizes;
  long pixel_budget_denominator = 5000;
};

struct EvasionScore {
  double value = 0.0;
  /// Clean image had no detections; the score is pinned to 0.
  bool no_object = false;
};

/// (2 - sum(R_k) / denominator) * (1 - min(B(x), B(x')) / B(x)).
/// Throws std::invalid_argument on negative counts, a non-positive
/// denominator, or a perturbation larger than the denominator.
EvasionScore evasion_score(const EvasionScoreInput& input);

/// 1 wherever any channel of `adversarial` differs from `clean`.
BinaryMask difference_mask(const ImagePlane& clean, const ImagePlane& adversarial);

struct CorpusEntry {
  std::string image_id;
  const ImagePlane* clean = nullptr;
  const AttackResult* result = nullptr;
};

struct DetectorCell {
  double score = 0.0;
  int boxes_before = 0;
  int boxes_after = 0;
  bool no_object = false;
};

struct ImageRow {
  std::string image_id;
  long perturbed_pixels = 0;
  std::vector<long> component_sizes;
  std::vector<DetectorCell> cells;  // one per detector, in report order
};

struct CorpusReport {
  std::vector<std::string> detectors;
  std::vector<double> totals;
  std::vector<ImageRow> rows;
  std::vector<std::string> skipped;  // ids of entries missing their pairing
};

/// Scores every (clean, result) pair against each detector label, using the
/// connected components of the realized difference mask for sum(R_k).
CorpusReport score_corpus(std::span<const CorpusEntry> entries,
                          std::span<const std::string> detector_labels,
                          Connectivity connectivity = Connectivity::eight,
                          double budget_fraction = 0.02);

void write_report_csv(std::ostream& out, const CorpusReport& report);
nlohmann::json report_to_json(const CorpusReport& report);

}  // namespace saa
