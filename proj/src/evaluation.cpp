#include "saa/evaluation.hpp"

#include <algorithm>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "saa/mask_design.hpp"

namespace saa {

EvasionScore evasion_score(const EvasionScoreInput& input) {
  if (input.clean_boxes < 0 || input.adv_boxes < 0) {
    throw std::invalid_argument("box counts must be non-negative");
  }
  if (input.pixel_budget_denominator <= 0) {
    throw std::invalid_argument("pixel budget denominator must be positive");
  }
  const long perturbed =
      std::accumulate(input.component_sizes.begin(), input.component_sizes.end(), 0L);
  if (perturbed > input.pixel_budget_denominator) {
    throw std::invalid_argument("perturbed pixels exceed the budget denominator");
  }
  if (input.clean_boxes == 0) return {0.0, true};
  const double pixel_term = 2.0 - static_cast<double>(perturbed) / input.pixel_budget_denominator;
  const double erased = 1.0 - static_cast<double>(std::min(input.clean_boxes, input.adv_boxes)) /
                                  input.clean_boxes;
  return {pixel_term * erased, false};
}

BinaryMask difference_mask(const ImagePlane& clean, const ImagePlane& adversarial) {
  if (!clean.same_shape(adversarial)) throw DimensionError("difference of mismatched images");
  BinaryMask mask(clean.height(), clean.width());
  for (int r = 0; r < clean.height(); ++r) {
    for (int c = 0; c < clean.width(); ++c) {
      for (int ch = 0; ch < clean.channels(); ++ch) {
        if (clean.at(r, c, ch) != adversarial.at(r, c, ch)) {
          mask.set(r, c, true);
          break;
        }
      }
    }
  }
  return mask;
}

CorpusReport score_corpus(std::span<const CorpusEntry> entries,
                          std::span<const std::string> detector_labels, Connectivity connectivity,
                          double budget_fraction) {
  CorpusReport report;
  report.detectors.assign(detector_labels.begin(), detector_labels.end());
  report.totals.assign(report.detectors.size(), 0.0);
  for (const CorpusEntry& entry : entries) {
    if (entry.clean == nullptr || entry.result == nullptr) {
      report.skipped.push_back(entry.image_id);
      continue;
    }
    const ImagePlane& clean = *entry.clean;
    const AttackResult& result = *entry.result;
    const ComponentReport components =
        connected_components(difference_mask(clean, result.adversarial_image), connectivity);
    ImageRow row;
    row.image_id = entry.image_id;
    row.perturbed_pixels = components.total;
    row.component_sizes = components.component_sizes;
    const long denominator = pixel_budget(clean.height(), clean.width(), budget_fraction);
    for (std::size_t d = 0; d < report.detectors.size(); ++d) {
      auto outcome = std::find_if(result.detectors.begin(), result.detectors.end(),
                                  [&](const DetectorOutcome& o) {
                                    return o.label == report.detectors[d] || o.name == report.detectors[d];
                                  });
      if (outcome == result.detectors.end()) {
        throw std::invalid_argument("attack result has no outcome for detector " + report.detectors[d]);
      }
      const EvasionScore score = evasion_score(
          {outcome->boxes_before, outcome->boxes_after, components.component_sizes, denominator});
      row.cells.push_back({score.value, outcome->boxes_before, outcome->boxes_after, score.no_object});
      report.totals[d] += score.value;
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

void write_report_csv(std::ostream& out, const CorpusReport& report) {
  out << std::setprecision(10);
  out << "image_id,perturbed_pixels,components";
  for (const std::string& name : report.detectors) {
    out << ',' << name << "_score," << name << "_boxes_before," << name << "_boxes_after,"
        << name << "_no_object";
  }
  out << '\n';
  for (const ImageRow& row : report.rows) {
    out << row.image_id << ',' << row.perturbed_pixels << ',' << row.component_sizes.size();
    for (const DetectorCell& cell : row.cells) {
      out << ',' << cell.score << ',' << cell.boxes_before << ',' << cell.boxes_after << ','
          << (cell.no_object ? 1 : 0);
    }
    out << '\n';
  }
}

nlohmann::json report_to_json(const CorpusReport& report) {
  nlohmann::json table = nlohmann::json::array();
  for (std::size_t d = 0; d < report.detectors.size(); ++d) {
    table.push_back({{"detector", report.detectors[d]}, {"evasion_score", report.totals[d]}});
  }
  return {{"images", report.rows.size()},
          {"evasion_scores", table},
          {"skipped", report.skipped}};
}

}  // namespace saa
