#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "saa/detector.hpp"
#include "saa/imaging.hpp"
#include "saa/losses.hpp"
#include "saa/mask_design.hpp"

namespace saa {

/// True when `step` is a positive integer multiple of 1/255.
bool is_lattice_step(double step);

struct ScheduleTier {
  double step = 0.0;
  int max_iters = 0;

  bool operator==(const ScheduleTier&) const = default;
};

/// Coarse-to-fine step sizes. Steps are strictly decreasing positive
/// multiples of 1/255, so signed updates keep pixels on the 8-bit lattice.
class StepSchedule {
 public:
  /// Throws std::invalid_argument if the tiers break the invariants above.
  explicit StepSchedule(std::vector<ScheduleTier> tiers);

  /// 16/255 for 100 iterations, 4/255 for 150, 1/255 for 250.
  static StepSchedule defaults();

  const std::vector<ScheduleTier>& tiers() const { return tiers_; }
  int total_iters() const;

 private:
  std::vector<ScheduleTier> tiers_;
};

/// Two-stage scheduling: phase 1 targets the single strongest proposal; if
/// detections survive phase1_iters, phase 2 targets the mean of per-box
/// maxima, continuing from the phase-1 patch with the schedule restarted.
struct PhaseConfig {
  LossWeights phase1{1.0, 0.0};
  LossWeights phase2{0.0, 1.0};
  int phase1_iters = 150;

  void validate() const;
};

struct IterationState {
  int phase = 0;
  int iteration = 0;  // wall iteration just completed
  double step = 0.0;
  double loss = 0.0;
  const ImagePlane& adversarial;
};

struct AttackOptions {
  StepSchedule schedule = StepSchedule::defaults();
  PhaseConfig phases;
  /// Upper bound on wall iterations across both phases; 0 means the
  /// schedule's total.
  int iteration_cap = 0;
  /// Stop once every adapter reports zero detections. Turning this off runs
  /// the full schedule, which is useful when comparing final losses.
  bool stop_on_success = true;
  /// Called after every update.
  std::function<void(const IterationState&)> observer;
};

struct TraceEntry {
  int iteration = 0;
  double step = 0.0;
  double loss = 0.0;
};

struct PhaseTrace {
  int phase = 0;
  LossWeights weights;
  std::vector<TraceEntry> entries;
};

struct DetectorOutcome {
  std::string name;
  std::string label;
  int boxes_before = 0;
  int boxes_after = 0;
  bool success = false;
};

struct AttackResult {
  ImagePlane adversarial_image;
  BinaryMask mask;
  std::vector<PhaseTrace> phases;
  std::vector<DetectorOutcome> detectors;
  bool success = false;
  int wall_iterations = 0;
  /// Phase that was running when the attack stopped (1 or 2).
  int terminating_phase = 1;
};

/// Per adapter: true iff it reports no detections on `image`.
std::vector<bool> success_check(std::span<const DetectorAdapter* const> adapters,
                                const ImagePlane& image);

/// Optimizes a patch on the layout's mask against the ensemble.
///
/// The patch starts as a copy of the clean pixels. Each iteration sums the
/// per-detector losses through each adapter's preprocess, then moves every
/// masked pixel by one step against the sign of its gradient, clamps to
/// [0,1] and snaps to the 8-bit lattice. The run stops as soon as every
/// adapter reports zero detections. When the ensemble contains a two-stage
/// detector the run is split into the two phases of PhaseConfig; otherwise
/// it is a single phase.
///
/// Throws AdapterError if a detector fails and DimensionError on shape
/// mismatches.
AttackResult run_attack(const ImagePlane& image, std::span<const DetectorAdapter* const> adapters,
                        const PatchLayout& layout, const AttackOptions& options = {});

}  // namespace saa
