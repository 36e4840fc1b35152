#include "saa/attack.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

namespace saa {

bool is_lattice_step(double step) {
  const double units = step * 255.0;
  return step > 0.0 && std::abs(units - std::round(units)) < 1e-9 && std::round(units) >= 1.0;
}

StepSchedule::StepSchedule(std::vector<ScheduleTier> tiers) : tiers_(std::move(tiers)) {
  if (tiers_.empty()) throw std::invalid_argument("schedule needs at least one tier");
  for (std::size_t i = 0; i < tiers_.size(); ++i) {
    if (!is_lattice_step(tiers_[i].step)) {
      throw std::invalid_argument("schedule step is not a positive multiple of 1/255");
    }
    if (tiers_[i].max_iters < 1) throw std::invalid_argument("schedule tier needs >= 1 iteration");
    if (i > 0 && !(tiers_[i].step < tiers_[i - 1].step)) {
      throw std::invalid_argument("schedule steps must strictly decrease");
    }
  }
}

StepSchedule StepSchedule::defaults() {
  return StepSchedule({{16.0 / 255.0, 100}, {4.0 / 255.0, 150}, {1.0 / 255.0, 250}});
}

int StepSchedule::total_iters() const {
  int total = 0;
  for (const ScheduleTier& tier : tiers_) total += tier.max_iters;
  return total;
}

void PhaseConfig::validate() const {
  for (const LossWeights& w : {phase1, phase2}) {
    if (w.alpha1 < 0.0 || w.alpha2 < 0.0) throw std::invalid_argument("negative loss weight");
    if ((w.alpha1 != 0.0) == (w.alpha2 != 0.0)) {
      throw std::invalid_argument("each phase must weight exactly one loss term");
    }
  }
  if (phase1_iters < 0) throw std::invalid_argument("phase1_iters must be >= 0");
}

std::vector<bool> success_check(std::span<const DetectorAdapter* const> adapters,
                                const ImagePlane& image) {
  std::vector<bool> flags;
  flags.reserve(adapters.size());
  for (const DetectorAdapter* adapter : adapters) flags.push_back(adapter->detect(image).empty());
  return flags;
}

namespace {

struct EnsembleView {
  std::vector<std::unique_ptr<ForwardPass>> passes;
  std::vector<int> box_counts;

  bool all_clear() const {
    return std::all_of(box_counts.begin(), box_counts.end(), [](int n) { return n == 0; });
  }
};

EnsembleView evaluate(std::span<const DetectorAdapter* const> adapters, const ImagePlane& image) {
  EnsembleView view;
  for (const DetectorAdapter* adapter : adapters) {
    auto pass = adapter->forward(image);
    view.box_counts.push_back(static_cast<int>(adapter->detections_from(pass->scores).size()));
    view.passes.push_back(std::move(pass));
  }
  return view;
}

struct PhasePlan {
  int phase;
  LossWeights weights;
  int limit;  // < 0: unlimited
};

}  // namespace

AttackResult run_attack(const ImagePlane& image, std::span<const DetectorAdapter* const> adapters,
                        const PatchLayout& layout, const AttackOptions& options) {
  if (adapters.empty()) throw std::invalid_argument("attack needs at least one detector");
  options.phases.validate();
  if (layout.height != image.height() || layout.width != image.width()) {
    throw DimensionError("layout dims do not match the image");
  }

  AttackResult result;
  result.mask = render_layout(layout);
  const BinaryMask& mask = result.mask;
  Patch patch = image;
  ImagePlane adversarial = image;

  const bool two_stage = std::any_of(adapters.begin(), adapters.end(), [](const DetectorAdapter* a) {
    return a->style() == DetectorStyle::two_stage;
  });
  std::vector<PhasePlan> plan;
  if (two_stage) {
    plan.push_back({1, options.phases.phase1, options.phases.phase1_iters});
    plan.push_back({2, options.phases.phase2, -1});
  } else {
    plan.push_back({1, options.phases.phase1, -1});
  }
  const int cap = options.iteration_cap > 0 ? options.iteration_cap : options.schedule.total_iters();
  const auto& tiers = options.schedule.tiers();

  EnsembleView view = evaluate(adapters, adversarial);
  for (std::size_t k = 0; k < adapters.size(); ++k) {
    result.detectors.push_back({adapters[k]->name(), adapters[k]->label(), view.box_counts[k], 0, false});
  }

  int wall = 0;
  bool stop = false;
  for (const PhasePlan& phase : plan) {
    if (stop || (options.stop_on_success && view.all_clear())) break;
    result.terminating_phase = phase.phase;
    PhaseTrace trace{phase.phase, phase.weights, {}};
    std::size_t tier = 0;
    int in_tier = 0;
    for (int used = 0;; ++used) {
      if (options.stop_on_success && view.all_clear()) break;
      if (wall >= cap) {
        stop = true;
        break;
      }
      if ((phase.limit >= 0 && used >= phase.limit) || tier >= tiers.size()) break;
      const double step = tiers[tier].step;

      std::vector<double> losses;
      ImagePlane grad(image.height(), image.width(), image.channels(), 0.0);
      for (std::size_t k = 0; k < adapters.size(); ++k) {
        const LossValue loss = detector_loss(view.passes[k]->scores, phase.weights);
        losses.push_back(loss.value);
        const ImagePlane g = adapters[k]->backward(*view.passes[k], loss.gradient);
        if (!g.same_shape(grad)) throw DimensionError("adapter gradient has the wrong shape");
        auto dst = grad.data();
        const auto src = g.data();
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
      }
      const double total = loss_ensemble(losses);
      trace.entries.push_back({wall, step, total});

      const Patch patch_grad = apply_patch_backward(grad, mask);
      auto values = patch.data();
      const auto g = patch_grad.data();
      const int channels = image.channels();
      for (std::size_t i = 0; i < values.size(); ++i) {
        const std::size_t pixel = i / channels;
        if (!mask.data()[pixel] || g[i] == 0.0) continue;
        const double moved = g[i] > 0.0 ? values[i] - step : values[i] + step;
        values[i] = quantize_value(std::clamp(moved, 0.0, 1.0));
      }
      adversarial = apply_patch(image, patch, mask);

      ++wall;
      if (++in_tier == tiers[tier].max_iters) {
        ++tier;
        in_tier = 0;
      }
      view = evaluate(adapters, adversarial);
      if (options.observer) options.observer({phase.phase, wall, step, total, adversarial});
    }
    result.phases.push_back(std::move(trace));
  }

  result.adversarial_image = std::move(adversarial);
  result.wall_iterations = wall;
  result.success = view.all_clear();
  for (std::size_t k = 0; k < adapters.size(); ++k) {
    result.detectors[k].boxes_after = view.box_counts[k];
    result.detectors[k].success = view.box_counts[k] == 0;
  }
  return result;
}

}  // namespace saa
