#include "saa/mask_design.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace saa {

void PatchLayout::validate() const {
  if (height < 1 || width < 1) throw std::invalid_argument("layout image dims must be positive");
  if (budget < 0) throw std::invalid_argument("layout budget must be non-negative");
  for (const CruciformSpec& cross : crosses) {
    if (cross.thickness < 1 || cross.thickness % 2 == 0) {
      throw std::invalid_argument("cross thickness must be odd and >= 1");
    }
    if (cross.arm_half_length < 0) throw std::invalid_argument("cross arm must be >= 0");
    if (cross.center.row < 0 || cross.center.row >= height || cross.center.col < 0 ||
        cross.center.col >= width) {
      throw std::invalid_argument("cross center outside the image");
    }
  }
}

int ThicknessPolicy::thickness_for(std::size_t object_count) const {
  if (object_count <= static_cast<std::size_t>(thick_max_objects)) return thick;
  if (object_count <= static_cast<std::size_t>(medium_max_objects)) return medium;
  return thin;
}

void ThicknessPolicy::validate() const {
  for (int t : {thick, medium, thin}) {
    if (t < 1 || t % 2 == 0) throw std::invalid_argument("thickness must be odd and >= 1");
  }
  if (thick_max_objects < 0 || medium_max_objects < thick_max_objects) {
    throw std::invalid_argument("thickness object-count bands must be ordered");
  }
}

ThicknessPolicy ThicknessPolicy::fixed(int thickness) {
  ThicknessPolicy policy;
  policy.thick = policy.medium = policy.thin = thickness;
  return policy;
}

long pixel_budget(int height, int width, double fraction) {
  // The epsilon keeps exact products such as 0.02 * 500 * 500 from landing
  // one below the integer.
  return static_cast<long>(std::floor(fraction * height * width + 1e-9));
}

long cross_area(int arm_half_length, int thickness) {
  const long span = 2L * arm_half_length + 1;
  const long core = std::min<long>(span, thickness);
  return 2L * thickness * span - core * core;
}

PatchLayout layout_from_detections(std::span<const Box> boxes, int height, int width,
                                   long budget, const ThicknessPolicy& policy) {
  policy.validate();
  PatchLayout layout;
  layout.height = height;
  layout.width = width;
  layout.budget = budget;
  if (boxes.empty()) return layout;

  const long share = budget / static_cast<long>(boxes.size());
  int thickness = policy.thickness_for(boxes.size());
  while (thickness > 1 && cross_area(0, thickness) > share) thickness -= 2;
  int arm = 0;
  while (cross_area(arm + 1, thickness) <= share && arm + 1 < std::max(height, width)) ++arm;

  for (const Box& box : boxes) {
    CruciformSpec cross;
    cross.center.row = std::clamp(static_cast<int>(std::floor(box.center_row() + 0.5)), 0, height - 1);
    cross.center.col = std::clamp(static_cast<int>(std::floor(box.center_col() + 0.5)), 0, width - 1);
    cross.arm_half_length = arm;
    cross.thickness = thickness;
    layout.crosses.push_back(cross);
  }
  return layout;
}

std::vector<PixelCoord> cross_pixels(const CruciformSpec& cross, int height, int width,
                                     int max_radius) {
  const int half = (cross.thickness - 1) / 2;
  const int reach = std::max(cross.arm_half_length, half);
  const int radius = max_radius < 0 ? reach : std::min(reach, max_radius);
  std::vector<PixelCoord> pixels;
  for (int dr = -radius; dr <= radius; ++dr) {
    for (int dc = -radius; dc <= radius; ++dc) {
      const bool horizontal = std::abs(dr) <= half && std::abs(dc) <= cross.arm_half_length;
      const bool vertical = std::abs(dc) <= half && std::abs(dr) <= cross.arm_half_length;
      if (!horizontal && !vertical) continue;
      const int r = cross.center.row + dr;
      const int c = cross.center.col + dc;
      if (r < 0 || r >= height || c < 0 || c >= width) continue;
      pixels.push_back({r, c});
    }
  }
  return pixels;
}

BinaryMask render_layout(const PatchLayout& layout) {
  layout.validate();
  const int height = layout.height;
  const int width = layout.width;
  std::vector<int> cover(static_cast<std::size_t>(height) * width, 0);
  long popcount = 0;
  std::vector<int> radius(layout.crosses.size());
  for (std::size_t i = 0; i < layout.crosses.size(); ++i) {
    const CruciformSpec& cross = layout.crosses[i];
    radius[i] = std::max(cross.arm_half_length, (cross.thickness - 1) / 2);
    for (const PixelCoord& p : cross_pixels(cross, height, width)) {
      if (cover[static_cast<std::size_t>(p.row) * width + p.col]++ == 0) ++popcount;
    }
  }

  // Trim the outermost ring of one cross at a time until the union fits.
  std::size_t next = 0;
  while (popcount > layout.budget) {
    while (radius[next] < 0) next = (next + 1) % radius.size();
    const CruciformSpec& cross = layout.crosses[next];
    for (const PixelCoord& p : cross_pixels(cross, height, width, radius[next])) {
      const int cheb = std::max(std::abs(p.row - cross.center.row), std::abs(p.col - cross.center.col));
      if (cheb != radius[next]) continue;
      if (--cover[static_cast<std::size_t>(p.row) * width + p.col] == 0) --popcount;
    }
    --radius[next];
    next = (next + 1) % radius.size();
  }

  BinaryMask mask(height, width);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      if (cover[static_cast<std::size_t>(r) * width + c] > 0) mask.set(r, c, true);
    }
  }
  return mask;
}

nlohmann::json layout_to_json(const PatchLayout& layout) {
  nlohmann::json crosses = nlohmann::json::array();
  for (const CruciformSpec& cross : layout.crosses) {
    crosses.push_back({{"center", {cross.center.row, cross.center.col}},
                       {"arm", cross.arm_half_length},
                       {"thickness", cross.thickness}});
  }
  return {{"image_size", {layout.height, layout.width}},
          {"crosses", crosses},
          {"budget", layout.budget}};
}

PatchLayout layout_from_json(const nlohmann::json& doc) {
  PatchLayout layout;
  const auto& size = doc.at("image_size");
  layout.height = size.at(0).get<int>();
  layout.width = size.at(1).get<int>();
  layout.budget = doc.at("budget").get<long>();
  for (const auto& item : doc.at("crosses")) {
    CruciformSpec cross;
    cross.center.row = item.at("center").at(0).get<int>();
    cross.center.col = item.at("center").at(1).get<int>();
    cross.arm_half_length = item.at("arm").get<int>();
    cross.thickness = item.at("thickness").get<int>();
    layout.crosses.push_back(cross);
  }
  layout.validate();
  return layout;
}

}  // namespace saa
