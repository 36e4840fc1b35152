#include "saa/components.hpp"

#include <numeric>

namespace saa {

namespace {

class DisjointSets {
 public:
  int make() {
    parent_.push_back(static_cast<int>(parent_.size()));
    return parent_.back();
  }

  int find(int x) {
    int root = x;
    while (parent_[root] != root) root = parent_[root];
    while (parent_[x] != root) {
      const int up = parent_[x];
      parent_[x] = root;
      x = up;
    }
    return root;
  }

  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    // Smaller label wins so roots follow raster order.
    if (a < b) parent_[b] = a; else parent_[a] = b;
  }

 private:
  std::vector<int> parent_;
};

}  // namespace

ComponentReport connected_components(const BinaryMask& mask, Connectivity connectivity) {
  ComponentReport report;
  report.connectivity = connectivity;
  const int height = mask.height();
  const int width = mask.width();
  if (height == 0 || width == 0) return report;

  std::vector<int> labels(static_cast<std::size_t>(height) * width, -1);
  auto label_at = [&](int r, int c) -> int {
    if (r < 0 || c < 0 || c >= width) return -1;
    return labels[static_cast<std::size_t>(r) * width + c];
  };

  DisjointSets sets;
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      if (!mask.at(r, c)) continue;
      // Already-visited neighbors: west, north, and the two north diagonals.
      int neighbors[4];
      int count = 0;
      for (int candidate : {label_at(r, c - 1), label_at(r - 1, c)}) {
        if (candidate >= 0) neighbors[count++] = candidate;
      }
      if (connectivity == Connectivity::eight) {
        for (int candidate : {label_at(r - 1, c - 1), label_at(r - 1, c + 1)}) {
          if (candidate >= 0) neighbors[count++] = candidate;
        }
      }
      int label;
      if (count == 0) {
        label = sets.make();
      } else {
        label = neighbors[0];
        for (int i = 1; i < count; ++i) sets.unite(label, neighbors[i]);
      }
      labels[static_cast<std::size_t>(r) * width + c] = label;
    }
  }

  std::vector<int> slot_of_root;
  std::vector<long> sizes;
  for (int label : labels) {
    if (label < 0) continue;
    const int root = sets.find(label);
    if (static_cast<std::size_t>(root) >= slot_of_root.size()) slot_of_root.resize(root + 1, -1);
    if (slot_of_root[root] < 0) {
      slot_of_root[root] = static_cast<int>(sizes.size());
      sizes.push_back(0);
    }
    ++sizes[slot_of_root[root]];
  }
  report.component_sizes = std::move(sizes);
  report.total = std::accumulate(report.component_sizes.begin(), report.component_sizes.end(), 0L);
  return report;
}

}  // namespace saa
