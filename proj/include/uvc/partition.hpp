#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "uvc/common.hpp"

namespace uvc {

struct BlockRect {
  int x = 0, y = 0, w = 0, h = 0;
  bool operator==(const BlockRect&) const = default;
  int area() const { return w * h; }
  bool contains(const BlockRect& o) const {
    return o.x >= x && o.y >= y && o.x + o.w <= x + w && o.y + o.h <= y + h;
  }
};

// Fixed signalling order: QT, BT_H, BT_V, UQT_H1, UQT_H2, UQT_V1, UQT_V2.
enum class SplitMode : uint8_t {
  NONE = 0,
  QT,
  BT_H,
  BT_V,
  UQT_H1,  // heights N/2, N/4, N/8, N/8 top to bottom
  UQT_H2,  // heights N/8, N/8, N/4, N/2
  UQT_V1,  // widths M/2, M/4, M/8, M/8 left to right
  UQT_V2,  // widths M/8, M/8, M/4, M/2
};

constexpr int kNumSplitModes = 7;  // excluding NONE
constexpr SplitMode kSplitOrder[kNumSplitModes] = {
    SplitMode::QT,     SplitMode::BT_H,   SplitMode::BT_V,  SplitMode::UQT_H1,
    SplitMode::UQT_H2, SplitMode::UQT_V1, SplitMode::UQT_V2};

// Bitmask over kSplitOrder positions.
using ModeMask = uint8_t;
constexpr ModeMask kMaskQT = 1u << 0;
constexpr ModeMask kMaskBT = (1u << 1) | (1u << 2);
constexpr ModeMask kMaskUQT = (1u << 3) | (1u << 4) | (1u << 5) | (1u << 6);
constexpr ModeMask kMaskAll = kMaskQT | kMaskBT | kMaskUQT;

inline int mode_index(SplitMode m) { return static_cast<int>(m) - 1; }

const char* split_mode_name(SplitMode m);

// Children in canonical scan order (top-to-bottom / left-to-right; QT is
// TL, TR, BL, BR). Throws std::invalid_argument if the mode is not
// geometrically applicable.
std::vector<BlockRect> split(const BlockRect& rect, SplitMode mode);

struct PartitionConfig {
  int min_size = 4;
  int max_depth = 4;
  ModeMask tool_mask = kMaskAll;  // QT/BT always; UQT bits cleared when the tool is off
};

// Legal split modes for a rect under the config: every child must be a
// power-of-two rect with both dimensions >= min_size, and depth_left > 0.
ModeMask allowed_modes(const BlockRect& rect, const PartitionConfig& cfg, int depth_left);

struct PartitionNode {
  BlockRect rect;
  SplitMode mode = SplitMode::NONE;
  std::vector<std::unique_ptr<PartitionNode>> children;

  bool is_leaf() const { return mode == SplitMode::NONE; }
};

using PartitionTree = std::unique_ptr<PartitionNode>;

PartitionTree make_leaf(const BlockRect& rect);
// Applies `mode` to `rect` and creates child leaves.
PartitionTree make_split(const BlockRect& rect, SplitMode mode);

// Deep copy / structural equality / leaf enumeration.
PartitionTree clone_tree(const PartitionNode& n);
bool tree_equal(const PartitionNode& a, const PartitionNode& b);
void collect_leaves(const PartitionNode& n, std::vector<const PartitionNode*>& out);
int tree_max_depth(const PartitionNode& n);

// Fewest splits needed to make `target` a tree node starting from a 64x64
// root at (0,0), allowing only `modes` (geometry constraints apply with
// min_size 1). nullopt if unreachable within max_splits.
std::optional<int> min_depth_to_shape(const BlockRect& target, ModeMask modes, int max_splits);

}  // namespace uvc
