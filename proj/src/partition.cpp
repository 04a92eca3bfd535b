#include "uvc/partition.hpp"

#include <deque>
#include <map>
#include <stdexcept>

namespace uvc {

const char* split_mode_name(SplitMode m) {
  switch (m) {
    case SplitMode::NONE: return "NONE";
    case SplitMode::QT: return "QT";
    case SplitMode::BT_H: return "BT_H";
    case SplitMode::BT_V: return "BT_V";
    case SplitMode::UQT_H1: return "UQT_H1";
    case SplitMode::UQT_H2: return "UQT_H2";
    case SplitMode::UQT_V1: return "UQT_V1";
    case SplitMode::UQT_V2: return "UQT_V2";
  }
  return "?";
}

namespace {

bool geometry_ok(const BlockRect& r, SplitMode m) {
  if (!is_pow2(r.w) || !is_pow2(r.h)) return false;
  switch (m) {
    case SplitMode::QT: return r.w == r.h && r.w >= 2;
    case SplitMode::BT_H: return r.h >= 2;
    case SplitMode::BT_V: return r.w >= 2;
    case SplitMode::UQT_H1:
    case SplitMode::UQT_H2: return r.h >= 8;
    case SplitMode::UQT_V1:
    case SplitMode::UQT_V2: return r.w >= 8;
    case SplitMode::NONE: return true;
  }
  return false;
}

}  // namespace

std::vector<BlockRect> split(const BlockRect& r, SplitMode mode) {
  if (!geometry_ok(r, mode))
    throw std::invalid_argument(std::string("split: mode ") + split_mode_name(mode) +
                                " not applicable to this rect");
  std::vector<BlockRect> out;
  switch (mode) {
    case SplitMode::NONE:
      out.push_back(r);
      break;
    case SplitMode::QT: {
      int hw = r.w / 2, hh = r.h / 2;
      out = {{r.x, r.y, hw, hh},
             {r.x + hw, r.y, hw, hh},
             {r.x, r.y + hh, hw, hh},
             {r.x + hw, r.y + hh, hw, hh}};
      break;
    }
    case SplitMode::BT_H: {
      int hh = r.h / 2;
      out = {{r.x, r.y, r.w, hh}, {r.x, r.y + hh, r.w, hh}};
      break;
    }
    case SplitMode::BT_V: {
      int hw = r.w / 2;
      out = {{r.x, r.y, hw, r.h}, {r.x + hw, r.y, hw, r.h}};
      break;
    }
    case SplitMode::UQT_H1:
    case SplitMode::UQT_H2: {
      int parts1[4] = {r.h / 2, r.h / 4, r.h / 8, r.h / 8};
      int parts2[4] = {r.h / 8, r.h / 8, r.h / 4, r.h / 2};
      const int* p = (mode == SplitMode::UQT_H1) ? parts1 : parts2;
      int y = r.y;
      for (int i = 0; i < 4; ++i) {
        out.push_back({r.x, y, r.w, p[i]});
        y += p[i];
      }
      break;
    }
    case SplitMode::UQT_V1:
    case SplitMode::UQT_V2: {
      int parts1[4] = {r.w / 2, r.w / 4, r.w / 8, r.w / 8};
      int parts2[4] = {r.w / 8, r.w / 8, r.w / 4, r.w / 2};
      const int* p = (mode == SplitMode::UQT_V1) ? parts1 : parts2;
      int x = r.x;
      for (int i = 0; i < 4; ++i) {
        out.push_back({x, r.y, p[i], r.h});
        x += p[i];
      }
      break;
    }
  }
  return out;
}

ModeMask allowed_modes(const BlockRect& r, const PartitionConfig& cfg, int depth_left) {
  if (depth_left <= 0) return 0;
  ModeMask m = 0;
  if (r.w == r.h && r.w / 2 >= cfg.min_size) m |= kMaskQT;
  if (r.h / 2 >= cfg.min_size) m |= 1u << 1;  // BT_H
  if (r.w / 2 >= cfg.min_size) m |= 1u << 2;  // BT_V
  if (r.h / 8 >= cfg.min_size) m |= (1u << 3) | (1u << 4);  // UQT_H1/H2
  if (r.w / 8 >= cfg.min_size) m |= (1u << 5) | (1u << 6);  // UQT_V1/V2
  return m & cfg.tool_mask;
}

PartitionTree make_leaf(const BlockRect& rect) {
  auto n = std::make_unique<PartitionNode>();
  n->rect = rect;
  return n;
}

PartitionTree make_split(const BlockRect& rect, SplitMode mode) {
  auto n = std::make_unique<PartitionNode>();
  n->rect = rect;
  n->mode = mode;
  for (const BlockRect& c : split(rect, mode)) n->children.push_back(make_leaf(c));
  return n;
}

PartitionTree clone_tree(const PartitionNode& src) {
  auto n = std::make_unique<PartitionNode>();
  n->rect = src.rect;
  n->mode = src.mode;
  for (const auto& c : src.children) n->children.push_back(clone_tree(*c));
  return n;
}

bool tree_equal(const PartitionNode& a, const PartitionNode& b) {
  if (!(a.rect == b.rect) || a.mode != b.mode || a.children.size() != b.children.size())
    return false;
  for (size_t i = 0; i < a.children.size(); ++i)
    if (!tree_equal(*a.children[i], *b.children[i])) return false;
  return true;
}

void collect_leaves(const PartitionNode& n, std::vector<const PartitionNode*>& out) {
  if (n.is_leaf()) {
    out.push_back(&n);
    return;
  }
  for (const auto& c : n.children) collect_leaves(*c, out);
}

int tree_max_depth(const PartitionNode& n) {
  if (n.is_leaf()) return 0;
  int d = 0;
  for (const auto& c : n.children) d = std::max(d, tree_max_depth(*c));
  return 1 + d;
}

std::optional<int> min_depth_to_shape(const BlockRect& target, ModeMask modes, int max_splits) {
  BlockRect root{0, 0, 64, 64};
  if (!root.contains(target) || target.w <= 0 || target.h <= 0) return std::nullopt;
  if (target == root) return 0;

  struct Key {
    int x, y, w, h;
    bool operator<(const Key& o) const {
      if (x != o.x) return x < o.x;
      if (y != o.y) return y < o.y;
      if (w != o.w) return w < o.w;
      return h < o.h;
    }
  };
  std::map<Key, int> seen;
  std::deque<std::pair<BlockRect, int>> queue;
  queue.push_back({root, 0});
  seen[{root.x, root.y, root.w, root.h}] = 0;

  PartitionConfig geom;
  geom.min_size = 1;
  geom.tool_mask = modes;

  while (!queue.empty()) {
    auto [rect, depth] = queue.front();
    queue.pop_front();
    if (depth >= max_splits) continue;
    ModeMask legal = allowed_modes(rect, geom, 1);
    for (int mi = 0; mi < kNumSplitModes; ++mi) {
      if (!(legal & (1u << mi))) continue;
      for (const BlockRect& c : split(rect, kSplitOrder[mi])) {
        if (c == target) return depth + 1;
        if (!c.contains(target)) continue;
        Key k{c.x, c.y, c.w, c.h};
        if (seen.count(k)) continue;
        seen[k] = depth + 1;
        queue.push_back({c, depth + 1});
      }
    }
  }
  return std::nullopt;
}

}  // namespace uvc
