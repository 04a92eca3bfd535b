#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>
#include <random>
#include <set>
#include <vector>

#include "uvc/arith.hpp"
#include "uvc/common.hpp"
#include "uvc/partition.hpp"
#include "uvc/syntax.hpp"

using namespace uvc;

namespace {

std::vector<int> heights(const std::vector<BlockRect>& v) {
  std::vector<int> out;
  for (const auto& r : v) out.push_back(r.h);
  return out;
}

std::vector<int> widths(const std::vector<BlockRect>& v) {
  std::vector<int> out;
  for (const auto& r : v) out.push_back(r.w);
  return out;
}

// Children tile the parent exactly: disjoint, contained, full coverage.
void check_tiling(const BlockRect& rect, const std::vector<BlockRect>& kids) {
  int area = 0;
  for (const auto& k : kids) {
    CHECK(rect.contains(k));
    area += k.area();
  }
  CHECK(area == rect.area());
  for (size_t i = 0; i < kids.size(); ++i)
    for (size_t j = i + 1; j < kids.size(); ++j) {
      const auto& a = kids[i];
      const auto& b = kids[j];
      const bool overlap = a.x < b.x + b.w && b.x < a.x + a.w && a.y < b.y + b.h &&
                           b.y < a.y + a.h;
      CHECK_FALSE(overlap);
    }
}

}  // namespace

TEST_CASE("asymmetric quaternary split geometry") {
  // 32x32 horizontal: N/2, N/4, N/8, N/8 top to bottom.
  auto h1 = split({0, 0, 32, 32}, SplitMode::UQT_H1);
  REQUIRE(h1.size() == 4);
  CHECK(heights(h1) == std::vector<int>{16, 8, 4, 4});
  CHECK(h1[0].y == 0);
  CHECK(h1[1].y == 16);
  CHECK(h1[2].y == 24);
  CHECK(h1[3].y == 28);
  for (const auto& r : h1) {
    CHECK(r.w == 32);
    CHECK(r.x == 0);
  }

  // 64x32 vertical: M/2, M/4, M/8, M/8 left to right.
  auto v1 = split({0, 0, 64, 32}, SplitMode::UQT_V1);
  REQUIRE(v1.size() == 4);
  CHECK(widths(v1) == std::vector<int>{32, 16, 8, 8});
  CHECK(v1[0].x == 0);
  CHECK(v1[1].x == 32);
  CHECK(v1[2].x == 48);
  CHECK(v1[3].x == 56);

  // Mirrored variants walk the same sizes from the other side.
  auto h2 = split({0, 0, 64, 64}, SplitMode::UQT_H2);
  CHECK(heights(h2) == std::vector<int>{8, 8, 16, 32});
  CHECK(h2[1].y == 8);  // the 8-high band one step below the top
  auto v2 = split({0, 0, 64, 64}, SplitMode::UQT_V2);
  CHECK(widths(v2) == std::vector<int>{8, 8, 16, 32});

  // Offsets propagate into children.
  auto off = split({16, 32, 32, 32}, SplitMode::UQT_H1);
  CHECK(off[1].x == 16);
  CHECK(off[1].y == 32 + 16);
}

TEST_CASE("quad and binary split geometry") {
  auto qt = split({0, 0, 64, 64}, SplitMode::QT);
  REQUIRE(qt.size() == 4);
  CHECK(qt[0] == BlockRect{0, 0, 32, 32});
  CHECK(qt[1] == BlockRect{32, 0, 32, 32});  // TL, TR, BL, BR
  CHECK(qt[2] == BlockRect{0, 32, 32, 32});
  CHECK(qt[3] == BlockRect{32, 32, 32, 32});

  auto bh = split({0, 0, 32, 16}, SplitMode::BT_H);
  REQUIRE(bh.size() == 2);
  CHECK(bh[0] == BlockRect{0, 0, 32, 8});
  CHECK(bh[1] == BlockRect{0, 8, 32, 8});

  auto bv = split({8, 8, 16, 32}, SplitMode::BT_V);
  REQUIRE(bv.size() == 2);
  CHECK(bv[0] == BlockRect{8, 8, 8, 32});
  CHECK(bv[1] == BlockRect{16, 8, 8, 32});
}

TEST_CASE("split rejects geometrically inapplicable modes") {
  CHECK_THROWS_AS(split({0, 0, 4, 4}, SplitMode::UQT_H1), std::invalid_argument);
  CHECK_THROWS_AS(split({0, 0, 4, 4}, SplitMode::UQT_V2), std::invalid_argument);
  CHECK_THROWS_AS(split({0, 0, 3, 3}, SplitMode::QT), std::invalid_argument);
  CHECK_THROWS_AS(split({0, 0, 8, 3}, SplitMode::BT_H), std::invalid_argument);
  CHECK_THROWS_AS(split({0, 0, 8, 8}, SplitMode::NONE), std::invalid_argument);
}

TEST_CASE("every applicable split tiles its parent with power-of-two children") {
  std::mt19937 rng(11);
  for (int rep = 0; rep < 200; ++rep) {
    const BlockRect r{static_cast<int>(rng() % 64), static_cast<int>(rng() % 64),
                      4 << (rng() % 5), 4 << (rng() % 5)};
    for (SplitMode m : kSplitOrder) {
      std::vector<BlockRect> kids;
      try {
        kids = split(r, m);
      } catch (const std::invalid_argument&) {
        continue;
      }
      check_tiling(r, kids);
      for (const auto& k : kids) {
        CHECK(is_pow2(k.w));
        CHECK(is_pow2(k.h));
      }
    }
  }

  // The mirrored UQT variants list the same sizes in reverse order.
  for (int s : {32, 64}) {
    auto a = heights(split({0, 0, s, s}, SplitMode::UQT_H1));
    auto b = heights(split({0, 0, s, s}, SplitMode::UQT_H2));
    std::reverse(a.begin(), a.end());
    CHECK(a == b);
    auto c = widths(split({0, 0, s, s}, SplitMode::UQT_V1));
    auto d = widths(split({0, 0, s, s}, SplitMode::UQT_V2));
    std::reverse(c.begin(), c.end());
    CHECK(c == d);
  }
}

TEST_CASE("allowed modes by size, depth and tool mask") {
  PartitionConfig cfg;  // min_size 4, max_depth 4, all tools
  CHECK(allowed_modes({0, 0, 64, 64}, cfg, 4) == kMaskAll);
  CHECK(allowed_modes({0, 0, 32, 32}, cfg, 4) == kMaskAll);  // 32/8 = 4 >= min_size
  CHECK(allowed_modes({0, 0, 16, 16}, cfg, 4) == (kMaskQT | kMaskBT));  // 16/8 < 4
  CHECK(allowed_modes({0, 0, 8, 8}, cfg, 4) == (kMaskQT | kMaskBT));
  CHECK(allowed_modes({0, 0, 4, 4}, cfg, 4) == 0);  // children would go below min

  // Wide-flat block: horizontal UQT illegal (h/8 < 4), vertical legal.
  const ModeMask wide = allowed_modes({0, 0, 64, 8}, cfg, 4);
  CHECK(wide == (kMaskQT | kMaskBT | (1u << 5) | (1u << 6)));

  // Narrow-tall mirrors it.
  const ModeMask tall = allowed_modes({0, 0, 8, 64}, cfg, 4);
  CHECK(tall == (kMaskQT | kMaskBT | (1u << 3) | (1u << 4)));

  // 8x4: only a vertical halving keeps both dims >= 4.
  CHECK(allowed_modes({0, 0, 8, 4}, cfg, 4) == (1u << 2));

  CHECK(allowed_modes({0, 0, 64, 64}, cfg, 0) == 0);  // depth exhausted

  PartitionConfig no_uqt = cfg;
  no_uqt.tool_mask = kMaskQT | kMaskBT;
  CHECK(allowed_modes({0, 0, 64, 64}, no_uqt, 4) == (kMaskQT | kMaskBT));
  CHECK((allowed_modes({0, 0, 32, 32}, no_uqt, 4) & kMaskUQT) == 0);
}

TEST_CASE("tree construction, cloning and equality") {
  PartitionTree leaf = make_leaf({0, 0, 64, 64});
  CHECK(leaf->is_leaf());
  CHECK(tree_max_depth(*leaf) == 0);

  PartitionTree t = make_split({0, 0, 64, 64}, SplitMode::UQT_H2);
  REQUIRE(t->children.size() == 4);
  CHECK(t->children[0]->rect.h == 8);
  CHECK_FALSE(t->is_leaf());
  CHECK(tree_max_depth(*t) == 1);

  // Split the third child again and count leaves.
  t->children[2]->mode = SplitMode::BT_V;
  for (const auto& r : split(t->children[2]->rect, SplitMode::BT_V))
    t->children[2]->children.push_back(make_leaf(r));
  std::vector<const PartitionNode*> leaves;
  collect_leaves(*t, leaves);
  CHECK(leaves.size() == 5);
  CHECK(tree_max_depth(*t) == 2);

  PartitionTree c = clone_tree(*t);
  CHECK(tree_equal(*t, *c));
  c->children[1]->mode = SplitMode::BT_H;
  for (const auto& r : split(c->children[1]->rect, SplitMode::BT_H))
    c->children[1]->children.push_back(make_leaf(r));
  CHECK_FALSE(tree_equal(*t, *c));
}

TEST_CASE("asymmetric splits reach flat shapes strictly sooner") {
  // The 64x8 band at y = 8 falls out of one UQT_H2 split of the root; with
  // quad/binary splits alone it takes three.
  const BlockRect band{0, 8, 64, 8};
  auto with_uqt = min_depth_to_shape(band, kMaskAll, 8);
  auto without = min_depth_to_shape(band, kMaskQT | kMaskBT, 8);
  REQUIRE(with_uqt.has_value());
  REQUIRE(without.has_value());
  CHECK(*with_uqt == 1);
  CHECK(*without == 3);
  CHECK(*with_uqt < *without);

  CHECK(min_depth_to_shape({0, 0, 64, 64}, kMaskAll, 0) == 0);  // root is free
  CHECK_FALSE(min_depth_to_shape(band, kMaskQT | kMaskBT, 2).has_value());
  CHECK_FALSE(min_depth_to_shape({0, 0, 48, 48}, kMaskAll, 8).has_value());
  CHECK_FALSE(min_depth_to_shape({0, 0, 3, 3}, kMaskAll, 8).has_value());
}

TEST_CASE("split mode names are distinct") {
  std::set<std::string> names;
  for (SplitMode m : kSplitOrder) names.insert(split_mode_name(m));
  names.insert(split_mode_name(SplitMode::NONE));
  CHECK(names.size() == kNumSplitModes + 1);
}

namespace {

PartitionTree random_tree(const BlockRect& rect, const PartitionConfig& cfg, int depth_left,
                          std::mt19937& rng) {
  const ModeMask allowed = allowed_modes(rect, cfg, depth_left);
  if (!allowed || rng() % 10 < 4) return make_leaf(rect);
  std::vector<SplitMode> options;
  for (SplitMode m : kSplitOrder)
    if (allowed & (1u << mode_index(m))) options.push_back(m);
  const SplitMode mode = options[rng() % options.size()];
  PartitionTree node = make_split(rect, mode);
  for (size_t i = 0; i < node->children.size(); ++i) {
    node->children[i] =
        random_tree(node->children[i]->rect, cfg, depth_left - 1, rng);
  }
  return node;
}

template <typename Dest>
void write_tree(Dest& d, ContextSet& cs, const PartitionNode& n, const PartitionConfig& cfg,
                int depth_left) {
  code_split(d, cs, n.rect, allowed_modes(n.rect, cfg, depth_left), n.mode);
  for (const auto& c : n.children) write_tree(d, cs, *c, cfg, depth_left - 1);
}

PartitionTree read_tree(RangeDecoder& d, ContextSet& cs, const BlockRect& rect,
                        const PartitionConfig& cfg, int depth_left) {
  const SplitMode mode = parse_split(d, cs, rect, allowed_modes(rect, cfg, depth_left));
  if (mode == SplitMode::NONE) return make_leaf(rect);
  PartitionTree node = make_split(rect, mode);
  for (size_t i = 0; i < node->children.size(); ++i)
    node->children[i] = read_tree(d, cs, node->children[i]->rect, cfg, depth_left - 1);
  return node;
}

}  // namespace

TEST_CASE("partition trees survive the entropy layer") {
  std::mt19937 rng(42);
  PartitionConfig cfg;
  for (int rep = 0; rep < 60; ++rep) {
    PartitionTree t = random_tree({0, 0, 64, 64}, cfg, cfg.max_depth, rng);
    RangeEncoder enc;
    ContextSet ecs;
    write_tree(enc, ecs, *t, cfg, cfg.max_depth);
    const auto payload = enc.finish();
    RangeDecoder dec(payload.data(), payload.size());
    ContextSet dcs;
    PartitionTree back = read_tree(dec, dcs, {0, 0, 64, 64}, cfg, cfg.max_depth);
    CHECK(tree_equal(*t, *back));
    for (int i = 0; i < kNumCtx; ++i) CHECK(ecs[i].state == dcs[i].state);
  }
}

TEST_CASE("parsing rejects a split that the decoder config forbids") {
  // Encode a root UQT split, then decode with the asymmetric tool off.
  PartitionConfig full;
  PartitionTree t = make_split({0, 0, 64, 64}, SplitMode::UQT_H1);
  RangeEncoder enc;
  ContextSet ecs;
  write_tree(enc, ecs, *t, full, full.max_depth);
  const auto payload = enc.finish();

  PartitionConfig crippled;
  crippled.tool_mask = kMaskQT | kMaskBT;
  RangeDecoder dec(payload.data(), payload.size());
  ContextSet dcs;
  CHECK_THROWS_AS(read_tree(dec, dcs, {0, 0, 64, 64}, crippled, crippled.max_depth),
                  MalformedBitstream);
}
