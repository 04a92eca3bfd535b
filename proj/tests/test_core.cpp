#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "uvc/common.hpp"
#include "uvc/md5.hpp"
#include "uvc/pipeline.hpp"
#include "uvc/plane.hpp"
#include "uvc/yuv_io.hpp"

using namespace uvc;

namespace {

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

void write_bytes(const std::string& path, const std::vector<uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

std::vector<FrameBuffer> random_frames(int w, int h, int n, uint32_t seed) {
  std::mt19937 rng(seed);
  std::vector<FrameBuffer> v;
  for (int i = 0; i < n; ++i) {
    FrameBuffer f(w, h);
    for (auto* p : {&f.y, &f.u, &f.v})
      for (auto& s : p->data()) s = static_cast<uint8_t>(rng() & 0xFF);
    f.poc = i;
    v.push_back(std::move(f));
  }
  return v;
}

}  // namespace

TEST_CASE("plane buffer geometry and clamped access") {
  PlaneBuffer p(8, 4, 7);
  CHECK(p.width() == 8);
  CHECK(p.height() == 4);
  CHECK(p.data().size() == 32);
  for (auto s : p.data()) CHECK(s == 7);
  p.at(3, 2) = 200;
  CHECK(p.at(3, 2) == 200);
  CHECK(p.at_clamped(-5, 2) == p.at(0, 2));
  CHECK(p.at_clamped(100, 2) == p.at(7, 2));
  CHECK(p.at_clamped(3, -1) == p.at(3, 0));
  CHECK(p.at_clamped(3, 99) == p.at(3, 3));
  CHECK(p.row(2)[3] == 200);
}

TEST_CASE("frame buffer is 4:2:0 with half-resolution chroma") {
  FrameBuffer f(16, 8, 10, 99);
  CHECK(f.width() == 16);
  CHECK(f.height() == 8);
  CHECK(f.u.width() == 8);
  CHECK(f.u.height() == 4);
  CHECK(f.v.width() == 8);
  CHECK(f.v.height() == 4);
  CHECK(f.y.at(0, 0) == 10);
  CHECK(f.u.at(0, 0) == 99);
  CHECK(f.v.at(7, 3) == 99);
}

TEST_CASE("sse matches a direct sum") {
  std::mt19937 rng(17);
  PlaneBuffer a(13, 9), b(13, 9);
  for (auto& s : a.data()) s = static_cast<uint8_t>(rng() & 0xFF);
  for (auto& s : b.data()) s = static_cast<uint8_t>(rng() & 0xFF);
  uint64_t want = 0;
  for (int y = 0; y < 9; ++y)
    for (int x = 0; x < 13; ++x) {
      const int64_t d = int64_t(a.at(x, y)) - int64_t(b.at(x, y));
      want += static_cast<uint64_t>(d * d);
    }
  CHECK(sse_plane(a, b) == want);

  uint64_t want_rect = 0;
  for (int y = 2; y < 2 + 5; ++y)
    for (int x = 3; x < 3 + 7; ++x) {
      const int64_t d = int64_t(a.at(x, y)) - int64_t(b.at(x, y));
      want_rect += static_cast<uint64_t>(d * d);
    }
  CHECK(sse_rect(a, b, 3, 2, 7, 5) == want_rect);
  CHECK(sse_rect(a, b, 0, 0, 13, 9) == want);
}

TEST_CASE("psnr sentinel and fixtures") {
  PlaneBuffer a(8, 8, 50), b(8, 8, 50);
  CHECK(psnr(a, b) == doctest::Approx(100.0));  // identical -> sentinel

  // Every sample off by one: MSE = 1, PSNR = 20 log10(255) = 48.1308 dB.
  for (auto& s : b.data()) s = 51;
  CHECK(psnr(a, b) == doctest::Approx(48.1308).epsilon(1e-4));

  // Single sample off by one in 64: MSE = 1/64.
  PlaneBuffer c(8, 8, 50);
  c.at(5, 3) = 49;
  const double want = 10.0 * std::log10(255.0 * 255.0 * 64.0);
  CHECK(psnr(a, c) == doctest::Approx(want).epsilon(1e-9));
}

TEST_CASE("psnr equals the direct formula on random planes") {
  std::mt19937 rng(5);
  PlaneBuffer a(32, 16), b(32, 16);
  for (auto& s : a.data()) s = static_cast<uint8_t>(rng() & 0xFF);
  for (auto& s : b.data()) s = static_cast<uint8_t>(rng() & 0xFF);
  const double mse = static_cast<double>(sse_plane(a, b)) / (32.0 * 16.0);
  const double want = 10.0 * std::log10(255.0 * 255.0 / mse);
  CHECK(psnr(a, b) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("yuv420 save then load is the identity") {
  const std::string path = temp_path("uvc_test_roundtrip.yuv");
  auto frames = random_frames(16, 8, 3, 77);
  save_yuv420(frames, path);
  CHECK(std::filesystem::file_size(path) == 3u * (16 * 8 + 2 * (8 * 4)));
  auto back = load_yuv420(path, 16, 8);
  REQUIRE(back.size() == 3);
  for (size_t i = 0; i < 3; ++i) {
    CHECK(back[i].poc == static_cast<int>(i));
    CHECK(sse_plane(back[i].y, frames[i].y) == 0);
    CHECK(sse_plane(back[i].u, frames[i].u) == 0);
    CHECK(sse_plane(back[i].v, frames[i].v) == 0);
  }
  std::filesystem::remove(path);
}

TEST_CASE("yuv420 frame-size arithmetic and partial-frame rejection") {
  const std::string path = temp_path("uvc_test_sizes.yuv");

  // 2x2 frame = 4 luma + 1 + 1 chroma bytes.
  write_bytes(path, {1, 2, 3, 4, 5, 6});
  auto one = load_yuv420(path, 2, 2);
  REQUIRE(one.size() == 1);
  CHECK(one[0].y.at(0, 0) == 1);
  CHECK(one[0].y.at(1, 1) == 4);
  CHECK(one[0].u.at(0, 0) == 5);
  CHECK(one[0].v.at(0, 0) == 6);

  write_bytes(path, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12});
  CHECK(load_yuv420(path, 2, 2).size() == 2);

  write_bytes(path, {1, 2, 3, 4, 5, 6, 7});  // 7 bytes: not a whole frame
  CHECK_THROWS_AS(load_yuv420(path, 2, 2), MalformedInput);

  write_bytes(path, {});
  CHECK(load_yuv420(path, 2, 2).empty());  // zero frames is a valid file
  std::filesystem::remove(path);
}

TEST_CASE("yuv420 argument validation") {
  const std::string path = temp_path("uvc_test_args.yuv");
  write_bytes(path, {0, 0, 0, 0, 0, 0});
  CHECK_THROWS_AS(load_yuv420(path, 0, 2), std::invalid_argument);
  CHECK_THROWS_AS(load_yuv420(path, 2, -2), std::invalid_argument);
  CHECK_THROWS_AS(load_yuv420(path, 3, 2), std::invalid_argument);  // odd width
  CHECK_THROWS_AS(load_yuv420(temp_path("uvc_test_does_not_exist.yuv"), 2, 2), IoError);
  std::filesystem::remove(path);

  std::vector<FrameBuffer> mixed;
  mixed.emplace_back(4, 4);
  mixed.emplace_back(8, 4);
  CHECK_THROWS_AS(save_yuv420(mixed, temp_path("uvc_test_mixed.yuv")), std::invalid_argument);

  // Saving an empty list produces an empty file, not an error.
  const std::string empty_path = temp_path("uvc_test_empty.yuv");
  save_yuv420({}, empty_path);
  CHECK(std::filesystem::file_size(empty_path) == 0);
  std::filesystem::remove(empty_path);
}

TEST_CASE("md5 known vectors") {
  CHECK(md5_hex("", 0) == "d41d8cd98f00b204e9800998ecf8427e");
  CHECK(md5_hex("abc", 3) == "900150983cd24fb0d6963f7d28e17f72");
  CHECK(md5_hex("message digest", 14) == "f96b697d7cb7938d525a2f31aaf161d0");
  const char* long_msg = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789";
  CHECK(md5_hex(long_msg, 62) == "d174ab98d277d9f5a5611c2c9f419d9f");
}

TEST_CASE("md5 incremental update equals one-shot") {
  std::mt19937 rng(31);
  std::vector<uint8_t> data(1000);
  for (auto& b : data) b = static_cast<uint8_t>(rng() & 0xFF);
  Md5 inc;
  size_t pos = 0;
  // Uneven chunks straddling the 64-byte block boundary.
  for (size_t chunk : {1u, 63u, 64u, 65u, 130u, 7u, 500u, 170u}) {
    inc.update(data.data() + pos, chunk);
    pos += chunk;
  }
  REQUIRE(pos == data.size());
  CHECK(inc.hex_digest() == md5_hex(data.data(), data.size()));
}

TEST_CASE("frame and sequence fingerprints hash Y then U then V rows") {
  auto frames = random_frames(8, 4, 2, 123);
  Md5 manual;
  for (const auto* p : {&frames[0].y, &frames[0].u, &frames[0].v})
    manual.update(p->data().data(), p->data().size());
  CHECK(frame_md5(frames[0]) == manual.hex_digest());

  // The sequence fingerprint chains the per-frame hex digests.
  Md5 seq;
  for (const FrameBuffer& f : frames) {
    const std::string h = frame_md5(f);
    seq.update(h.data(), h.size());
  }
  CHECK(sequence_md5(frames) == seq.hex_digest());

  // Any single-sample change must change the fingerprint.
  auto tweaked = random_frames(8, 4, 2, 123);
  tweaked[1].v.at(3, 1) ^= 1;
  CHECK(sequence_md5(tweaked) != sequence_md5(frames));
}
