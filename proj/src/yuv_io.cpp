#include "uvc/yuv_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "uvc/common.hpp"

namespace uvc {

std::vector<FrameBuffer> load_yuv420(const std::string& path, int width, int height) {
  if (width <= 0 || height <= 0 || (width & 1) || (height & 1))
    throw std::invalid_argument("load_yuv420: dimensions must be positive and even");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("load_yuv420: cannot open " + path);
  in.seekg(0, std::ios::end);
  uint64_t size = static_cast<uint64_t>(in.tellg());
  in.seekg(0);
  uint64_t frame_bytes = static_cast<uint64_t>(width) * height * 3 / 2;
  if (size % frame_bytes != 0)
    throw MalformedInput("load_yuv420: file size " + std::to_string(size) +
                         " is not a multiple of the frame size " + std::to_string(frame_bytes));
  size_t n = static_cast<size_t>(size / frame_bytes);
  std::vector<FrameBuffer> frames;
  frames.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    FrameBuffer f(width, height);
    f.poc = static_cast<int>(i);
    in.read(reinterpret_cast<char*>(f.y.data().data()), f.y.data().size());
    in.read(reinterpret_cast<char*>(f.u.data().data()), f.u.data().size());
    in.read(reinterpret_cast<char*>(f.v.data().data()), f.v.data().size());
    if (!in) throw IoError("load_yuv420: short read from " + path);
    frames.push_back(std::move(f));
  }
  return frames;
}

void save_yuv420(const std::vector<FrameBuffer>& frames, const std::string& path) {
  for (size_t i = 1; i < frames.size(); ++i) {
    if (frames[i].width() != frames[0].width() || frames[i].height() != frames[0].height())
      throw std::invalid_argument("save_yuv420: frames have mixed dimensions");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("save_yuv420: cannot open " + path + " for writing");
  for (const FrameBuffer& f : frames) {
    out.write(reinterpret_cast<const char*>(f.y.data().data()), f.y.data().size());
    out.write(reinterpret_cast<const char*>(f.u.data().data()), f.u.data().size());
    out.write(reinterpret_cast<const char*>(f.v.data().data()), f.v.data().size());
  }
  if (!out) throw IoError("save_yuv420: write failed for " + path);
}

}  // namespace uvc
