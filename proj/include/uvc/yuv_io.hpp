#pragma once

#include <string>
#include <vector>

#include "uvc/plane.hpp"

namespace uvc {

// Raw planar YUV 4:2:0, 8-bit. File must hold a whole number of frames.
std::vector<FrameBuffer> load_yuv420(const std::string& path, int width, int height);
void save_yuv420(const std::vector<FrameBuffer>& frames, const std::string& path);

}  // namespace uvc
