#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace uvc {

// Error taxonomy. std::invalid_argument is used directly for bad arguments.
class CodecError : public std::runtime_error {
public:
  explicit CodecError(const std::string& msg) : std::runtime_error(msg) {}
};

// Input file is structurally unusable (size not a frame multiple, etc).
class MalformedInput : public CodecError {
public:
  explicit MalformedInput(const std::string& msg) : CodecError(msg) {}
};

// Compressed stream violates the format. Carries a best-effort byte offset.
class MalformedBitstream : public CodecError {
public:
  MalformedBitstream(const std::string& msg, uint64_t offset)
      : CodecError(msg + " (byte offset " + std::to_string(offset) + ")"),
        byte_offset(offset) {}
  uint64_t byte_offset;
};

class MalformedWeights : public CodecError {
public:
  explicit MalformedWeights(const std::string& msg) : CodecError(msg) {}
};

class TrainingDiverged : public CodecError {
public:
  explicit TrainingDiverged(const std::string& msg) : CodecError(msg) {}
};

class IoError : public CodecError {
public:
  explicit IoError(const std::string& msg) : CodecError(msg) {}
};

template <typename T>
inline T clip(T v, T lo, T hi) {
  return v < lo ? lo : (v > hi ? hi : v);
}

inline uint8_t clip_pixel(int v) { return static_cast<uint8_t>(clip(v, 0, 255)); }

inline bool is_pow2(int v) { return v > 0 && (v & (v - 1)) == 0; }

inline int ilog2(int v) {
  int r = 0;
  while (v > 1) { v >>= 1; ++r; }
  return r;
}

// FNV-1a, used for memo keys and weight-file identifiers.
inline uint64_t fnv1a(const void* data, size_t n, uint64_t h = 0xcbf29ce484222325ull) {
  const uint8_t* p = static_cast<const uint8_t*>(data);
  for (size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace uvc
