#pragma once

#include <cstdint>
#include <cstddef>
#include <string>

namespace uvc {

// RFC 1321 MD5, used for reconstruction hashes.
class Md5 {
public:
  Md5();
  void update(const void* data, size_t len);
  // Finalizes and returns the lowercase hex digest. The object is spent.
  std::string hex_digest();

private:
  void process_block(const uint8_t* block);
  uint32_t state_[4];
  uint64_t total_len_ = 0;
  uint8_t buf_[64];
  size_t buf_len_ = 0;
};

std::string md5_hex(const void* data, size_t len);

}  // namespace uvc
