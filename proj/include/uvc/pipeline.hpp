#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "uvc/bim.hpp"
#include "uvc/coding_info.hpp"
#include "uvc/gop.hpp"
#include "uvc/nn_model.hpp"
#include "uvc/plane.hpp"

namespace uvc {

inline constexpr int kCtuSize = 64;
inline constexpr uint16_t kStreamVersion = 1;
inline constexpr char kStreamMagic[4] = {'U', 'V', 'C', '1'};

struct ToolFlags {
  bool uqt = false;
  bool nnlf = false;
  bool bim = false;

  uint8_t to_byte() const {
    return static_cast<uint8_t>((uqt ? 1 : 0) | (nnlf ? 2 : 0) | (bim ? 4 : 0));
  }
  static ToolFlags from_byte(uint8_t b) { return {(b & 1) != 0, (b & 2) != 0, (b & 4) != 0}; }
};

// Sequence header; byte layout in FORMAT.md. model_hashes holds the 12
// weight-file hashes (3 models x 4 networks, model-major) when nnlf is on.
struct SequenceHeader {
  uint16_t version = kStreamVersion;
  uint32_t width = 0, height = 0, frame_count = 0;
  uint8_t base_qp = 32;
  GopType gop = GopType::kIntraOnly;
  ToolFlags tools;
  std::vector<uint64_t> model_hashes;
};

void append_sequence_header(std::vector<uint8_t>& out, const SequenceHeader& h);

struct HeaderParse {
  SequenceHeader header;
  size_t bytes = 0;  // header size, where the first picture payload begins
};
HeaderParse parse_sequence_header(const uint8_t* data, size_t len);

// The loop filter's weight bank: nets[model][slice network], slice networks
// indexed by ModelSliceType. Files live beside the stream under fixed names.
struct WeightBank {
  std::array<std::array<ModelWeights, 4>, 3> nets;
  std::array<uint64_t, 12> hashes{};
};

std::string weight_file_name(int model, ModelSliceType t);
WeightBank load_weight_bank(const std::string& dir);

struct FrameStats {
  int poc = 0;
  int layer = 0;
  SliceType slice = SliceType::kIntra;
  double qp_effective_mean = 0.0;
  uint64_t bits = 0;  // 8 * (length field + payload)
  double psnr_y = 0.0, psnr_u = 0.0, psnr_v = 0.0;
};

struct EncoderConfig {
  int base_qp = 32;
  GopType gop = GopType::kIntraOnly;
  ToolFlags tools;
  int search_range = 8;
  double bim_sigma = 0.0;  // <= 0 selects the default for base_qp
  std::array<double, 4> bim_thresholds = kBimDefaultThresholds;
  std::string weights_dir;  // required when tools.nnlf
  bool keep_aux = false;    // also return prediction frames and coding maps
};

struct EncodeResult {
  std::vector<uint8_t> bytes;
  std::vector<FrameStats> stats;   // display order
  std::vector<FrameBuffer> recon;  // display order, what the decoder must match
  // Filled when keep_aux: per-picture prediction signal and coding map (the
  // loop-filter trainer builds its input stacks from these). recon rows above
  // are pre-filter in that case only if nnlf is off; the trainer gathers with
  // the filter off.
  std::vector<FrameBuffer> pred;
  std::vector<CodingInfoMap> info;
};

EncodeResult encode_sequence(const std::vector<FrameBuffer>& frames, const EncoderConfig& cfg);

struct DecodeResult {
  SequenceHeader header;
  std::vector<FrameBuffer> frames;  // display order
};

// weights_dir may be empty when the stream's nnlf flag is off. Hash mismatches
// against the header are refused.
DecodeResult decode_sequence(const std::vector<uint8_t>& bytes, const std::string& weights_dir);

// MD5 of Y then U then V rows, the reconstruction fingerprint used by the
// tools and harnesses.
std::string frame_md5(const FrameBuffer& f);
std::string sequence_md5(const std::vector<FrameBuffer>& frames);

// Desk-scale weight production: encodes the clip with the filter off (one
// intra-only and one low-delay pass per QP band), crops training patches from
// the real reconstruction/prediction/boundary-strength planes, trains all 12
// networks and saves them under the bank's fixed file names in `dir`.
// Returns the final training loss per network (bank order).
struct BankTrainConfig {
  std::array<int, 3> band_qps = {26, 33, 40};  // representatives of the QP bands
  int steps = 200;
  double lr = 1e-3;
  int batch = 2;
  uint32_t seed = 1;
  int patch = 16;
  int patches_per_frame = 8;
  int search_range = 8;
};

std::array<double, 12> train_weight_bank(const std::vector<FrameBuffer>& frames,
                                         const BankTrainConfig& cfg, const std::string& dir);

}  // namespace uvc
