#include <stdexcept>
#include <utility>

#include "uvc/common.hpp"
#include "uvc/ctu_coder.hpp"
#include "uvc/nn_filter.hpp"
#include "uvc/pipeline.hpp"
#include "uvc/syntax.hpp"

namespace uvc {
namespace {

struct ByteReader {
  const uint8_t* data;
  size_t len;
  size_t pos = 0;

  void need(size_t n, const char* what) const {
    if (pos + n > len) throw MalformedBitstream(std::string(what) + " truncated", pos);
  }
  uint8_t u8(const char* what) {
    need(1, what);
    return data[pos++];
  }
  uint16_t u16(const char* what) {
    need(2, what);
    uint16_t v = static_cast<uint16_t>(data[pos] | (data[pos + 1] << 8));
    pos += 2;
    return v;
  }
  uint32_t u32(const char* what) {
    need(4, what);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(data[pos + i]) << (8 * i);
    pos += 4;
    return v;
  }
  uint64_t u64(const char* what) {
    need(8, what);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(data[pos + i]) << (8 * i);
    pos += 8;
    return v;
  }
};

std::string hex64(uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s = "0x";
  for (int i = 60; i >= 0; i -= 4) s.push_back(digits[(v >> i) & 0xF]);
  return s;
}

}  // namespace

HeaderParse parse_sequence_header(const uint8_t* data, size_t len) {
  ByteReader r{data, len};
  r.need(4, "stream magic");
  for (int i = 0; i < 4; ++i)
    if (data[i] != static_cast<uint8_t>(kStreamMagic[i]))
      throw MalformedBitstream("bad stream magic", 0);
  r.pos = 4;

  HeaderParse hp;
  SequenceHeader& h = hp.header;
  h.version = r.u16("version");
  if (h.version != kStreamVersion)
    throw MalformedBitstream("unsupported stream version " + std::to_string(h.version), 4);
  h.width = r.u32("width");
  h.height = r.u32("height");
  h.frame_count = r.u32("frame count");
  h.base_qp = r.u8("base qp");
  const uint8_t gop_byte = r.u8("gop type");
  const uint8_t tools_byte = r.u8("tool flags");
  const uint8_t hash_count = r.u8("hash count");
  for (int i = 0; i < hash_count; ++i) h.model_hashes.push_back(r.u64("weight hash"));

  if (h.width == 0 || h.height == 0 || h.width % kCtuSize != 0 || h.height % kCtuSize != 0)
    throw MalformedBitstream("frame dimensions must be positive multiples of 64", 6);
  if (h.frame_count == 0) throw MalformedBitstream("frame count is zero", 14);
  if (h.base_qp > kMaxQp)
    throw MalformedBitstream("base qp " + std::to_string(h.base_qp) + " outside [0, 51]", 18);
  if (gop_byte > 2)
    throw MalformedBitstream("unknown gop type " + std::to_string(gop_byte), 19);
  h.gop = static_cast<GopType>(gop_byte);
  if (tools_byte & ~0x07u)
    throw MalformedBitstream("unknown tool flag bits", 20);
  h.tools = ToolFlags::from_byte(tools_byte);
  if (h.tools.nnlf && h.model_hashes.size() != 12)
    throw MalformedBitstream("loop filter streams carry 12 weight hashes", 21);
  if (!h.tools.nnlf && !h.model_hashes.empty())
    throw MalformedBitstream("weight hashes present without the loop filter", 21);

  hp.bytes = r.pos;
  return hp;
}

DecodeResult decode_sequence(const std::vector<uint8_t>& bytes, const std::string& weights_dir) {
  const HeaderParse hp = parse_sequence_header(bytes.data(), bytes.size());
  const SequenceHeader& header = hp.header;
  const int w = static_cast<int>(header.width), h = static_cast<int>(header.height);
  const int n = static_cast<int>(header.frame_count);

  WeightBank bank;
  if (header.tools.nnlf) {
    if (weights_dir.empty())
      throw std::invalid_argument("decode: stream uses the loop filter; pass the weights directory");
    for (int m = 0; m < 3; ++m)
      for (int t = 0; t < 4; ++t) {
        const std::string name = weight_file_name(m, static_cast<ModelSliceType>(t));
        const std::string path = weights_dir + "/" + name;
        const uint64_t expected = header.model_hashes[static_cast<size_t>(m) * 4 + t];
        try {
          bank.nets[static_cast<size_t>(m)][static_cast<size_t>(t)] = load_weights(path);
        } catch (const IoError& e) {
          throw IoError(std::string(e.what()) + "; the stream expects weight file " + name +
                        " with hash " + hex64(expected));
        }
        const uint64_t got = weights_file_hash(path);
        if (got != expected)
          throw MalformedWeights("weight file " + name + " hash " + hex64(got) +
                                 " does not match the stream's " + hex64(expected));
      }
  }

  DecodeResult result;
  result.header = header;
  result.frames.resize(static_cast<size_t>(n));
  std::vector<CodingInfoMap> info_by_poc(static_cast<size_t>(n));

  PartitionConfig pcfg;
  pcfg.tool_mask = header.tools.uqt ? kMaskAll : static_cast<ModeMask>(kMaskQT | kMaskBT);
  const int ctu_cols = w / kCtuSize, ctu_rows = h / kCtuSize;

  size_t pos = hp.bytes;
  for (const GopEntry& entry : build_gop(header.gop, n)) {
    if (pos + 4 > bytes.size())
      throw MalformedBitstream("missing picture length", pos);
    uint32_t payload_len = 0;
    for (int i = 0; i < 4; ++i)
      payload_len |= static_cast<uint32_t>(bytes[pos + i]) << (8 * i);
    pos += 4;
    if (pos + payload_len > bytes.size())
      throw MalformedBitstream("picture payload truncated", pos);

    const int slice_qp = clip(static_cast<int>(header.base_qp) + entry.layer, kMinQp, kMaxQp);
    const bool intra_slice = entry.slice == SliceType::kIntra;

    RefPicture ref0, ref1;
    const RefPicture *r0 = nullptr, *r1 = nullptr;
    if (!entry.refs0.empty()) {
      const int p = entry.refs0[0];
      ref0 = {&result.frames[static_cast<size_t>(p)], &info_by_poc[static_cast<size_t>(p)], p};
      r0 = &ref0;
    }
    if (!entry.refs1.empty()) {
      const int p = entry.refs1[0];
      ref1 = {&result.frames[static_cast<size_t>(p)], &info_by_poc[static_cast<size_t>(p)], p};
      r1 = &ref1;
    }

    FrameBuffer recon(w, h);
    recon.poc = entry.poc;
    FrameBuffer pred_frame;
    if (header.tools.nnlf) pred_frame = FrameBuffer(w, h);
    CodingInfoMap info(w, h);
    SliceCodingState st{entry.slice, pcfg, r0, r1, 0};
    ContextSet cs;
    RangeDecoder dec(bytes.data() + pos, payload_len, pos);

    const bool bim_on = bim_active(header.tools.bim, entry.layer, entry.poc, n);
    for (int cy = 0; cy < ctu_rows; ++cy)
      for (int cx = 0; cx < ctu_cols; ++cx) {
        int eff_qp = slice_qp;
        if (bim_on) eff_qp = clip(slice_qp + parse_qp_delta(dec, cs), kMinQp, kMaxQp);
        const BlockRect rect{cx * kCtuSize, cy * kCtuSize, kCtuSize, kCtuSize};
        parse_ctu(rect, recon, info, st, eff_qp, dec, cs,
                  header.tools.nnlf ? &pred_frame : nullptr);
      }

    if (header.tools.nnlf) {
      const auto [enable, model] = parse_filter_slice(dec, cs);
      if (enable) {
        FilterDecision fd;
        fd.slice_enable = true;
        fd.model_index = model;
        fd.ctu_flags.resize(static_cast<size_t>(ctu_cols) * ctu_rows);
        for (auto& flag : fd.ctu_flags)
          flag = parse_filter_ctu_flag(dec, cs) ? 1 : 0;
        const FilterNets nets{
            &bank.nets[static_cast<size_t>(model)][intra_slice ? 0 : 1],
            &bank.nets[static_cast<size_t>(model)][intra_slice ? 2 : 3]};
        const FilterAux aux = build_filter_aux(info, intra_slice);
        const FrameBuffer filtered =
            filter_frame(nets, recon, pred_frame, aux, slice_qp, intra_slice);
        recon = apply_filter_decision(fd, filtered, recon);
        recon.poc = entry.poc;
      }
    }

    pos += payload_len;
    result.frames[static_cast<size_t>(entry.poc)] = std::move(recon);
    info_by_poc[static_cast<size_t>(entry.poc)] = std::move(info);
  }

  if (pos != bytes.size())
    throw MalformedBitstream("trailing bytes after the last picture", pos);
  return result;
}

}  // namespace uvc
