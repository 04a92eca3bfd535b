#include <algorithm>
#include <random>
#include <stdexcept>
#include <utility>

#include "uvc/common.hpp"
#include "uvc/ctu_coder.hpp"
#include "uvc/md5.hpp"
#include "uvc/nn_filter.hpp"
#include "uvc/nn_train.hpp"
#include "uvc/pipeline.hpp"
#include "uvc/rdo.hpp"
#include "uvc/syntax.hpp"

namespace uvc {
namespace {

void put_u16(std::vector<uint8_t>& out, uint16_t v) {
  out.push_back(static_cast<uint8_t>(v & 0xFF));
  out.push_back(static_cast<uint8_t>(v >> 8));
}

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>((v >> (8 * i)) & 0xFF));
}

void put_u64(std::vector<uint8_t>& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<uint8_t>((v >> (8 * i)) & 0xFF));
}

}  // namespace

void append_sequence_header(std::vector<uint8_t>& out, const SequenceHeader& h) {
  out.insert(out.end(), kStreamMagic, kStreamMagic + 4);
  put_u16(out, h.version);
  put_u32(out, h.width);
  put_u32(out, h.height);
  put_u32(out, h.frame_count);
  out.push_back(h.base_qp);
  out.push_back(static_cast<uint8_t>(h.gop));
  out.push_back(h.tools.to_byte());
  out.push_back(static_cast<uint8_t>(h.model_hashes.size()));
  for (uint64_t v : h.model_hashes) put_u64(out, v);
}

std::string weight_file_name(int model, ModelSliceType t) {
  static const char* kNames[4] = {"intra_luma", "inter_luma", "intra_chroma", "inter_chroma"};
  return "model" + std::to_string(model) + "_" + kNames[static_cast<int>(t)] + ".nnw";
}

WeightBank load_weight_bank(const std::string& dir) {
  WeightBank bank;
  for (int m = 0; m < 3; ++m)
    for (int t = 0; t < 4; ++t) {
      const std::string path = dir + "/" + weight_file_name(m, static_cast<ModelSliceType>(t));
      bank.nets[static_cast<size_t>(m)][static_cast<size_t>(t)] = load_weights(path);
      bank.hashes[static_cast<size_t>(m) * 4 + t] = weights_file_hash(path);
    }
  return bank;
}

std::string frame_md5(const FrameBuffer& f) {
  Md5 md5;
  for (const PlaneBuffer* p : {&f.y, &f.u, &f.v})
    for (int y = 0; y < p->height(); ++y) md5.update(p->row(y), static_cast<size_t>(p->width()));
  return md5.hex_digest();
}

std::string sequence_md5(const std::vector<FrameBuffer>& frames) {
  Md5 md5;
  for (const FrameBuffer& f : frames) {
    const std::string h = frame_md5(f);
    md5.update(h.data(), h.size());
  }
  return md5.hex_digest();
}

EncodeResult encode_sequence(const std::vector<FrameBuffer>& frames, const EncoderConfig& cfg) {
  if (frames.empty()) throw std::invalid_argument("encode: no frames");
  const int w = frames[0].width(), h = frames[0].height();
  if (w <= 0 || h <= 0 || w % kCtuSize != 0 || h % kCtuSize != 0)
    throw std::invalid_argument("encode: frame dimensions must be positive multiples of 64");
  for (const auto& f : frames)
    if (f.width() != w || f.height() != h)
      throw std::invalid_argument("encode: frames must share dimensions");
  if (cfg.base_qp < kMinQp || cfg.base_qp > kMaxQp)
    throw std::invalid_argument("encode: base qp " + std::to_string(cfg.base_qp) +
                                " outside [0, 51]");
  if (cfg.tools.nnlf && cfg.weights_dir.empty())
    throw std::invalid_argument("encode: the loop filter needs a weights directory");

  const int n = static_cast<int>(frames.size());
  WeightBank bank;
  if (cfg.tools.nnlf) bank = load_weight_bank(cfg.weights_dir);

  SequenceHeader header;
  header.width = static_cast<uint32_t>(w);
  header.height = static_cast<uint32_t>(h);
  header.frame_count = static_cast<uint32_t>(n);
  header.base_qp = static_cast<uint8_t>(cfg.base_qp);
  header.gop = cfg.gop;
  header.tools = cfg.tools;
  if (cfg.tools.nnlf)
    header.model_hashes.assign(bank.hashes.begin(), bank.hashes.end());

  EncodeResult result;
  append_sequence_header(result.bytes, header);
  result.stats.resize(static_cast<size_t>(n));
  result.recon.resize(static_cast<size_t>(n));

  PartitionConfig pcfg;
  pcfg.tool_mask = cfg.tools.uqt ? kMaskAll : static_cast<ModeMask>(kMaskQT | kMaskBT);

  const double sigma = cfg.bim_sigma > 0.0 ? cfg.bim_sigma : default_bim_sigma(cfg.base_qp);
  std::vector<const PlaneBuffer*> src_luma;
  src_luma.reserve(static_cast<size_t>(n));
  for (const auto& f : frames) src_luma.push_back(&f.y);

  std::vector<CodingInfoMap> info_by_poc(static_cast<size_t>(n));
  const int ctu_cols = w / kCtuSize, ctu_rows = h / kCtuSize;

  for (const GopEntry& entry : build_gop(cfg.gop, n)) {
    const FrameBuffer& src = frames[static_cast<size_t>(entry.poc)];
    const int slice_qp = clip(cfg.base_qp + entry.layer, kMinQp, kMaxQp);
    const bool intra_slice = entry.slice == SliceType::kIntra;
    const double lambda = lambda_from_qp(slice_qp, intra_slice);

    RefPicture ref0, ref1;
    const RefPicture *r0 = nullptr, *r1 = nullptr;
    if (!entry.refs0.empty()) {
      const int p = entry.refs0[0];
      ref0 = {&result.recon[static_cast<size_t>(p)], &info_by_poc[static_cast<size_t>(p)], p};
      r0 = &ref0;
    }
    if (!entry.refs1.empty()) {
      const int p = entry.refs1[0];
      ref1 = {&result.recon[static_cast<size_t>(p)], &info_by_poc[static_cast<size_t>(p)], p};
      r1 = &ref1;
    }

    FrameBuffer recon(w, h);
    recon.poc = entry.poc;
    const bool want_pred = cfg.tools.nnlf || cfg.keep_aux;
    FrameBuffer pred_frame;
    if (want_pred) pred_frame = FrameBuffer(w, h);
    CodingInfoMap info(w, h);
    SliceCodingState st{entry.slice, pcfg, r0, r1, 0};
    ContextSet cs;
    RangeEncoder enc;

    const bool bim_on = bim_active(cfg.tools.bim, entry.layer, entry.poc, n);
    QpOffsetMap deltas;
    if (bim_on) deltas = compute_bim_deltas(src_luma, entry.poc, sigma, cfg.bim_thresholds);

    double qp_sum = 0.0;
    for (int cy = 0; cy < ctu_rows; ++cy)
      for (int cx = 0; cx < ctu_cols; ++cx) {
        int eff_qp = slice_qp;
        if (bim_on) {
          const int d = deltas.at(cx, cy);
          code_qp_delta(enc, cs, d);
          eff_qp = clip(slice_qp + d, kMinQp, kMaxQp);
        }
        qp_sum += eff_qp;

        const BlockRect rect{cx * kCtuSize, cy * kCtuSize, kCtuSize, kCtuSize};
        CtuSearchInput sin;
        sin.src_y = &src.y;
        sin.slice = entry.slice;
        sin.qp = eff_qp;
        sin.lambda = lambda;
        sin.cfg = pcfg;
        sin.search_range = cfg.search_range;
        sin.ref0 = r0;
        sin.ref1 = r1;
        RdSearch search(sin, recon.y);
        ContextSet search_cs = cs;  // emission advances the real contexts
        const RdSearchResult found = search.run(rect, search_cs);
        emit_ctu(*found.node, src, recon, info, st, eff_qp, enc, cs,
                 want_pred ? &pred_frame : nullptr);
      }

    if (cfg.tools.nnlf) {
      std::array<FilterNets, kNumFilterModels> nets;
      for (int m = 0; m < kNumFilterModels; ++m)
        nets[static_cast<size_t>(m)] = {
            &bank.nets[static_cast<size_t>(m)][intra_slice ? 0 : 1],
            &bank.nets[static_cast<size_t>(m)][intra_slice ? 2 : 3]};
      FilterSelection sel =
          select_filtering(nets, src, recon, pred_frame, info, slice_qp, intra_slice, lambda);
      code_filter_slice(enc, cs, sel.decision.slice_enable, sel.decision.model_index);
      if (sel.decision.slice_enable)
        for (uint8_t flag : sel.decision.ctu_flags) code_filter_ctu_flag(enc, cs, flag != 0);
      recon = std::move(sel.frame);
      recon.poc = entry.poc;
    }

    const std::vector<uint8_t> payload = enc.finish();
    put_u32(result.bytes, static_cast<uint32_t>(payload.size()));
    result.bytes.insert(result.bytes.end(), payload.begin(), payload.end());

    FrameStats& fs = result.stats[static_cast<size_t>(entry.poc)];
    fs.poc = entry.poc;
    fs.layer = entry.layer;
    fs.slice = entry.slice;
    fs.qp_effective_mean = qp_sum / (static_cast<double>(ctu_cols) * ctu_rows);
    fs.bits = 8ull * (4 + payload.size());
    fs.psnr_y = psnr(src.y, recon.y);
    fs.psnr_u = psnr(src.u, recon.u);
    fs.psnr_v = psnr(src.v, recon.v);

    result.recon[static_cast<size_t>(entry.poc)] = std::move(recon);
    if (cfg.keep_aux) {
      if (result.pred.empty()) result.pred.resize(static_cast<size_t>(n));
      result.pred[static_cast<size_t>(entry.poc)] = std::move(pred_frame);
    }
    info_by_poc[static_cast<size_t>(entry.poc)] = std::move(info);
  }
  if (cfg.keep_aux) result.info = std::move(info_by_poc);
  return result;
}

std::array<double, 12> train_weight_bank(const std::vector<FrameBuffer>& frames,
                                         const BankTrainConfig& cfg, const std::string& dir) {
  if (frames.empty()) throw std::invalid_argument("train: no input frames");
  const int w = frames[0].width();
  const int h = frames[0].height();
  if (cfg.patch <= 0 || cfg.patch > w / 2 || cfg.patch > h / 2)
    throw std::invalid_argument("train: patch size must fit inside the chroma planes");
  if (cfg.patches_per_frame <= 0) throw std::invalid_argument("train: patches per frame must be positive");

  std::array<double, 12> losses{};
  for (int band = 0; band < kNumFilterModels; ++band) {
    const int qp = cfg.band_qps[static_cast<size_t>(band)];
    for (const bool intra : {true, false}) {
      EncoderConfig ec;
      ec.base_qp = qp;
      ec.gop = intra ? GopType::kIntraOnly : GopType::kLowDelay;
      ec.tools.uqt = true;
      ec.search_range = cfg.search_range;
      ec.keep_aux = true;
      EncodeResult er = encode_sequence(frames, ec);

      std::vector<TrainPair> luma_pairs;
      std::vector<TrainPair> chroma_pairs;
      std::mt19937 rng(cfg.seed + 97u * static_cast<uint32_t>(band) + (intra ? 0u : 31u));
      for (size_t poc = 0; poc < frames.size(); ++poc) {
        if (!intra && poc == 0) continue;  // the low-delay lead frame is an intra slice
        const FrameBuffer& recon = er.recon[poc];
        const FrameBuffer& pred = er.pred[poc];
        const FilterAux aux = build_filter_aux(er.info[poc], intra);
        const TensorStack stack_y =
            build_luma_inputs(recon.y, pred.y, aux.bs_y, qp, intra ? &aux.mask_y : nullptr);
        const TensorStack stack_c = build_chroma_inputs(
            recon.u, recon.v, pred.u, pred.v, aux.bs_c, qp, intra ? &aux.mask_c : nullptr, recon.y);
        for (int k = 0; k < cfg.patches_per_frame; ++k) {
          const int x = static_cast<int>(rng() % static_cast<uint32_t>(w - cfg.patch + 1));
          const int y = static_cast<int>(rng() % static_cast<uint32_t>(h - cfg.patch + 1));
          luma_pairs.push_back({crop_stack(stack_y, x, y, cfg.patch, cfg.patch),
                                target_from_planes({&frames[poc].y}, x, y, cfg.patch, cfg.patch)});
          const int cx = static_cast<int>(rng() % static_cast<uint32_t>(w / 2 - cfg.patch + 1));
          const int cy = static_cast<int>(rng() % static_cast<uint32_t>(h / 2 - cfg.patch + 1));
          chroma_pairs.push_back(
              {crop_stack(stack_c, cx, cy, cfg.patch, cfg.patch),
               target_from_planes({&frames[poc].u, &frames[poc].v}, cx, cy, cfg.patch, cfg.patch)});
        }
      }

      const ModelSliceType luma_type = intra ? ModelSliceType::kIntraLuma : ModelSliceType::kInterLuma;
      const ModelSliceType chroma_type =
          intra ? ModelSliceType::kIntraChroma : ModelSliceType::kInterChroma;
      TrainConfig tc;
      tc.steps = cfg.steps;
      tc.lr = cfg.lr;
      tc.batch = cfg.batch;
      tc.seed = cfg.seed;
      const struct {
        ModelSliceType type;
        const std::vector<TrainPair>* data;
      } jobs[] = {{luma_type, &luma_pairs}, {chroma_type, &chroma_pairs}};
      for (const auto& job : jobs) {
        ModelWeights model =
            make_model(job.type, cfg.seed + 1000u + 4u * static_cast<uint32_t>(band) +
                                     static_cast<uint32_t>(job.type));
        const TrainResult tr = train_model(model, *job.data, tc);
        save_weights(model, dir + "/" + weight_file_name(band, job.type));
        losses[static_cast<size_t>(band) * 4 + static_cast<size_t>(job.type)] =
            tr.loss_trace.empty() ? training_loss(model, (*job.data)[0]) : tr.loss_trace.back();
      }
    }
  }
  return losses;
}

}  // namespace uvc
