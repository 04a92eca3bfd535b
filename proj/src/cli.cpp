#include <algorithm>
#include <array>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "uvc/cli.hpp"
#include "uvc/common.hpp"
#include "uvc/metrics.hpp"
#include "uvc/nn_filter.hpp"
#include "uvc/pipeline.hpp"
#include "uvc/yuv_io.hpp"

namespace uvc {
namespace {

ToolFlags parse_tools(const std::string& spec) {
  ToolFlags t;
  if (spec.empty() || spec == "none") return t;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "uqt") t.uqt = true;
    else if (item == "nnlf") t.nnlf = true;
    else if (item == "bim") t.bim = true;
    else if (!item.empty())
      throw std::invalid_argument("unknown tool '" + item + "' (expected uqt, nnlf, bim, or none)");
  }
  return t;
}

std::string tools_name(const ToolFlags& t) {
  std::string s;
  for (const auto& [on, name] : {std::pair{t.uqt, "uqt"}, {t.nnlf, "nnlf"}, {t.bim, "bim"}})
    if (on) s += (s.empty() ? "" : "+") + std::string(name);
  return s.empty() ? "none" : s;
}

GopType parse_gop(const std::string& s) {
  if (s == "intra") return GopType::kIntraOnly;
  if (s == "ld") return GopType::kLowDelay;
  if (s == "ra8") return GopType::kRandomAccess8;
  throw std::invalid_argument("unknown gop '" + s + "' (expected intra, ld, or ra8)");
}

std::vector<FrameBuffer> load_clip(const std::string& path, int w, int h, int limit) {
  std::vector<FrameBuffer> frames = load_yuv420(path, w, h);
  if (limit > 0 && static_cast<int>(frames.size()) > limit)
    frames.resize(static_cast<size_t>(limit));
  return frames;
}

// Output paths are opened (and truncated) before any heavy work so a bad path
// fails fast instead of after minutes of encoding.
void ensure_writable(const std::string& path) {
  if (path.empty()) return;
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path + " for writing");
}

std::vector<uint8_t> read_file_bytes(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path);
  return std::vector<uint8_t>((std::istreambuf_iterator<char>(f)),
                              std::istreambuf_iterator<char>());
}

void write_file_bytes(const std::string& path, const std::vector<uint8_t>& bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path + " for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw IoError("write to " + path + " failed");
}

// One hex digest per frame, then a "sequence <digest>" trailer; the encoder
// and decoder emit the same format so the files can be diffed directly.
void write_md5_file(const std::string& path, const std::vector<FrameBuffer>& frames) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError("cannot open " + path + " for writing");
  for (const FrameBuffer& fr : frames) f << frame_md5(fr) << "\n";
  f << "sequence " << sequence_md5(frames) << "\n";
  if (!f) throw IoError("write to " + path + " failed");
}

void write_stats_csv(const std::string& path, const std::vector<FrameStats>& stats) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError("cannot open " + path + " for writing");
  f << "poc,layer,qp_effective_mean,bits,psnr_y,psnr_u,psnr_v\n";
  f << std::fixed << std::setprecision(4);
  for (const FrameStats& s : stats)
    f << s.poc << ',' << s.layer << ',' << s.qp_effective_mean << ',' << s.bits << ','
      << s.psnr_y << ',' << s.psnr_u << ',' << s.psnr_v << '\n';
  if (!f) throw IoError("write to " + path + " failed");
}

double stream_kbps(uint64_t total_bits, size_t frame_count) {
  return static_cast<double>(total_bits) * 30.0 / static_cast<double>(frame_count) / 1000.0;
}

std::string hash_hex(uint64_t h) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

// CLI11 only reads config files attached to the root app, so each
// subcommand's key=value file is expanded into argv tokens instead: file
// entries are appended after the explicit flags and keys already given on the
// command line are skipped, which makes flags win; keys that match no option
// of the subcommand are rejected.
std::string config_file_from(const std::vector<std::string>& tokens) {
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i] == "--config" && i + 1 < tokens.size()) return tokens[i + 1];
    if (tokens[i].rfind("--config=", 0) == 0) return tokens[i].substr(9);
  }
  return {};
}

bool flag_present(const std::vector<std::string>& tokens, const std::string& flag) {
  for (const std::string& t : tokens)
    if (t == flag || t.rfind(flag + "=", 0) == 0) return true;
  return false;
}

void append_config_tokens(const CLI::App& app, std::vector<std::string>& tokens) {
  if (tokens.empty()) return;
  const CLI::App* sub = app.get_subcommand_no_throw(tokens.front());
  if (sub == nullptr) return;
  const std::string file = config_file_from(tokens);
  if (file.empty()) return;
  std::ifstream in(file);
  if (!in) throw IoError("cannot open " + file);
  const auto trim = [](const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: " + file + ":" + std::to_string(lineno) +
                                  " is not key=value");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty() || key == "config" || sub->get_option_no_throw("--" + key) == nullptr)
      throw std::invalid_argument("config: unknown key '" + key + "'");
    if (flag_present(tokens, "--" + key)) continue;
    tokens.push_back("--" + key);
    tokens.push_back(value);
  }
}

const CLI::Validator kQpRange(
    [](std::string& s) -> std::string {
      int v = 0;
      try {
        v = std::stoi(s);
      } catch (...) {
        return "qp '" + s + "' is not an integer";
      }
      if (v < 0 || v > 51) return "qp " + s + " outside [0, 51]";
      return {};
    },
    "INT in [0, 51]");

const CLI::Validator kCtuMultiple(
    [](std::string& s) -> std::string {
      int v = 0;
      try {
        v = std::stoi(s);
      } catch (...) {
        return "'" + s + "' is not an integer";
      }
      if (v <= 0 || v % kCtuSize != 0)
        return s + " is not a positive multiple of " + std::to_string(kCtuSize);
      return {};
    },
    "INT multiple of 64");

// ---------------------------------------------------------------- encode --

struct EncodeArgs {
  std::string input, out, stats, recon, recon_md5, weights;
  std::string tools = "none", gop = "intra";
  int width = 0, height = 0, qp = 32, frames = 0, search_range = 8;
  double bim_sigma = 0.0;
  std::vector<double> bim_thresholds;
};

void run_encode(const EncodeArgs& a) {
  EncoderConfig cfg;
  cfg.base_qp = a.qp;
  cfg.gop = parse_gop(a.gop);
  cfg.tools = parse_tools(a.tools);
  cfg.search_range = a.search_range;
  cfg.bim_sigma = a.bim_sigma;
  cfg.weights_dir = a.weights;
  if (!a.bim_thresholds.empty()) {
    if (a.bim_thresholds.size() != 4)
      throw std::invalid_argument("bim-thresholds needs exactly 4 values");
    std::copy(a.bim_thresholds.begin(), a.bim_thresholds.end(), cfg.bim_thresholds.begin());
  }
  if (cfg.tools.nnlf && a.weights.empty())
    throw std::invalid_argument("tools include nnlf; pass --weights");

  ensure_writable(a.out);
  ensure_writable(a.stats);
  ensure_writable(a.recon);
  ensure_writable(a.recon_md5);

  const std::vector<FrameBuffer> frames = load_clip(a.input, a.width, a.height, a.frames);
  const EncodeResult er = encode_sequence(frames, cfg);

  write_file_bytes(a.out, er.bytes);
  if (!a.stats.empty()) write_stats_csv(a.stats, er.stats);
  if (!a.recon.empty()) save_yuv420(er.recon, a.recon);
  if (!a.recon_md5.empty()) write_md5_file(a.recon_md5, er.recon);

  uint64_t bits = 0;
  double py = 0.0;
  for (const FrameStats& s : er.stats) {
    bits += s.bits;
    py += s.psnr_y;
  }
  std::cout << "encoded " << frames.size() << " pictures to " << a.out << ": "
            << er.bytes.size() << " bytes, " << std::fixed << std::setprecision(2)
            << stream_kbps(bits, frames.size()) << " kbps, mean PSNR-Y "
            << py / static_cast<double>(frames.size()) << " dB\n";
}

// ---------------------------------------------------------------- decode --

struct DecodeArgs {
  std::string input, out, weights, md5;
};

void run_decode(const DecodeArgs& a) {
  ensure_writable(a.out);
  ensure_writable(a.md5);
  const std::vector<uint8_t> bytes = read_file_bytes(a.input);
  const DecodeResult dr = decode_sequence(bytes, a.weights);
  save_yuv420(dr.frames, a.out);
  if (!a.md5.empty()) write_md5_file(a.md5, dr.frames);
  std::cout << "decoded " << dr.frames.size() << " pictures (" << dr.header.width << "x"
            << dr.header.height << ", " << gop_type_name(dr.header.gop) << ", tools "
            << tools_name(dr.header.tools) << ") to " << a.out << "\n";
}

// --------------------------------------------------------------- metrics --

struct MetricsArgs {
  std::string csv, anchor, test, out;
};

void print_bd_table(std::ostream& os, const BdReport& pchip, const BdReport& cubic) {
  os << std::fixed << std::setprecision(2);
  os << "component  bd_rate_pchip_pct  bd_rate_cubic_pct\n";
  const std::array<std::pair<double, double>, 4> rows = {
      std::pair{pchip.y, cubic.y}, {pchip.u, cubic.u}, {pchip.v, cubic.v},
      {pchip.yuv(), cubic.yuv()}};
  const char* names[4] = {"y", "u", "v", "yuv"};
  for (int i = 0; i < 4; ++i)
    os << std::left << std::setw(11) << names[i] << std::right << std::setw(17)
       << rows[static_cast<size_t>(i)].first << std::setw(19)
       << rows[static_cast<size_t>(i)].second << "\n";
}

void write_bd_csv(std::ostream& os, const std::string& toolset, const BdReport& pchip,
                  const BdReport& cubic) {
  os << std::fixed << std::setprecision(6);
  os << toolset << ',' << pchip.y << ',' << pchip.u << ',' << pchip.v << ',' << pchip.yuv()
     << ',' << cubic.y << ',' << cubic.u << ',' << cubic.v << ',' << cubic.yuv() << '\n';
}

void run_metrics(const MetricsArgs& a) {
  ensure_writable(a.out);
  std::ifstream in(a.csv);
  if (!in) throw IoError("cannot open " + a.csv);
  const std::vector<RdCsvRow> rows = parse_rd_csv(in);

  BdReport pchip, cubic;
  const char* comps[3] = {"y", "u", "v"};
  double* pslots[3] = {&pchip.y, &pchip.u, &pchip.v};
  double* cslots[3] = {&cubic.y, &cubic.u, &cubic.v};
  for (int i = 0; i < 3; ++i) {
    const RdCurve anchor = curve_from_rows(rows, a.anchor, comps[i]);
    const RdCurve test = curve_from_rows(rows, a.test, comps[i]);
    for (const auto& [label, curve] : {std::pair{a.anchor, &anchor}, {a.test, &test}}) {
      const std::string warn = validate_rd_curve(*curve);
      if (!warn.empty())
        std::cerr << "warning: " << label << "/" << comps[i] << ": " << warn << "\n";
    }
    *pslots[i] = bd_rate(anchor, test);
    *cslots[i] = bd_rate_cubic(anchor, test);
  }

  std::cout << a.test << " vs " << a.anchor << ":\n";
  print_bd_table(std::cout, pchip, cubic);
  if (!a.out.empty()) {
    std::ofstream f(a.out, std::ios::trunc);
    if (!f) throw IoError("cannot open " + a.out + " for writing");
    f << "toolset,bd_y,bd_u,bd_v,bd_yuv,bdc_y,bdc_u,bdc_v,bdc_yuv\n";
    write_bd_csv(f, a.test, pchip, cubic);
    if (!f) throw IoError("write to " + a.out + " failed");
  }
}

// ----------------------------------------------------------------- train --

struct TrainArgs {
  std::string input, out;
  int width = 0, height = 0, frames = 0;
  int steps = 200, batch = 2, patch = 16, patches_per_frame = 8, search_range = 8;
  double lr = 1e-3;
  uint32_t seed = 1;
  std::vector<int> band_qps;
};

void run_train(const TrainArgs& a) {
  BankTrainConfig cfg;
  cfg.steps = a.steps;
  cfg.lr = a.lr;
  cfg.batch = a.batch;
  cfg.seed = a.seed;
  cfg.patch = a.patch;
  cfg.patches_per_frame = a.patches_per_frame;
  cfg.search_range = a.search_range;
  if (!a.band_qps.empty()) {
    if (a.band_qps.size() != 3)
      throw std::invalid_argument("band-qps needs exactly 3 values (one per QP band)");
    for (int qp : a.band_qps)
      if (qp < 0 || qp > 51)
        throw std::invalid_argument("band qp " + std::to_string(qp) + " outside [0, 51]");
    std::copy(a.band_qps.begin(), a.band_qps.end(), cfg.band_qps.begin());
  }

  const std::vector<FrameBuffer> frames = load_clip(a.input, a.width, a.height, a.frames);
  std::filesystem::create_directories(a.out);
  const std::array<double, 12> losses = train_weight_bank(frames, cfg, a.out);

  std::cout << std::scientific << std::setprecision(4);
  for (int m = 0; m < kNumFilterModels; ++m)
    for (int t = 0; t < 4; ++t) {
      const std::string name = weight_file_name(m, static_cast<ModelSliceType>(t));
      std::cout << name << "  loss " << losses[static_cast<size_t>(m) * 4 + t] << "  hash "
                << hash_hex(weights_file_hash(a.out + "/" + name)) << "\n";
    }
  std::cout << "trained 12 networks into " << a.out << "\n";
}

// ---------------------------------------------------------------- ablate --

struct AblateArgs {
  std::string input, weights, out, points;
  std::string gop = "ra8";
  std::string toolsets = "uqt;uqt,bim;uqt,bim,nnlf";
  int width = 0, height = 0, frames = 0, search_range = 8, jobs = 0;
  std::vector<int> qps;
};

struct RatePoint {
  double kbps = 0.0;
  double psnr[3] = {0.0, 0.0, 0.0};
};

void run_ablate(const AblateArgs& a) {
  std::vector<int> qps = a.qps.empty() ? std::vector<int>{22, 27, 32, 37, 42} : a.qps;
  if (qps.size() < 4)
    throw std::invalid_argument("ablate: BD-rate needs at least 4 QP points");
  for (int qp : qps)
    if (qp < 0 || qp > 51)
      throw std::invalid_argument("ablate: qp " + std::to_string(qp) + " outside [0, 51]");

  // Row 0 is always the anchor (every tool off); requested toolsets follow.
  std::vector<ToolFlags> rows(1);
  {
    std::stringstream ss(a.toolsets);
    std::string item;
    while (std::getline(ss, item, ';'))
      if (!item.empty()) rows.push_back(parse_tools(item));
  }
  for (const ToolFlags& t : rows)
    if (t.nnlf && a.weights.empty())
      throw std::invalid_argument("ablate: toolset '" + tools_name(t) +
                                  "' uses the loop filter; pass --weights");

  ensure_writable(a.out);
  ensure_writable(a.points);
  const GopType gop = parse_gop(a.gop);
  const std::vector<FrameBuffer> frames = load_clip(a.input, a.width, a.height, a.frames);

  const auto run_one = [&](ToolFlags tools, int qp) {
    EncoderConfig cfg;
    cfg.base_qp = qp;
    cfg.gop = gop;
    cfg.tools = tools;
    cfg.search_range = a.search_range;
    cfg.weights_dir = a.weights;
    const EncodeResult er = encode_sequence(frames, cfg);
    RatePoint p;
    uint64_t bits = 0;
    for (const FrameStats& s : er.stats) {
      bits += s.bits;
      p.psnr[0] += s.psnr_y;
      p.psnr[1] += s.psnr_u;
      p.psnr[2] += s.psnr_v;
    }
    p.kbps = stream_kbps(bits, frames.size());
    for (double& v : p.psnr) v /= static_cast<double>(frames.size());
    return p;
  };

  // Independent (toolset, QP) encodes run concurrently in fixed-size waves;
  // results land in an index-addressed table, so the merge is deterministic.
  std::vector<RatePoint> table(rows.size() * qps.size());
  std::vector<std::pair<size_t, size_t>> sched;
  for (size_t r = 0; r < rows.size(); ++r)
    for (size_t q = 0; q < qps.size(); ++q) sched.emplace_back(r, q);
  const size_t wave = a.jobs > 0 ? static_cast<size_t>(a.jobs)
                                 : std::max(1u, std::thread::hardware_concurrency());
  for (size_t start = 0; start < sched.size(); start += wave) {
    const size_t end = std::min(sched.size(), start + wave);
    std::vector<std::future<RatePoint>> futs;
    for (size_t i = start; i < end; ++i)
      futs.push_back(std::async(std::launch::async, run_one, rows[sched[i].first],
                                qps[sched[i].second]));
    for (size_t i = start; i < end; ++i)
      table[sched[i].first * qps.size() + sched[i].second] = futs[i - start].get();
  }

  const auto curve_of = [&](size_t row, int comp) {
    RdCurve c;
    for (size_t q = 0; q < qps.size(); ++q) {
      const RatePoint& p = table[row * qps.size() + q];
      c.points.push_back({p.kbps, p.psnr[comp]});
    }
    std::sort(c.points.begin(), c.points.end(),
              [](const RdPoint& x, const RdPoint& y) { return x.kbps < y.kbps; });
    const std::string warn = validate_rd_curve(c);
    if (!warn.empty())
      std::cerr << "warning: " << tools_name(rows[row]) << "/" << "yuv"[comp] << ": " << warn
                << "\n";
    return c;
  };

  std::ofstream report(a.out, std::ios::trunc);
  if (!report) throw IoError("cannot open " + a.out + " for writing");
  report << "toolset,bd_y,bd_u,bd_v,bd_yuv,bdc_y,bdc_u,bdc_v,bdc_yuv\n";
  for (size_t r = 0; r < rows.size(); ++r) {
    BdReport pchip, cubic;
    double* pslots[3] = {&pchip.y, &pchip.u, &pchip.v};
    double* cslots[3] = {&cubic.y, &cubic.u, &cubic.v};
    for (int comp = 0; comp < 3; ++comp) {
      const RdCurve anchor = curve_of(0, comp);
      const RdCurve test = curve_of(r, comp);
      *pslots[comp] = bd_rate(anchor, test);
      *cslots[comp] = bd_rate_cubic(anchor, test);
    }
    std::cout << "\n" << tools_name(rows[r]) << " vs anchor:\n";
    print_bd_table(std::cout, pchip, cubic);
    write_bd_csv(report, tools_name(rows[r]), pchip, cubic);
  }
  if (!report) throw IoError("write to " + a.out + " failed");

  if (!a.points.empty()) {
    std::ofstream pts(a.points, std::ios::trunc);
    if (!pts) throw IoError("cannot open " + a.points + " for writing");
    pts << "label,component,bitrate_kbps,psnr_db\n" << std::fixed << std::setprecision(6);
    const char* comps[3] = {"y", "u", "v"};
    for (size_t r = 0; r < rows.size(); ++r)
      for (int comp = 0; comp < 3; ++comp)
        for (const RdPoint& p : curve_of(r, comp).points)
          pts << tools_name(rows[r]) << ',' << comps[comp] << ',' << p.kbps << ',' << p.psnr
              << '\n';
    if (!pts) throw IoError("write to " + a.points + " failed");
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"block-based hybrid video codec with asymmetric quaternary partitioning,\n"
               "a learned in-loop filter and importance-adaptive quantization"};
  app.require_subcommand(1);

  // Registered for help and so the token pair survives parsing; the actual
  // file expansion happens in append_config_tokens before parse.
  std::string config_path_sink;
  const auto add_config = [&config_path_sink](CLI::App* sub) {
    sub->add_option("--config", config_path_sink,
                    "key=value file with this subcommand's flags; command-line flags win");
  };

  auto ea = std::make_shared<EncodeArgs>();
  CLI::App* enc = app.add_subcommand("encode", "compress a raw YUV 4:2:0 clip");
  add_config(enc);
  enc->add_option("--input", ea->input, "raw YUV 4:2:0 input file")
      ->required()
      ->check(CLI::ExistingFile);
  enc->add_option("--width", ea->width, "luma width")->required()->check(kCtuMultiple);
  enc->add_option("--height", ea->height, "luma height")->required()->check(kCtuMultiple);
  enc->add_option("--qp", ea->qp, "base quantization parameter")->check(kQpRange);
  enc->add_option("--gop", ea->gop, "coding structure: intra, ld, or ra8");
  enc->add_option("--tools", ea->tools, "comma-separated subset of uqt,nnlf,bim, or none");
  enc->add_option("--weights", ea->weights, "loop-filter weight directory (needed with nnlf)")
      ->check(CLI::ExistingDirectory);
  enc->add_option("--out", ea->out, "output stream path")->required();
  enc->add_option("--stats", ea->stats, "per-picture stats CSV path");
  enc->add_option("--recon", ea->recon, "write the encoder reconstruction as YUV 4:2:0");
  enc->add_option("--recon-md5", ea->recon_md5, "write per-frame reconstruction MD5 digests");
  enc->add_option("--frames", ea->frames, "encode only the first N frames (0 = all)");
  enc->add_option("--search-range", ea->search_range, "motion search range in integer pixels");
  enc->add_option("--bim-sigma", ea->bim_sigma,
                  "importance-map noise parameter (0 = derive from qp)");
  enc->add_option("--bim-thresholds", ea->bim_thresholds,
                  "four ascending importance thresholds in (0,1)")
      ->expected(0, 4)
      ->delimiter(',');
  enc->callback([ea] { run_encode(*ea); });

  auto da = std::make_shared<DecodeArgs>();
  CLI::App* dec = app.add_subcommand("decode", "reconstruct a stream to raw YUV 4:2:0");
  add_config(dec);
  dec->add_option("--input", da->input, "compressed stream")->required()->check(CLI::ExistingFile);
  dec->add_option("--out", da->out, "output YUV path")->required();
  dec->add_option("--weights", da->weights, "loop-filter weight directory")
      ->check(CLI::ExistingDirectory);
  dec->add_option("--md5", da->md5, "write per-frame MD5 digests of the output");
  dec->callback([da] { run_decode(*da); });

  auto ma = std::make_shared<MetricsArgs>();
  CLI::App* met = app.add_subcommand("metrics", "Bjontegaard rate deltas between two curves");
  add_config(met);
  met->add_option("--csv", ma->csv, "rate-distortion CSV (label,component,bitrate_kbps,psnr_db)")
      ->required()
      ->check(CLI::ExistingFile);
  met->add_option("--anchor", ma->anchor, "label of the anchor curve")->required();
  met->add_option("--test", ma->test, "label of the test curve")->required();
  met->add_option("--out", ma->out, "write the report as CSV");
  met->callback([ma] { run_metrics(*ma); });

  auto ta = std::make_shared<TrainArgs>();
  CLI::App* trn = app.add_subcommand("train", "train the loop-filter weight bank from a clip");
  add_config(trn);
  trn->add_option("--input", ta->input, "raw YUV 4:2:0 training clip")
      ->required()
      ->check(CLI::ExistingFile);
  trn->add_option("--width", ta->width, "luma width")->required()->check(kCtuMultiple);
  trn->add_option("--height", ta->height, "luma height")->required()->check(kCtuMultiple);
  trn->add_option("--out", ta->out, "output weight directory")->required();
  trn->add_option("--frames", ta->frames, "use only the first N frames (0 = all)");
  trn->add_option("--steps", ta->steps, "optimizer steps per network");
  trn->add_option("--lr", ta->lr, "learning rate");
  trn->add_option("--batch", ta->batch, "patches per optimizer step");
  trn->add_option("--seed", ta->seed, "RNG seed for init and sampling");
  trn->add_option("--patch", ta->patch, "training patch side in pixels");
  trn->add_option("--patches-per-frame", ta->patches_per_frame, "patches cropped per frame");
  trn->add_option("--band-qps", ta->band_qps, "three encode QPs, one per model band")
      ->expected(0, 3)
      ->delimiter(',');
  trn->add_option("--search-range", ta->search_range, "motion search range for the gather pass");
  trn->callback([ta] { run_train(*ta); });

  auto aa = std::make_shared<AblateArgs>();
  CLI::App* abl = app.add_subcommand("ablate", "BD-rate report of tool sets against the anchor");
  add_config(abl);
  abl->add_option("--input", aa->input, "raw YUV 4:2:0 clip")
      ->required()
      ->check(CLI::ExistingFile);
  abl->add_option("--width", aa->width, "luma width")->required()->check(kCtuMultiple);
  abl->add_option("--height", aa->height, "luma height")->required()->check(kCtuMultiple);
  abl->add_option("--out", aa->out, "report CSV path")->required();
  abl->add_option("--frames", aa->frames, "use only the first N frames (0 = all)");
  abl->add_option("--qps", aa->qps, "QP list (>= 4 values)")->expected(0, 16)->delimiter(',');
  abl->add_option("--toolsets", aa->toolsets,
                  "semicolon-separated tool sets, each a comma list (anchor always runs)");
  abl->add_option("--weights", aa->weights, "loop-filter weight directory")
      ->check(CLI::ExistingDirectory);
  abl->add_option("--gop", aa->gop, "coding structure: intra, ld, or ra8");
  abl->add_option("--points", aa->points, "also dump the raw RD points as CSV");
  abl->add_option("--search-range", aa->search_range, "motion search range in integer pixels");
  abl->add_option("--jobs", aa->jobs, "concurrent encodes (0 = hardware threads)");
  abl->callback([aa] { run_ablate(*aa); });

  try {
    std::vector<std::string> tokens(argv + 1, argv + argc);
    append_config_tokens(app, tokens);
    std::reverse(tokens.begin(), tokens.end());  // parse(vector) expects reversed argv
    app.parse(tokens);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace uvc
