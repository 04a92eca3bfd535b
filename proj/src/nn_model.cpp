#include "uvc/nn_model.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <random>

namespace uvc {
namespace {

constexpr uint16_t kWeightsVersion = 1;
constexpr int kWidth = 16;  // residual-block channel width

float next_uniform(std::mt19937& rng, float bound) {
  // [-bound, bound), explicit mapping for portability
  const double u = static_cast<double>(rng()) / 4294967296.0;
  return static_cast<float>((2.0 * u - 1.0) * bound);
}

Layer make_conv(std::mt19937& rng, int in_ch, int out_ch, bool zero_init) {
  Layer l;
  l.kind = LayerKind::kConv3x3;
  l.in_ch = in_ch;
  l.out_ch = out_ch;
  l.ksize = 3;
  l.kernel.assign(static_cast<size_t>(out_ch) * in_ch * 9, 0.0f);
  l.bias.assign(static_cast<size_t>(out_ch), 0.0f);
  if (!zero_init) {
    const float bound = static_cast<float>(std::sqrt(2.0 / (in_ch * 9)));
    for (float& w : l.kernel) w = next_uniform(rng, bound);
  }
  return l;
}

Layer make_prelu(int ch) {
  Layer l;
  l.kind = LayerKind::kPRelu;
  l.in_ch = ch;
  l.out_ch = ch;
  l.ksize = 0;
  l.slopes.assign(static_cast<size_t>(ch), 0.25f);
  return l;
}

Layer make_skip(int ch) {
  Layer l;
  l.kind = LayerKind::kAddSkip;
  l.in_ch = ch;
  l.out_ch = ch;
  l.ksize = 0;
  return l;
}

void put_u16(std::vector<uint8_t>& b, uint16_t v) {
  b.push_back(static_cast<uint8_t>(v & 0xFF));
  b.push_back(static_cast<uint8_t>(v >> 8));
}

void put_f32(std::vector<uint8_t>& b, float v) {
  uint32_t u;
  std::memcpy(&u, &v, 4);
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<uint8_t>((u >> (8 * i)) & 0xFF));
}

class Reader {
 public:
  Reader(const uint8_t* p, size_t n) : p_(p), n_(n) {}
  uint8_t u8() {
    need(1);
    return p_[pos_++];
  }
  uint16_t u16() {
    need(2);
    uint16_t v = static_cast<uint16_t>(p_[pos_] | (p_[pos_ + 1] << 8));
    pos_ += 2;
    return v;
  }
  float f32() {
    need(4);
    uint32_t u = 0;
    for (int i = 0; i < 4; ++i) u |= static_cast<uint32_t>(p_[pos_ + i]) << (8 * i);
    pos_ += 4;
    float v;
    std::memcpy(&v, &u, 4);
    return v;
  }
  bool done() const { return pos_ == n_; }

 private:
  void need(size_t k) const {
    if (pos_ + k > n_) throw MalformedWeights("weight file truncated");
  }
  const uint8_t* p_;
  size_t n_;
  size_t pos_ = 0;
};

std::vector<uint8_t> read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open weight file: " + path);
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                             std::istreambuf_iterator<char>());
  return bytes;
}

}  // namespace

int model_input_channels(ModelSliceType t) {
  switch (t) {
    case ModelSliceType::kIntraLuma: return 5;
    case ModelSliceType::kInterLuma: return 4;
    case ModelSliceType::kIntraChroma: return 8;
    case ModelSliceType::kInterChroma: return 7;
  }
  return 0;
}

int model_output_channels(ModelSliceType t) {
  return (t == ModelSliceType::kIntraLuma || t == ModelSliceType::kInterLuma) ? 1 : 2;
}

ModelWeights make_model(ModelSliceType t, uint32_t seed) {
  std::mt19937 rng(seed);
  ModelWeights m;
  m.slice_type = t;
  m.layers.push_back(make_conv(rng, model_input_channels(t), kWidth, false));
  m.layers.push_back(make_prelu(kWidth));
  for (int b = 0; b < 4; ++b) {
    m.layers.push_back(make_conv(rng, kWidth, kWidth, false));
    m.layers.push_back(make_prelu(kWidth));
    m.layers.push_back(make_conv(rng, kWidth, kWidth, false));
    m.layers.push_back(make_skip(kWidth));
  }
  m.layers.push_back(make_conv(rng, kWidth, model_output_channels(t), true));
  validate_model(m);
  return m;
}

void validate_model(const ModelWeights& m) {
  if (m.layers.empty()) throw MalformedWeights("model has no layers");
  if (m.layers.front().in_ch != model_input_channels(m.slice_type))
    throw MalformedWeights("first layer input channels do not match slice type");
  for (size_t i = 0; i < m.layers.size(); ++i) {
    const Layer& l = m.layers[i];
    if (l.in_ch <= 0 || l.out_ch <= 0 || l.in_ch > 1024 || l.out_ch > 1024)
      throw MalformedWeights("layer " + std::to_string(i) + " has invalid channel counts");
    if (i > 0 && l.in_ch != m.layers[i - 1].out_ch)
      throw MalformedWeights("layer " + std::to_string(i) + " input does not chain");
    switch (l.kind) {
      case LayerKind::kConv3x3:
      case LayerKind::kConv1x1: {
        const int k = l.kind == LayerKind::kConv3x3 ? 3 : 1;
        if (l.ksize != k) throw MalformedWeights("conv layer kernel size mismatch");
        if (l.kernel.size() != static_cast<size_t>(l.out_ch) * l.in_ch * k * k ||
            l.bias.size() != static_cast<size_t>(l.out_ch))
          throw MalformedWeights("conv layer parameter count mismatch");
        break;
      }
      case LayerKind::kPRelu:
        if (l.in_ch != l.out_ch || l.slopes.size() != static_cast<size_t>(l.out_ch))
          throw MalformedWeights("prelu layer parameter count mismatch");
        break;
      case LayerKind::kAddSkip: {
        if (l.in_ch != l.out_ch) throw MalformedWeights("add-skip channel mismatch");
        if (i < 4) throw MalformedWeights("add-skip too early in the network");
        if (m.layers[i - 4].out_ch != l.out_ch)
          throw MalformedWeights("add-skip source channel mismatch");
        break;
      }
      default:
        throw MalformedWeights("unknown layer kind");
    }
  }
}

void save_weights(const ModelWeights& m, const std::string& path) {
  validate_model(m);
  std::vector<uint8_t> b;
  b.push_back('N');
  b.push_back('N');
  b.push_back('L');
  b.push_back('F');
  put_u16(b, kWeightsVersion);
  b.push_back(static_cast<uint8_t>(m.slice_type));
  put_u16(b, static_cast<uint16_t>(m.layers.size()));
  for (const Layer& l : m.layers) {
    b.push_back(static_cast<uint8_t>(l.kind));
    put_u16(b, static_cast<uint16_t>(l.in_ch));
    put_u16(b, static_cast<uint16_t>(l.out_ch));
    b.push_back(static_cast<uint8_t>(l.ksize));
    for (float w : l.kernel) put_f32(b, w);
    for (float w : l.bias) put_f32(b, w);
    for (float w : l.slopes) put_f32(b, w);
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open for writing: " + path);
  f.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
  if (!f) throw IoError("write failed: " + path);
}

ModelWeights load_weights(const std::string& path) {
  const std::vector<uint8_t> bytes = read_file(path);
  Reader r(bytes.data(), bytes.size());
  if (r.u8() != 'N' || r.u8() != 'N' || r.u8() != 'L' || r.u8() != 'F')
    throw MalformedWeights("bad magic in " + path);
  const uint16_t version = r.u16();
  if (version != kWeightsVersion)
    throw MalformedWeights("unsupported weight file version " + std::to_string(version));
  const uint8_t st = r.u8();
  if (st > 3) throw MalformedWeights("bad slice-type code " + std::to_string(st));
  ModelWeights m;
  m.slice_type = static_cast<ModelSliceType>(st);
  const uint16_t n_layers = r.u16();
  if (n_layers == 0 || n_layers > 256) throw MalformedWeights("bad layer count");
  for (int i = 0; i < n_layers; ++i) {
    Layer l;
    const uint8_t kind = r.u8();
    if (kind > 3) throw MalformedWeights("bad layer kind");
    l.kind = static_cast<LayerKind>(kind);
    l.in_ch = r.u16();
    l.out_ch = r.u16();
    l.ksize = r.u8();
    if (l.in_ch == 0 || l.out_ch == 0 || l.in_ch > 1024 || l.out_ch > 1024)
      throw MalformedWeights("bad channel counts in layer " + std::to_string(i));
    if (l.kind == LayerKind::kConv3x3 || l.kind == LayerKind::kConv1x1) {
      const size_t nk = static_cast<size_t>(l.out_ch) * l.in_ch * l.ksize * l.ksize;
      l.kernel.resize(nk);
      for (float& w : l.kernel) w = r.f32();
      l.bias.resize(static_cast<size_t>(l.out_ch));
      for (float& w : l.bias) w = r.f32();
    } else if (l.kind == LayerKind::kPRelu) {
      l.slopes.resize(static_cast<size_t>(l.out_ch));
      for (float& w : l.slopes) w = r.f32();
    }
    m.layers.push_back(std::move(l));
  }
  if (!r.done()) throw MalformedWeights("trailing bytes in " + path);
  validate_model(m);
  return m;
}

uint64_t weights_file_hash(const std::string& path) {
  const std::vector<uint8_t> bytes = read_file(path);
  return fnv1a(bytes.data(), bytes.size());
}

}  // namespace uvc
