// Copyright 2026 The ovl Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ovl/net.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

namespace ovl {

Activation parse_activation(std::string_view name) {
  if (name == "silu") return Activation::kSilu;
  if (name == "tanh") return Activation::kTanh;
  throw InvalidArgument("unknown activation '" + std::string(name) + "'");
}

std::string_view to_string(Activation a) { return a == Activation::kSilu ? "silu" : "tanh"; }

void NetworkConfig::validate() const {
  require(input_dim >= 1, "net: input_dim must be >= 1");
  require(time_features >= 1, "net: time_features must be >= 1");
  require(num_classes >= 1, "net: num_classes must be >= 1");
  require(embed_dim >= 1, "net: embed_dim must be >= 1");
  for (int w : hidden) require(w >= 1, "net: hidden widths must be >= 1");
}

ParameterVector NetworkParameters::flatten() const {
  ParameterVector flat(embedding);
  for (const auto& l : layers) {
    flat.insert(flat.end(), l.weight.begin(), l.weight.end());
    flat.insert(flat.end(), l.bias.begin(), l.bias.end());
  }
  return flat;
}

NetworkParameters NetworkParameters::unflatten(const NetworkConfig& cfg, std::span<const double> flat) {
  cfg.validate();
  NetworkParameters p;
  auto it = flat.begin();
  auto take = [&](std::size_t n) {
    require(static_cast<std::size_t>(std::distance(it, flat.end())) >= n, "unflatten: parameter vector too short");
    std::vector<double> v(it, it + static_cast<std::ptrdiff_t>(n));
    it += static_cast<std::ptrdiff_t>(n);
    return v;
  };
  p.embedding = take(static_cast<std::size_t>((cfg.num_classes + 1) * cfg.embed_dim));
  int in = cfg.concat_dim();
  std::vector<int> outs = cfg.hidden;
  outs.push_back(cfg.input_dim);
  for (int out : outs) {
    Dense d;
    d.in = in;
    d.out = out;
    d.weight = take(static_cast<std::size_t>(in) * static_cast<std::size_t>(out));
    d.bias = take(static_cast<std::size_t>(out));
    p.layers.push_back(std::move(d));
    in = out;
  }
  require(it == flat.end(), "unflatten: parameter vector too long");
  return p;
}

namespace {

inline double sigmoid(double a) { return 1.0 / (1.0 + std::exp(-a)); }

inline double activate(Activation kind, double a) {
  if (kind == Activation::kSilu) return a * sigmoid(a);
  return std::tanh(a);
}

inline double activate_grad(Activation kind, double a) {
  if (kind == Activation::kSilu) {
    const double s = sigmoid(a);
    return s * (1.0 + a * (1.0 - s));
  }
  const double th = std::tanh(a);
  return 1.0 - th * th;
}

}  // namespace

struct NoisePredictor::Tape {
  // inputs[l] feeds dense layer l; pre[l] is its pre-activation (hidden only).
  std::vector<std::vector<double>> inputs;
  std::vector<std::vector<double>> pre;
};

NoisePredictor::NoisePredictor(NetworkConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  std::size_t offset = static_cast<std::size_t>((cfg_.num_classes + 1) * cfg_.embed_dim);
  int in = cfg_.concat_dim();
  std::vector<int> outs = cfg_.hidden;
  outs.push_back(cfg_.input_dim);
  for (int out : outs) {
    LayerView lv{offset, offset + static_cast<std::size_t>(in) * static_cast<std::size_t>(out), in, out};
    layers_.push_back(lv);
    offset = lv.bias_offset + static_cast<std::size_t>(out);
    in = out;
  }
  num_params_ = offset;
}

void NoisePredictor::time_features(int t, std::span<double> out) const {
  const int k = cfg_.time_features;
  const double tt = static_cast<double>(t);
  for (int j = 0; j < k; ++j) {
    const int i = j / 2;
    const double freq = std::exp(-std::log(10000.0) * (2.0 * i) / static_cast<double>(k));
    out[static_cast<std::size_t>(j)] = (j % 2 == 0) ? std::sin(tt * freq) : std::cos(tt * freq);
  }
}

void NoisePredictor::check_inputs(std::span<const double> params, std::span<const double> x, int cls) const {
  if (params.size() != num_params_) {
    throw InvalidArgument("net: expected " + std::to_string(num_params_) + " parameters, got " +
                          std::to_string(params.size()));
  }
  if (x.size() != static_cast<std::size_t>(cfg_.input_dim)) {
    throw InvalidArgument("net: input has dimension " + std::to_string(x.size()) + ", expected " +
                          std::to_string(cfg_.input_dim));
  }
  if (cls < 0 || cls > cfg_.num_classes) {
    throw InvalidArgument("net: class " + std::to_string(cls) + " outside [0, " + std::to_string(cfg_.num_classes) +
                          "]");
  }
}

void NoisePredictor::run_forward(std::span<const double> params, std::span<const double> x, int t, int cls,
                                 Tape& tape, std::span<double> out) const {
  check_inputs(params, x, cls);
  const std::size_t n_layers = layers_.size();
  tape.inputs.resize(n_layers);
  tape.pre.resize(n_layers);

  auto& z0 = tape.inputs[0];
  z0.resize(static_cast<std::size_t>(cfg_.concat_dim()));
  std::copy(x.begin(), x.end(), z0.begin());
  time_features(t, std::span<double>(z0).subspan(x.size(), static_cast<std::size_t>(cfg_.time_features)));
  const double* emb = params.data() + static_cast<std::size_t>(cls * cfg_.embed_dim);
  std::copy(emb, emb + cfg_.embed_dim, z0.begin() + static_cast<std::ptrdiff_t>(x.size() + cfg_.time_features));

  for (std::size_t l = 0; l < n_layers; ++l) {
    const LayerView& lv = layers_[l];
    const double* w = params.data() + lv.weight_offset;
    const double* b = params.data() + lv.bias_offset;
    const auto& z = tape.inputs[l];
    const bool last = (l + 1 == n_layers);
    auto& a = tape.pre[l];
    a.resize(static_cast<std::size_t>(lv.out));
    for (int o = 0; o < lv.out; ++o) {
      const double* wr = w + static_cast<std::size_t>(o) * static_cast<std::size_t>(lv.in);
      double s = b[o];
      for (int i = 0; i < lv.in; ++i) s += wr[i] * z[static_cast<std::size_t>(i)];
      a[static_cast<std::size_t>(o)] = s;
    }
    if (last) {
      std::copy(a.begin(), a.end(), out.begin());
    } else {
      auto& next = tape.inputs[l + 1];
      next.resize(a.size());
      for (std::size_t o = 0; o < a.size(); ++o) next[o] = activate(cfg_.activation, a[o]);
    }
  }
}

void NoisePredictor::predict(std::span<const double> params, std::span<const double> x, int t, int cls,
                             std::span<double> out) const {
  require(out.size() == dim(), "net: output buffer has wrong dimension");
  thread_local Tape tape;
  run_forward(params, x, t, cls, tape, out);
}

void NoisePredictor::accumulate_vjp(std::span<const double> params, std::span<const double> x, int t, int cls,
                                    std::span<const double> dout, std::span<double> grad) const {
  require(dout.size() == dim(), "net: cotangent has wrong dimension");
  require(grad.size() == num_params_, "net: gradient buffer has wrong length");
  thread_local Tape tape;
  thread_local std::vector<double> out, delta, back;
  out.resize(dim());
  run_forward(params, x, t, cls, tape, out);

  delta.assign(dout.begin(), dout.end());
  for (std::size_t l = layers_.size(); l-- > 0;) {
    const LayerView& lv = layers_[l];
    if (l + 1 != layers_.size()) {
      const auto& a = tape.pre[l];
      for (std::size_t o = 0; o < delta.size(); ++o) delta[o] *= activate_grad(cfg_.activation, a[o]);
    }
    const auto& z = tape.inputs[l];
    const double* w = params.data() + lv.weight_offset;
    double* gw = grad.data() + lv.weight_offset;
    double* gb = grad.data() + lv.bias_offset;
    back.assign(static_cast<std::size_t>(lv.in), 0.0);
    for (int o = 0; o < lv.out; ++o) {
      const double d = delta[static_cast<std::size_t>(o)];
      gb[o] += d;
      if (d == 0.0) continue;
      const std::size_t row = static_cast<std::size_t>(o) * static_cast<std::size_t>(lv.in);
      for (int i = 0; i < lv.in; ++i) {
        gw[row + static_cast<std::size_t>(i)] += d * z[static_cast<std::size_t>(i)];
        back[static_cast<std::size_t>(i)] += w[row + static_cast<std::size_t>(i)] * d;
      }
    }
    delta.swap(back);
  }
  // delta now holds d/d[x | time | embedding]; only the embedding is a parameter.
  const std::size_t emb_start = static_cast<std::size_t>(cfg_.input_dim + cfg_.time_features);
  double* ge = grad.data() + static_cast<std::size_t>(cls * cfg_.embed_dim);
  for (int e = 0; e < cfg_.embed_dim; ++e) ge[e] += delta[emb_start + static_cast<std::size_t>(e)];
}

ParameterVector NoisePredictor::init_params(std::uint64_t seed) const {
  ParameterVector p(num_params_, 0.0);
  Rng rng = make_rng(seed, {0x6e6574ULL});
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const std::size_t emb = static_cast<std::size_t>((cfg_.num_classes + 1) * cfg_.embed_dim);
  for (std::size_t i = 0; i < emb; ++i) p[i] = unit(rng);
  for (const LayerView& lv : layers_) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(lv.in));
    const std::size_t n = static_cast<std::size_t>(lv.in) * static_cast<std::size_t>(lv.out);
    for (std::size_t i = 0; i < n; ++i) p[lv.weight_offset + i] = bound * unit(rng);
  }
  return p;
}

std::vector<std::vector<double>> NoisePredictor::jacobian(std::span<const double> params, std::span<const double> x,
                                                          int t, int cls) const {
  std::vector<std::vector<double>> rows(dim(), std::vector<double>(num_params_, 0.0));
  std::vector<double> unit(dim(), 0.0);
  for (std::size_t k = 0; k < dim(); ++k) {
    unit.assign(dim(), 0.0);
    unit[k] = 1.0;
    accumulate_vjp(params, x, t, cls, unit, rows[k]);
  }
  return rows;
}

// ---- checkpoint IO ----

namespace {

constexpr char kMagic[8] = {'O', 'V', 'L', 'C', 'K', 'P', 'T', '1'};
constexpr char kTrainerMagic[8] = {'O', 'V', 'L', 'T', 'R', 'N', 'R', '1'};
constexpr std::uint32_t kVersion = 1;

class Writer {
 public:
  explicit Writer(std::ostream& os) : os_(os) {}
  void bytes(const char* p, std::size_t n) { os_.write(p, static_cast<std::streamsize>(n)); }
  void u32(std::uint32_t v) {
    char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
    bytes(b, 4);
  }
  void u64(std::uint64_t v) {
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
    bytes(b, 8);
  }
  void f64(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    u64(bits);
  }

 private:
  std::ostream& os_;
};

class Reader {
 public:
  Reader(std::istream& is, std::string name) : is_(is), name_(std::move(name)) {}
  void bytes(char* p, std::size_t n) {
    is_.read(p, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(is_.gcount()) != n) throw InvalidArgument(name_ + ": truncated checkpoint");
  }
  std::uint32_t u32() {
    unsigned char b[4];
    bytes(reinterpret_cast<char*>(b), 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    unsigned char b[8];
    bytes(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
  }
  double f64() {
    const std::uint64_t bits = u64();
    double v;
    std::memcpy(&v, &bits, sizeof v);
    return v;
  }
  bool at_end() { return is_.peek() == std::char_traits<char>::eof(); }

 private:
  std::istream& is_;
  std::string name_;
};

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  ckpt.net.validate();
  NoisePredictor net(ckpt.net);
  require(ckpt.params.size() == net.num_params(), "save_checkpoint: parameter count does not match config");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  Writer w(os);
  w.bytes(kMagic, sizeof kMagic);
  w.u32(kVersion);
  w.u32(static_cast<std::uint32_t>(ckpt.net.input_dim));
  w.u32(static_cast<std::uint32_t>(ckpt.net.num_classes));
  w.u32(static_cast<std::uint32_t>(ckpt.net.embed_dim));
  w.u32(static_cast<std::uint32_t>(ckpt.net.time_features));
  w.u32(static_cast<std::uint32_t>(ckpt.net.activation));
  w.u32(static_cast<std::uint32_t>(ckpt.net.hidden.size()));
  for (int h : ckpt.net.hidden) w.u32(static_cast<std::uint32_t>(h));
  w.u32(static_cast<std::uint32_t>(ckpt.schedule.steps));
  w.f64(ckpt.schedule.beta1);
  w.f64(ckpt.schedule.betaT);
  w.u32(static_cast<std::uint32_t>(ckpt.schedule.sigma_mode));
  w.u64(ckpt.params.size());
  for (double v : ckpt.params) w.f64(v);
  if (ckpt.optimizer) {
    const auto& opt = *ckpt.optimizer;
    require(opt.m.size() == ckpt.params.size() && opt.v.size() == ckpt.params.size(),
            "save_checkpoint: optimizer moments have wrong length");
    w.bytes(kTrainerMagic, sizeof kTrainerMagic);
    w.u64(opt.step);
    for (double v : opt.m) w.f64(v);
    for (double v : opt.v) w.f64(v);
  }
  if (!os) throw std::runtime_error("write failed for " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InvalidArgument("cannot open checkpoint " + path.string());
  Reader r(is, path.string());
  char magic[8];
  r.bytes(magic, sizeof magic);
  require(std::memcmp(magic, kMagic, sizeof magic) == 0, path.string() + ": not a checkpoint");
  require(r.u32() == kVersion, path.string() + ": unsupported checkpoint version");
  Checkpoint ck;
  ck.net.input_dim = static_cast<int>(r.u32());
  ck.net.num_classes = static_cast<int>(r.u32());
  ck.net.embed_dim = static_cast<int>(r.u32());
  ck.net.time_features = static_cast<int>(r.u32());
  const std::uint32_t act = r.u32();
  require(act <= 1, path.string() + ": unknown activation code");
  ck.net.activation = static_cast<Activation>(act);
  const std::uint32_t n_hidden = r.u32();
  require(n_hidden < 1024, path.string() + ": implausible layer count");
  ck.net.hidden.resize(n_hidden);
  for (auto& h : ck.net.hidden) h = static_cast<int>(r.u32());
  ck.net.validate();
  ck.schedule.steps = static_cast<int>(r.u32());
  ck.schedule.beta1 = r.f64();
  ck.schedule.betaT = r.f64();
  const std::uint32_t sm = r.u32();
  require(sm <= 1, path.string() + ": unknown sigma mode code");
  ck.schedule.sigma_mode = static_cast<SigmaMode>(sm);
  const std::uint64_t n = r.u64();
  require(n == NoisePredictor(ck.net).num_params(), path.string() + ": parameter count does not match config");
  ck.params.resize(n);
  for (auto& v : ck.params) v = r.f64();
  if (!r.at_end()) {
    char tm[8];
    r.bytes(tm, sizeof tm);
    require(std::memcmp(tm, kTrainerMagic, sizeof tm) == 0, path.string() + ": unknown trailer");
    OptimizerState opt;
    opt.step = r.u64();
    opt.m.resize(n);
    opt.v.resize(n);
    for (auto& v : opt.m) v = r.f64();
    for (auto& v : opt.v) v = r.f64();
    ck.optimizer = std::move(opt);
  }
  return ck;
}

}  // namespace ovl
