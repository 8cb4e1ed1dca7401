#include "ctsn/model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "ctsn/errors.hpp"

namespace ctsn {

namespace {

class Writer {
 public:
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
  }
  void raw(const char* p, std::size_t n) { bytes_.insert(bytes_.end(), p, p + n); }
  void tensor(const Tensor& t) {
    for (double v : t.data()) f64(v);
  }
  std::vector<std::uint8_t> take() { return std::move(bytes_); }

 private:
  std::vector<std::uint8_t> bytes_;
};

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& b) : b_(b) {}
  void need(std::size_t n) const {
    if (pos_ + n > b_.size()) {
      throw ArgumentError("model file truncated at offset " + std::to_string(pos_));
    }
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t{b_[pos_++]} << (8 * i);
    return v;
  }
  double f64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t{b_[pos_++]} << (8 * i);
    return std::bit_cast<double>(v);
  }
  void tensor(Tensor& t) {
    for (auto& v : t.data()) v = f64();
  }
  bool magic_ok() {
    need(sizeof(kModelMagic));
    const bool ok = std::memcmp(b_.data(), kModelMagic, sizeof(kModelMagic)) == 0;
    pos_ += sizeof(kModelMagic);
    return ok;
  }
  bool at_end() const { return pos_ == b_.size(); }

 private:
  const std::vector<std::uint8_t>& b_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> serialize_model(const Network& net) {
  net.validate();
  Writer w;
  w.raw(kModelMagic, sizeof(kModelMagic));
  w.u32(kModelVersion);
  w.u32(static_cast<std::uint32_t>(net.neuron.kind));
  w.u32(static_cast<std::uint32_t>(net.neuron.reset));
  w.f64(net.neuron.tau);
  w.f64(net.neuron.v_th);
  w.f64(net.neuron.a);
  w.u32(static_cast<std::uint32_t>(net.timesteps));
  const auto dims = net.dims();
  w.u32(static_cast<std::uint32_t>(dims.size()));
  for (auto d : dims) w.u32(static_cast<std::uint32_t>(d));
  for (const auto& l : net.hidden) {
    w.tensor(l.weight);
    w.tensor(l.bias);
    w.f64(l.ctsn.omega_alpha);
    w.f64(l.ctsn.omega_beta);
    w.f64(l.ctsn.omega_gamma);
  }
  w.tensor(net.readout.weight);
  w.tensor(net.readout.bias);
  return w.take();
}

Network deserialize_model(const std::vector<std::uint8_t>& bytes) {
  Reader r(bytes);
  if (!r.magic_ok()) throw ArgumentError("not a model file (bad magic)");
  const std::uint32_t version = r.u32();
  if (version != kModelVersion) {
    throw ArgumentError("unsupported model version " + std::to_string(version));
  }
  const std::uint32_t kind = r.u32();
  const std::uint32_t reset = r.u32();
  if (kind > 2 || reset > 1) throw ArgumentError("model file has an unknown neuron kind or reset");
  NeuronConfig cfg;
  cfg.kind = static_cast<NeuronKind>(kind);
  cfg.reset = static_cast<ResetMode>(reset);
  cfg.tau = r.f64();
  cfg.v_th = r.f64();
  cfg.a = r.f64();
  const std::uint32_t T = r.u32();
  const std::uint32_t n = r.u32();
  if (n < 3 || n > 1024) throw ArgumentError("model file has an implausible layer count");
  std::vector<std::size_t> dims;
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::uint32_t d = r.u32();
    if (d == 0) throw ArgumentError("model file has a zero-width layer");
    dims.push_back(d);
  }
  Network net(dims, cfg, T);
  for (auto& l : net.hidden) {
    r.tensor(l.weight);
    r.tensor(l.bias);
    l.ctsn.omega_alpha = r.f64();
    l.ctsn.omega_beta = r.f64();
    l.ctsn.omega_gamma = r.f64();
  }
  r.tensor(net.readout.weight);
  r.tensor(net.readout.bias);
  if (!r.at_end()) throw ArgumentError("model file has trailing bytes");
  return net;
}

void save_model(const Network& net, const std::string& path) {
  const auto bytes = serialize_model(net);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("cannot write model file " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

Network load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open model file " + path);
  const std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in),
                                        std::istreambuf_iterator<char>()};
  return deserialize_model(bytes);
}

}  // namespace ctsn
