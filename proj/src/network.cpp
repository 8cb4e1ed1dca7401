#include "ctsn/network.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ctsn/errors.hpp"

namespace ctsn {

Network::Network(const std::vector<std::size_t>& dims, NeuronConfig cfg, std::size_t T)
    : neuron(cfg), timesteps(T) {
  if (dims.size() < 3) {
    throw ArgumentError("network needs input, at least one hidden layer and a readout");
  }
  if (T == 0) throw ArgumentError("network needs T >= 1");
  cfg.validate();
  for (std::size_t i = 0; i + 2 < dims.size(); ++i) {
    hidden.push_back({Tensor({dims[i], dims[i + 1]}), Tensor({dims[i + 1]}), CTSNParams{}});
  }
  const std::size_t n = dims.size();
  readout = {Tensor({dims[n - 2], dims[n - 1]}), Tensor({dims[n - 1]}), CTSNParams{}};
}

std::vector<std::size_t> Network::dims() const {
  std::vector<std::size_t> d{input_dim()};
  for (const auto& l : hidden) d.push_back(l.weight.dim(1));
  d.push_back(num_classes());
  return d;
}

void Network::init_uniform(Rng& rng) {
  auto fill = [&rng](Layer& layer) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(layer.weight.dim(0)));
    for (auto& w : layer.weight.data()) w = rng.uniform(-bound, bound);
    for (auto& b : layer.bias.data()) b = rng.uniform(-bound, bound);
  };
  for (auto& l : hidden) fill(l);
  fill(readout);
}

void Network::validate() const {
  if (hidden.empty()) throw DimensionError("network has no hidden layers");
  auto check = [](const Layer& layer, std::size_t in, std::size_t idx) {
    if (layer.weight.rank() != 2 || layer.weight.dim(0) != in) {
      throw DimensionError("layer " + std::to_string(idx) + " weight " +
                           shape_str(layer.weight.shape()) + " does not accept input width " +
                           std::to_string(in));
    }
    if (layer.bias.size() != layer.weight.dim(1)) {
      throw DimensionError("layer " + std::to_string(idx) + " bias " +
                           shape_str(layer.bias.shape()) + " does not match weight " +
                           shape_str(layer.weight.shape()));
    }
  };
  std::size_t width = hidden.front().weight.dim(0);
  for (std::size_t l = 0; l < hidden.size(); ++l) {
    check(hidden[l], width, l);
    width = hidden[l].weight.dim(1);
  }
  check(readout, width, hidden.size());
}

namespace {

double sign_of(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

ForwardResult forward(const Network& net, std::span<const Tensor> input_seq, FireMode mode) {
  net.validate();
  const std::size_t T = net.timesteps;
  if (input_seq.size() != T) {
    throw DimensionError("forward: input sequence has " + std::to_string(input_seq.size()) +
                         " steps, network expects T=" + std::to_string(T));
  }
  const std::size_t L = net.hidden.size();
  const auto& cfg = net.neuron;
  const Tensor& first = input_seq.front();
  if (first.rank() != 2 || first.dim(1) != net.input_dim()) {
    throw DimensionError("forward: input " + shape_str(first.shape()) +
                         " does not match input width " + std::to_string(net.input_dim()));
  }
  const std::size_t B = first.dim(0);

  ForwardResult result{{}, StepCache(L, T, mode)};
  std::vector<NeuronState> states;
  for (const auto& layer : net.hidden) states.push_back(NeuronState::zeros({B, layer.weight.dim(1)}));

  for (std::size_t t = 0; t < T; ++t) {
    Tensor signal = input_seq[t];
    require_same_shape(signal, first, "forward (timestep input)");
    for (std::size_t l = 0; l < L; ++l) {
      const Layer& layer = net.hidden[l];
      const Tensor x = add_row_vector(matmul(signal, layer.weight), layer.bias);
      NeuronState next = integrate(states[l], x, layer.ctsn, cfg);

      StepRecord rec;
      rec.input = std::move(signal);
      rec.h_prev = states[l].h;
      rec.surrogate = surrogate(next.u_tilde, cfg.v_th, cfg.a);
      rec.o = Tensor::zeros_like(next.u_tilde);
      rec.abs_grad = Tensor::zeros_like(next.u_tilde);
      for (std::size_t i = 0; i < rec.o.size(); ++i) {
        const double v = next.u_tilde[i];
        rec.o[i] = mode == FireMode::ternary ? ternary_fire(v, cfg.v_th) : smooth_fire(v, cfg.v_th, cfg.a);
        rec.abs_grad[i] = sign_of(rec.o[i]) * rec.surrogate[i];
      }
      next.o_prev = rec.o;
      rec.u = next.u;
      rec.h = next.h;
      rec.u_tilde = next.u_tilde;
      signal = rec.o;
      result.cache.write(l, t, std::move(rec));
      states[l] = std::move(next);
    }
    result.logits.push_back(add_row_vector(matmul(signal, net.readout.weight), net.readout.bias));
  }
  return result;
}

std::vector<int> predict(std::span<const Tensor> logits) {
  if (logits.empty()) throw ArgumentError("predict: need at least one timestep");
  Tensor avg = Tensor::zeros_like(logits.front());
  for (const auto& o : logits) {
    require_same_shape(avg, o, "predict");
    for (std::size_t i = 0; i < avg.size(); ++i) avg[i] += o[i];
  }
  std::vector<int> out(avg.dim(0));
  for (std::size_t i = 0; i < avg.dim(0); ++i) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < avg.dim(1); ++j) {
      if (avg.at(i, j) > avg.at(i, best)) best = j;
    }
    out[i] = static_cast<int>(best);
  }
  return out;
}

HistogramTable::HistogramTable(std::vector<std::size_t> layers, std::size_t timesteps,
                               HistogramSpec spec)
    : layers_(std::move(layers)), timesteps_(timesteps), spec_(spec) {
  if (spec_.bins == 0) throw ArgumentError("histogram needs at least one bin");
  if (!(spec_.hi > spec_.lo)) throw ArgumentError("histogram range must satisfy lo < hi");
  counts_.assign(layers_.size() * timesteps_ * spec_.bins, 0);
}

std::size_t HistogramTable::bin_of(double v) const {
  if (v <= spec_.lo) return 0;
  if (v >= spec_.hi) return spec_.bins - 1;
  const double w = (spec_.hi - spec_.lo) / static_cast<double>(spec_.bins);
  auto b = static_cast<std::size_t>((v - spec_.lo) / w);
  return std::min(b, spec_.bins - 1);
}

double HistogramTable::bin_left(std::size_t bin) const {
  return spec_.lo + (spec_.hi - spec_.lo) * static_cast<double>(bin) / static_cast<double>(spec_.bins);
}

double HistogramTable::bin_right(std::size_t bin) const { return bin_left(bin + 1); }

void HistogramTable::accumulate(const StepCache& cache) {
  if (cache.num_layers() == 0 || cache.timesteps() == 0) {
    throw StateError("histogram capture from an empty cache");
  }
  if (cache.timesteps() != timesteps_) {
    throw StateError("histogram capture: cache has " + std::to_string(cache.timesteps()) +
                     " timesteps, table expects " + std::to_string(timesteps_));
  }
  for (std::size_t s = 0; s < layers_.size(); ++s) {
    if (layers_[s] >= cache.num_layers()) {
      throw ArgumentError("histogram capture: layer " + std::to_string(layers_[s] + 1) +
                          " does not exist");
    }
    for (std::size_t t = 0; t < timesteps_; ++t) {
      const Tensor& u = cache.at(layers_[s], t).u_tilde;
      std::size_t* row = &counts_[(s * timesteps_ + t) * spec_.bins];
      for (double v : u.data()) ++row[bin_of(v)];
    }
  }
}

std::size_t HistogramTable::count(std::size_t slot, std::size_t t, std::size_t bin) const {
  return counts_.at((slot * timesteps_ + t) * spec_.bins + bin);
}

std::size_t HistogramTable::total(std::size_t slot, std::size_t t) const {
  std::size_t n = 0;
  for (std::size_t b = 0; b < spec_.bins; ++b) n += count(slot, t, b);
  return n;
}

std::string HistogramTable::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "layer,timestep,bin_left,bin_right,count\n";
  for (std::size_t s = 0; s < layers_.size(); ++s) {
    for (std::size_t t = 0; t < timesteps_; ++t) {
      for (std::size_t b = 0; b < spec_.bins; ++b) {
        os << layers_[s] + 1 << ',' << t + 1 << ',' << bin_left(b) << ',' << bin_right(b) << ','
           << count(s, t, b) << '\n';
      }
    }
  }
  return os.str();
}

std::string HistogramTable::metadata_line(double v_th) const {
  std::ostringstream os;
  os.precision(17);
  os << "v_th=" << v_th << ",bins=" << spec_.bins << ",lo=" << spec_.lo << ",hi=" << spec_.hi
     << ",threshold_edges=" << -v_th << ':' << v_th << '\n';
  return os.str();
}

HistogramTable capture_histograms(const StepCache& cache, std::size_t layer, HistogramSpec spec) {
  if (cache.num_layers() == 0 || cache.timesteps() == 0) {
    throw StateError("histogram capture from an empty cache");
  }
  HistogramTable table({layer}, cache.timesteps(), spec);
  table.accumulate(cache);
  return table;
}

}  // namespace ctsn
