#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ctsn/neuron.hpp"
#include "ctsn/numerics.hpp"
#include "ctsn/step_cache.hpp"

namespace ctsn {

struct Layer {
  Tensor weight;  // [D_in x D_out]
  Tensor bias;    // [D_out]
  CTSNParams ctsn;
};

// Feedforward MLP: spiking hidden layers followed by a real-valued linear
// readout that emits logits O(t) at every timestep.
struct Network {
  std::vector<Layer> hidden;
  Layer readout;
  NeuronConfig neuron;
  std::size_t timesteps = 1;

  // dims = {input, hidden..., classes}; weights start at zero.
  Network(const std::vector<std::size_t>& dims, NeuronConfig cfg, std::size_t T);
  Network() = default;

  // Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for weights and biases.
  void init_uniform(Rng& rng);

  std::size_t input_dim() const { return hidden.front().weight.dim(0); }
  std::size_t num_classes() const { return readout.weight.dim(1); }
  std::vector<std::size_t> dims() const;

  // Throws DimensionError if adjacent layers do not chain.
  void validate() const;
};

struct ForwardResult {
  std::vector<Tensor> logits;  // per timestep, [B x C]
  StepCache cache;
};

// input_seq holds T tensors of shape [B x D_0].
ForwardResult forward(const Network& net, std::span<const Tensor> input_seq,
                      FireMode mode = FireMode::ternary);

// argmax of the time-averaged logits. Ties go to the lowest class index.
std::vector<int> predict(std::span<const Tensor> logits);

struct HistogramSpec {
  std::size_t bins = 81;
  double lo = -2.0;
  double hi = 2.0;
};

// Counts of u_tilde values per bin for every (layer, timestep). Values
// outside [lo, hi] are clamped into the edge bins so that every timestep
// holds exactly B * D_l counts per batch accumulated.
class HistogramTable {
 public:
  HistogramTable(std::vector<std::size_t> layers, std::size_t timesteps, HistogramSpec spec);

  void accumulate(const StepCache& cache);
  std::size_t count(std::size_t layer_slot, std::size_t t, std::size_t bin) const;
  std::size_t total(std::size_t layer_slot, std::size_t t) const;
  std::size_t bin_of(double v) const;
  double bin_left(std::size_t bin) const;
  double bin_right(std::size_t bin) const;

  const std::vector<std::size_t>& layers() const { return layers_; }
  std::size_t timesteps() const { return timesteps_; }
  const HistogramSpec& spec() const { return spec_; }

  // Header `layer,timestep,bin_left,bin_right,count`; layer and timestep are
  // 1-based in the file.
  std::string to_csv() const;
  // Single sidecar line with the threshold and binning.
  std::string metadata_line(double v_th) const;

 private:
  std::vector<std::size_t> layers_;
  std::size_t timesteps_;
  HistogramSpec spec_;
  std::vector<std::size_t> counts_;
};

HistogramTable capture_histograms(const StepCache& cache, std::size_t layer, HistogramSpec spec);

}  // namespace ctsn
