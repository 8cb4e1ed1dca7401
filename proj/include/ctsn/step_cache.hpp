#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "ctsn/numerics.hpp"

namespace ctsn {

// How spike nodes are evaluated in a forward pass. `ternary` is the real
// network; `smooth` swaps the step for its piecewise-linear antiderivative of
// the surrogate window so the graph becomes differentiable for finite
// difference checks.
enum class FireMode { ternary, smooth };

// Everything the reverse pass needs at one (layer, timestep). All tensors are
// [B x D_l] except `input`, which is [B x D_{l-1}].
struct StepRecord {
  Tensor input;      // o^{l-1}(t), or the encoded sample for the first layer
  Tensor u;          // pre-complement potential (equals u_tilde for ternary)
  Tensor h;          // complemental term (zero for ternary)
  Tensor h_prev;     // h(t-1), needed for the branch of the static rule
  Tensor u_tilde;    // integrated potential that fires
  Tensor o;          // emitted output
  Tensor surrogate;  // do/du_tilde
  Tensor abs_grad;   // d|o|/du_tilde
};

class StepCache {
 public:
  StepCache() = default;
  StepCache(std::size_t num_layers, std::size_t timesteps, FireMode mode);

  std::size_t num_layers() const { return num_layers_; }
  std::size_t timesteps() const { return timesteps_; }
  FireMode fire_mode() const { return mode_; }

  // Each (layer, t) may be written exactly once; t is 0-based.
  void write(std::size_t layer, std::size_t t, StepRecord record);
  const StepRecord& at(std::size_t layer, std::size_t t) const;
  bool has(std::size_t layer, std::size_t t) const;
  bool complete() const;
  // Throws StateError naming the first missing record.
  void require_complete() const;

 private:
  std::size_t num_layers_ = 0;
  std::size_t timesteps_ = 0;
  FireMode mode_ = FireMode::ternary;
  std::vector<std::optional<StepRecord>> records_;
};

}  // namespace ctsn
