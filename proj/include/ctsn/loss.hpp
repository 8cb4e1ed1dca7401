#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ctsn/numerics.hpp"

namespace ctsn {

class StepCache;

struct TMPRConfig {
  double lambda = 0.05;  // 0.01 is the neuromorphic default
  bool enabled = true;

  double effective_lambda() const { return enabled ? lambda : 0.0; }
};

// Cross-entropy of softmax((1/T) sum_t O(t)) against labels, batch mean.
// Each logits entry is [B x C].
double avg_ce_loss(std::span<const Tensor> logits, std::span<const int> labels);

// dL_CE/dO(t); identical for every t, returned once per timestep.
std::vector<Tensor> avg_ce_grad(std::span<const Tensor> logits, std::span<const int> labels);

// Mean of logits over time, [B x C].
Tensor average_logits(std::span<const Tensor> logits);

// Potentials indexed [layer][t], each [B x D_l]. t is 0-based in storage and
// weighted as 1/(t+1).
//   (1/(T L)) sum_t (lambda/t) sum_l ||u~^l(t)||^2 / (B D_l)
double tmpr_loss(const std::vector<std::vector<Tensor>>& potentials, double lambda);
double tmpr_loss(const StepCache& cache, double lambda);

// Gradient of the regulariser w.r.t. one captured potential, t 1-based:
//   2 lambda / (t T L B D_l) * u~
Tensor tmpr_grad(const Tensor& u_tilde, std::size_t t, std::size_t T, std::size_t L,
                 double lambda);

inline double total_loss(double ce, double tmpr) { return ce + tmpr; }

}  // namespace ctsn
