#include "ctsn/loss.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ctsn/step_cache.hpp"
#include "ctsn/errors.hpp"

namespace ctsn {

Tensor average_logits(std::span<const Tensor> logits) {
  if (logits.empty()) throw ArgumentError("average_logits: need at least one timestep");
  Tensor avg = Tensor::zeros_like(logits.front());
  for (const auto& o : logits) {
    require_same_shape(avg, o, "average_logits");
    for (std::size_t i = 0; i < avg.size(); ++i) avg[i] += o[i];
  }
  const double inv_t = 1.0 / static_cast<double>(logits.size());
  for (std::size_t i = 0; i < avg.size(); ++i) avg[i] *= inv_t;
  return avg;
}

namespace {

void check_labels(const Tensor& avg, std::span<const int> labels) {
  if (avg.rank() != 2) throw DimensionError("logits must be [batch x classes]");
  if (labels.empty()) throw ArgumentError("cross-entropy over an empty batch");
  if (labels.size() != avg.dim(0)) {
    throw DimensionError("label count " + std::to_string(labels.size()) +
                         " does not match batch size " + std::to_string(avg.dim(0)));
  }
  for (int y : labels) {
    if (y < 0 || static_cast<std::size_t>(y) >= avg.dim(1)) {
      throw ArgumentError("label " + std::to_string(y) + " outside [0, " +
                          std::to_string(avg.dim(1)) + ")");
    }
  }
}

// Row-wise softmax with max subtraction.
Tensor softmax_rows(const Tensor& z) {
  Tensor p = z;
  const std::size_t c = z.dim(1);
  for (std::size_t i = 0; i < z.dim(0); ++i) {
    double m = z.at(i, 0);
    for (std::size_t j = 1; j < c; ++j) m = std::max(m, z.at(i, j));
    double s = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
      p.at(i, j) = std::exp(z.at(i, j) - m);
      s += p.at(i, j);
    }
    for (std::size_t j = 0; j < c; ++j) p.at(i, j) /= s;
  }
  return p;
}

}  // namespace

double avg_ce_loss(std::span<const Tensor> logits, std::span<const int> labels) {
  const Tensor avg = average_logits(logits);
  check_labels(avg, labels);
  const std::size_t c = avg.dim(1);
  double total = 0.0;
  for (std::size_t i = 0; i < avg.dim(0); ++i) {
    double m = avg.at(i, 0);
    for (std::size_t j = 1; j < c; ++j) m = std::max(m, avg.at(i, j));
    double s = 0.0;
    for (std::size_t j = 0; j < c; ++j) s += std::exp(avg.at(i, j) - m);
    total += (m + std::log(s)) - avg.at(i, static_cast<std::size_t>(labels[i]));
  }
  return total / static_cast<double>(avg.dim(0));
}

std::vector<Tensor> avg_ce_grad(std::span<const Tensor> logits, std::span<const int> labels) {
  const Tensor avg = average_logits(logits);
  check_labels(avg, labels);
  Tensor g = softmax_rows(avg);
  for (std::size_t i = 0; i < g.dim(0); ++i) g.at(i, static_cast<std::size_t>(labels[i])) -= 1.0;
  const double factor =
      1.0 / (static_cast<double>(g.dim(0)) * static_cast<double>(logits.size()));
  for (auto& v : g.data()) v *= factor;
  return std::vector<Tensor>(logits.size(), g);
}

double tmpr_loss(const std::vector<std::vector<Tensor>>& potentials, double lambda) {
  const std::size_t L = potentials.size();
  if (L == 0) throw StateError("tmpr_loss: no layers captured");
  const std::size_t T = potentials.front().size();
  if (T == 0) throw StateError("tmpr_loss: no timesteps captured");
  double total = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    double per_t = 0.0;
    for (std::size_t l = 0; l < L; ++l) {
      if (potentials[l].size() != T || potentials[l][t].empty()) {
        throw StateError("tmpr_loss: missing potential for layer " + std::to_string(l) +
                         ", timestep " + std::to_string(t + 1));
      }
      const Tensor& u = potentials[l][t];
      per_t += sum_squares(u) / static_cast<double>(u.size());
    }
    total += lambda / static_cast<double>(t + 1) * per_t;
  }
  return total / (static_cast<double>(T) * static_cast<double>(L));
}

double tmpr_loss(const StepCache& cache, double lambda) {
  std::vector<std::vector<Tensor>> pots(cache.num_layers());
  for (std::size_t l = 0; l < cache.num_layers(); ++l) {
    for (std::size_t t = 0; t < cache.timesteps(); ++t) pots[l].push_back(cache.at(l, t).u_tilde);
  }
  return tmpr_loss(pots, lambda);
}

Tensor tmpr_grad(const Tensor& u_tilde, std::size_t t, std::size_t T, std::size_t L,
                 double lambda) {
  if (t == 0) throw ArgumentError("tmpr_grad: t is 1-based");
  const double denom = static_cast<double>(t) * static_cast<double>(T) *
                       static_cast<double>(L) * static_cast<double>(u_tilde.size());
  return scale(u_tilde, 2.0 * lambda / denom);
}

}  // namespace ctsn
