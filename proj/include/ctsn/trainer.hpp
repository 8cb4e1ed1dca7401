#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ctsn/bptt.hpp"
#include "ctsn/data.hpp"
#include "ctsn/loss.hpp"
#include "ctsn/network.hpp"

namespace ctsn {

struct TrainConfig {
  double lr0 = 0.1;
  double momentum = 0.9;
  double weight_decay = 1e-4;  // 5e-4 for neuromorphic data
  std::size_t batch_size = 64;
  std::size_t epochs = 30;
  std::uint64_t seed = 1;
  TMPRConfig tmpr;
};

// lr0 * (1 + cos(pi * epoch / total)) / 2
double cosine_lr(std::size_t epoch, std::size_t total_epochs, double lr0);

// v <- momentum * v + (g + wd * p);  p <- p - lr * v
void sgd_step(std::span<double> params, std::span<const double> grads, std::span<double> velocity,
              double lr, double momentum, double weight_decay);

// Momentum buffers shaped like the network's parameters.
struct Velocity {
  GradSet buffers;
  static Velocity zeros_like(const Network& net) { return {GradSet::zeros_like(net)}; }
};

// Applies sgd_step to every tensor of the network. Weight decay touches W and
// b only; the omega triples get the plain momentum update. Non-finite
// gradients throw NumericError naming the layer.
void sgd_step(Network& net, const GradSet& grads, Velocity& velocity, double lr, double momentum,
              double weight_decay);

struct EpochMetrics {
  std::size_t epoch = 0;  // 1-based
  double lr = 0.0;
  double ce_loss = 0.0;
  double tmpr_loss = 0.0;
  double train_acc = 0.0;
  double eval_acc = 0.0;
};

// `epoch,lr,ce_loss,tmpr_loss,train_acc,eval_acc`
std::string metrics_csv_header();
std::string metrics_csv_row(const EpochMetrics& m);

// Owns the optimiser state for one run. The network is borrowed and updated
// in place.
class Trainer {
 public:
  Trainer(Network& net, TrainConfig cfg);

  // One pass over `train` in a seed-determined order. `epoch` is 0-based and
  // selects the learning rate. eval_acc is left at zero.
  EpochMetrics train_epoch(const Dataset& train, std::size_t epoch);

  // Full run; evaluates on `test` after every epoch and checks that the
  // complement coefficients stay inside (0, 1).
  std::vector<EpochMetrics> fit(const Dataset& train, const Dataset& test,
                                const std::function<void(const EpochMetrics&)>& on_epoch = {});

  const TrainConfig& config() const { return cfg_; }

 private:
  Network& net_;
  TrainConfig cfg_;
  Velocity velocity_;
  Rng order_rng_;
};

// Fraction of samples whose predicted class matches the label.
double evaluate(const Network& net, const Dataset& data, std::size_t batch_size = 256);

// Mean of u~(t)^2 at the given 0-based timestep, averaged over hidden layers
// and every sample of `data`.
double mean_squared_potential(const Network& net, const Dataset& data, std::size_t t,
                              std::size_t batch_size = 256);

// Throws NumericError if any layer's alpha, beta or gamma leaves (0, 1).
void check_complement_coefficients(const Network& net);

}  // namespace ctsn
