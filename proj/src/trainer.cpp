#include "ctsn/trainer.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "ctsn/errors.hpp"

namespace ctsn {

double cosine_lr(std::size_t epoch, std::size_t total_epochs, double lr0) {
  if (total_epochs == 0 || epoch > total_epochs) {
    throw ArgumentError("cosine_lr: need 0 <= epoch <= total_epochs, total > 0");
  }
  const double frac = static_cast<double>(epoch) / static_cast<double>(total_epochs);
  return lr0 * 0.5 * (1.0 + std::cos(std::numbers::pi * frac));
}

void sgd_step(std::span<double> params, std::span<const double> grads, std::span<double> velocity,
              double lr, double momentum, double weight_decay) {
  if (params.size() != grads.size() || params.size() != velocity.size()) {
    throw DimensionError("sgd_step: parameter, gradient and velocity sizes differ");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    velocity[i] = momentum * velocity[i] + (grads[i] + weight_decay * params[i]);
    params[i] -= lr * velocity[i];
  }
}

void sgd_step(Network& net, const GradSet& grads, Velocity& velocity, double lr, double momentum,
              double weight_decay) {
  const bool ctsn = is_ctsn(net.neuron.kind);
  auto step_layer = [&](Layer& layer, const LayerGrad& g, LayerGrad& v, const std::string& name) {
    if (!g.d_weight.all_finite() || !g.d_bias.all_finite() || !std::isfinite(g.d_omega_alpha) ||
        !std::isfinite(g.d_omega_beta) || !std::isfinite(g.d_omega_gamma)) {
      throw NumericError("non-finite gradient in " + name);
    }
    sgd_step(layer.weight.data(), g.d_weight.data(), v.d_weight.data(), lr, momentum, weight_decay);
    sgd_step(layer.bias.data(), g.d_bias.data(), v.d_bias.data(), lr, momentum, weight_decay);
    if (ctsn && &layer != &net.readout) {
      double* omega[3] = {&layer.ctsn.omega_alpha, &layer.ctsn.omega_beta, &layer.ctsn.omega_gamma};
      const double d[3] = {g.d_omega_alpha, g.d_omega_beta, g.d_omega_gamma};
      double* vel[3] = {&v.d_omega_alpha, &v.d_omega_beta, &v.d_omega_gamma};
      for (int k = 0; k < 3; ++k) {
        sgd_step(std::span<double>(omega[k], 1), std::span<const double>(&d[k], 1),
                 std::span<double>(vel[k], 1), lr, momentum, 0.0);
      }
    }
  };
  for (std::size_t l = 0; l < net.hidden.size(); ++l) {
    step_layer(net.hidden[l], grads.hidden[l], velocity.buffers.hidden[l],
               "hidden layer " + std::to_string(l + 1));
  }
  step_layer(net.readout, grads.readout, velocity.buffers.readout, "readout layer");
}

std::string metrics_csv_header() { return "epoch,lr,ce_loss,tmpr_loss,train_acc,eval_acc\n"; }

std::string metrics_csv_row(const EpochMetrics& m) {
  std::ostringstream os;
  os.precision(17);
  os << m.epoch << ',' << m.lr << ',' << m.ce_loss << ',' << m.tmpr_loss << ',' << m.train_acc
     << ',' << m.eval_acc << '\n';
  return os.str();
}

Trainer::Trainer(Network& net, TrainConfig cfg)
    : net_(net),
      cfg_(cfg),
      velocity_(Velocity::zeros_like(net)),
      order_rng_(Rng::derive(cfg.seed, "order")) {
  if (cfg_.batch_size == 0) throw ArgumentError("batch_size must be positive");
  if (cfg_.epochs == 0) throw ArgumentError("epochs must be positive");
}

EpochMetrics Trainer::train_epoch(const Dataset& train, std::size_t epoch) {
  if (train.samples.empty()) throw ArgumentError("train_epoch: empty dataset");
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  order_rng_.shuffle(std::span<std::size_t>(order));

  EpochMetrics m;
  m.epoch = epoch + 1;
  m.lr = cosine_lr(epoch, cfg_.epochs, cfg_.lr0);
  const BackwardOptions opts{cfg_.tmpr.enabled, cfg_.tmpr.lambda, XiForm::graph};

  double ce_sum = 0.0, tmpr_sum = 0.0;
  std::size_t correct = 0;
  std::size_t batch_index = 0;
  for (std::size_t start = 0; start < order.size(); start += cfg_.batch_size, ++batch_index) {
    const std::size_t stop = std::min(order.size(), start + cfg_.batch_size);
    const std::span<const std::size_t> idx(order.data() + start, stop - start);
    const Batch batch = make_batch(train, idx, net_.timesteps);
    const ForwardResult fwd = forward(net_, batch.inputs);
    const LossBreakdown loss = evaluate_loss(fwd, batch.labels, cfg_.tmpr);
    if (!std::isfinite(loss.total)) {
      throw NumericError("non-finite loss at epoch " + std::to_string(m.epoch) + ", batch " +
                         std::to_string(batch_index));
    }
    const GradSet grads = backward_exact(net_, fwd.cache, loss.dL_dO, opts);
    try {
      sgd_step(net_, grads, velocity_, m.lr, cfg_.momentum, cfg_.weight_decay);
    } catch (const NumericError& e) {
      throw NumericError(std::string(e.what()) + " at epoch " + std::to_string(m.epoch) +
                         ", batch " + std::to_string(batch_index));
    }
    const double w = static_cast<double>(idx.size());
    ce_sum += loss.ce * w;
    tmpr_sum += loss.tmpr * w;
    const auto pred = predict(fwd.logits);
    for (std::size_t i = 0; i < pred.size(); ++i) correct += pred[i] == batch.labels[i];
  }
  const double n = static_cast<double>(order.size());
  m.ce_loss = ce_sum / n;
  m.tmpr_loss = tmpr_sum / n;
  m.train_acc = static_cast<double>(correct) / n;
  return m;
}

std::vector<EpochMetrics> Trainer::fit(const Dataset& train, const Dataset& test,
                                       const std::function<void(const EpochMetrics&)>& on_epoch) {
  std::vector<EpochMetrics> history;
  check_complement_coefficients(net_);
  for (std::size_t e = 0; e < cfg_.epochs; ++e) {
    EpochMetrics m = train_epoch(train, e);
    m.eval_acc = evaluate(net_, test);
    check_complement_coefficients(net_);
    history.push_back(m);
    if (on_epoch) on_epoch(m);
  }
  return history;
}

namespace {

template <typename Fn>
void for_each_batch(const Network& net, const Dataset& data, std::size_t batch_size, Fn&& fn) {
  std::vector<std::size_t> idx;
  for (std::size_t start = 0; start < data.size(); start += batch_size) {
    idx.clear();
    for (std::size_t i = start; i < std::min(data.size(), start + batch_size); ++i) idx.push_back(i);
    const Batch batch = make_batch(data, idx, net.timesteps);
    fn(batch, forward(net, batch.inputs));
  }
}

}  // namespace

double evaluate(const Network& net, const Dataset& data, std::size_t batch_size) {
  if (data.samples.empty()) return 0.0;
  std::size_t correct = 0;
  for_each_batch(net, data, batch_size, [&](const Batch& batch, const ForwardResult& fwd) {
    const auto pred = predict(fwd.logits);
    for (std::size_t i = 0; i < pred.size(); ++i) correct += pred[i] == batch.labels[i];
  });
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

double mean_squared_potential(const Network& net, const Dataset& data, std::size_t t,
                              std::size_t batch_size) {
  if (t >= net.timesteps) throw ArgumentError("mean_squared_potential: timestep out of range");
  const std::size_t L = net.hidden.size();
  std::vector<double> sq(L, 0.0);
  std::vector<std::size_t> count(L, 0);
  for_each_batch(net, data, batch_size, [&](const Batch&, const ForwardResult& fwd) {
    for (std::size_t l = 0; l < L; ++l) {
      const Tensor& u = fwd.cache.at(l, t).u_tilde;
      sq[l] += sum_squares(u);
      count[l] += u.size();
    }
  });
  double acc = 0.0;
  for (std::size_t l = 0; l < L; ++l) acc += sq[l] / static_cast<double>(count[l]);
  return acc / static_cast<double>(L);
}

void check_complement_coefficients(const Network& net) {
  for (std::size_t l = 0; l < net.hidden.size(); ++l) {
    const auto c = effective_params(net.hidden[l].ctsn);
    for (double v : {c.alpha, c.beta, c.gamma}) {
      if (!(v > 0.0 && v < 1.0)) {
        throw NumericError("complement coefficient left (0, 1) in hidden layer " +
                           std::to_string(l + 1));
      }
    }
  }
}

}  // namespace ctsn
