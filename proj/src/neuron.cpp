#include "ctsn/neuron.hpp"

#include <cmath>

#include "ctsn/errors.hpp"

namespace ctsn {

std::string_view to_string(NeuronKind kind) {
  switch (kind) {
    case NeuronKind::ternary: return "ternary";
    case NeuronKind::ctsn_static: return "ctsn_static";
    case NeuronKind::ctsn_neuromorphic: return "ctsn_neuromorphic";
  }
  return "?";
}

std::string_view to_string(ResetMode mode) {
  return mode == ResetMode::hard ? "hard" : "soft";
}

NeuronKind parse_neuron_kind(std::string_view s) {
  if (s == "ternary") return NeuronKind::ternary;
  if (s == "ctsn_static") return NeuronKind::ctsn_static;
  if (s == "ctsn_neuromorphic") return NeuronKind::ctsn_neuromorphic;
  throw ArgumentError("unknown neuron kind '" + std::string(s) +
                      "' (expected ternary, ctsn_static or ctsn_neuromorphic)");
}

ResetMode parse_reset_mode(std::string_view s) {
  if (s == "hard") return ResetMode::hard;
  if (s == "soft") return ResetMode::soft;
  throw ArgumentError("unknown reset mode '" + std::string(s) + "' (expected hard or soft)");
}

void NeuronConfig::validate() const {
  if (!(tau > 0.0 && tau <= 1.0)) throw ArgumentError("tau must lie in (0, 1]");
  if (!(v_th > 0.0)) throw ArgumentError("v_th must be positive");
  if (!(a > 0.0)) throw ArgumentError("surrogate width a must be positive");
  if (reset == ResetMode::soft && kind != NeuronKind::ternary) {
    throw ArgumentError("soft reset is only defined for the ternary neuron");
  }
}

ComplementCoefficients effective_params(const CTSNParams& p) {
  return {sigmoid(p.omega_alpha), sigmoid(p.omega_beta), sigmoid(p.omega_gamma)};
}

NeuronState NeuronState::zeros(const Shape& shape) {
  return {Tensor(shape), Tensor(shape), Tensor(shape), Tensor(shape)};
}

double ternary_fire(double u, double v_th) {
  if (u >= v_th) return 1.0;
  if (u <= -v_th) return -1.0;
  return 0.0;
}

Tensor ternary_fire(const Tensor& u_tilde, double v_th) {
  Tensor out = Tensor::zeros_like(u_tilde);
  for (std::size_t i = 0; i < u_tilde.size(); ++i) out[i] = ternary_fire(u_tilde[i], v_th);
  return out;
}

double surrogate(double u, double v_th, double a) {
  return std::abs(u) - v_th < a ? 1.0 : 0.0;
}

Tensor surrogate(const Tensor& u_tilde, double v_th, double a) {
  Tensor out = Tensor::zeros_like(u_tilde);
  for (std::size_t i = 0; i < u_tilde.size(); ++i) out[i] = surrogate(u_tilde[i], v_th, a);
  return out;
}

double smooth_fire(double u, double v_th, double a) {
  const double edge = v_th + a;
  if (u >= edge) return edge;
  if (u <= -edge) return -edge;
  return u;
}

namespace {

void require_state_shape(const NeuronState& s, const Tensor& x) {
  require_same_shape(s.u, x, "neuron step (state u vs input)");
  require_same_shape(s.h, x, "neuron step (state h vs input)");
  require_same_shape(s.u_tilde, x, "neuron step (state u_tilde vs input)");
  require_same_shape(s.o_prev, x, "neuron step (state o_prev vs input)");
}

}  // namespace

double g_static(double h_prev, double u, double alpha, double beta, double gamma) {
  const double decayed = h_prev >= 0.0 ? alpha * h_prev : beta * h_prev;
  return decayed + gamma * u;
}

double g_neuromorphic(double h_prev, double u, double alpha, double beta, double gamma) {
  const double injected = u >= 0.0 ? beta * u : gamma * u;
  return alpha * h_prev + injected;
}

Tensor g_static(const Tensor& h_prev, const Tensor& u, double alpha, double beta, double gamma) {
  require_same_shape(h_prev, u, "g_static");
  Tensor out = Tensor::zeros_like(u);
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = g_static(h_prev[i], u[i], alpha, beta, gamma);
  return out;
}

Tensor g_neuromorphic(const Tensor& h_prev, const Tensor& u, double alpha, double beta,
                      double gamma) {
  require_same_shape(h_prev, u, "g_neuromorphic");
  Tensor out = Tensor::zeros_like(u);
  for (std::size_t i = 0; i < u.size(); ++i) {
    out[i] = g_neuromorphic(h_prev[i], u[i], alpha, beta, gamma);
  }
  return out;
}

NeuronState integrate(const NeuronState& prev, const Tensor& x, const CTSNParams& p,
                      const NeuronConfig& cfg) {
  require_state_shape(prev, x);
  NeuronState next = prev;
  const double tau = cfg.tau;
  const std::size_t n = x.size();

  if (cfg.kind == NeuronKind::ternary) {
    for (std::size_t i = 0; i < n; ++i) {
      const double carried = cfg.reset == ResetMode::hard
                                 ? tau * prev.u[i] * (1.0 - std::abs(prev.o_prev[i]))
                                 : tau * (prev.u[i] - prev.o_prev[i] * cfg.v_th);
      next.u[i] = carried + x[i];
      next.u_tilde[i] = next.u[i];
    }
    return next;
  }

  if (cfg.reset != ResetMode::hard) {
    throw ArgumentError("soft reset is only defined for the ternary neuron");
  }
  const auto [alpha, beta, gamma] = effective_params(p);
  const bool neuromorphic = cfg.kind == NeuronKind::ctsn_neuromorphic;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = tau * prev.u_tilde[i] * (1.0 - std::abs(prev.o_prev[i]));
    const double h = neuromorphic ? g_neuromorphic(prev.h[i], u, alpha, beta, gamma)
                                  : g_static(prev.h[i], u, alpha, beta, gamma);
    next.u[i] = u;
    next.h[i] = h;
    next.u_tilde[i] = h + x[i];
  }
  return next;
}

StepResult neuron_step(const NeuronState& state, const Tensor& x, const CTSNParams& p,
                       const NeuronConfig& cfg) {
  NeuronState next = integrate(state, x, p, cfg);
  Tensor spikes = ternary_fire(next.u_tilde, cfg.v_th);
  next.o_prev = spikes;
  return {std::move(spikes), std::move(next)};
}

StepResult ternary_step(const NeuronState& state, const Tensor& x, const NeuronConfig& cfg) {
  if (cfg.kind != NeuronKind::ternary || cfg.reset != ResetMode::hard) {
    throw ArgumentError("ternary_step requires kind=ternary and reset=hard");
  }
  return neuron_step(state, x, CTSNParams{}, cfg);
}

StepResult ternary_step_soft(const NeuronState& state, const Tensor& x, const NeuronConfig& cfg) {
  if (cfg.kind != NeuronKind::ternary || cfg.reset != ResetMode::soft) {
    throw ArgumentError("ternary_step_soft requires kind=ternary and reset=soft");
  }
  return neuron_step(state, x, CTSNParams{}, cfg);
}

StepResult ctsn_step(const NeuronState& state, const Tensor& x, const CTSNParams& p,
                     const NeuronConfig& cfg) {
  if (!is_ctsn(cfg.kind)) {
    throw ArgumentError("ctsn_step requires kind ctsn_static or ctsn_neuromorphic");
  }
  return neuron_step(state, x, p, cfg);
}

Tensor closed_form_potential(std::span<const Tensor> x_hist, std::span<const Tensor> o_hist,
                             double tau, std::size_t t) {
  if (t == 0) throw ArgumentError("closed_form_potential: t is 1-based");
  if (x_hist.size() < t) {
    throw ArgumentError("closed_form_potential: input history has " +
                        std::to_string(x_hist.size()) + " entries, need " + std::to_string(t));
  }
  if (o_hist.size() + 1 < t) {
    throw ArgumentError("closed_form_potential: spike history has " +
                        std::to_string(o_hist.size()) + " entries, need " +
                        std::to_string(t - 1));
  }
  const Tensor& xt = x_hist[t - 1];
  Tensor out = xt;
  for (std::size_t i = 1; i < t; ++i) {
    require_same_shape(x_hist[i - 1], xt, "closed_form_potential");
    const double decay = std::pow(tau, static_cast<double>(t - i));
    for (std::size_t k = 0; k < out.size(); ++k) {
      double keep = 1.0;
      for (std::size_t j = i; j < t; ++j) keep *= 1.0 - std::abs(o_hist[j - 1][k]);
      out[k] += decay * x_hist[i - 1][k] * keep;
    }
  }
  return out;
}

}  // namespace ctsn
