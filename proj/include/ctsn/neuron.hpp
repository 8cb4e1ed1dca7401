#pragma once

#include <span>
#include <string>
#include <string_view>

#include "ctsn/numerics.hpp"

namespace ctsn {

enum class NeuronKind { ternary, ctsn_static, ctsn_neuromorphic };
enum class ResetMode { hard, soft };

std::string_view to_string(NeuronKind kind);
std::string_view to_string(ResetMode mode);
NeuronKind parse_neuron_kind(std::string_view s);
ResetMode parse_reset_mode(std::string_view s);

inline bool is_ctsn(NeuronKind kind) { return kind != NeuronKind::ternary; }

struct NeuronConfig {
  double tau = 0.25;  // leak, in (0, 1]
  double v_th = 0.5;  // firing threshold
  double a = 0.5;     // surrogate half-width
  ResetMode reset = ResetMode::hard;
  NeuronKind kind = NeuronKind::ternary;

  // Throws ArgumentError on out-of-range values or on soft reset with CTSN.
  void validate() const;
};

// Unconstrained parameters of the complement rule; one triple per layer.
// The effective coefficients are sigmoid(omega), so the defaults give 0.5.
struct CTSNParams {
  double omega_alpha = 0.0;
  double omega_beta = 0.0;
  double omega_gamma = 0.0;
};

struct ComplementCoefficients {
  double alpha;
  double beta;
  double gamma;
};

ComplementCoefficients effective_params(const CTSNParams& p);

// Per-layer dynamic state. For the plain ternary neuron h stays zero and
// u_tilde mirrors u. For CTSN, u holds the leaked and reset potential that
// feeds the complement rule, u_tilde the integrated potential that fires.
// o_prev is the last emitted output (a spike tensor on the ternary path,
// the smooth stand-in value during gradient checks).
struct NeuronState {
  Tensor u;
  Tensor h;
  Tensor u_tilde;
  Tensor o_prev;

  static NeuronState zeros(const Shape& shape);
};

struct StepResult {
  Tensor spikes;
  NeuronState state;
};

// +1 where u >= v_th, -1 where u <= -v_th, 0 otherwise.
double ternary_fire(double u, double v_th);
Tensor ternary_fire(const Tensor& u_tilde, double v_th);

// Rectangular window: 1 where |u| - v_th < a (strict), else 0.
double surrogate(double u, double v_th, double a);
Tensor surrogate(const Tensor& u_tilde, double v_th, double a);

// Odd antiderivative of the rectangular window: slope 1 for |u| < v_th + a
// and flat outside, i.e. clamp(u, -(v_th + a), v_th + a). Equals the spike
// values at the window edges when v_th + a = 1 (the default setting).
double smooth_fire(double u, double v_th, double a);

// Hard reset: u(t) = tau * u(t-1) * (1 - |o(t-1)|) + x(t).
StepResult ternary_step(const NeuronState& state, const Tensor& x, const NeuronConfig& cfg);
// Soft reset: u(t) = tau * (u(t-1) - o(t-1) * v_th) + x(t).
StepResult ternary_step_soft(const NeuronState& state, const Tensor& x, const NeuronConfig& cfg);

double g_static(double h_prev, double u, double alpha, double beta, double gamma);
double g_neuromorphic(double h_prev, double u, double alpha, double beta, double gamma);
Tensor g_static(const Tensor& h_prev, const Tensor& u, double alpha, double beta, double gamma);
Tensor g_neuromorphic(const Tensor& h_prev, const Tensor& u, double alpha, double beta,
                      double gamma);

StepResult ctsn_step(const NeuronState& state, const Tensor& x, const CTSNParams& p,
                     const NeuronConfig& cfg);

// Integration half of a step: fills u, h, u_tilde from the previous state and
// the synaptic input, leaving o_prev untouched. Dispatches on cfg.kind and
// cfg.reset.
NeuronState integrate(const NeuronState& prev, const Tensor& x, const CTSNParams& p,
                      const NeuronConfig& cfg);

// Full step for any configured kind.
StepResult neuron_step(const NeuronState& state, const Tensor& x, const CTSNParams& p,
                       const NeuronConfig& cfg);

// Unrolled hard-reset potential at 1-based timestep t:
//   x(t) + sum_{i<t} tau^(t-i) x(i) prod_{j=i}^{t-1} (1 - |o(j)|)
Tensor closed_form_potential(std::span<const Tensor> x_hist, std::span<const Tensor> o_hist,
                             double tau, std::size_t t);

}  // namespace ctsn
