#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ctsn/loss.hpp"
#include "ctsn/network.hpp"
#include "ctsn/neuron.hpp"
#include "ctsn/step_cache.hpp"

namespace ctsn {

struct LayerGrad {
  Tensor d_weight;
  Tensor d_bias;
  double d_omega_alpha = 0.0;
  double d_omega_beta = 0.0;
  double d_omega_gamma = 0.0;
};

struct GradSet {
  std::vector<LayerGrad> hidden;
  LayerGrad readout;

  static GradSet zeros_like(const Network& net);
  bool all_finite() const;
};

// Flat parameter addressing shared by finite differences, the optimiser and
// the gradcheck reports. Order: per hidden layer W (row-major), b, then the
// omega triple when the neuron is CTSN; then readout W, b.
struct ParamId {
  std::size_t layer;   // hidden index, or hidden.size() for the readout
  std::string tensor;  // "W", "b", "omega_alpha", ...
  std::size_t index;   // flat index inside the tensor
};

std::vector<ParamId> parameter_ids(const Network& net);
std::vector<double*> parameter_pointers(Network& net);
std::vector<double> flatten(const GradSet& grads, const Network& net);
std::string describe(const ParamId& id);

// tau * (1 - |o| - Sign(o) * u * H), Sign(0) = 0.
double epsilon(double u, double o, double H, double tau);

// Five-branch piecewise term. The outer edges are open, so |u| = 3/2 v_th
// already lands in the zero branch.
//   tau*u          for -3/2 v_th < u < -v_th
//   tau*(1+u)      for -v_th <= u < 0
//   tau*(1-u)      for 0 < u <= v_th
//   tau*(-1+u)     for v_th < u < 3/2 v_th
//   0              otherwise
double kappa(double u, double tau, double v_th);

// a if x >= pivot else b.
double choice(double x, double pivot, double a, double b);

// dh(t+1)/dh(t): Choice(h, 0, alpha, beta) for the static rule, alpha for
// the neuromorphic one.
double grad_h_G(double h, NeuronKind kind, double alpha, double beta);
// dG/du at argument u: gamma (static), Choice(u, 0, beta, gamma) (neuromorphic).
double grad_u_G(double u, NeuronKind kind, double beta, double gamma);

// Two readings of dh(t+1)/du~(t).
//   literal: the spatial part is gamma (static) or Choice(u~, 0, beta, gamma)
//          (neuromorphic), without the tau(1-|o|) factor of the reset path.
//   graph: the derivative of h(t+1) = G(h(t), tau u~(t)(1-|o(t)|)) in full.
// Both share the spike-path term dG/du * (-tau u~) * d|o|/du~.
enum class XiForm { literal, graph };

// Full-argument form. u_next is u(t+1) = tau u~(t)(1 - |o(t)|), which picks
// the neuromorphic branch of dG/du.
double xi(double u_tilde, double abs_o, double abs_grad, double u_next,
          const ComplementCoefficients& c, NeuronKind kind, double tau, XiForm form);
// Convenience form from a ternary spike o and its surrogate H.
double xi(double o, double u_tilde, double H, const ComplementCoefficients& c, NeuronKind kind,
          double tau, XiForm form = XiForm::literal);

struct BackwardOptions {
  bool tmpr = false;  // add the regulariser's direct potential term
  double tmpr_lambda = 0.0;
  XiForm xi_form = XiForm::graph;
};

// Reverse traversal of the unrolled graph, time-major from T down to 1, with
// every spike node's derivative read from the cache (surrogate window for the
// ternary forward, the stand-in's own slope for the smooth one). Covers hard
// and soft reset and both CTSN rules. dL_dO holds dL/dO(t) per timestep.
GradSet backward_exact(const Network& net, const StepCache& cache,
                       std::span<const Tensor> dL_dO, const BackwardOptions& opts = {});

struct RecursionResult {
  GradSet grads;
  // Number of scalar multiplications by a complemental-gradient factor
  // (xi + dh/dh). Stays zero when T <= 2.
  std::size_t complemental_factors = 0;
};

// Layer-major evaluation of the closed-form temporal sums: epsilon products
// for the hard-reset ternary neuron, xi / complemental-gradient products for
// CTSN. Soft reset is not covered and throws ArgumentError.
RecursionResult backward_recursion(const Network& net, const StepCache& cache,
                                   std::span<const Tensor> dL_dO,
                                   const BackwardOptions& opts = {});

struct LossBreakdown {
  double ce = 0.0;
  double tmpr = 0.0;
  double total = 0.0;
  std::vector<Tensor> dL_dO;
};

// Loss for one batch: averaged-output CE plus the potential
// regulariser over every hidden layer's u~.
LossBreakdown evaluate_loss(const ForwardResult& fwd, std::span<const int> labels,
                            const TMPRConfig& tmpr);

// Loss of the smooth stand-in network (same parameters, FireMode::smooth).
double surrogate_smooth_forward(const Network& net, std::span<const Tensor> input_seq,
                                std::span<const int> labels, const TMPRConfig& tmpr);

// Scalar-loop evaluation of the same stand-in loss with parameters supplied
// flat (parameter_ids order) in precision Real. It shares no code with
// forward() and is instantiated for double and long double.
template <typename Real>
Real smooth_stand_in_loss(const Network& layout, std::span<const Real> params,
                          std::span<const Tensor> input_seq, std::span<const int> labels,
                          const TMPRConfig& tmpr);

// Central differences of smooth_stand_in_loss<long double>, perturbing in
// extended precision so that round-off stays far below the gradient scale.
GradSet smooth_finite_difference(const Network& net, std::span<const Tensor> input_seq,
                                 std::span<const int> labels, const TMPRConfig& tmpr,
                                 double step);

// Central differences (f(p+s) - f(p-s)) / 2s for every pointer. Parameters
// are restored exactly. Non-finite loss values throw NumericError.
std::vector<double> finite_difference(const std::function<double()>& loss,
                                      std::span<double* const> params, double step);

// Network-level form; returns gradients in GradSet layout.
GradSet finite_difference(Network& net, const std::function<double(const Network&)>& loss,
                          double step);

GradSet unflatten(std::span<const double> flat, const Network& net);

}  // namespace ctsn
