#include "ctsn/bptt.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ctsn/errors.hpp"
#include "ctsn/loss.hpp"

namespace ctsn {

GradSet GradSet::zeros_like(const Network& net) {
  GradSet g;
  for (const auto& l : net.hidden) {
    g.hidden.push_back({Tensor::zeros_like(l.weight), Tensor::zeros_like(l.bias)});
  }
  g.readout = {Tensor::zeros_like(net.readout.weight), Tensor::zeros_like(net.readout.bias)};
  return g;
}

bool GradSet::all_finite() const {
  auto ok = [](const LayerGrad& g) {
    return g.d_weight.all_finite() && g.d_bias.all_finite() && std::isfinite(g.d_omega_alpha) &&
           std::isfinite(g.d_omega_beta) && std::isfinite(g.d_omega_gamma);
  };
  for (const auto& g : hidden) {
    if (!ok(g)) return false;
  }
  return ok(readout);
}

std::vector<ParamId> parameter_ids(const Network& net) {
  std::vector<ParamId> ids;
  const bool ctsn = is_ctsn(net.neuron.kind);
  auto add_layer = [&](const Layer& layer, std::size_t idx, bool with_omega) {
    for (std::size_t i = 0; i < layer.weight.size(); ++i) ids.push_back({idx, "W", i});
    for (std::size_t i = 0; i < layer.bias.size(); ++i) ids.push_back({idx, "b", i});
    if (with_omega) {
      ids.push_back({idx, "omega_alpha", 0});
      ids.push_back({idx, "omega_beta", 0});
      ids.push_back({idx, "omega_gamma", 0});
    }
  };
  for (std::size_t l = 0; l < net.hidden.size(); ++l) add_layer(net.hidden[l], l, ctsn);
  add_layer(net.readout, net.hidden.size(), false);
  return ids;
}

std::vector<double*> parameter_pointers(Network& net) {
  std::vector<double*> ptrs;
  const bool ctsn = is_ctsn(net.neuron.kind);
  auto add_layer = [&](Layer& layer, bool with_omega) {
    for (auto& w : layer.weight.data()) ptrs.push_back(&w);
    for (auto& b : layer.bias.data()) ptrs.push_back(&b);
    if (with_omega) {
      ptrs.push_back(&layer.ctsn.omega_alpha);
      ptrs.push_back(&layer.ctsn.omega_beta);
      ptrs.push_back(&layer.ctsn.omega_gamma);
    }
  };
  for (auto& l : net.hidden) add_layer(l, ctsn);
  add_layer(net.readout, false);
  return ptrs;
}

std::vector<double> flatten(const GradSet& grads, const Network& net) {
  std::vector<double> flat;
  const bool ctsn = is_ctsn(net.neuron.kind);
  auto add_layer = [&](const LayerGrad& g, bool with_omega) {
    flat.insert(flat.end(), g.d_weight.data().begin(), g.d_weight.data().end());
    flat.insert(flat.end(), g.d_bias.data().begin(), g.d_bias.data().end());
    if (with_omega) {
      flat.push_back(g.d_omega_alpha);
      flat.push_back(g.d_omega_beta);
      flat.push_back(g.d_omega_gamma);
    }
  };
  for (const auto& g : grads.hidden) add_layer(g, ctsn);
  add_layer(grads.readout, false);
  return flat;
}

GradSet unflatten(std::span<const double> flat, const Network& net) {
  GradSet g = GradSet::zeros_like(net);
  const bool ctsn = is_ctsn(net.neuron.kind);
  std::size_t k = 0;
  auto take = [&](LayerGrad& lg, bool with_omega) {
    for (auto& v : lg.d_weight.data()) v = flat[k++];
    for (auto& v : lg.d_bias.data()) v = flat[k++];
    if (with_omega) {
      lg.d_omega_alpha = flat[k++];
      lg.d_omega_beta = flat[k++];
      lg.d_omega_gamma = flat[k++];
    }
  };
  for (auto& lg : g.hidden) take(lg, ctsn);
  take(g.readout, false);
  if (k != flat.size()) throw DimensionError("unflatten: gradient vector length mismatch");
  return g;
}

std::string describe(const ParamId& id) {
  return "layer " + std::to_string(id.layer + 1) + " " + id.tensor + "[" +
         std::to_string(id.index) + "]";
}

namespace {

double sign_of(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

double epsilon(double u, double o, double H, double tau) {
  return tau * (1.0 - std::abs(o) - sign_of(o) * u * H);
}

double kappa(double u, double tau, double v_th) {
  const double outer = 1.5 * v_th;
  if (u > -outer && u < -v_th) return tau * u;
  if (u >= -v_th && u < 0.0) return tau * (1.0 + u);
  if (u > 0.0 && u <= v_th) return tau * (1.0 - u);
  if (u > v_th && u < outer) return tau * (-1.0 + u);
  return 0.0;
}

double choice(double x, double pivot, double a, double b) { return x >= pivot ? a : b; }

double grad_h_G(double h, NeuronKind kind, double alpha, double beta) {
  return kind == NeuronKind::ctsn_neuromorphic ? alpha : choice(h, 0.0, alpha, beta);
}

double grad_u_G(double u, NeuronKind kind, double beta, double gamma) {
  return kind == NeuronKind::ctsn_neuromorphic ? choice(u, 0.0, beta, gamma) : gamma;
}

double xi(double u_tilde, double abs_o, double abs_grad, double u_next,
          const ComplementCoefficients& c, NeuronKind kind, double tau, XiForm form) {
  const double dG_du = grad_u_G(u_next, kind, c.beta, c.gamma);
  const double spike_path = dG_du * (-tau * u_tilde) * abs_grad;
  const double spatial = form == XiForm::graph ? dG_du * tau * (1.0 - abs_o)
                                               : grad_u_G(u_tilde, kind, c.beta, c.gamma);
  return spatial + spike_path;
}

double xi(double o, double u_tilde, double H, const ComplementCoefficients& c, NeuronKind kind,
          double tau, XiForm form) {
  const double abs_o = std::abs(o);
  const double u_next = tau * u_tilde * (1.0 - abs_o);
  return xi(u_tilde, abs_o, sign_of(o) * H, u_next, c, kind, tau, form);
}

namespace {

void check_inputs(const Network& net, const StepCache& cache, std::span<const Tensor> dL_dO) {
  cache.require_complete();
  if (cache.num_layers() != net.hidden.size()) {
    throw StateError("cache has " + std::to_string(cache.num_layers()) +
                     " layers, network has " + std::to_string(net.hidden.size()));
  }
  if (cache.timesteps() != net.timesteps || dL_dO.size() != net.timesteps) {
    throw StateError("cache / output-gradient length does not match T=" +
                     std::to_string(net.timesteps));
  }
}

void accumulate_linear(LayerGrad& g, const Tensor& input, const Tensor& grad_out) {
  const Tensor dw = matmul_at_b(input, grad_out);
  for (std::size_t i = 0; i < dw.size(); ++i) g.d_weight[i] += dw[i];
  const Tensor db = sum_rows(grad_out);
  for (std::size_t i = 0; i < db.size(); ++i) g.d_bias[i] += db[i];
}

// Derivatives of G with respect to alpha, beta, gamma at one step.
struct OmegaPartials {
  double alpha, beta, gamma;
};

OmegaPartials g_partials(double h_prev, double u, NeuronKind kind) {
  if (kind == NeuronKind::ctsn_neuromorphic) {
    return {h_prev, u >= 0.0 ? u : 0.0, u < 0.0 ? u : 0.0};
  }
  return {h_prev >= 0.0 ? h_prev : 0.0, h_prev < 0.0 ? h_prev : 0.0, u};
}

void finish_omega(LayerGrad& g, const CTSNParams& p, double d_alpha, double d_beta,
                  double d_gamma) {
  const auto c = effective_params(p);
  g.d_omega_alpha = d_alpha * c.alpha * (1.0 - c.alpha);
  g.d_omega_beta = d_beta * c.beta * (1.0 - c.beta);
  g.d_omega_gamma = d_gamma * c.gamma * (1.0 - c.gamma);
}

Tensor tmpr_term(const StepCache& cache, std::size_t l, std::size_t t,
                 const BackwardOptions& opts) {
  const Tensor& u = cache.at(l, t).u_tilde;
  if (!opts.tmpr) return Tensor::zeros_like(u);
  return tmpr_grad(u, t + 1, cache.timesteps(), cache.num_layers(), opts.tmpr_lambda);
}

}  // namespace

GradSet backward_exact(const Network& net, const StepCache& cache,
                       std::span<const Tensor> dL_dO, const BackwardOptions& opts) {
  check_inputs(net, cache, dL_dO);
  const std::size_t L = net.hidden.size();
  const std::size_t T = net.timesteps;
  const auto& cfg = net.neuron;
  const double tau = cfg.tau;
  const bool ctsn = is_ctsn(cfg.kind);

  GradSet grads = GradSet::zeros_like(net);
  // Per layer: dL/du(t+1) for ternary, dL/dh(t+1) for CTSN.
  std::vector<Tensor> carry;
  std::vector<double> d_alpha(L, 0.0), d_beta(L, 0.0), d_gamma(L, 0.0);
  for (std::size_t l = 0; l < L; ++l) carry.push_back(Tensor::zeros_like(cache.at(l, 0).u_tilde));

  for (std::size_t t = T; t-- > 0;) {
    const Tensor& top_o = cache.at(L - 1, t).o;
    accumulate_linear(grads.readout, top_o, dL_dO[t]);
    Tensor grad_o = matmul_a_bt(dL_dO[t], net.readout.weight);

    for (std::size_t l = L; l-- > 0;) {
      const StepRecord& rec = cache.at(l, t);
      const Tensor direct = tmpr_term(cache, l, t, opts);
      const bool has_next = t + 1 < T;
      Tensor grad_x = Tensor::zeros_like(rec.u_tilde);
      Tensor& next = carry[l];

      if (!ctsn) {
        for (std::size_t i = 0; i < grad_x.size(); ++i) {
          double g_o = grad_o[i];
          double temporal = 0.0;
          if (has_next) {
            if (cfg.reset == ResetMode::hard) {
              temporal = next[i] * (tau * (1.0 - std::abs(rec.o[i])) -
                                    tau * rec.u[i] * rec.abs_grad[i]);
            } else {
              temporal = next[i] * tau;
              g_o += next[i] * (-tau * cfg.v_th);
            }
          }
          grad_x[i] = g_o * rec.surrogate[i] + direct[i] + temporal;
        }
        next = grad_x;
      } else {
        const auto c = effective_params(net.hidden[l].ctsn);
        Tensor grad_h = Tensor::zeros_like(rec.u_tilde);
        for (std::size_t i = 0; i < grad_x.size(); ++i) {
          double from_next_u = 0.0;
          double from_next_h = 0.0;
          if (has_next) {
            const double u_next = cache.at(l, t + 1).u[i];
            const double dG_du = grad_u_G(u_next, cfg.kind, c.beta, c.gamma);
            const double du_next =
                tau * (1.0 - std::abs(rec.o[i])) - tau * rec.u_tilde[i] * rec.abs_grad[i];
            from_next_u = next[i] * dG_du * du_next;
            from_next_h = next[i] * grad_h_G(rec.h[i], cfg.kind, c.alpha, c.beta);
          }
          const double g_ut = grad_o[i] * rec.surrogate[i] + direct[i] + from_next_u;
          grad_x[i] = g_ut;
          grad_h[i] = g_ut + from_next_h;
          const auto part = g_partials(rec.h_prev[i], rec.u[i], cfg.kind);
          d_alpha[l] += grad_h[i] * part.alpha;
          d_beta[l] += grad_h[i] * part.beta;
          d_gamma[l] += grad_h[i] * part.gamma;
        }
        next = std::move(grad_h);
      }

      accumulate_linear(grads.hidden[l], rec.input, grad_x);
      if (l > 0) grad_o = matmul_a_bt(grad_x, net.hidden[l].weight);
    }
  }

  if (ctsn) {
    for (std::size_t l = 0; l < L; ++l) {
      finish_omega(grads.hidden[l], net.hidden[l].ctsn, d_alpha[l], d_beta[l], d_gamma[l]);
    }
  }
  return grads;
}

RecursionResult backward_recursion(const Network& net, const StepCache& cache,
                                   std::span<const Tensor> dL_dO, const BackwardOptions& opts) {
  check_inputs(net, cache, dL_dO);
  const auto& cfg = net.neuron;
  if (cfg.kind == NeuronKind::ternary && cfg.reset != ResetMode::hard) {
    throw ArgumentError("backward_recursion covers the hard-reset neuron only");
  }
  const std::size_t L = net.hidden.size();
  const std::size_t T = net.timesteps;
  const double tau = cfg.tau;
  const bool ctsn = is_ctsn(cfg.kind);

  RecursionResult result{GradSet::zeros_like(net), 0};
  GradSet& grads = result.grads;
  for (std::size_t t = 0; t < T; ++t) accumulate_linear(grads.readout, cache.at(L - 1, t).o, dL_dO[t]);

  // dL/do^l(t) for the layer being processed, all t.
  std::vector<Tensor> grad_o(T);
  for (std::size_t t = 0; t < T; ++t) grad_o[t] = matmul_a_bt(dL_dO[t], net.readout.weight);

  for (std::size_t l = L; l-- > 0;) {
    std::vector<Tensor> local(T);
    for (std::size_t t = 0; t < T; ++t) {
      const StepRecord& rec = cache.at(l, t);
      local[t] = add(mul(grad_o[t], rec.surrogate), tmpr_term(cache, l, t, opts));
    }
    const std::size_t n = local.front().size();
    std::vector<Tensor> grad_u(T, Tensor::zeros_like(local.front()));

    if (!ctsn) {
      // dL/du(t) = sum_{t'>=t} local(t') * prod_{k=t}^{t'-1} epsilon(k)
      for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t i = 0; i < n; ++i) {
          double total = local[t][i];
          double prod = 1.0;
          for (std::size_t tp = t + 1; tp < T; ++tp) {
            const StepRecord& r = cache.at(l, tp - 1);
            prod *= epsilon(r.u[i], r.o[i], r.surrogate[i], tau);
            total += local[tp][i] * prod;
          }
          grad_u[t][i] = total;
        }
      }
    } else {
      const auto c = effective_params(net.hidden[l].ctsn);
      auto xi_at = [&](std::size_t k, std::size_t i) {
        const StepRecord& r = cache.at(l, k);
        return xi(r.u_tilde[i], std::abs(r.o[i]), r.abs_grad[i], cache.at(l, k + 1).u[i], c,
                  cfg.kind, tau, opts.xi_form);
      };
      // (xi(k) + dh(k+1)/dh(k)), the complemental-gradient factor.
      auto comp_at = [&](std::size_t k, std::size_t i) {
        ++result.complemental_factors;
        return xi_at(k, i) + grad_h_G(cache.at(l, k).h[i], cfg.kind, c.alpha, c.beta);
      };

      // dL/du~(t) = local(t) + local(t+1) xi(t)
      //           + sum_{t'>=t+2} local(t') prod_{k=t+1}^{t'-1}(xi(k) + grad_h G) xi(t)
      for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t i = 0; i < n; ++i) {
          double total = local[t][i];
          if (t + 1 < T) {
            const double xi_t = xi_at(t, i);
            total += local[t + 1][i] * xi_t;
            double prod = xi_t;
            for (std::size_t tp = t + 2; tp < T; ++tp) {
              prod *= comp_at(tp - 1, i);
              total += local[tp][i] * prod;
            }
          }
          grad_u[t][i] = total;
        }
      }

      // Parameter path: dL/dh(t) = sum_{t'>=t} local(t') prod_{k=t}^{t'-1}(xi(k) + grad_h G).
      // The first step contributes nothing: h(0) = 0 and u(1) = 0 zero every
      // partial of G there.
      double d_alpha = 0.0, d_beta = 0.0, d_gamma = 0.0;
      for (std::size_t t = 1; t < T; ++t) {
        const StepRecord& rec = cache.at(l, t);
        for (std::size_t i = 0; i < n; ++i) {
          double total = local[t][i];
          double prod = 1.0;
          for (std::size_t tp = t + 1; tp < T; ++tp) {
            prod *= comp_at(tp - 1, i);
            total += local[tp][i] * prod;
          }
          const auto part = g_partials(rec.h_prev[i], rec.u[i], cfg.kind);
          d_alpha += total * part.alpha;
          d_beta += total * part.beta;
          d_gamma += total * part.gamma;
        }
      }
      finish_omega(grads.hidden[l], net.hidden[l].ctsn, d_alpha, d_beta, d_gamma);
    }

    for (std::size_t t = 0; t < T; ++t) accumulate_linear(grads.hidden[l], cache.at(l, t).input, grad_u[t]);
    if (l > 0) {
      for (std::size_t t = 0; t < T; ++t) grad_o[t] = matmul_a_bt(grad_u[t], net.hidden[l].weight);
    }
  }
  return result;
}

LossBreakdown evaluate_loss(const ForwardResult& fwd, std::span<const int> labels,
                            const TMPRConfig& tmpr) {
  LossBreakdown out;
  out.ce = avg_ce_loss(fwd.logits, labels);
  out.tmpr = tmpr.enabled ? tmpr_loss(fwd.cache, tmpr.lambda) : 0.0;
  out.total = total_loss(out.ce, out.tmpr);
  out.dL_dO = avg_ce_grad(fwd.logits, labels);
  return out;
}

double surrogate_smooth_forward(const Network& net, std::span<const Tensor> input_seq,
                                std::span<const int> labels, const TMPRConfig& tmpr) {
  const ForwardResult fwd = forward(net, input_seq, FireMode::smooth);
  return evaluate_loss(fwd, labels, tmpr).total;
}

template <typename Real>
Real smooth_stand_in_loss(const Network& layout, std::span<const Real> params,
                          std::span<const Tensor> input_seq, std::span<const int> labels,
                          const TMPRConfig& tmpr) {
  const auto& cfg = layout.neuron;
  const std::size_t L = layout.hidden.size();
  const std::size_t T = layout.timesteps;
  if (input_seq.size() != T) throw DimensionError("smooth_stand_in_loss: sequence length != T");
  const std::size_t B = input_seq.front().dim(0);
  const auto dims = layout.dims();
  const bool ctsn = is_ctsn(cfg.kind);
  const bool neuromorphic = cfg.kind == NeuronKind::ctsn_neuromorphic;
  const Real tau = cfg.tau, v_th = cfg.v_th, edge = Real(cfg.v_th) + Real(cfg.a);

  struct View {
    const Real* w;
    const Real* b;
    Real alpha, beta, gamma;
  };
  auto sig = [](Real x) { return Real(1) / (Real(1) + std::exp(-x)); };
  std::vector<View> views;
  std::size_t k = 0;
  for (std::size_t l = 0; l <= L; ++l) {
    View v{&params[k], &params[k + dims[l] * dims[l + 1]], 0, 0, 0};
    k += dims[l] * dims[l + 1] + dims[l + 1];
    if (l < L && ctsn) {
      v.alpha = sig(params[k]);
      v.beta = sig(params[k + 1]);
      v.gamma = sig(params[k + 2]);
      k += 3;
    }
    views.push_back(v);
  }
  if (k != params.size()) throw DimensionError("smooth_stand_in_loss: parameter count mismatch");

  std::vector<std::vector<Real>> u(L), h(L), ut(L), o(L);
  for (std::size_t l = 0; l < L; ++l) {
    const std::size_t n = B * dims[l + 1];
    u[l].assign(n, 0);
    h[l].assign(n, 0);
    ut[l].assign(n, 0);
    o[l].assign(n, 0);
  }
  const std::size_t C = dims[L + 1];
  std::vector<Real> avg(B * C, 0);
  Real reg = 0;

  for (std::size_t t = 0; t < T; ++t) {
    std::vector<Real> signal(input_seq[t].data().begin(), input_seq[t].data().end());
    for (std::size_t l = 0; l < L; ++l) {
      const std::size_t in = dims[l], out = dims[l + 1];
      const View& v = views[l];
      Real sq = 0;
      for (std::size_t b = 0; b < B; ++b) {
        for (std::size_t j = 0; j < out; ++j) {
          Real x = v.b[j];
          for (std::size_t i = 0; i < in; ++i) x += signal[b * in + i] * v.w[i * out + j];
          const std::size_t e = b * out + j;
          if (!ctsn) {
            const Real carried = cfg.reset == ResetMode::hard
                                     ? tau * u[l][e] * (Real(1) - std::abs(o[l][e]))
                                     : tau * (u[l][e] - o[l][e] * v_th);
            u[l][e] = carried + x;
            ut[l][e] = u[l][e];
          } else {
            const Real p = tau * ut[l][e] * (Real(1) - std::abs(o[l][e]));
            const Real hp = h[l][e];
            const Real hn = neuromorphic ? v.alpha * hp + (p >= 0 ? v.beta * p : v.gamma * p)
                                         : (hp >= 0 ? v.alpha * hp : v.beta * hp) + v.gamma * p;
            u[l][e] = p;
            h[l][e] = hn;
            ut[l][e] = hn + x;
          }
          o[l][e] = std::clamp(ut[l][e], -edge, edge);
          sq += ut[l][e] * ut[l][e];
        }
      }
      reg += Real(tmpr.lambda) / Real(t + 1) * sq / Real(B * out);
      signal = o[l];
    }
    const View& r = views[L];
    const std::size_t in = dims[L];
    for (std::size_t b = 0; b < B; ++b) {
      for (std::size_t c = 0; c < C; ++c) {
        Real z = r.b[c];
        for (std::size_t i = 0; i < in; ++i) z += signal[b * in + i] * r.w[i * C + c];
        avg[b * C + c] += z / Real(T);
      }
    }
  }

  Real ce = 0;
  for (std::size_t b = 0; b < B; ++b) {
    Real m = avg[b * C];
    for (std::size_t c = 1; c < C; ++c) m = std::max(m, avg[b * C + c]);
    Real s = 0;
    for (std::size_t c = 0; c < C; ++c) s += std::exp(avg[b * C + c] - m);
    ce += m + std::log(s) - avg[b * C + static_cast<std::size_t>(labels[b])];
  }
  ce /= Real(B);
  return tmpr.enabled ? ce + reg / Real(T * L) : ce;
}

template double smooth_stand_in_loss<double>(const Network&, std::span<const double>,
                                             std::span<const Tensor>, std::span<const int>,
                                             const TMPRConfig&);
template long double smooth_stand_in_loss<long double>(const Network&,
                                                       std::span<const long double>,
                                                       std::span<const Tensor>,
                                                       std::span<const int>, const TMPRConfig&);

GradSet smooth_finite_difference(const Network& net, std::span<const Tensor> input_seq,
                                 std::span<const int> labels, const TMPRConfig& tmpr,
                                 double step) {
  if (!(step > 0.0)) throw ArgumentError("finite_difference: step must be positive");
  Network copy = net;
  std::vector<long double> params;
  for (double* p : parameter_pointers(copy)) params.push_back(*p);
  const long double h = step;
  std::vector<double> out(params.size());
  for (std::size_t k = 0; k < params.size(); ++k) {
    const long double saved = params[k];
    params[k] = saved + h;
    const long double up =
        smooth_stand_in_loss<long double>(net, params, input_seq, labels, tmpr);
    params[k] = saved - h;
    const long double down =
        smooth_stand_in_loss<long double>(net, params, input_seq, labels, tmpr);
    params[k] = saved;
    if (!std::isfinite(up) || !std::isfinite(down)) {
      throw NumericError("finite_difference: non-finite loss at parameter " + std::to_string(k));
    }
    out[k] = static_cast<double>((up - down) / (2 * h));
  }
  return unflatten(out, net);
}

std::vector<double> finite_difference(const std::function<double()>& loss,
                                      std::span<double* const> params, double step) {
  if (!(step > 0.0)) throw ArgumentError("finite_difference: step must be positive");
  std::vector<double> out(params.size());
  for (std::size_t k = 0; k < params.size(); ++k) {
    double* p = params[k];
    const double saved = *p;
    *p = saved + step;
    const double up = loss();
    *p = saved - step;
    const double down = loss();
    *p = saved;
    if (!std::isfinite(up) || !std::isfinite(down)) {
      throw NumericError("finite_difference: non-finite loss at parameter " + std::to_string(k));
    }
    out[k] = (up - down) / (2.0 * step);
  }
  return out;
}

GradSet finite_difference(Network& net, const std::function<double(const Network&)>& loss,
                          double step) {
  const auto ptrs = parameter_pointers(net);
  const auto flat = finite_difference([&] { return loss(net); }, ptrs, step);
  return unflatten(flat, net);
}

}  // namespace ctsn
