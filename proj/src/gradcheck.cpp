#include "ctsn/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ctsn/errors.hpp"
#include "ctsn/loss.hpp"

namespace ctsn {

double relative_error(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  if (scale == 0.0) return 0.0;
  return std::abs(a - b) / scale;
}

namespace {

std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(rng.below(hi - lo + 1));
}

std::string kind_label(NeuronKind kind, ResetMode reset) {
  std::string s(to_string(kind));
  if (kind == NeuronKind::ternary && reset == ResetMode::soft) s += "_soft";
  return s;
}

void record(SuiteResult& suite, ParamCheck row, const std::string& where) {
  ++suite.checked;
  if (!row.pass) ++suite.failures;
  const bool noise_only = row.pass && row.error > suite.tolerance;
  if (noise_only) ++suite.noise_rows;
  if (!noise_only && (suite.worst.empty() || row.error > suite.max_error)) {
    suite.max_error = row.error;
    suite.worst = where;
  }
  suite.rows.push_back(std::move(row));
}

}  // namespace

GradProblem random_problem(Rng& rng, NeuronKind kind, ResetMode reset, const ProblemLimits& lim) {
  NeuronConfig cfg;
  cfg.kind = kind;
  cfg.reset = reset;
  const std::size_t layers = pick(rng, 1, lim.max_layers);
  const std::size_t T = pick(rng, 1, lim.max_T);
  const std::size_t B = pick(rng, 1, lim.max_batch);
  std::vector<std::size_t> dims{pick(rng, 1, lim.max_units)};
  for (std::size_t l = 0; l < layers; ++l) dims.push_back(pick(rng, 1, lim.max_units));
  const std::size_t classes = pick(rng, 2, 4);
  dims.push_back(classes);

  GradProblem p{Network(dims, cfg, T), {}, {}};
  auto fill = [&rng](Layer& layer) {
    const double bound = 1.5 / std::sqrt(static_cast<double>(layer.weight.dim(0)));
    for (auto& w : layer.weight.data()) w = rng.uniform(-bound, bound);
    for (auto& b : layer.bias.data()) b = rng.uniform(-0.3, 0.3);
  };
  for (auto& l : p.net.hidden) {
    fill(l);
    if (is_ctsn(kind)) l.ctsn = {rng.normal(), rng.normal(), rng.normal()};
  }
  fill(p.net.readout);

  for (std::size_t t = 0; t < T; ++t) {
    Tensor x({B, dims[0]});
    for (auto& v : x.data()) v = rng.normal();
    p.batch.inputs.push_back(std::move(x));
  }
  for (std::size_t b = 0; b < B; ++b) p.batch.labels.push_back(static_cast<int>(rng.below(classes)));
  p.tmpr.enabled = rng.uniform() < 0.75;
  p.tmpr.lambda = rng.uniform(0.0, 0.1);
  return p;
}

double kink_distance(const Network& net, const StepCache& cache) {
  const auto& cfg = net.neuron;
  const double edge = cfg.v_th + cfg.a;
  const bool abs_path = cfg.reset == ResetMode::hard || is_ctsn(cfg.kind);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l < cache.num_layers(); ++l) {
    for (std::size_t t = 0; t < cache.timesteps(); ++t) {
      const StepRecord& r = cache.at(l, t);
      for (std::size_t i = 0; i < r.u_tilde.size(); ++i) {
        const double ut = r.u_tilde[i];
        best = std::min(best, std::abs(std::abs(ut) - edge));
        if (abs_path) best = std::min(best, std::abs(ut));
        if (cfg.kind == NeuronKind::ctsn_static && r.h_prev[i] != 0.0) {
          best = std::min(best, std::abs(r.h_prev[i]));
        }
        if (cfg.kind == NeuronKind::ctsn_neuromorphic && r.u[i] != 0.0) {
          best = std::min(best, std::abs(r.u[i]));
        }
      }
    }
  }
  return best;
}

SuiteResult check_recursion(NeuronKind kind, const GradcheckOptions& opts, XiForm xi_form) {
  SuiteResult suite;
  suite.name = std::string("recursion_vs_exact/") + std::string(to_string(kind)) +
               (xi_form == XiForm::literal ? "/literal_xi" : "");
  suite.tolerance = opts.recursion_tol;
  suite.advisory = xi_form == XiForm::literal;
  Rng rng(Rng::derive(opts.seed, suite.name));
  for (std::size_t k = 0; k < opts.networks; ++k) {
    GradProblem p = random_problem(rng, kind, ResetMode::hard);
    const ForwardResult fwd = forward(p.net, p.batch.inputs);
    const LossBreakdown loss = evaluate_loss(fwd, p.batch.labels, p.tmpr);
    BackwardOptions bo{p.tmpr.enabled, p.tmpr.lambda, xi_form};
    const auto exact = flatten(backward_exact(p.net, fwd.cache, loss.dL_dO, bo), p.net);
    const auto rec = flatten(backward_recursion(p.net, fwd.cache, loss.dL_dO, bo).grads, p.net);
    const auto ids = parameter_ids(p.net);
    double gmax = 0.0;
    for (double g : exact) gmax = std::max(gmax, std::abs(g));
    const double noise = opts.noise_ulps * std::numeric_limits<double>::epsilon() * gmax;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      const double err = relative_error(rec[i], exact[i]);
      const bool ok = err <= opts.recursion_tol || std::abs(rec[i] - exact[i]) <= noise;
      ParamCheck row{k, describe(ids[i]), rec[i], exact[i], err, ok};
      record(suite, row, "network " + std::to_string(k) + ", " + describe(ids[i]));
    }
  }
  return suite;
}

SuiteResult check_finite_difference(NeuronKind kind, ResetMode reset, const GradcheckOptions& opts) {
  SuiteResult suite;
  suite.name = "fd_smooth/" + kind_label(kind, reset);
  suite.tolerance = opts.fd_tol;
  suite.advisory = opts.fd_step > opts.fd_advisory_step;
  Rng rng(Rng::derive(opts.seed, suite.name));
  // Keep every kink at least this far from the operating point.
  const double margin = std::max(1e-4, 100.0 * opts.fd_step);
  std::size_t k = 0;
  std::size_t attempts = 0;
  while (k < opts.networks) {
    if (++attempts > 1000 * std::max<std::size_t>(opts.networks, 1)) {
      throw NumericError("fd suite: could not draw networks away from kinks");
    }
    GradProblem p = random_problem(rng, kind, reset);
    const ForwardResult fwd = forward(p.net, p.batch.inputs, FireMode::smooth);
    if (!suite.advisory && kink_distance(p.net, fwd.cache) < margin) continue;
    const LossBreakdown loss = evaluate_loss(fwd, p.batch.labels, p.tmpr);
    BackwardOptions bo{p.tmpr.enabled, p.tmpr.lambda, XiForm::graph};
    const auto analytic = flatten(backward_exact(p.net, fwd.cache, loss.dL_dO, bo), p.net);
    const auto fd = flatten(smooth_finite_difference(p.net, p.batch.inputs, p.batch.labels,
                                                     p.tmpr, opts.fd_step),
                            p.net);
    const auto ids = parameter_ids(p.net);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (std::max(std::abs(analytic[i]), std::abs(fd[i])) <= opts.fd_grad_floor) continue;
      const double err = relative_error(analytic[i], fd[i]);
      ParamCheck row{k, describe(ids[i]), analytic[i], fd[i], err, err <= opts.fd_tol};
      record(suite, row, "network " + std::to_string(k) + ", " + describe(ids[i]));
    }
    ++k;
  }
  return suite;
}

SuiteResult check_tmpr(const GradcheckOptions& opts) {
  SuiteResult suite;
  suite.name = "tmpr_fd";
  suite.tolerance = opts.tmpr_tol;
  suite.advisory = opts.fd_step > opts.fd_advisory_step;
  Rng rng(Rng::derive(opts.seed, suite.name));
  for (std::size_t k = 0; k < opts.networks; ++k) {
    const std::size_t L = pick(rng, 1, 3);
    const std::size_t T = pick(rng, 1, 6);
    const std::size_t B = pick(rng, 1, 4);
    const double lambda = rng.uniform(0.0, 0.2);
    std::vector<std::vector<Tensor>> pots(L);
    for (std::size_t l = 0; l < L; ++l) {
      const std::size_t D = pick(rng, 1, 8);
      for (std::size_t t = 0; t < T; ++t) {
        Tensor u({B, D});
        for (auto& v : u.data()) v = rng.normal();
        pots[l].push_back(std::move(u));
      }
    }
    for (std::size_t l = 0; l < L; ++l) {
      for (std::size_t t = 0; t < T; ++t) {
        const Tensor analytic = tmpr_grad(pots[l][t], t + 1, T, L, lambda);
        std::vector<double*> ptrs;
        for (auto& v : pots[l][t].data()) ptrs.push_back(&v);
        const auto fd = finite_difference([&] { return tmpr_loss(pots, lambda); }, ptrs, opts.fd_step);
        for (std::size_t i = 0; i < fd.size(); ++i) {
          const double err = std::abs(analytic[i] - fd[i]);
          const std::string where = "config " + std::to_string(k) + ", layer " +
                                    std::to_string(l + 1) + ", timestep " + std::to_string(t + 1) +
                                    ", index " + std::to_string(i);
          ParamCheck row{k, where, analytic[i], fd[i], err, err <= opts.tmpr_tol};
          record(suite, row, where);
        }
      }
    }
  }
  return suite;
}

std::vector<SuiteResult> run_gradcheck(const GradcheckOptions& opts) {
  std::vector<NeuronKind> kinds;
  if (opts.mode != GradcheckMode::ctsn) kinds.push_back(NeuronKind::ternary);
  if (opts.mode != GradcheckMode::ternary) {
    kinds.push_back(NeuronKind::ctsn_static);
    kinds.push_back(NeuronKind::ctsn_neuromorphic);
  }
  std::vector<SuiteResult> out;
  for (auto kind : kinds) {
    if (is_ctsn(kind) && opts.paper_recursion) {
      out.push_back(check_recursion(kind, opts, XiForm::literal));
    } else {
      out.push_back(check_recursion(kind, opts, XiForm::graph));
    }
  }
  for (auto kind : kinds) {
    out.push_back(check_finite_difference(kind, ResetMode::hard, opts));
    if (kind == NeuronKind::ternary) out.push_back(check_finite_difference(kind, ResetMode::soft, opts));
  }
  out.push_back(check_tmpr(opts));
  return out;
}

std::string gradcheck_csv(const std::vector<SuiteResult>& suites) {
  std::ostringstream os;
  os.precision(17);
  os << "suite,network,param,analytic,oracle,error,pass\n";
  for (const auto& s : suites) {
    for (const auto& r : s.rows) {
      os << s.name << ',' << r.network << ",\"" << r.param << "\"," << r.analytic << ','
         << r.oracle << ',' << r.error << ',' << (r.pass ? 1 : 0) << '\n';
    }
  }
  return os.str();
}

}  // namespace ctsn
