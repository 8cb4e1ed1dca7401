#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ctsn/bptt.hpp"
#include "ctsn/data.hpp"
#include "ctsn/network.hpp"

namespace ctsn {

// Small random problem for gradient verification: network, one batch and a
// regulariser setting.
struct GradProblem {
  Network net;
  Batch batch;
  TMPRConfig tmpr;
};

struct ProblemLimits {
  std::size_t max_layers = 3;
  std::size_t max_units = 8;
  std::size_t max_T = 6;
  std::size_t max_batch = 3;
};

GradProblem random_problem(Rng& rng, NeuronKind kind, ResetMode reset, const ProblemLimits& lim = {});

// Smallest distance from any cached quantity of a smooth forward pass to a
// kink of the stand-in graph (window edges, |o| at zero, branch points of the
// complement rule). Quantities that are identically zero by construction are
// skipped because perturbations cannot move them.
double kink_distance(const Network& net, const StepCache& smooth_cache);

struct ParamCheck {
  std::size_t network = 0;
  std::string param;
  double analytic = 0.0;
  double oracle = 0.0;
  double error = 0.0;
  bool pass = true;
};

struct SuiteResult {
  std::string name;
  double tolerance = 0.0;
  double max_error = 0.0;
  std::string worst;  // where max_error occurred
  std::size_t checked = 0;
  std::size_t failures = 0;
  std::size_t noise_rows = 0;  // passed only within the round-off band
  bool advisory = false;  // reported, never gates the exit code
  std::vector<ParamCheck> rows;

  bool passed() const { return failures == 0; }
};

enum class GradcheckMode { ternary, ctsn, all };

struct GradcheckOptions {
  GradcheckMode mode = GradcheckMode::all;
  std::size_t networks = 100;
  double fd_step = 1e-6;
  bool paper_recursion = false;
  std::uint64_t seed = 1;
  double recursion_tol = 1e-10;  // relative
  // Rows whose difference is within noise_ulps * eps * max|grad| of the
  // network also pass; exact zeros reached by cancellation come back as
  // round-off from one engine and 0 from the other.
  double noise_ulps = 64.0;
  double fd_tol = 1e-5;          // relative, for |grad| > fd_grad_floor
  double fd_grad_floor = 1e-8;
  double tmpr_tol = 1e-8;        // absolute
  // Steps above this make the finite-difference suite advisory.
  double fd_advisory_step = 1e-4;
};

// |a - b| / max(|a|, |b|), zero when both are zero.
double relative_error(double a, double b);

// Recursion (closed-form temporal sums) against the reverse traversal.
SuiteResult check_recursion(NeuronKind kind, const GradcheckOptions& opts, XiForm xi_form);
// Reverse traversal on the smooth stand-in against central differences.
SuiteResult check_finite_difference(NeuronKind kind, ResetMode reset, const GradcheckOptions& opts);
// Analytic regulariser gradient against central differences of its loss.
SuiteResult check_tmpr(const GradcheckOptions& opts);

std::vector<SuiteResult> run_gradcheck(const GradcheckOptions& opts);

// suite,network,param,analytic,oracle,error,pass
std::string gradcheck_csv(const std::vector<SuiteResult>& suites);

}  // namespace ctsn
