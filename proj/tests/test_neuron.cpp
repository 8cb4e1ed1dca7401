#include <gtest/gtest.h>

#include <cmath>

#include "ctsn/errors.hpp"
#include "ctsn/neuron.hpp"

using namespace ctsn;

namespace {

NeuronState scalar_state(double u, double o_prev) {
  NeuronState s = NeuronState::zeros({1});
  s.u[0] = u;
  s.u_tilde[0] = u;
  s.o_prev[0] = o_prev;
  return s;
}

NeuronConfig ctsn_config(NeuronKind kind) {
  NeuronConfig c;
  c.kind = kind;
  return c;
}

}  // namespace

TEST(TernaryFire, InclusiveBoundaries) {
  EXPECT_EQ(ternary_fire(0.5, 0.5), 1.0);
  EXPECT_EQ(ternary_fire(-0.5, 0.5), -1.0);
  EXPECT_EQ(ternary_fire(0.49, 0.5), 0.0);
  EXPECT_EQ(ternary_fire(-0.49, 0.5), 0.0);
}

TEST(TernaryFire, SpikeSpaceClosure) {
  Rng rng(1);
  Tensor u({1000});
  for (auto& v : u.data()) v = 3 * rng.normal();
  for (double o : ternary_fire(u, 0.5).data()) {
    EXPECT_TRUE(o == -1.0 || o == 0.0 || o == 1.0);
  }
}

TEST(Surrogate, WindowExamples) {
  EXPECT_EQ(surrogate(0.2, 0.5, 0.5), 1.0);
  EXPECT_EQ(surrogate(1.2, 0.5, 0.5), 0.0);
  EXPECT_EQ(surrogate(-0.9, 0.5, 0.5), 1.0);
  EXPECT_EQ(surrogate(1.0, 0.5, 0.5), 0.0);  // strict inequality
}

TEST(Surrogate, Symmetric) {
  Rng rng(2);
  for (int i = 0; i < 1000; ++i) {
    const double u = 2 * rng.normal();
    EXPECT_EQ(surrogate(u, 0.5, 0.5), surrogate(-u, 0.5, 0.5));
  }
}

TEST(NeuronConfig, Defaults) {
  NeuronConfig c;
  EXPECT_EQ(c.tau, 0.25);
  EXPECT_EQ(c.v_th, 0.5);
  EXPECT_EQ(c.a, 0.5);
  EXPECT_NO_THROW(c.validate());
}

TEST(NeuronConfig, RejectsSoftResetWithCtsn) {
  NeuronConfig c = ctsn_config(NeuronKind::ctsn_static);
  c.reset = ResetMode::soft;
  EXPECT_THROW(c.validate(), ArgumentError);
}

TEST(NeuronConfig, RejectsBadRanges) {
  NeuronConfig c;
  c.tau = 0.0;
  EXPECT_THROW(c.validate(), ArgumentError);
  c = {};
  c.v_th = -1.0;
  EXPECT_THROW(c.validate(), ArgumentError);
  c = {};
  c.a = 0.0;
  EXPECT_THROW(c.validate(), ArgumentError);
}

TEST(NeuronKind, NamesRoundTrip) {
  for (auto k : {NeuronKind::ternary, NeuronKind::ctsn_static, NeuronKind::ctsn_neuromorphic}) {
    EXPECT_EQ(parse_neuron_kind(to_string(k)), k);
  }
  EXPECT_THROW(parse_neuron_kind("lif"), ArgumentError);
  EXPECT_EQ(parse_reset_mode("soft"), ResetMode::soft);
}

TEST(TernaryStep, ResetAnnihilatesHistory) {
  NeuronConfig c;
  auto r = ternary_step(scalar_state(0.8, 1.0), Tensor::scalar(0.3), c);
  EXPECT_DOUBLE_EQ(r.state.u[0], 0.3);
  EXPECT_EQ(r.spikes[0], 0.0);
}

TEST(TernaryStep, LeakPlusInputFiresAtBoundary) {
  NeuronConfig c;
  auto r = ternary_step(scalar_state(0.8, 0.0), Tensor::scalar(0.3), c);
  EXPECT_DOUBLE_EQ(r.state.u[0], 0.5);
  EXPECT_EQ(r.spikes[0], 1.0);
}

TEST(TernaryStep, NegativeSpikeResets) {
  NeuronConfig c;
  auto r = ternary_step(scalar_state(123.0, -1.0), Tensor::scalar(0.0), c);
  EXPECT_EQ(r.state.u[0], 0.0);
  EXPECT_EQ(r.spikes[0], 0.0);
}

TEST(TernaryStep, HardResetIndependentOfPreviousPotential) {
  NeuronConfig c;
  Rng rng(4);
  for (int i = 0; i < 100; ++i) {
    const double x = rng.normal();
    const double o = rng.uniform() < 0.5 ? 1.0 : -1.0;
    auto a = ternary_step(scalar_state(rng.normal(), o), Tensor::scalar(x), c);
    auto b = ternary_step(scalar_state(rng.normal(), o), Tensor::scalar(x), c);
    EXPECT_EQ(a.state.u[0], b.state.u[0]);
  }
}

TEST(TernaryStep, ShapeMismatch) {
  NeuronConfig c;
  EXPECT_THROW(ternary_step(NeuronState::zeros({2}), Tensor({3}), c), DimensionError);
}

TEST(TernaryStepSoft, ResidualExamples) {
  NeuronConfig c;
  c.reset = ResetMode::soft;
  c.tau = 1.0;
  auto residual = ternary_step_soft(scalar_state(2.5, 1.0), Tensor::scalar(0.0), c);
  EXPECT_DOUBLE_EQ(residual.state.u[0], 2.0);
  c.tau = 0.25;
  auto r = ternary_step_soft(scalar_state(2.5, 1.0), Tensor::scalar(0.0), c);
  EXPECT_DOUBLE_EQ(r.state.u[0], 0.5);
  EXPECT_EQ(r.spikes[0], 1.0);
  auto s = ternary_step_soft(scalar_state(0.3, 0.0), Tensor::scalar(0.1), c);
  EXPECT_DOUBLE_EQ(s.state.u[0], 0.175);
  EXPECT_EQ(s.spikes[0], 0.0);
}

TEST(EffectiveParams, SigmoidOfOmega) {
  auto c = effective_params({0, 0, 0});
  EXPECT_EQ(c.alpha, 0.5);
  EXPECT_EQ(c.beta, 0.5);
  EXPECT_EQ(c.gamma, 0.5);
  auto big = effective_params({40, -40, 0});
  EXPECT_NEAR(big.alpha, 1.0, 1e-15);
  EXPECT_NEAR(big.beta, 0.0, 1e-15);
  EXPECT_GT(big.beta, 0.0);
}

TEST(GStatic, Examples) {
  EXPECT_DOUBLE_EQ(g_static(0.4, 0.2, 0.5, 0.5, 0.5), 0.3);
  EXPECT_NEAR(g_static(-0.4, 0.2, 0.5, 0.25, 0.5), 0.0, 1e-15);
  EXPECT_EQ(g_static(0.0, 0.0, 0.5, 0.5, 0.5), 0.0);
}

TEST(GNeuromorphic, Examples) {
  EXPECT_DOUBLE_EQ(g_neuromorphic(0.4, 0.2, 0.5, 0.5, 0.5), 0.3);
  EXPECT_DOUBLE_EQ(g_neuromorphic(0.4, -0.2, 0.5, 0.5, 0.25), 0.15);
  EXPECT_EQ(g_neuromorphic(0.0, 0.0, 0.5, 0.5, 0.5), 0.0);
}

TEST(G, ContinuousAtBranchPoints) {
  const double e = 1e-12;
  for (double u : {-0.3, 0.0, 0.7}) {
    EXPECT_NEAR(g_static(-e, u, 0.3, 0.8, 0.6), g_static(e, u, 0.3, 0.8, 0.6), 1e-11);
  }
  for (double h : {-0.3, 0.0, 0.7}) {
    EXPECT_NEAR(g_neuromorphic(h, -e, 0.3, 0.8, 0.6), g_neuromorphic(h, e, 0.3, 0.8, 0.6), 1e-11);
  }
}

TEST(G, TensorFormsMatchScalar) {
  Tensor h({3}, std::vector<double>{-0.4, 0.0, 0.4});
  Tensor u({3}, std::vector<double>{0.2, -0.2, 0.1});
  const Tensor s = g_static(h, u, 0.3, 0.7, 0.4);
  const Tensor n = g_neuromorphic(h, u, 0.3, 0.7, 0.4);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(s[i], g_static(h[i], u[i], 0.3, 0.7, 0.4));
    EXPECT_EQ(n[i], g_neuromorphic(h[i], u[i], 0.3, 0.7, 0.4));
  }
}

TEST(CtsnStep, FirstStepFromZero) {
  const NeuronConfig c = ctsn_config(NeuronKind::ctsn_static);
  auto r = ctsn_step(NeuronState::zeros({1}), Tensor::scalar(0.6), {}, c);
  EXPECT_EQ(r.state.u[0], 0.0);
  EXPECT_EQ(r.state.h[0], 0.0);
  EXPECT_DOUBLE_EQ(r.state.u_tilde[0], 0.6);
  EXPECT_EQ(r.spikes[0], 1.0);
}

TEST(CtsnStep, TwoStepTrace) {
  const NeuronConfig c = ctsn_config(NeuronKind::ctsn_static);
  auto r1 = ctsn_step(NeuronState::zeros({1}), Tensor::scalar(0.2), {}, c);
  EXPECT_DOUBLE_EQ(r1.state.u_tilde[0], 0.2);
  EXPECT_EQ(r1.spikes[0], 0.0);
  auto r2 = ctsn_step(r1.state, Tensor::scalar(0.0), {}, c);
  EXPECT_DOUBLE_EQ(r2.state.u[0], 0.05);
  EXPECT_DOUBLE_EQ(r2.state.h[0], 0.025);
  EXPECT_DOUBLE_EQ(r2.state.u_tilde[0], 0.025);
  EXPECT_EQ(r2.spikes[0], 0.0);
}

TEST(CtsnStep, ZeroInputStaysZero) {
  for (auto kind : {NeuronKind::ctsn_static, NeuronKind::ctsn_neuromorphic}) {
    const NeuronConfig c = ctsn_config(kind);
    NeuronState s = NeuronState::zeros({4});
    for (int t = 0; t < 10; ++t) {
      auto r = ctsn_step(s, Tensor({4}), {0.3, -0.2, 1.1}, c);
      for (double v : r.spikes.data()) EXPECT_EQ(v, 0.0);
      for (double v : r.state.u_tilde.data()) EXPECT_EQ(v, 0.0);
      s = r.state;
    }
  }
}

TEST(CtsnStep, VanishingGammaIsMemoryless) {
  const NeuronConfig c = ctsn_config(NeuronKind::ctsn_static);
  Rng rng(8);
  NeuronState s = NeuronState::zeros({5});
  for (int t = 0; t < 8; ++t) {
    Tensor x({5});
    for (auto& v : x.data()) v = rng.normal();
    auto r = ctsn_step(s, x, {0.0, 0.0, -800.0}, c);
    for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(r.state.u_tilde[i], x[i]);
    s = r.state;
  }
}

TEST(CtsnStep, RejectsTernaryConfig) {
  NeuronConfig c;
  EXPECT_THROW(ctsn_step(NeuronState::zeros({1}), Tensor::scalar(0.1), {}, c), ArgumentError);
  EXPECT_THROW(ternary_step(NeuronState::zeros({1}), Tensor::scalar(0.1),
                            ctsn_config(NeuronKind::ctsn_static)),
               ArgumentError);
}

TEST(CtsnStep, FirstStepMatchesTernary) {
  Rng rng(12);
  Tensor x({6});
  for (auto& v : x.data()) v = rng.normal();
  auto t = ternary_step(NeuronState::zeros({6}), x, NeuronConfig{});
  auto c = ctsn_step(NeuronState::zeros({6}), x, {}, ctsn_config(NeuronKind::ctsn_neuromorphic));
  EXPECT_EQ(t.spikes, c.spikes);
  EXPECT_EQ(t.state.u_tilde, c.state.u_tilde);
}

TEST(ClosedForm, SilentHistoryIsLeakySum) {
  std::vector<Tensor> x, o;
  for (double v : {0.1, -0.2, 0.3, 0.4}) {
    x.push_back(Tensor::scalar(v));
    o.push_back(Tensor::scalar(0.0));
  }
  const double tau = 0.25;
  const double expected = 0.4 + tau * 0.3 + tau * tau * -0.2 + tau * tau * tau * 0.1;
  EXPECT_NEAR(closed_form_potential(x, o, tau, 4)[0], expected, 1e-15);
}

TEST(ClosedForm, SpikeBeforeLastStepLeavesInput) {
  std::vector<Tensor> x, o;
  for (double v : {0.9, 0.2, 0.7}) x.push_back(Tensor::scalar(v));
  for (double v : {0.0, -1.0, 0.0}) o.push_back(Tensor::scalar(v));
  EXPECT_EQ(closed_form_potential(x, o, 0.25, 3)[0], 0.7);
}

TEST(ClosedForm, HistoryTooShort) {
  std::vector<Tensor> x{Tensor::scalar(0.1)};
  std::vector<Tensor> o{Tensor::scalar(0.0)};
  EXPECT_THROW(closed_form_potential(x, o, 0.25, 2), ArgumentError);
}

TEST(ClosedForm, MatchesIteratedSteps) {
  Rng rng(21);
  NeuronConfig c;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t T = 8;
    std::vector<Tensor> x, o;
    NeuronState s = NeuronState::zeros({3});
    for (std::size_t t = 1; t <= T; ++t) {
      Tensor xt({3});
      for (auto& v : xt.data()) v = rng.normal();
      x.push_back(xt);
      auto r = ternary_step(s, xt, c);
      o.push_back(r.spikes);
      const Tensor cf = closed_form_potential(x, o, c.tau, t);
      for (std::size_t i = 0; i < 3; ++i) ASSERT_NEAR(cf[i], r.state.u[i], 1e-12);
      s = r.state;
    }
  }
}
