#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ctsn/bptt.hpp"
#include "ctsn/errors.hpp"
#include "ctsn/loss.hpp"
#include "ctsn/step_cache.hpp"

using namespace ctsn;

namespace {

Tensor row(std::vector<double> v) {
  const std::size_t n = v.size();
  return Tensor({1, n}, std::move(v));
}

}  // namespace

TEST(AvgCe, UniformLogitsGiveLogC) {
  std::vector<Tensor> logits{row({0.3, 0.3, 0.3, 0.3})};
  const int label[] = {2};
  EXPECT_NEAR(avg_ce_loss(logits, label), std::log(4.0), 1e-15);
}

TEST(AvgCe, RepeatedTimestepsMatchSingle) {
  const Tensor o = row({1.0, -0.5, 2.0});
  const int label[] = {0};
  std::vector<Tensor> one{o};
  std::vector<Tensor> many{o, o, o, o};
  EXPECT_NEAR(avg_ce_loss(one, label), avg_ce_loss(many, label), 1e-15);
}

TEST(AvgCe, AveragesBeforeSoftmax) {
  std::vector<Tensor> logits{row({2, 0}), row({0, 2})};
  const int label[] = {0};
  EXPECT_NEAR(avg_ce_loss(logits, label), std::numbers::ln2, 1e-15);
}

TEST(AvgCe, BatchMeanAndErrors) {
  std::vector<Tensor> logits{Tensor({2, 2}, std::vector<double>{0, 0, 3, 0})};
  const int labels[] = {1, 0};
  const double expected = 0.5 * (std::log(2.0) + std::log1p(std::exp(-3.0)));
  EXPECT_NEAR(avg_ce_loss(logits, labels), expected, 1e-14);
  const int bad[] = {1, 2};
  EXPECT_THROW(avg_ce_loss(logits, bad), ArgumentError);
  std::vector<Tensor> none;
  EXPECT_THROW(avg_ce_loss(none, labels), ArgumentError);
}

TEST(AvgCe, ShiftInvariant) {
  Rng rng(3);
  std::vector<Tensor> logits;
  for (int t = 0; t < 3; ++t) {
    Tensor o({4, 5});
    for (auto& v : o.data()) v = rng.normal();
    logits.push_back(o);
  }
  const int labels[] = {0, 4, 2, 1};
  std::vector<Tensor> shifted;
  for (const auto& o : logits) {
    Tensor s = o;
    for (auto& v : s.data()) v += 37.5;
    shifted.push_back(s);
  }
  EXPECT_NEAR(avg_ce_loss(logits, labels), avg_ce_loss(shifted, labels), 1e-12);
}

TEST(AvgCe, GradientMatchesFiniteDifference) {
  Rng rng(5);
  std::vector<Tensor> logits;
  for (int t = 0; t < 3; ++t) {
    Tensor o({2, 3});
    for (auto& v : o.data()) v = rng.normal();
    logits.push_back(o);
  }
  const int labels[] = {2, 0};
  const auto grad = avg_ce_grad(logits, labels);
  std::vector<double*> ptrs;
  for (auto& o : logits)
    for (auto& v : o.data()) ptrs.push_back(&v);
  const auto fd = finite_difference([&] { return avg_ce_loss(logits, labels); }, ptrs, 1e-6);
  std::size_t k = 0;
  for (const auto& g : grad)
    for (double v : g.data()) EXPECT_NEAR(v, fd[k++], 1e-8);
}

TEST(Tmpr, HandExample) {
  std::vector<std::vector<Tensor>> u{{row({1, 1})}};
  EXPECT_NEAR(tmpr_loss(u, 0.05), 0.05, 1e-15);
}

TEST(Tmpr, ZeroPotentials) {
  std::vector<std::vector<Tensor>> u{{Tensor({2, 3}), Tensor({2, 3})}, {Tensor({2, 4}), Tensor({2, 4})}};
  EXPECT_EQ(tmpr_loss(u, 0.05), 0.0);
}

TEST(Tmpr, InverseTimestepWeight) {
  const Tensor z({1, 2});
  const Tensor p = row({0.7, -1.3});
  std::vector<std::vector<Tensor>> at1{{p, z, z, z}};
  std::vector<std::vector<Tensor>> at2{{z, p, z, z}};
  std::vector<std::vector<Tensor>> at4{{z, z, z, p}};
  EXPECT_NEAR(tmpr_loss(at2, 0.1), tmpr_loss(at1, 0.1) / 2, 1e-15);
  EXPECT_NEAR(tmpr_loss(at4, 0.1), tmpr_loss(at1, 0.1) / 4, 1e-15);
}

TEST(Tmpr, NonNegativeAndZeroOnlyAtZero) {
  Rng rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::vector<Tensor>> u(2, std::vector<Tensor>(3, Tensor({2, 3})));
    for (auto& layer : u)
      for (auto& t : layer)
        for (auto& v : t.data()) v = rng.normal();
    EXPECT_GT(tmpr_loss(u, 0.05), 0.0);
  }
}

TEST(Tmpr, MissingEntryIsStateError) {
  StepCache cache(2, 2, FireMode::ternary);
  StepRecord r;
  r.u_tilde = Tensor({1, 2});
  cache.write(0, 0, r);
  EXPECT_THROW(tmpr_loss(cache, 0.05), StateError);
}

TEST(TmprGrad, HandExample) {
  const Tensor g = tmpr_grad(row({1, 1}), 1, 1, 1, 0.05);
  EXPECT_NEAR(g[0], 0.05, 1e-15);
  EXPECT_EQ(tmpr_grad(row({0, 0}), 1, 1, 1, 0.05)[0], 0.0);
}

TEST(TmprGrad, MatchesFiniteDifference) {
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t L = 1 + rng.below(3), T = 1 + rng.below(5), B = 1 + rng.below(3);
    const double lambda = rng.uniform(0.0, 0.2);
    std::vector<std::vector<Tensor>> u(L);
    for (std::size_t l = 0; l < L; ++l) {
      const std::size_t D = 1 + rng.below(4);
      for (std::size_t t = 0; t < T; ++t) {
        Tensor x({B, D});
        for (auto& v : x.data()) v = rng.normal();
        u[l].push_back(x);
      }
    }
    std::vector<double*> ptrs;
    for (auto& layer : u)
      for (auto& t : layer)
        for (auto& v : t.data()) ptrs.push_back(&v);
    const auto fd = finite_difference([&] { return tmpr_loss(u, lambda); }, ptrs, 1e-6);
    std::size_t k = 0;
    for (std::size_t l = 0; l < L; ++l) {
      for (std::size_t t = 0; t < T; ++t) {
        const Tensor g = tmpr_grad(u[l][t], t + 1, T, L, lambda);
        for (double v : g.data()) ASSERT_NEAR(v, fd[k++], 1e-8);
      }
    }
  }
}

TEST(TotalLoss, Sum) {
  EXPECT_DOUBLE_EQ(total_loss(0.7, 0.05), 0.75);
  TMPRConfig off;
  off.enabled = false;
  EXPECT_EQ(off.effective_lambda(), 0.0);
  std::vector<std::vector<Tensor>> u{{row({3, 4})}};
  EXPECT_EQ(total_loss(0.7, tmpr_loss(u, 0.0)), 0.7);
}
