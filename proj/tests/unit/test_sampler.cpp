// Copyright 2026 The ovl Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "ovl/sampler.hpp"

namespace ovl {
namespace {

// Predicts zero noise for every input and records how often it was called
// for the null class.
class ZeroModel final : public NoiseModel {
 public:
  explicit ZeroModel(double fill = 0.0) : fill_(fill) {}
  std::size_t dim() const override { return 2; }
  std::size_t num_params() const override { return 0; }
  int num_classes() const override { return 2; }
  using NoiseModel::predict;
  void predict(std::span<const double>, std::span<const double>, int, int cls, std::span<double> out) const override {
    if (cls == null_class()) ++null_calls;
    std::fill(out.begin(), out.end(), fill_);
  }
  void accumulate_vjp(std::span<const double>, std::span<const double>, int, int, std::span<const double>,
                      std::span<double>) const override {}
  mutable long null_calls = 0;

 private:
  double fill_;
};

TEST(CfgNoise, Anchors) {
  const std::vector<double> c{1.0, -2.0}, u{0.5, 4.0};
  EXPECT_EQ(cfg_noise(c, u, 0.0), c);
  const auto g = cfg_noise(c, u, 2.0);
  EXPECT_DOUBLE_EQ(g[0], 3.0 * 1.0 - 2.0 * 0.5);
  EXPECT_DOUBLE_EQ(g[1], 3.0 * -2.0 - 2.0 * 4.0);
  EXPECT_EQ(cfg_noise(c, u, -1.0), u);
  EXPECT_THROW(cfg_noise(c, std::vector<double>{1.0}, 1.0), InvalidArgument);
  EXPECT_THROW(cfg_noise(c, u, std::numeric_limits<double>::infinity()), InvalidArgument);
}

TEST(AncestralSample, SingleStepWithZeroNoiseRescales) {
  const auto sched = make_linear_schedule(0.3, 0.3, 1);
  ZeroModel m;
  const SamplerConfig cfg{0.0, 4, 9};
  const auto out = ancestral_sample(m, {}, sched, cfg, 1);
  for (std::size_t n = 0; n < 4; ++n) {
    Rng rng = make_rng(9, {0x73616d70ULL, 1, n});
    std::normal_distribution<double> normal;
    for (std::size_t k = 0; k < 2; ++k) EXPECT_DOUBLE_EQ(out.row(n)[k], normal(rng) / std::sqrt(0.7));
  }
  EXPECT_EQ(m.null_calls, 0);
  ancestral_sample(m, {}, sched, {1.5, 4, 9}, 1);
  EXPECT_EQ(m.null_calls, 4);
}

TEST(AncestralSample, DeterministicPerChain) {
  const auto sched = make_scaled_linear_schedule(30);
  NoisePredictor net(oracle::small_net());
  const auto p = net.init_params(3);
  const auto a = ancestral_sample(net, p, sched, {0.5, 6, 4}, 0);
  const auto b = ancestral_sample(net, p, sched, {0.5, 6, 4}, 0);
  EXPECT_EQ(a.values, b.values);
  const auto prefix = ancestral_sample(net, p, sched, {0.5, 3, 4}, 0);
  for (std::size_t i = 0; i < prefix.values.size(); ++i) EXPECT_EQ(prefix.values[i], a.values[i]);
  EXPECT_NE(ancestral_sample(net, p, sched, {0.5, 6, 5}, 0).values, a.values);
  EXPECT_EQ(ancestral_sample(net, p, sched, {0.0, 0, 4}, 0).size(), 0u);
  EXPECT_THROW(ancestral_sample(net, p, sched, {0.0, 1, 4}, 2), InvalidArgument);
}

TEST(AncestralSample, NonFiniteStateRaises) {
  const auto sched = make_scaled_linear_schedule(5);
  ZeroModel m(std::numeric_limits<double>::quiet_NaN());
  EXPECT_THROW(ancestral_sample(m, {}, sched, {0.0, 1, 0}, 0), NumericError);
}

TEST(OracleDenoiser, Anchors) {
  const auto sched = make_scaled_linear_schedule(100);
  const std::vector<double> mean{2.0, 0.0};
  // Unit-variance data: the noised marginal is N(sqrt(abar) m, I), so the
  // posterior noise is sqrt(1 - abar) (x - sqrt(abar) m).
  const std::vector<double> x{0.3, -1.1};
  for (int t : {1, 50, 100}) {
    const double ab = sched.alpha_bar(t);
    const auto e = oracle_gaussian_denoiser(mean, 1.0, x, t, sched);
    for (int k = 0; k < 2; ++k) EXPECT_NEAR(e[k], std::sqrt(1 - ab) * (x[k] - std::sqrt(ab) * mean[k]), 1e-14);
  }
  // Point mass: x0 is the mean exactly.
  const auto e0 = oracle_gaussian_denoiser(mean, 0.0, x, 10, sched);
  const double ab = sched.alpha_bar(10);
  for (int k = 0; k < 2; ++k) EXPECT_NEAR(e0[k], (x[k] - std::sqrt(ab) * mean[k]) / std::sqrt(1 - ab), 1e-12);
  EXPECT_THROW(oracle_gaussian_denoiser(mean, -1.0, x, 1, sched), InvalidArgument);
}

TEST(AncestralSample, OracleDenoiserRecoversTheTarget) {
  const auto sched = make_scaled_linear_schedule(100);
  OracleGaussianModel model({2.0, 0.0}, 1.0, sched);
  const auto pts = ancestral_sample(model, {}, sched, {0.0, 10000, 17}, 0);
  double mean[2] = {0, 0}, sq[2] = {0, 0};
  for (std::size_t n = 0; n < pts.size(); ++n) {
    for (int k = 0; k < 2; ++k) mean[k] += pts.row(n)[k];
  }
  for (double& m : mean) m /= 10000.0;
  for (std::size_t n = 0; n < pts.size(); ++n) {
    for (int k = 0; k < 2; ++k) sq[k] += (pts.row(n)[k] - mean[k]) * (pts.row(n)[k] - mean[k]);
  }
  EXPECT_NEAR(mean[0], 2.0, 0.05);
  EXPECT_NEAR(mean[1], 0.0, 0.05);
  EXPECT_NEAR(sq[0] / 9999.0, 1.0, 0.06);
  EXPECT_NEAR(sq[1] / 9999.0, 1.0, 0.06);
}

}  // namespace
}  // namespace ovl
