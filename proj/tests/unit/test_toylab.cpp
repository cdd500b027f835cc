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
#include <sstream>

#include "ovl/toylab.hpp"

namespace ovl {
namespace {

const ToyObjective kFit{ToyMode::kFit, {}, 0.0};

TEST(ToyLoss, Examples) {
  const auto spec = default_toy_spec();
  EXPECT_EQ(toy_fit_loss(0.0, 2.0, spec), 0.0);
  EXPECT_DOUBLE_EQ(toy_fit_loss(1.0, 2.0, spec), 0.475);
  EXPECT_NEAR(toy_fit_loss(0.0, 3.0, spec), 0.025, 1e-15);
  // scale enters as 1 / sigma^2
  EXPECT_DOUBLE_EQ(toy_fit_loss(1.0, 2.0, make_toy_spec(0.95, 0, 2, 2.0)), 0.475 / 4.0);
}

TEST(ToyLoss, PenaltiesShiftTheObjective) {
  const auto spec = default_toy_spec();
  const ToyObjective naive{ToyMode::kNaive, {}, 0.5};
  EXPECT_DOUBLE_EQ(toy_objective(0.5, 1.5, spec, naive), toy_fit_loss(0.5, 1.5, spec) - 0.5 * 1.0 / 2.0);
  EXPECT_LT(toy_objective(0.5, 1.5, spec, naive), toy_objective(0.5, 1.5, spec, kFit));
  const ToyObjective margin{ToyMode::kHinge, {PclKind::kMaxMarginHinge, 2.0}, 0.5};
  EXPECT_EQ(toy_objective(0.0, 2.0, spec, margin), 0.0);
  EXPECT_DOUBLE_EQ(toy_objective(0.0, 1.0, spec, margin), toy_fit_loss(0.0, 1.0, spec) + 0.5 * 1.0);
  const ToyObjective expo{ToyMode::kHinge, {PclKind::kExponential, 0.0}, 0.5};
  EXPECT_DOUBLE_EQ(toy_objective(0.0, 2.0, spec, expo), 0.5 * std::exp(-4.0));
  EXPECT_THROW(parse_toy_mode("bounded"), InvalidArgument);
  EXPECT_EQ(parse_toy_mode("naive"), ToyMode::kNaive);
}

TEST(Landscape, FitAndMarginRecoverTruth) {
  const auto spec = default_toy_spec();
  const auto fit = landscape(spec, kFit);
  EXPECT_EQ(fit.m1_axis.count(), 81);
  EXPECT_EQ(fit.argmin_m1(), 0.0);
  EXPECT_EQ(fit.argmin_m2(), 2.0);
  EXPECT_EQ(fit.argmin_value, 0.0);
  EXPECT_EQ(fit.cells_from(0.0, 2.0), 0);
  const auto margin = landscape(spec, {ToyMode::kHinge, {PclKind::kMaxMarginHinge, 2.0}, 0.5});
  EXPECT_EQ(margin.cells_from(0.0, 2.0), 0);
}

TEST(Landscape, NaivePenaltyPushesToTheGridEdge) {
  const auto grid = landscape(default_toy_spec(), {ToyMode::kNaive, {}, 0.5});
  EXPECT_EQ(grid.argmin_m1(), -1.0);
  EXPECT_EQ(grid.argmin_m2(), 3.0);
}

TEST(Landscape, CsvFormat) {
  GridAxis ax{0.0, 1.0, 0.5};
  const auto grid = landscape(make_toy_spec(0.5, 0.0, 1.0, 1.0), kFit, ax, ax);
  std::ostringstream os;
  write_landscape_csv(os, grid);
  EXPECT_EQ(os.str(),
            "m1,m2,loss\n"
            "0,0,0.25\n0,0.5,0.0625\n0,1,0\n"
            "0.5,0,0.3125\n0.5,0.5,0.125\n0.5,1,0.0625\n"
            "1,0,0.5\n1,0.5,0.3125\n1,1,0.25\n"
            "# argmin,0,1,0\n");
}

TEST(Landscape, AxisValidation) {
  EXPECT_THROW((GridAxis{0.0, 1.0, 0.0}.validate()), InvalidArgument);
  EXPECT_THROW((GridAxis{0.0, 1.0, -0.1}.validate()), InvalidArgument);
  EXPECT_THROW((GridAxis{1.0, 0.0, 0.1}.validate()), InvalidArgument);
  EXPECT_THROW(landscape(default_toy_spec(), kFit, GridAxis{0.5, 1.0, 0.1}), InvalidArgument);
  EXPECT_EQ((GridAxis{-1.0, 3.0, 0.05}.at(19)), -0.05);
}

TEST(Unbounded, NaiveCriticalTau) {
  const auto spec = default_toy_spec();
  const auto below = unbounded_direction(spec, {ToyMode::kNaive, {}, 0.04});
  EXPECT_FALSE(below.unbounded);
  EXPECT_GT(below.curvature, 0.0);
  EXPECT_NEAR(below.critical_tau, 0.95 * 0.05 / 1.0, 1e-15);
  const auto above = unbounded_direction(spec, {ToyMode::kNaive, {}, 0.05});
  EXPECT_TRUE(above.unbounded);
  EXPECT_LT(above.curvature, 0.0);
  // descent direction separates the means
  EXPECT_LT(above.direction[0] * above.direction[1], 0.0);
  EXPECT_NEAR(std::hypot(above.direction[0], above.direction[1]), 1.0, 1e-12);
  const auto neg = unbounded_direction(spec, {ToyMode::kHinge, {PclKind::kNegativeL2, 0.0}, 0.05});
  EXPECT_TRUE(neg.unbounded);
  EXPECT_NEAR(neg.critical_tau, 0.0475 / 2.0, 1e-15);
  EXPECT_FALSE(unbounded_direction(spec, {ToyMode::kHinge, {PclKind::kExponential, 0.0}, 100.0}).unbounded);
}

TEST(Threshold, BracketsTheDrift) {
  const auto spec = default_toy_spec();
  const GridAxis ax;
  const PclVariant expo{PclKind::kExponential, 0.0};
  const auto th = hinge_tau_threshold(spec, expo, ax, ax);
  ASSERT_FALSE(th.saturated);
  EXPECT_LE(landscape(spec, {ToyMode::kHinge, expo, th.tau}, ax, ax).cells_from(0.0, 2.0), 1);
  EXPECT_GT(landscape(spec, {ToyMode::kHinge, expo, th.tau * 1.01 + 1e-9}, ax, ax).cells_from(0.0, 2.0), 1);
  const auto margin = hinge_tau_threshold(spec, {PclKind::kMaxMarginHinge, 2.0}, ax, ax);
  EXPECT_TRUE(margin.saturated);
}

}  // namespace
}  // namespace ovl
