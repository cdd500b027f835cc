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

#include "ovl/common.hpp"
#include "ovl/forward.hpp"

namespace ovl {
namespace {

TEST(QSample, ClosedForm) {
  const auto s = make_linear_schedule(1e-4, 0.02, 1000, SigmaMode::kBeta);
  const std::vector<double> x0{1.5, -2.0}, eps{0.3, 0.7};
  for (int t : {1, 10, 500, 1000}) {
    const auto n = q_sample(x0, t, eps, s);
    const double ab = s.alpha_bar(t);
    EXPECT_EQ(n.t, t);
    EXPECT_EQ(n.eps, eps);
    for (std::size_t k = 0; k < 2; ++k) {
      EXPECT_NEAR(n.x_t[k], std::sqrt(ab) * x0[k] + std::sqrt(1.0 - ab) * eps[k], 1e-15);
    }
  }
}

TEST(QSample, MarginalMoments) {
  const auto s = make_linear_schedule(1e-4, 0.02, 100, SigmaMode::kBeta);
  Rng rng = make_rng(1);
  std::normal_distribution<double> normal;
  const int t = 60;
  const double ab = s.alpha_bar(t);
  double m = 0, v = 0;
  const int n = 40000;
  for (int i = 0; i < n; ++i) {
    const std::vector<double> x0{2.0}, eps{normal(rng)};
    const double x = q_sample(x0, t, eps, s).x_t[0];
    m += x;
    v += x * x;
  }
  m /= n;
  v = v / n - m * m;
  EXPECT_NEAR(m, 2.0 * std::sqrt(ab), 0.02);
  EXPECT_NEAR(v, 1.0 - ab, 0.02);
}

TEST(QSample, Errors) {
  const auto s = make_linear_schedule(1e-4, 0.02, 10, SigmaMode::kBeta);
  const std::vector<double> x0{0.0, 0.0};
  EXPECT_THROW(q_sample(x0, 0, std::vector<double>{0.0, 0.0}, s), InvalidArgument);
  EXPECT_THROW(q_sample(x0, 11, std::vector<double>{0.0, 0.0}, s), InvalidArgument);
  EXPECT_THROW(q_sample(x0, 1, std::vector<double>{0.0}, s), InvalidArgument);
  EXPECT_THROW(q_sample(x0, 1, std::vector<double>{std::numeric_limits<double>::quiet_NaN(), 0.0}, s),
               InvalidArgument);
}

}  // namespace
}  // namespace ovl
