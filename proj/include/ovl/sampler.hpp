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

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ovl/common.hpp"
#include "ovl/net.hpp"
#include "ovl/schedule.hpp"

namespace ovl {

struct SamplerConfig {
  double omega = 0.0;  // guidance strength, 0 disables guidance
  std::size_t count = 1000;
  std::uint64_t seed = 0;
};

/// (1 + omega) * eps_cond - omega * eps_uncond
std::vector<double> cfg_noise(std::span<const double> eps_cond, std::span<const double> eps_uncond, double omega);

/// Ancestral sampling x_T -> x_0 for one class. Chain n draws from an RNG
/// keyed on (seed, class, n), so chains are independent of evaluation order.
Points ancestral_sample(const NoiseModel& model, std::span<const double> params, const DiffusionSchedule& sched,
                        const SamplerConfig& cfg, int cls);

/// Posterior-mean noise for data distributed N(m, s^2 I).
std::vector<double> oracle_gaussian_denoiser(std::span<const double> mean, double scale,
                                             std::span<const double> x_t, int t, const DiffusionSchedule& sched);

/// oracle_gaussian_denoiser packaged as a parameter-free model; every class
/// (including the null class) maps to the same Gaussian.
class OracleGaussianModel final : public NoiseModel {
 public:
  OracleGaussianModel(std::vector<double> mean, double scale, const DiffusionSchedule& sched, int num_classes = 1);

  std::size_t dim() const override { return mean_.size(); }
  std::size_t num_params() const override { return 0; }
  int num_classes() const override { return num_classes_; }

  using NoiseModel::predict;
  void predict(std::span<const double> params, std::span<const double> x, int t, int cls,
               std::span<double> out) const override;
  void accumulate_vjp(std::span<const double>, std::span<const double>, int, int, std::span<const double>,
                      std::span<double>) const override {}

 private:
  std::vector<double> mean_;
  double scale_;
  const DiffusionSchedule& sched_;
  int num_classes_;
};

}  // namespace ovl
