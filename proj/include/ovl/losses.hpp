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
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ovl/common.hpp"
#include "ovl/data.hpp"
#include "ovl/net.hpp"
#include "ovl/schedule.hpp"

namespace ovl {

/// A batch bound to its randomness: per element x0, class, timestep, noise
/// and whether the class is dropped to the null class for the denoising term.
struct PreparedBatch {
  Points x0;
  std::vector<int> labels;
  std::vector<int> timesteps;
  Points noise;
  std::vector<std::uint8_t> drop_class;

  std::size_t size() const { return labels.size(); }
  void validate(const DiffusionSchedule& sched) const;
};

/// Draws t ~ U{1..T}, eps ~ N(0, I) and the dropout flag for each index.
PreparedBatch prepare_batch(const LabeledDataset& ds, std::span<const std::size_t> indices,
                            const DiffusionSchedule& sched, double cond_dropout, Rng& rng);

/// Whole dataset in order, conditional, with (t, eps) fixed by seed.
PreparedBatch prepare_full_dataset(const LabeledDataset& ds, const DiffusionSchedule& sched, std::uint64_t seed);

enum class PclKind { kNegativeL2, kMaxMarginHinge, kReciprocal, kExponential };

PclKind parse_pcl_kind(std::string_view name);  // neg_l2 | hinge_margin | reciprocal | exponential
std::string_view to_string(PclKind kind);

struct PclVariant {
  PclKind kind = PclKind::kExponential;
  double margin = 0.0;  // max-margin only

  void validate() const;
};

/// Penalty h(d) on a squared distance; every form is added to the objective.
double pcl_variant_value(const PclVariant& v, double d);
/// dh/dd. The hinge uses slope 0 at d == margin.
double pcl_variant_slope(const PclVariant& v, double d);

/// Reverse-step mean: x_t / sqrt(a_t) - (1 - a_t) / (sqrt(a_t) sqrt(1 - abar_t)) eps_hat
std::vector<double> mu_theta(std::span<const double> x_t, int t, std::span<const double> eps_hat,
                             const DiffusionSchedule& sched);
/// Coefficient of eps_hat in mu_theta (with its sign dropped).
double mu_noise_coefficient(int t, const DiffusionSchedule& sched);

double pcl_distance(std::span<const double> mu_i, std::span<const double> mu_j);

/// The same squared distance through the noise residual:
/// ||(x_i - x_j) + (1 - a_t)/sqrt(1 - abar_t) (eps_j - eps_i)||^2 / a_t
double pcl_distance_noise_form(std::span<const double> x_i, std::span<const double> x_j,
                               std::span<const double> eps_hat_i, std::span<const double> eps_hat_j, int t,
                               const DiffusionSchedule& sched);

/// KL between N(mu_i, s^2 I) and N(mu_j, s^2 I).
double pcl_kl_closed_form(std::span<const double> mu_i, std::span<const double> mu_j, double sigma_t);

struct PlainObjective {};
struct DiffRopObjective {
  TauSchedule tau;
  PclVariant variant;
};
struct ReweightedObjective {
  DatasetStats stats;
};
/// 0.5 * ||params||^2, for exercising the gradient plumbing.
struct ParamNormObjective {};

using Objective = std::variant<PlainObjective, DiffRopObjective, ReweightedObjective, ParamNormObjective>;

struct LossBreakdown {
  double total = 0.0;
  double ddpm = 0.0;
  double pcl = 0.0;
  double tau_mean = 0.0;   // mean tau(t_i) over the batch, 0 without a contrastive term
  std::size_t pairs = 0;   // ordered pairs with distinct classes
};

/// Loss of `objective` on a prepared batch, and its gradient when `grad` is
/// non-null (grad is overwritten). Gradient flows through both branches of
/// every contrastive pair.
LossBreakdown loss_and_grad(const NoiseModel& model, std::span<const double> params, const DiffusionSchedule& sched,
                            const PreparedBatch& batch, const Objective& objective, GradientVector* grad = nullptr);

double ddpm_simple_loss(const NoiseModel& model, std::span<const double> params, const DiffusionSchedule& sched,
                        const PreparedBatch& batch);

double overall_batch_loss(const NoiseModel& model, std::span<const double> params, const DiffusionSchedule& sched,
                          const PreparedBatch& batch, const TauSchedule& tau, const PclVariant& variant);

double reweighted_loss(const NoiseModel& model, std::span<const double> params, const DiffusionSchedule& sched,
                       const PreparedBatch& batch, const DatasetStats& stats);

/// Per-element weight (1 / w_c) / Z with Z the mean of 1 / w_c over classes
/// present in `stats`, so a class-balanced batch has mean weight 1.
std::vector<double> reweighting_factors(const DatasetStats& stats);

struct ClassDecomposition {
  double global = 0.0;         // mean per-element loss over the dataset
  double weighted_sum = 0.0;   // sum_c w_c * mean loss of class c
  std::vector<double> per_class;
  std::vector<double> weights;
  double relative_error = 0.0;
};

/// Evaluates the class-weighted decomposition of the denoising loss on a
/// fixed (t, eps) assignment covering the whole dataset.
ClassDecomposition decompose_loss_by_class(const NoiseModel& model, std::span<const double> params,
                                           const DiffusionSchedule& sched, const LabeledDataset& ds,
                                           const PreparedBatch& fixed);

}  // namespace ovl
