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

#include <string>
#include <string_view>
#include <vector>

namespace ovl {

/// Reverse-step noise convention: sigma_t^2 = beta_t, or the posterior
/// variance (1 - abar_{t-1}) / (1 - abar_t) * beta_t.
enum class SigmaMode { kBeta, kTildeBeta };

SigmaMode parse_sigma_mode(std::string_view name);
std::string_view to_string(SigmaMode mode);

/// Variance schedule over timesteps 1..T. All accessors take 1-based t.
class DiffusionSchedule {
 public:
  DiffusionSchedule(std::vector<double> betas, SigmaMode mode);

  int steps() const { return static_cast<int>(betas_.size()); }
  SigmaMode sigma_mode() const { return mode_; }

  double beta(int t) const { return betas_[index(t)]; }
  double alpha(int t) const { return alphas_[index(t)]; }
  double alpha_bar(int t) const { return alpha_bars_[index(t)]; }
  double sigma(int t) const { return sigmas_[index(t)]; }

  const std::vector<double>& betas() const { return betas_; }
  const std::vector<double>& alphas() const { return alphas_; }
  const std::vector<double>& alpha_bars() const { return alpha_bars_; }
  const std::vector<double>& sigmas() const { return sigmas_; }

  void check_timestep(int t) const;

 private:
  std::size_t index(int t) const {
    check_timestep(t);
    return static_cast<std::size_t>(t - 1);
  }

  std::vector<double> betas_;
  std::vector<double> alphas_;
  std::vector<double> alpha_bars_;
  std::vector<double> sigmas_;
  SigmaMode mode_;
};

/// Linearly spaced betas with both endpoints included.
DiffusionSchedule make_linear_schedule(double beta1, double betaT, int steps,
                                       SigmaMode mode = SigmaMode::kBeta);

/// The 1e-4..0.02 / 1000-step schedule with endpoints rescaled by 1000/steps,
/// so short chains still drive abar_T close to zero.
DiffusionSchedule make_scaled_linear_schedule(int steps, SigmaMode mode = SigmaMode::kBeta);

struct LinearEndpoints {
  double beta1 = 0.0;
  double betaT = 0.0;
};
/// Endpoints used by make_scaled_linear_schedule.
LinearEndpoints scaled_linear_endpoints(int steps);

/// Timestep weight of the contrastive term.
struct TauSchedule {
  enum class Kind { kConstant, kExponentialDecay };

  Kind kind = Kind::kExponentialDecay;
  double tau0 = 0.1;
  double temperature = 250.0;  // timesteps; unused for kConstant

  static TauSchedule constant(double tau0) { return {Kind::kConstant, tau0, 1.0}; }
  static TauSchedule exponential(double tau0, double temperature) {
    return {Kind::kExponentialDecay, tau0, temperature};
  }

  void validate() const;
};

TauSchedule::Kind parse_tau_kind(std::string_view name);
std::string_view to_string(TauSchedule::Kind kind);

double tau_at(const TauSchedule& schedule, double t);

}  // namespace ovl
