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

#include "ovl/schedule.hpp"

#include <algorithm>
#include <cmath>

#include "ovl/common.hpp"

namespace ovl {

SigmaMode parse_sigma_mode(std::string_view name) {
  if (name == "beta") return SigmaMode::kBeta;
  if (name == "tilde_beta" || name == "tilde-beta") return SigmaMode::kTildeBeta;
  throw InvalidArgument("unknown sigma mode '" + std::string(name) + "'");
}

std::string_view to_string(SigmaMode mode) {
  return mode == SigmaMode::kBeta ? "beta" : "tilde_beta";
}

DiffusionSchedule::DiffusionSchedule(std::vector<double> betas, SigmaMode mode)
    : betas_(std::move(betas)), mode_(mode) {
  require(!betas_.empty(), "schedule needs at least one step");
  const std::size_t n = betas_.size();
  alphas_.resize(n);
  alpha_bars_.resize(n);
  sigmas_.resize(n);
  double running = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double b = betas_[i];
    require(b > 0.0 && b < 1.0, "beta must lie in (0, 1)");
    alphas_[i] = 1.0 - b;
    const double prev = running;
    running *= alphas_[i];
    if (!(running > 0.0)) throw NumericError("alpha_bar underflowed to zero at step " + std::to_string(i + 1));
    alpha_bars_[i] = running;
    const double var = mode == SigmaMode::kBeta ? b : (1.0 - prev) / (1.0 - running) * b;
    sigmas_[i] = std::sqrt(var);
  }
}

void DiffusionSchedule::check_timestep(int t) const {
  if (t < 1 || t > steps()) {
    throw InvalidArgument("timestep " + std::to_string(t) + " outside [1, " + std::to_string(steps()) + "]");
  }
}

DiffusionSchedule make_linear_schedule(double beta1, double betaT, int steps, SigmaMode mode) {
  require(steps >= 1, "make_linear_schedule: T must be >= 1");
  require(beta1 > 0.0, "make_linear_schedule: beta1 must be > 0");
  require(betaT < 1.0, "make_linear_schedule: betaT must be < 1");
  require(beta1 <= betaT, "make_linear_schedule: beta1 must not exceed betaT");
  std::vector<double> betas(static_cast<std::size_t>(steps));
  if (steps == 1) {
    betas[0] = beta1;
  } else {
    const double span = betaT - beta1;
    for (int t = 1; t <= steps; ++t) {
      betas[t - 1] = beta1 + span * static_cast<double>(t - 1) / static_cast<double>(steps - 1);
    }
    betas.back() = betaT;
  }
  return DiffusionSchedule(std::move(betas), mode);
}

LinearEndpoints scaled_linear_endpoints(int steps) {
  require(steps >= 1, "scaled schedule: T must be >= 1");
  const double scale = 1000.0 / static_cast<double>(steps);
  return {std::min(1e-4 * scale, 0.999), std::min(0.02 * scale, 0.999)};
}

DiffusionSchedule make_scaled_linear_schedule(int steps, SigmaMode mode) {
  const auto e = scaled_linear_endpoints(steps);
  return make_linear_schedule(e.beta1, e.betaT, steps, mode);
}

TauSchedule::Kind parse_tau_kind(std::string_view name) {
  if (name == "constant") return TauSchedule::Kind::kConstant;
  if (name == "exponential" || name == "exp_decay" || name == "exponential-decay") {
    return TauSchedule::Kind::kExponentialDecay;
  }
  throw InvalidArgument("unknown tau schedule '" + std::string(name) + "'");
}

std::string_view to_string(TauSchedule::Kind kind) {
  return kind == TauSchedule::Kind::kConstant ? "constant" : "exponential";
}

void TauSchedule::validate() const {
  require(tau0 >= 0.0 && std::isfinite(tau0), "tau0 must be finite and >= 0");
  if (kind == Kind::kExponentialDecay) {
    require(temperature > 0.0 && std::isfinite(temperature), "tau temperature must be > 0");
  }
}

double tau_at(const TauSchedule& schedule, double t) {
  require(t >= 0.0, "tau_at: negative timestep");
  if (schedule.kind == TauSchedule::Kind::kConstant) return schedule.tau0;
  return schedule.tau0 * std::exp(-t / schedule.temperature);
}

}  // namespace ovl
