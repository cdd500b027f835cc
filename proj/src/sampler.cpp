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

#include "ovl/sampler.hpp"

#include <cmath>

#include "ovl/losses.hpp"

namespace ovl {

std::vector<double> cfg_noise(std::span<const double> eps_cond, std::span<const double> eps_uncond, double omega) {
  require(eps_cond.size() == eps_uncond.size(), "cfg_noise: dimension mismatch");
  require(std::isfinite(omega), "cfg_noise: guidance strength must be finite");
  std::vector<double> out(eps_cond.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = (1.0 + omega) * eps_cond[k] - omega * eps_uncond[k];
  return out;
}

Points ancestral_sample(const NoiseModel& model, std::span<const double> params, const DiffusionSchedule& sched,
                        const SamplerConfig& cfg, int cls) {
  require(cls >= 0 && cls < model.num_classes(), "ancestral_sample: class " + std::to_string(cls) + " out of range");
  require(std::isfinite(cfg.omega), "ancestral_sample: guidance strength must be finite");
  const std::size_t d = model.dim();
  Points out(d, cfg.count);
  std::vector<double> x(d), eps_c(d), eps_u(d), eps(d);
  std::normal_distribution<double> normal(0.0, 1.0);

  for (std::size_t n = 0; n < cfg.count; ++n) {
    Rng rng = make_rng(cfg.seed, {0x73616d70ULL, static_cast<std::uint64_t>(cls), n});
    normal.reset();
    for (double& v : x) v = normal(rng);
    for (int t = sched.steps(); t >= 1; --t) {
      model.predict(params, x, t, cls, eps_c);
      if (cfg.omega != 0.0) {
        model.predict(params, x, t, model.null_class(), eps_u);
        eps = cfg_noise(eps_c, eps_u, cfg.omega);
      } else {
        eps = eps_c;
      }
      const double inv_sqrt_a = 1.0 / std::sqrt(sched.alpha(t));
      const double coef = mu_noise_coefficient(t, sched);
      const double sigma = sched.sigma(t);
      for (std::size_t k = 0; k < d; ++k) {
        const double z = t > 1 ? normal(rng) : 0.0;
        x[k] = inv_sqrt_a * x[k] - coef * eps[k] + sigma * z;
      }
      for (double v : x) {
        if (!std::isfinite(v)) {
          throw NumericError("ancestral_sample: non-finite state at t=" + std::to_string(t) + ", class " +
                             std::to_string(cls) + ", chain " + std::to_string(n));
        }
      }
    }
    std::copy(x.begin(), x.end(), out.row(n).begin());
  }
  return out;
}

std::vector<double> oracle_gaussian_denoiser(std::span<const double> mean, double scale,
                                             std::span<const double> x_t, int t, const DiffusionSchedule& sched) {
  require(scale >= 0.0, "oracle denoiser: scale must be >= 0");
  require(mean.size() == x_t.size(), "oracle denoiser: dimension mismatch");
  const double ab = sched.alpha_bar(t);
  const double noise_var = 1.0 - ab;
  require(noise_var > 0.0, "oracle denoiser: 1 - abar_t is zero");
  const double sqrt_ab = std::sqrt(ab);
  const double s2 = scale * scale;
  const double gain = sqrt_ab * s2 / (ab * s2 + noise_var);
  const double inv_sd = 1.0 / std::sqrt(noise_var);
  std::vector<double> eps(x_t.size());
  for (std::size_t k = 0; k < eps.size(); ++k) {
    const double x0_mean = mean[k] + gain * (x_t[k] - sqrt_ab * mean[k]);
    eps[k] = (x_t[k] - sqrt_ab * x0_mean) * inv_sd;
  }
  return eps;
}

OracleGaussianModel::OracleGaussianModel(std::vector<double> mean, double scale, const DiffusionSchedule& sched,
                                         int num_classes)
    : mean_(std::move(mean)), scale_(scale), sched_(sched), num_classes_(num_classes) {
  require(scale_ >= 0.0, "oracle model: scale must be >= 0");
  require(num_classes_ >= 1, "oracle model: need at least one class");
}

void OracleGaussianModel::predict(std::span<const double>, std::span<const double> x, int t, int cls,
                                  std::span<double> out) const {
  require(cls >= 0 && cls <= num_classes_, "oracle model: class out of range");
  const auto eps = oracle_gaussian_denoiser(mean_, scale_, x, t, sched_);
  std::copy(eps.begin(), eps.end(), out.begin());
}

}  // namespace ovl
