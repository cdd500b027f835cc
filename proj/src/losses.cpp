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

#include "ovl/losses.hpp"

#include <algorithm>
#include <cmath>

#include "ovl/forward.hpp"

namespace ovl {

void PreparedBatch::validate(const DiffusionSchedule& sched) const {
  const std::size_t n = labels.size();
  require(x0.size() == n && noise.size() == n && timesteps.size() == n && drop_class.size() == n,
          "batch: field lengths differ");
  require(x0.dim == noise.dim, "batch: x0 and noise differ in dimension");
  for (int t : timesteps) sched.check_timestep(t);
}

PreparedBatch prepare_batch(const LabeledDataset& ds, std::span<const std::size_t> indices,
                            const DiffusionSchedule& sched, double cond_dropout, Rng& rng) {
  require(cond_dropout >= 0.0 && cond_dropout <= 1.0, "prepare_batch: dropout probability outside [0, 1]");
  PreparedBatch b;
  b.x0 = Points(ds.dim());
  b.noise = Points(ds.dim(), indices.size());
  b.x0.reserve(indices.size());
  std::uniform_int_distribution<int> pick_t(1, sched.steps());
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t n = 0; n < indices.size(); ++n) {
    const std::size_t i = indices[n];
    require(i < ds.size(), "prepare_batch: index out of range");
    b.x0.push_back(ds.samples.row(i));
    b.labels.push_back(ds.labels[i]);
    b.timesteps.push_back(pick_t(rng));
    for (double& e : b.noise.row(n)) e = normal(rng);
    b.drop_class.push_back(unit(rng) < cond_dropout ? 1 : 0);
  }
  return b;
}

PreparedBatch prepare_full_dataset(const LabeledDataset& ds, const DiffusionSchedule& sched, std::uint64_t seed) {
  std::vector<std::size_t> idx(ds.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  Rng rng = make_rng(seed, {0x66697864ULL});
  return prepare_batch(ds, idx, sched, 0.0, rng);
}

PclKind parse_pcl_kind(std::string_view name) {
  if (name == "neg_l2") return PclKind::kNegativeL2;
  if (name == "hinge_margin") return PclKind::kMaxMarginHinge;
  if (name == "reciprocal") return PclKind::kReciprocal;
  if (name == "exponential") return PclKind::kExponential;
  throw InvalidArgument("unknown contrastive variant '" + std::string(name) +
                        "' (expected neg_l2 | hinge_margin | reciprocal | exponential)");
}

std::string_view to_string(PclKind kind) {
  switch (kind) {
    case PclKind::kNegativeL2: return "neg_l2";
    case PclKind::kMaxMarginHinge: return "hinge_margin";
    case PclKind::kReciprocal: return "reciprocal";
    case PclKind::kExponential: return "exponential";
  }
  return "?";
}

void PclVariant::validate() const { require(margin >= 0.0 && std::isfinite(margin), "contrastive margin must be >= 0"); }

double pcl_variant_value(const PclVariant& v, double d) {
  require(d >= 0.0, "pcl_variant_value: negative distance");
  switch (v.kind) {
    case PclKind::kNegativeL2: return -d;
    case PclKind::kMaxMarginHinge: return std::max(0.0, v.margin - d);
    case PclKind::kReciprocal: return 1.0 / (1.0 + d);
    case PclKind::kExponential: return std::exp(-d);
  }
  return 0.0;
}

double pcl_variant_slope(const PclVariant& v, double d) {
  require(d >= 0.0, "pcl_variant_slope: negative distance");
  switch (v.kind) {
    case PclKind::kNegativeL2: return -1.0;
    case PclKind::kMaxMarginHinge: return d < v.margin ? -1.0 : 0.0;
    case PclKind::kReciprocal: {
      const double q = 1.0 + d;
      return -1.0 / (q * q);
    }
    case PclKind::kExponential: return -std::exp(-d);
  }
  return 0.0;
}

double mu_noise_coefficient(int t, const DiffusionSchedule& sched) {
  const double a = sched.alpha(t);
  return (1.0 - a) / (std::sqrt(a) * std::sqrt(1.0 - sched.alpha_bar(t)));
}

std::vector<double> mu_theta(std::span<const double> x_t, int t, std::span<const double> eps_hat,
                             const DiffusionSchedule& sched) {
  require(x_t.size() == eps_hat.size(), "mu_theta: dimension mismatch");
  const double inv_sqrt_a = 1.0 / std::sqrt(sched.alpha(t));
  const double coef = mu_noise_coefficient(t, sched);
  std::vector<double> mu(x_t.size());
  for (std::size_t k = 0; k < mu.size(); ++k) mu[k] = inv_sqrt_a * x_t[k] - coef * eps_hat[k];
  return mu;
}

double pcl_distance(std::span<const double> mu_i, std::span<const double> mu_j) {
  require(mu_i.size() == mu_j.size(), "pcl_distance: dimension mismatch");
  return squared_distance(mu_i, mu_j);
}

double pcl_distance_noise_form(std::span<const double> x_i, std::span<const double> x_j,
                               std::span<const double> eps_hat_i, std::span<const double> eps_hat_j, int t,
                               const DiffusionSchedule& sched) {
  require(x_i.size() == x_j.size() && x_i.size() == eps_hat_i.size() && x_i.size() == eps_hat_j.size(),
          "pcl_distance_noise_form: dimension mismatch");
  const double a = sched.alpha(t);
  const double k = (1.0 - a) / std::sqrt(1.0 - sched.alpha_bar(t));
  double s = 0.0;
  for (std::size_t c = 0; c < x_i.size(); ++c) {
    const double r = (x_i[c] - x_j[c]) + k * (eps_hat_j[c] - eps_hat_i[c]);
    s += r * r;
  }
  return s / a;
}

double pcl_kl_closed_form(std::span<const double> mu_i, std::span<const double> mu_j, double sigma_t) {
  require(sigma_t > 0.0, "pcl_kl_closed_form: sigma must be > 0");
  return pcl_distance(mu_i, mu_j) / (2.0 * sigma_t * sigma_t);
}

std::vector<double> reweighting_factors(const DatasetStats& stats) {
  double z = 0.0;
  int present = 0;
  for (double w : stats.weights) {
    if (w > 0.0) {
      z += 1.0 / w;
      ++present;
    }
  }
  require(present > 0, "reweighting: no class with positive weight");
  z /= static_cast<double>(present);
  std::vector<double> f(stats.weights.size(), 0.0);
  for (std::size_t c = 0; c < f.size(); ++c) {
    if (stats.weights[c] > 0.0) f[c] = (1.0 / stats.weights[c]) / z;
  }
  return f;
}

namespace {

void check_finite(std::span<const double> v, const char* term, std::size_t index) {
  for (double x : v) {
    if (!std::isfinite(x)) throw NumericError(std::string("non-finite value in ") + term + std::to_string(index));
  }
}

struct Scratch {
  std::vector<double> x_t, eps_hat, x_j, eps_hat_j, mu_i, mu_j, dmu_i, dout;
  void resize(std::size_t d) {
    for (auto* v : {&x_t, &eps_hat, &x_j, &eps_hat_j, &mu_i, &mu_j, &dmu_i, &dout}) v->assign(d, 0.0);
  }
};

void mu_into(std::span<const double> x_t, std::span<const double> eps_hat, double inv_sqrt_a, double coef,
             std::vector<double>& out) {
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = inv_sqrt_a * x_t[k] - coef * eps_hat[k];
}

// Denoising term with per-element weights; weights empty means 1.
double denoising_term(const NoiseModel& model, std::span<const double> params, const DiffusionSchedule& sched,
                      const PreparedBatch& batch, std::span<const double> weights, GradientVector* grad,
                      Scratch& s) {
  const std::size_t n = batch.size();
  const double inv_n = 1.0 / static_cast<double>(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const int t = batch.timesteps[i];
    const int cls = batch.drop_class[i] ? model.null_class() : batch.labels[i];
    q_sample_into(batch.x0.row(i), t, batch.noise.row(i), sched, s.x_t);
    model.predict(params, s.x_t, t, cls, s.eps_hat);
    check_finite(s.eps_hat, "denoising term, element ", i);
    const auto eps = batch.noise.row(i);
    double l = 0.0;
    for (std::size_t k = 0; k < s.eps_hat.size(); ++k) {
      const double r = s.eps_hat[k] - eps[k];
      l += r * r;
    }
    const double w = weights.empty() ? 1.0 : weights[i];
    total += w * l;
    if (grad) {
      for (std::size_t k = 0; k < s.dout.size(); ++k) s.dout[k] = 2.0 * w * inv_n * (s.eps_hat[k] - eps[k]);
      model.accumulate_vjp(params, s.x_t, t, cls, s.dout, *grad);
    }
  }
  return total * inv_n;
}

double contrastive_term(const NoiseModel& model, std::span<const double> params, const DiffusionSchedule& sched,
                        const PreparedBatch& batch, const DiffRopObjective& obj, GradientVector* grad, Scratch& s,
                        std::size_t& pair_count, double& tau_mean) {
  const std::size_t n = batch.size();
  pair_count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (batch.labels[j] != batch.labels[i]) ++pair_count;
    }
  }
  tau_mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) tau_mean += tau_at(obj.tau, batch.timesteps[i]);
  tau_mean /= static_cast<double>(n);
  if (pair_count == 0) return 0.0;

  const double inv_pairs = 1.0 / static_cast<double>(pair_count);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const int t = batch.timesteps[i];
    const double tau = tau_at(obj.tau, t);
    if (tau == 0.0) continue;
    const int ci = batch.labels[i];
    const double inv_sqrt_a = 1.0 / std::sqrt(sched.alpha(t));
    const double coef = mu_noise_coefficient(t, sched);
    const auto eps = batch.noise.row(i);

    q_sample_into(batch.x0.row(i), t, eps, sched, s.x_t);
    model.predict(params, s.x_t, t, ci, s.eps_hat);
    mu_into(s.x_t, s.eps_hat, inv_sqrt_a, coef, s.mu_i);
    std::fill(s.dmu_i.begin(), s.dmu_i.end(), 0.0);
    bool any = false;

    for (std::size_t j = 0; j < n; ++j) {
      const int cj = batch.labels[j];
      if (cj == ci) continue;
      // Partner shares the anchor's timestep and noise draw.
      q_sample_into(batch.x0.row(j), t, eps, sched, s.x_j);
      model.predict(params, s.x_j, t, cj, s.eps_hat_j);
      mu_into(s.x_j, s.eps_hat_j, inv_sqrt_a, coef, s.mu_j);
      const double d = squared_distance(s.mu_i, s.mu_j);
      if (!std::isfinite(d)) {
        throw NumericError("non-finite value in contrastive pair (" + std::to_string(i) + ", " + std::to_string(j) +
                           ")");
      }
      total += tau * pcl_variant_value(obj.variant, d);
      if (grad) {
        const double slope = tau * pcl_variant_slope(obj.variant, d) * inv_pairs;
        if (slope == 0.0) continue;
        any = true;
        // d/d eps_hat_j = -coef * d/d mu_j, and d d/d mu_j = -2 (mu_i - mu_j)
        for (std::size_t k = 0; k < s.dout.size(); ++k) {
          const double u = s.mu_i[k] - s.mu_j[k];
          s.dmu_i[k] += 2.0 * slope * u;
          s.dout[k] = coef * 2.0 * slope * u;
        }
        model.accumulate_vjp(params, s.x_j, t, cj, s.dout, *grad);
      }
    }
    if (grad && any) {
      for (std::size_t k = 0; k < s.dout.size(); ++k) s.dout[k] = -coef * s.dmu_i[k];
      model.accumulate_vjp(params, s.x_t, t, ci, s.dout, *grad);
    }
  }
  return total * inv_pairs;
}

}  // namespace

LossBreakdown loss_and_grad(const NoiseModel& model, std::span<const double> params, const DiffusionSchedule& sched,
                            const PreparedBatch& batch, const Objective& objective, GradientVector* grad) {
  if (grad) grad->assign(params.size(), 0.0);
  LossBreakdown out;

  if (std::holds_alternative<ParamNormObjective>(objective)) {
    double s = 0.0;
    for (double p : params) s += p * p;
    out.total = 0.5 * s;
    if (grad) std::copy(params.begin(), params.end(), grad->begin());
    return out;
  }

  require(batch.size() > 0, "loss: empty batch");
  batch.validate(sched);
  require(batch.x0.dim == model.dim(), "loss: batch dimension does not match the model");
  Scratch s;
  s.resize(model.dim());

  if (const auto* rw = std::get_if<ReweightedObjective>(&objective)) {
    const auto factors = reweighting_factors(rw->stats);
    std::vector<double> w(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const int c = batch.labels[i];
      if (c < 0 || static_cast<std::size_t>(c) >= factors.size() || factors[static_cast<std::size_t>(c)] == 0.0) {
        throw InvalidArgument("reweighted loss: class " + std::to_string(c) + " has no weight in the dataset stats");
      }
      w[i] = factors[static_cast<std::size_t>(c)];
    }
    out.ddpm = denoising_term(model, params, sched, batch, w, grad, s);
    out.total = out.ddpm;
    return out;
  }

  out.ddpm = denoising_term(model, params, sched, batch, {}, grad, s);
  if (const auto* dr = std::get_if<DiffRopObjective>(&objective)) {
    dr->tau.validate();
    dr->variant.validate();
    out.pcl = contrastive_term(model, params, sched, batch, *dr, grad, s, out.pairs, out.tau_mean);
  }
  out.total = out.ddpm + out.pcl;
  if (!std::isfinite(out.total)) throw NumericError("non-finite total loss");
  return out;
}

double ddpm_simple_loss(const NoiseModel& model, std::span<const double> params, const DiffusionSchedule& sched,
                        const PreparedBatch& batch) {
  return loss_and_grad(model, params, sched, batch, PlainObjective{}).total;
}

double overall_batch_loss(const NoiseModel& model, std::span<const double> params, const DiffusionSchedule& sched,
                          const PreparedBatch& batch, const TauSchedule& tau, const PclVariant& variant) {
  return loss_and_grad(model, params, sched, batch, DiffRopObjective{tau, variant}).total;
}

double reweighted_loss(const NoiseModel& model, std::span<const double> params, const DiffusionSchedule& sched,
                       const PreparedBatch& batch, const DatasetStats& stats) {
  return loss_and_grad(model, params, sched, batch, ReweightedObjective{stats}).total;
}

ClassDecomposition decompose_loss_by_class(const NoiseModel& model, std::span<const double> params,
                                           const DiffusionSchedule& sched, const LabeledDataset& ds,
                                           const PreparedBatch& fixed) {
  require(!ds.empty(), "decompose: empty dataset");
  require(fixed.size() == ds.size(), "decompose: randomness does not cover the dataset");
  fixed.validate(sched);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    require(fixed.labels[i] == ds.labels[i], "decompose: randomness labels do not match the dataset");
  }
  const DatasetStats stats = class_stats(ds);
  for (int c = 0; c < stats.num_classes(); ++c) {
    if (stats.counts[static_cast<std::size_t>(c)] == 0) {
      throw InvalidArgument("decompose: class " + std::to_string(c) + " is empty");
    }
  }

  std::vector<double> x_t(ds.dim()), eps_hat(ds.dim());
  std::vector<double> class_sum(static_cast<std::size_t>(stats.num_classes()), 0.0);
  double sum = 0.0;
  for (std::size_t i = 0; i < fixed.size(); ++i) {
    const int t = fixed.timesteps[i];
    const int cls = fixed.drop_class[i] ? model.null_class() : fixed.labels[i];
    q_sample_into(fixed.x0.row(i), t, fixed.noise.row(i), sched, x_t);
    model.predict(params, x_t, t, cls, eps_hat);
    const double l = squared_distance(eps_hat, fixed.noise.row(i));
    if (!std::isfinite(l)) throw NumericError("decompose: non-finite loss at element " + std::to_string(i));
    sum += l;
    class_sum[static_cast<std::size_t>(fixed.labels[i])] += l;
  }

  ClassDecomposition out;
  out.global = sum / static_cast<double>(stats.total);
  out.weights = stats.weights;
  out.per_class.resize(class_sum.size());
  for (std::size_t c = 0; c < class_sum.size(); ++c) {
    out.per_class[c] = class_sum[c] / static_cast<double>(stats.counts[c]);
    out.weighted_sum += out.weights[c] * out.per_class[c];
  }
  out.relative_error = std::abs(out.global - out.weighted_sum) / std::max(std::abs(out.global), 1e-300);
  return out;
}

}  // namespace ovl
