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

#include "ovl/trainer.hpp"

#include <chrono>
#include <cmath>
#include <fstream>

namespace ovl {

LossMode parse_loss_mode(std::string_view name) {
  if (name == "plain") return LossMode::kPlain;
  if (name == "diffrop") return LossMode::kDiffRop;
  if (name == "reweighted") return LossMode::kReweighted;
  throw InvalidArgument("unknown loss mode '" + std::string(name) + "' (expected plain | diffrop | reweighted)");
}

std::string_view to_string(LossMode mode) {
  switch (mode) {
    case LossMode::kPlain: return "plain";
    case LossMode::kDiffRop: return "diffrop";
    case LossMode::kReweighted: return "reweighted";
  }
  return "?";
}

void TrainConfig::validate() const {
  require(batch_size >= 1, "train: batch size must be >= 1");
  require(mode != LossMode::kDiffRop || batch_size >= 2, "train: diffrop mode needs batch size >= 2");
  require(steps >= 0, "train: steps must be >= 0");
  require(lr >= 0.0 && std::isfinite(lr), "train: learning rate must be finite and >= 0");
  require(effective_warmup() <= steps || steps == 0, "train: warmup exceeds total steps");
  require(adam_beta1 >= 0.0 && adam_beta1 < 1.0 && adam_beta2 >= 0.0 && adam_beta2 < 1.0,
          "train: Adam decays must lie in [0, 1)");
  require(adam_eps > 0.0, "train: Adam epsilon must be > 0");
  require(cond_dropout >= 0.0 && cond_dropout <= 1.0, "train: dropout probability outside [0, 1]");
  require(log_every >= 1, "train: log cadence must be >= 1");
  require(ckpt_every >= 0, "train: checkpoint cadence must be >= 0");
  pcl.validate();
  tau.validate();
}

long TrainConfig::effective_warmup() const {
  if (warmup >= 0) return warmup;
  return steps < 20000 ? steps / 20 : 5000;
}

double lr_at(long step, const TrainConfig& cfg) {
  const long w = cfg.effective_warmup();
  if (w <= 0 || step >= w) return cfg.lr;
  return cfg.lr * static_cast<double>(step) / static_cast<double>(w);
}

std::filesystem::path checkpoint_path(const std::filesystem::path& run_dir, long step) {
  return run_dir / ("ckpt_" + std::to_string(step) + ".bin");
}

void write_log_header(std::ostream& os) { os << "step,total,ddpm,pcl,tau_mean,seconds\n"; }

void write_log_row(std::ostream& os, const TrainLogRow& r) {
  os << r.step << ',' << format_double(r.total) << ',' << format_double(r.ddpm) << ',' << format_double(r.pcl) << ','
     << format_double(r.tau_mean) << ',' << format_double(r.seconds) << '\n';
}

TrainResult train(const TrainConfig& cfg, const LabeledDataset& ds, const NoisePredictor& net,
                  const DiffusionSchedule& sched, const TrainOutput* output, const Checkpoint* resume) {
  cfg.validate();
  require(!ds.empty(), "train: empty dataset");
  ds.validate();
  require(ds.dim() == net.dim(), "train: dataset dimension does not match the network");
  require(ds.num_classes <= net.num_classes(), "train: dataset has more classes than the network");

  const std::size_t n_params = net.num_params();
  TrainResult res;
  long start = 0;
  if (resume) {
    require(resume->params.size() == n_params, "train: checkpoint does not match the network");
    res.params = resume->params;
    if (resume->optimizer) {
      res.optimizer = *resume->optimizer;
      start = static_cast<long>(res.optimizer.step);
    }
  } else {
    res.params = net.init_params(cfg.seed);
  }
  if (res.optimizer.m.empty()) {
    res.optimizer.m.assign(n_params, 0.0);
    res.optimizer.v.assign(n_params, 0.0);
  }
  require(start <= cfg.steps, "train: checkpoint is past the configured step count");

  Objective objective = PlainObjective{};
  if (cfg.mode == LossMode::kDiffRop) objective = DiffRopObjective{cfg.tau, cfg.pcl};
  if (cfg.mode == LossMode::kReweighted) objective = ReweightedObjective{class_stats(ds)};

  std::ofstream log_file;
  if (output) {
    std::filesystem::create_directories(output->run_dir);
    const auto log_path = output->run_dir / "log.csv";
    if (start == 0) {
      log_file.open(log_path, std::ios::binary | std::ios::trunc);
      write_log_header(log_file);
    } else {
      log_file.open(log_path, std::ios::binary | std::ios::app);
    }
    if (!log_file) throw std::runtime_error("cannot open " + log_path.string());
  }
  auto save = [&](long step) {
    if (!output) return;
    Checkpoint ck{net.config(), output->schedule, res.params, res.optimizer};
    save_checkpoint(checkpoint_path(output->run_dir, step), ck);
  };

  const auto t0 = std::chrono::steady_clock::now();
  std::vector<std::size_t> idx(static_cast<std::size_t>(cfg.batch_size));
  GradientVector grad(n_params);
  auto& m = res.optimizer.m;
  auto& v = res.optimizer.v;
  bool saved_last = false;

  for (long step = start; step < cfg.steps; ++step) {
    Rng rng = make_rng(cfg.seed, {0x747261696eULL, static_cast<std::uint64_t>(step)});
    std::uniform_int_distribution<std::size_t> pick(0, ds.size() - 1);
    for (auto& i : idx) i = pick(rng);
    const PreparedBatch batch = prepare_batch(ds, idx, sched, cfg.cond_dropout, rng);

    LossBreakdown lb;
    try {
      lb = loss_and_grad(net, res.params, sched, batch, objective, &grad);
    } catch (const NumericError& e) {
      throw NumericError("step " + std::to_string(step) + ": " + e.what());
    }
    if (cfg.mode == LossMode::kDiffRop && lb.pairs == 0) ++res.single_class_batches;
    for (double g : grad) {
      if (!std::isfinite(g)) throw NumericError("step " + std::to_string(step) + ": non-finite gradient");
    }

    if (step % cfg.log_every == 0) {
      TrainLogRow row{step, lb.total, lb.ddpm, lb.pcl, lb.tau_mean,
                      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()};
      res.log.push_back(row);
      if (output) {
        write_log_row(log_file, row);
        log_file.flush();
      }
    }

    const long k = step + 1;
    const double lr = lr_at(k, cfg);
    const double bc1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(k));
    const double bc2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(k));
    for (std::size_t p = 0; p < n_params; ++p) {
      const double g = grad[p];
      m[p] = cfg.adam_beta1 * m[p] + (1.0 - cfg.adam_beta1) * g;
      v[p] = cfg.adam_beta2 * v[p] + (1.0 - cfg.adam_beta2) * g * g;
      res.params[p] -= lr * (m[p] / bc1) / (std::sqrt(v[p] / bc2) + cfg.adam_eps);
    }
    res.optimizer.step = static_cast<std::uint64_t>(k);
    saved_last = false;
    if (cfg.ckpt_every > 0 && k % cfg.ckpt_every == 0) {
      save(k);
      saved_last = true;
    }
  }
  if (!saved_last) save(cfg.steps);
  return res;
}

}  // namespace ovl
