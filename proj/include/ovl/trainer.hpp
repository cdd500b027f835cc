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
#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "ovl/data.hpp"
#include "ovl/losses.hpp"
#include "ovl/net.hpp"
#include "ovl/schedule.hpp"

namespace ovl {

enum class LossMode { kPlain, kDiffRop, kReweighted };

LossMode parse_loss_mode(std::string_view name);  // plain | diffrop | reweighted
std::string_view to_string(LossMode mode);

struct TrainConfig {
  int batch_size = 64;
  long steps = 5000;
  double lr = 2e-4;
  long warmup = -1;  // negative: 5% of steps below 20k steps, else 5000
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 0;
  LossMode mode = LossMode::kPlain;
  PclVariant pcl;
  TauSchedule tau;
  double cond_dropout = 0.1;
  long log_every = 100;
  long ckpt_every = 0;  // 0: final checkpoint only

  void validate() const;
  long effective_warmup() const;
};

/// Linear ramp from 0 to cfg.lr over the warmup, constant afterwards.
double lr_at(long step, const TrainConfig& cfg);

struct TrainLogRow {
  long step = 0;
  double total = 0.0;
  double ddpm = 0.0;
  double pcl = 0.0;
  double tau_mean = 0.0;
  double seconds = 0.0;
};

/// Where a run persists its log and checkpoints. Absent: in-memory only.
struct TrainOutput {
  std::filesystem::path run_dir;
  ScheduleSpec schedule;
};

struct TrainResult {
  ParameterVector params;
  OptimizerState optimizer;
  std::vector<TrainLogRow> log;
  long single_class_batches = 0;  // diffrop batches that had no valid pair
};

/// Runs the training loop. Each step draws its batch from an RNG keyed on
/// (seed, step), so a run resumed from a checkpoint follows the same
/// trajectory as an uninterrupted one.
TrainResult train(const TrainConfig& cfg, const LabeledDataset& ds, const NoisePredictor& net,
                  const DiffusionSchedule& sched, const TrainOutput* output = nullptr,
                  const Checkpoint* resume = nullptr);

std::filesystem::path checkpoint_path(const std::filesystem::path& run_dir, long step);

void write_log_header(std::ostream& os);
void write_log_row(std::ostream& os, const TrainLogRow& row);

}  // namespace ovl
