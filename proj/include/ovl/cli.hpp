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
#include <iosfwd>
#include <vector>

#include "ovl/config.hpp"

namespace ovl {

enum ExitCode : int { kExitOk = 0, kExitCheckFailed = 1, kExitConfigError = 2, kExitNumericAbort = 3 };

/// Entry point of the `ovl` tool. argv[0] is the program name.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

struct BenchmarkRow {
  LossMode mode = LossMode::kPlain;
  std::uint64_t seed = 0;
  double overlap_tail_head = 0.0;     // O[tail -> head]
  double overlap_tail_offdiag = 0.0;  // 1 - O[tail -> tail]
  double frechet_tail = 0.0;
  double frechet_head = 0.0;
  double ddpm_loss = 0.0;  // final parameters, whole dataset, fixed noise
  double seconds = 0.0;    // wall time of training plus sampling; not written to CSV
};

struct BenchmarkResult {
  int head_class = 0;
  int tail_class = 0;
  std::vector<BenchmarkRow> rows;     // per mode and seed
  std::vector<BenchmarkRow> medians;  // per mode, seed field unused
  const BenchmarkRow* median(LossMode mode) const;
};

/// Trains every configured mode on every seed with otherwise identical
/// settings, samples each class and scores the samples. Fréchet distances
/// are taken against the generating component when the data is a mixture,
/// against the class's training samples otherwise. Overlap needs a mixture.
BenchmarkResult run_benchmark(const ExperimentConfig& cfg, std::ostream* progress = nullptr);
void write_benchmark_csv(const std::filesystem::path& path, const BenchmarkResult& result);

/// Network shape of `cfg.net` fitted to the dataset's dimension and classes.
NetworkConfig network_for(const ExperimentConfig& cfg, const LabeledDataset& ds);

}  // namespace ovl
