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
#include <optional>
#include <string>
#include <vector>

#include "ovl/data.hpp"
#include "ovl/metrics.hpp"
#include "ovl/net.hpp"
#include "ovl/toylab.hpp"
#include "ovl/trainer.hpp"

namespace ovl {

/// Malformed, missing or inconsistent configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DataConfig {
  std::string kind = "gmm";  // gmm | raster | csv
  std::vector<long> counts;  // explicit class sizes; empty: long-tail from classes/n_max/imb
  int classes = 2;
  long n_max = 2000;
  double imb = 0.01;
  std::vector<std::vector<double>> means;  // gmm: explicit component means; empty: ring
  double radius = 2.0;                     // gmm ring radius
  double scale = 1.0;                      // gmm component scale
  double noise = 0.3;                      // raster pixel noise
  std::filesystem::path path;              // csv input
  long resample = 0;                       // > 0: class-balanced resample of this size

  std::vector<long> class_counts() const;
};

struct SampleConfig {
  std::vector<double> omegas{0.0};
  std::size_t count = 1000;
  std::vector<int> classes;  // empty: all
  bool pgm = false;
};

struct LandscapeConfig {
  double pi1 = 0.95;
  double m1 = 0.0;
  double m2 = 2.0;
  double sigma = 1.0;
  GridAxis axis;
  double tau = 0.5;
  double margin = 2.0;
};

struct BenchmarkConfig {
  std::vector<std::uint64_t> seeds{1, 2, 3};
  std::vector<LossMode> modes{LossMode::kPlain, LossMode::kReweighted, LossMode::kDiffRop};
  std::size_t samples = 2000;  // generated per class
};

struct ExperimentConfig {
  std::filesystem::path out_dir = "runs/default";
  std::uint64_t seed = 0;  // data, initialisation, batches and sampling
  DataConfig data;
  ScheduleSpec schedule;
  NetworkConfig net;
  TrainConfig train;
  SampleConfig sample;
  MetricsConfig metrics;
  LandscapeConfig landscape;
  BenchmarkConfig benchmark;

  void validate() const;
};

using ConfigOverrides = std::vector<std::pair<std::string, std::string>>;

/// INI text: `[section]` headers, `key = value` lines, `#` or `;` comments.
/// Overrides use `section.key` names and win over the file. Unknown keys
/// are rejected.
ExperimentConfig parse_config(std::istream& in, const ConfigOverrides& overrides = {});
ExperimentConfig load_config(const std::filesystem::path& path, const ConfigOverrides& overrides = {});
/// Defaults plus overrides, no file.
ExperimentConfig default_config(const ConfigOverrides& overrides = {});

/// Every key with its resolved value; parse_config of the output reproduces
/// the same configuration.
void write_config(std::ostream& os, const ExperimentConfig& cfg);
void write_config(const std::filesystem::path& path, const ExperimentConfig& cfg);

/// The dataset the config describes (generated, loaded, optionally resampled).
LabeledDataset build_dataset(const ExperimentConfig& cfg);
/// The generating mixture for gmm and raster data; none for csv input.
std::optional<ToyMixtureSpec> build_mixture(const ExperimentConfig& cfg);

}  // namespace ovl
