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
#include <span>
#include <string>
#include <vector>

#include "ovl/common.hpp"

namespace ovl {

/// Long-tailed class sizes: n_i = round(n_max * imb^(i / (C - 1))).
struct ImbalanceSpec {
  int num_classes = 2;
  long n_max = 1;
  double imb = 1.0;  // smallest / largest, in (0, 1]
};

/// Class sizes, largest first. Rounds half away from zero and clamps at 1.
std::vector<long> longtail_counts(const ImbalanceSpec& spec);

/// Isotropic Gaussian per class: N(means[k], scales[k]^2 I).
struct ToyMixtureSpec {
  int dim = 1;
  std::vector<double> weights;
  std::vector<std::vector<double>> means;
  std::vector<double> scales;

  int num_classes() const { return static_cast<int>(weights.size()); }
  void validate() const;

  /// log(pi_k) + log N(x; m_k, s_k^2 I)
  double log_joint(int k, std::span<const double> x) const;
  /// Maximum-posterior class; ties go to the lowest index.
  int bayes_class(std::span<const double> x) const;
};

/// Classes evenly spaced on a circle in 2-D.
ToyMixtureSpec ring_mixture(int num_classes, double radius, double scale, std::vector<double> weights = {});

/// Mixture weights proportional to the given class sizes.
std::vector<double> weights_from_counts(std::span<const long> counts);

struct LabeledDataset {
  Points samples;
  std::vector<int> labels;
  int num_classes = 0;
  std::string provenance;

  std::size_t size() const { return labels.size(); }
  bool empty() const { return labels.empty(); }
  std::size_t dim() const { return samples.dim; }
  void validate() const;
};

struct DatasetStats {
  long total = 0;
  std::vector<long> counts;
  std::vector<double> weights;  // counts / total

  int num_classes() const { return static_cast<int>(counts.size()); }
};

LabeledDataset generate_gmm_dataset(const ToyMixtureSpec& spec, std::span<const long> counts, std::uint64_t seed);

/// Class-conditional 8x8 glyphs plus i.i.d. Gaussian pixel noise, flattened
/// to 64-vectors. Up to kRasterClasses classes.
inline constexpr int kRasterClasses = 10;
inline constexpr int kRasterSide = 8;
LabeledDataset generate_raster_dataset(std::span<const long> counts, double noise, std::uint64_t seed);
/// The mixture generate_raster_dataset draws from.
ToyMixtureSpec raster_mixture(std::span<const long> counts, double noise);
std::vector<double> raster_template(int cls);

DatasetStats class_stats(const LabeledDataset& ds);

/// Uniform class choice, then uniform draw with replacement inside the class.
LabeledDataset resample_uniform(const LabeledDataset& ds, std::size_t total, std::uint64_t seed);

/// Rows of one class.
Points class_samples(const LabeledDataset& ds, int cls);

// CSV: header `dim,label,x0,...,x{d-1}`, one sample per row, LF endings.
void write_dataset_csv(const std::filesystem::path& path, const LabeledDataset& ds);
void write_dataset_csv(std::ostream& os, const LabeledDataset& ds);
/// num_classes <= 0 infers max(label) + 1.
LabeledDataset read_dataset_csv(const std::filesystem::path& path, int num_classes = 0);

/// Binary greymap (P5) of raster samples laid out in a grid, one tile per row.
void write_raster_pgm(const std::filesystem::path& path, const Points& samples, int columns = 8);

}  // namespace ovl
