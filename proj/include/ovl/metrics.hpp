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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ovl/common.hpp"
#include "ovl/data.hpp"

namespace ovl {

// ---- Frechet distance on raw-space Gaussian moments ----

struct GaussianMoments {
  std::vector<double> mean;
  std::vector<double> cov;  // dim x dim, row-major

  std::size_t dim() const { return mean.size(); }
};

/// Mean and unbiased covariance. Needs at least two rows.
GaussianMoments sample_moments(const Points& pts);

/// ||mu1 - mu2||^2 + tr(C1 + C2 - 2 (C1 C2)^(1/2)); the trace of the root is
/// taken from the eigenvalues of C1^(1/2) C2 C1^(1/2).
double frechet_gaussian(std::span<const double> mu1, std::span<const double> cov1, std::span<const double> mu2,
                        std::span<const double> cov2);
double frechet_gaussian(const GaussianMoments& a, const GaussianMoments& b);
double frechet_distance(const Points& a, const Points& b);

// ---- kNN manifold precision / recall ----

struct PrecisionRecall {
  double precision = 0.0;
  double recall = 0.0;
};

/// A generated point is precise if it lies inside the k-th-neighbour ball of
/// some real point; recall swaps the roles.
PrecisionRecall knn_precision_recall(const Points& real, const Points& gen, int k = 5);

// ---- precision/recall distributions ----

double f_beta(double precision, double recall, double beta);

struct PrdCurve {
  std::vector<double> precision;
  std::vector<double> recall;
};

/// PRD curve of two histograms over the same bins (normalised internally).
PrdCurve prd_from_histograms(std::span<const double> ref_hist, std::span<const double> eval_hist,
                             int num_angles = 1001);

struct FBetaPair {
  double f_beta = 0.0;      // recall-leaning, F_8 at beta = 8
  double f_inv_beta = 0.0;  // precision-leaning, F_1/8
};

FBetaPair max_f_beta(const PrdCurve& curve, double beta = 8.0);

struct KMeansResult {
  Points centers;
  std::vector<int> assignment;
};

/// Lloyd iterations from a farthest-first initialisation whose first centre
/// is drawn with `seed`. Ties go to the lowest cluster index.
KMeansResult kmeans(const Points& pts, int clusters, int iterations, std::uint64_t seed);

/// Cluster real U gen, compare the cluster histograms, take the max-F points.
/// The curve is averaged over `runs` clusterings.
FBetaPair prd_f_beta(const Points& real, const Points& gen, int clusters, double beta = 8.0,
                     std::uint64_t seed = 0, int runs = 10, int iterations = 50);

// ---- class overlap ----

using OverlapMatrix = std::vector<std::vector<double>>;

/// O[c][c'] = share of class-c samples whose Bayes class under `mixture` is c'.
OverlapMatrix overlap_rate(const std::vector<Points>& gen_per_class, const ToyMixtureSpec& mixture);

// ---- many / med / few ----

enum class Interval { kMany, kMed, kFew };
std::string_view to_string(Interval iv);

/// Classes sorted by size (descending, ties by index) and cut into
/// floor(C/3) / C - 2 floor(C/3) / floor(C/3). Fewer than 3 classes: all many.
std::vector<Interval> interval_split(const DatasetStats& stats);

// ---- linear probe ----

struct ProbeConfig {
  int iterations = 400;
  double learning_rate = 0.5;
  double l2 = 1e-4;
};

struct ProbeResult {
  double accuracy = 0.0;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  std::vector<double> class_precision;
  std::vector<double> class_recall;
  std::vector<int> absent_classes;  // classes with no training data; never predicted
};

/// Multinomial logistic regression on standardised features, full-batch
/// gradient descent from zero weights.
ProbeResult linear_probe(const LabeledDataset& train, const LabeledDataset& test, const ProbeConfig& cfg = {});

// ---- aggregated report ----

struct MetricsConfig {
  int knn_k = 5;
  double beta = 8.0;
  int cluster_factor = 20;  // clusters = factor * classes
  int prd_runs = 10;
  std::uint64_t seed = 0;

  void validate() const;
};

struct IntervalSummary {
  Interval interval = Interval::kMany;
  std::vector<int> classes;
  double frechet = 0.0;
  double mean_overlap_off_diagonal = 0.0;
};

struct MetricsReport {
  double frechet_global = 0.0;
  std::vector<double> frechet_per_class;
  double precision = 0.0;
  double recall = 0.0;
  double f_8 = 0.0;
  double f_1_8 = 0.0;
  OverlapMatrix overlap;  // empty without a mixture
  std::vector<IntervalSummary> intervals;
};

/// Compares generated samples with real ones, class by class where both
/// exist. `mixture` enables the overlap matrix.
MetricsReport evaluate_generation(const LabeledDataset& real, const LabeledDataset& gen,
                                  const ToyMixtureSpec* mixture, const MetricsConfig& cfg);

/// Flat `key,value` CSV.
void write_report_csv(const std::filesystem::path& path, const MetricsReport& report);
/// Square matrix, header `class,0,...,C-1`, one row per conditioning class.
void write_overlap_csv(const std::filesystem::path& path, const OverlapMatrix& overlap);

}  // namespace ovl
