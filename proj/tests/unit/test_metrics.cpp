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

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ovl/metrics.hpp"

namespace ovl {
namespace {

namespace fs = std::filesystem;

Points gaussian_points(std::vector<double> mean, double scale, std::size_t n, std::uint64_t seed) {
  Points p(mean.size(), n);
  Rng rng = make_rng(seed);
  std::normal_distribution<double> normal;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < mean.size(); ++k) p.row(i)[k] = mean[k] + scale * normal(rng);
  }
  return p;
}

TEST(Frechet, ClosedFormExamples) {
  const std::vector<double> zero{0, 0}, one{1, 0}, eye{1, 0, 0, 1};
  EXPECT_NEAR(frechet_gaussian(zero, eye, zero, eye), 0.0, 1e-14);
  EXPECT_NEAR(frechet_gaussian(zero, eye, one, eye), 1.0, 1e-14);
  // Diagonal: sum (sqrt(a) - sqrt(b))^2 = (1 - 2)^2 + (2 - 1)^2
  const std::vector<double> c1{1, 0, 0, 4}, c2{4, 0, 0, 1};
  EXPECT_NEAR(frechet_gaussian(zero, c1, zero, c2), 2.0, 1e-12);
}

TEST(Frechet, GeneralCovariancesMatchEigenvaluesOfProduct) {
  Rng rng = make_rng(5);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::Matrix3d a, b;
    for (int i = 0; i < 9; ++i) {
      a.data()[i] = normal(rng);
      b.data()[i] = normal(rng);
    }
    const Eigen::Matrix3d c1 = a * a.transpose() + 0.1 * Eigen::Matrix3d::Identity();
    const Eigen::Matrix3d c2 = b * b.transpose() + 0.1 * Eigen::Matrix3d::Identity();
    const Eigen::Vector3d m1(normal(rng), normal(rng), normal(rng)), m2(normal(rng), normal(rng), normal(rng));
    Eigen::EigenSolver<Eigen::Matrix3d> es(c1 * c2);
    double root_trace = 0.0;
    for (int i = 0; i < 3; ++i) root_trace += std::sqrt(es.eigenvalues()[i].real());
    const double want = (m1 - m2).squaredNorm() + c1.trace() + c2.trace() - 2.0 * root_trace;
    std::vector<double> vc1(9), vc2(9);
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) {
        vc1[r * 3 + c] = c1(r, c);
        vc2[r * 3 + c] = c2(r, c);
      }
    }
    const std::vector<double> vm1(m1.data(), m1.data() + 3), vm2(m2.data(), m2.data() + 3);
    EXPECT_NEAR(frechet_gaussian(vm1, vc1, vm2, vc2), want, 1e-9 * std::max(1.0, want));
  }
}

TEST(Frechet, RejectsBadCovariances) {
  const std::vector<double> zero{0, 0}, eye{1, 0, 0, 1};
  EXPECT_THROW(frechet_gaussian(zero, std::vector<double>{1, 0, 0, -1}, zero, eye), InvalidArgument);
  EXPECT_THROW(frechet_gaussian(zero, std::vector<double>{1, 0.5, 0, 1}, zero, eye), InvalidArgument);
  Points one(2, 1);
  EXPECT_THROW(sample_moments(one), InvalidArgument);
}

TEST(Frechet, SampleMomentsAreUnbiased) {
  Points p(1);
  for (double v : {1.0, 2.0, 3.0, 4.0}) p.push_back(std::vector<double>{v});
  const auto m = sample_moments(p);
  EXPECT_DOUBLE_EQ(m.mean[0], 2.5);
  EXPECT_DOUBLE_EQ(m.cov[0], 5.0 / 3.0);
}

TEST(Knn, Anchors) {
  const auto a = gaussian_points({0, 0}, 1.0, 200, 1);
  const auto same = knn_precision_recall(a, a, 5);
  EXPECT_EQ(same.precision, 1.0);
  EXPECT_EQ(same.recall, 1.0);
  const auto far = gaussian_points({100, 0}, 1.0, 200, 2);
  const auto none = knn_precision_recall(a, far, 5);
  EXPECT_EQ(none.precision, 0.0);
  EXPECT_EQ(none.recall, 0.0);
  EXPECT_THROW(knn_precision_recall(a, gaussian_points({0, 0}, 1.0, 3, 1), 5), InvalidArgument);
}

TEST(Knn, MatchesBruteForce) {
  const auto real = gaussian_points({0, 0}, 1.0, 10, 3);
  const auto gen = gaussian_points({0.5, 0}, 1.2, 10, 4);
  const int k = 3;
  auto radii = [&](const Points& p) {
    std::vector<double> r;
    for (std::size_t i = 0; i < p.size(); ++i) {
      std::vector<double> d;
      for (std::size_t j = 0; j < p.size(); ++j) {
        if (j != i) d.push_back(squared_distance(p.row(i), p.row(j)));
      }
      std::sort(d.begin(), d.end());
      r.push_back(d[k - 1]);
    }
    return r;
  };
  auto covered = [&](const Points& ref, const Points& q) {
    const auto r = radii(ref);
    double hit = 0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      for (std::size_t j = 0; j < ref.size(); ++j) {
        if (squared_distance(q.row(i), ref.row(j)) <= r[j]) {
          hit += 1;
          break;
        }
      }
    }
    return hit / static_cast<double>(q.size());
  };
  const auto pr = knn_precision_recall(real, gen, k);
  EXPECT_DOUBLE_EQ(pr.precision, covered(real, gen));
  EXPECT_DOUBLE_EQ(pr.recall, covered(gen, real));
}

TEST(FBeta, Formula) {
  const double beta = 8.0;
  EXPECT_NEAR(f_beta(0.5, 0.25, beta), (1 + beta * beta) / (beta * beta / 0.25 + 1 / 0.5), 1e-15);
  EXPECT_NEAR(f_beta(0.6, 0.3, 1.0), 2 * 0.6 * 0.3 / 0.9, 1e-15);
  EXPECT_NEAR(f_beta(0.6, 0.3, 8.0), f_beta(0.3, 0.6, 1.0 / 8.0), 1e-15);
  EXPECT_EQ(f_beta(0.0, 0.0, 8.0), 0.0);
  EXPECT_THROW(f_beta(0.5, 0.5, 0.0), InvalidArgument);
}

TEST(Prd, Anchors) {
  const std::vector<double> h{1, 2, 3, 4};
  const auto same = max_f_beta(prd_from_histograms(h, h));
  EXPECT_NEAR(same.f_beta, 1.0, 1e-12);
  EXPECT_NEAR(same.f_inv_beta, 1.0, 1e-12);
  // Model mass on half the reference support: full precision, half recall.
  const auto curve = prd_from_histograms(std::vector<double>{1, 1}, std::vector<double>{1, 0});
  EXPECT_NEAR(*std::max_element(curve.precision.begin(), curve.precision.end()), 1.0, 1e-6);
  EXPECT_NEAR(*std::max_element(curve.recall.begin(), curve.recall.end()), 0.5, 1e-12);
  const auto disjoint = max_f_beta(prd_from_histograms(std::vector<double>{1, 0}, std::vector<double>{0, 1}));
  EXPECT_EQ(disjoint.f_beta, 0.0);
  EXPECT_THROW(prd_from_histograms(std::vector<double>{0, 0}, std::vector<double>{1, 1}), InvalidArgument);
}

TEST(Prd, IdenticalSamplesScoreHigh) {
  const auto a = gaussian_points({0, 0}, 1.0, 300, 1);
  const auto fb = prd_f_beta(a, a, 10, 8.0, 0, 3);
  EXPECT_NEAR(fb.f_beta, 1.0, 1e-9);
  const auto far = prd_f_beta(a, gaussian_points({50, 0}, 1.0, 300, 2), 10, 8.0, 0, 3);
  EXPECT_LT(far.f_beta, 0.01);
}

TEST(KMeans, SeparatesBlobsDeterministically) {
  Points p = gaussian_points({0, 0}, 0.1, 50, 1);
  const auto b = gaussian_points({10, 10}, 0.1, 50, 2);
  p.values.insert(p.values.end(), b.values.begin(), b.values.end());
  const auto r = kmeans(p, 2, 50, 7);
  for (std::size_t i = 1; i < 50; ++i) EXPECT_EQ(r.assignment[i], r.assignment[0]);
  for (std::size_t i = 51; i < 100; ++i) EXPECT_EQ(r.assignment[i], r.assignment[50]);
  EXPECT_NE(r.assignment[0], r.assignment[50]);
  EXPECT_EQ(kmeans(p, 2, 50, 7).centers.values, r.centers.values);
  EXPECT_THROW(kmeans(p, 0, 10, 0), InvalidArgument);
}

TEST(Overlap, MonteCarloMatchesBayesError) {
  const double gap = 2.0;
  ToyMixtureSpec mix;
  mix.dim = 2;
  mix.weights = {0.5, 0.5};
  mix.means = {{0, 0}, {gap, 0}};
  mix.scales = {1.0, 1.0};
  const std::size_t n = 40000;
  const auto o = overlap_rate({gaussian_points({0, 0}, 1.0, n, 1), gaussian_points({gap, 0}, 1.0, n, 2)}, mix);
  const double want = boost::math::cdf(boost::math::normal(), -gap / 2.0);
  const double se = std::sqrt(want * (1 - want) / n);
  EXPECT_NEAR(o[0][1], want, 4 * se);
  EXPECT_NEAR(o[1][0], want, 4 * se);
  EXPECT_DOUBLE_EQ(o[0][0] + o[0][1], 1.0);

  mix.means = {{0, 0}, {0, 0}};
  const auto tie = overlap_rate({gaussian_points({0, 0}, 1.0, 50, 1), gaussian_points({0, 0}, 1.0, 50, 2)}, mix);
  EXPECT_EQ(tie[1][0], 1.0);
  EXPECT_THROW(overlap_rate({gaussian_points({0, 0}, 1.0, 5, 1)}, mix), InvalidArgument);
}

DatasetStats stats_of(int c) {
  DatasetStats s;
  for (int k = 0; k < c; ++k) s.counts.push_back(1000 - 7 * k);
  for (long v : s.counts) s.total += v;
  for (long v : s.counts) s.weights.push_back(static_cast<double>(v) / s.total);
  return s;
}

TEST(Intervals, Split) {
  auto count = [](const std::vector<Interval>& v, Interval iv) { return std::count(v.begin(), v.end(), iv); };
  for (auto [c, many, med, few] : {std::tuple{10, 3, 4, 3}, {100, 33, 34, 33}, {3, 1, 1, 1}}) {
    const auto s = interval_split(stats_of(c));
    EXPECT_EQ(count(s, Interval::kMany), many);
    EXPECT_EQ(count(s, Interval::kMed), med);
    EXPECT_EQ(count(s, Interval::kFew), few);
  }
  const auto two = interval_split(stats_of(2));
  EXPECT_EQ(count(two, Interval::kMany), 2);
  auto shuffled = stats_of(3);
  std::swap(shuffled.counts[0], shuffled.counts[2]);
  const auto s = interval_split(shuffled);
  EXPECT_EQ(s[2], Interval::kMany);
  EXPECT_EQ(s[0], Interval::kFew);
}

LabeledDataset blobs(const std::vector<long>& counts, std::uint64_t seed, double radius = 3.0) {
  return generate_gmm_dataset(ring_mixture(static_cast<int>(counts.size()), radius, 1.0), counts, seed);
}

TEST(Probe, SeparableAndShuffled) {
  const auto train = blobs({200, 200, 200}, 1, 8.0);
  const auto test = blobs({100, 100, 100}, 2, 8.0);
  const auto r = linear_probe(train, test);
  EXPECT_GT(r.accuracy, 0.99);
  EXPECT_GT(r.macro_recall, 0.99);

  auto noisy = train;
  Rng rng = make_rng(3);
  std::shuffle(noisy.labels.begin(), noisy.labels.end(), rng);
  EXPECT_LT(linear_probe(noisy, test).accuracy, 0.5);
}

TEST(Probe, AbsentClassIsNeverPredicted) {
  auto train = blobs({200, 200, 1}, 1, 8.0);
  // drop class 2 from training
  LabeledDataset t;
  t.samples = Points(2);
  t.num_classes = 3;
  for (std::size_t i = 0; i < train.size(); ++i) {
    if (train.labels[i] == 2) continue;
    t.samples.push_back(train.samples.row(i));
    t.labels.push_back(train.labels[i]);
  }
  const auto r = linear_probe(t, blobs({50, 50, 50}, 2, 8.0));
  ASSERT_EQ(r.absent_classes, std::vector<int>{2});
  EXPECT_EQ(r.class_recall[2], 0.0);
  EXPECT_LE(r.accuracy, 2.0 / 3.0 + 1e-12);
}

TEST(Probe, TailAugmentationImprovesTailRecall) {
  const auto mix = ring_mixture(2, 1.0, 1.0);
  const std::vector<long> imbalanced{500, 5}, extra{0, 300}, balanced{300, 300};
  const auto train = generate_gmm_dataset(mix, imbalanced, 1);
  auto augmented = train;
  const auto more = generate_gmm_dataset(mix, extra, 2);
  augmented.samples.values.insert(augmented.samples.values.end(), more.samples.values.begin(),
                                  more.samples.values.end());
  augmented.labels.insert(augmented.labels.end(), more.labels.begin(), more.labels.end());
  const auto test = generate_gmm_dataset(mix, balanced, 3);
  EXPECT_GT(linear_probe(augmented, test).class_recall[1], linear_probe(train, test).class_recall[1] + 0.2);
}

TEST(Report, WritersEmitExpectedKeys) {
  const auto mix = ring_mixture(3, 3.0, 1.0);
  const std::vector<long> counts{60, 40, 20};
  const auto real = generate_gmm_dataset(mix, counts, 1);
  const auto gen = generate_gmm_dataset(mix, counts, 2);
  MetricsConfig cfg;
  cfg.cluster_factor = 2;
  cfg.prd_runs = 2;
  const auto rep = evaluate_generation(real, gen, &mix, cfg);
  EXPECT_EQ(rep.frechet_per_class.size(), 3u);
  EXPECT_EQ(rep.intervals.size(), 3u);
  EXPECT_EQ(rep.overlap.size(), 3u);

  const auto dir = fs::temp_directory_path() / "ovl_metrics_report";
  fs::create_directories(dir);
  write_report_csv(dir / "report.csv", rep);
  write_overlap_csv(dir / "overlap.csv", rep.overlap);
  std::ifstream in(dir / "report.csv");
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  EXPECT_EQ(text.rfind("key,value\nfrechet_distance,", 0), 0u);
  for (const char* key : {"frechet_distance_class_2,", "precision,", "recall,", "f_8,", "f_1_8,", "overlap_2_1,",
                          "frechet_distance_few,", "overlap_off_diagonal_many,"}) {
    EXPECT_NE(text.find(std::string("\n") + key), std::string::npos) << key;
  }
  std::ifstream ov(dir / "overlap.csv");
  std::string header;
  std::getline(ov, header);
  EXPECT_EQ(header, "class,0,1,2");
  fs::remove_all(dir);
  cfg.knn_k = 0;
  EXPECT_THROW(evaluate_generation(real, gen, &mix, cfg), InvalidArgument);
}

}  // namespace
}  // namespace ovl
