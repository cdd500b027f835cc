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

#include "ovl/metrics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <numeric>

namespace ovl {

namespace {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

Matrix to_matrix(std::span<const double> cov, std::size_t d) {
  Matrix m(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t c = 0; c < d; ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = cov[r * d + c];
  }
  return m;
}

// Symmetric PSD square root; rejects matrices with clearly negative spectrum.
Matrix psd_sqrt(const Matrix& m, const char* name) {
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  require((m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-9 * scale, std::string(name) + " is not symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  const Vector& ev = es.eigenvalues();
  require(ev.minCoeff() >= -1e-9 * scale, std::string(name) + " is not positive semi-definite");
  return es.eigenvectors() * ev.cwiseMax(0.0).cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

GaussianMoments sample_moments(const Points& pts) {
  const std::size_t n = pts.size();
  const std::size_t d = pts.dim;
  require(n >= 2, "sample_moments: need at least two samples");
  GaussianMoments g;
  g.mean.assign(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    auto r = pts.row(i);
    for (std::size_t k = 0; k < d; ++k) g.mean[k] += r[k];
  }
  for (double& v : g.mean) v /= static_cast<double>(n);
  g.cov.assign(d * d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    auto r = pts.row(i);
    for (std::size_t a = 0; a < d; ++a) {
      const double da = r[a] - g.mean[a];
      for (std::size_t b = a; b < d; ++b) g.cov[a * d + b] += da * (r[b] - g.mean[b]);
    }
  }
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = a; b < d; ++b) {
      g.cov[a * d + b] /= static_cast<double>(n - 1);
      g.cov[b * d + a] = g.cov[a * d + b];
    }
  }
  return g;
}

double frechet_gaussian(std::span<const double> mu1, std::span<const double> cov1, std::span<const double> mu2,
                        std::span<const double> cov2) {
  const std::size_t d = mu1.size();
  require(d >= 1 && mu2.size() == d, "frechet_gaussian: mean dimension mismatch");
  require(cov1.size() == d * d && cov2.size() == d * d, "frechet_gaussian: covariance shape mismatch");
  const Matrix c1 = to_matrix(cov1, d);
  const Matrix c2 = to_matrix(cov2, d);
  const Matrix r1 = psd_sqrt(c1, "cov1");
  psd_sqrt(c2, "cov2");
  Matrix inner = r1 * c2 * r1;
  inner = 0.5 * (inner + inner.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(inner, Eigen::EigenvaluesOnly);
  const double tr_root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  double mean_term = 0.0;
  for (std::size_t k = 0; k < d; ++k) mean_term += (mu1[k] - mu2[k]) * (mu1[k] - mu2[k]);
  const double value = mean_term + c1.trace() + c2.trace() - 2.0 * tr_root;
  return std::max(0.0, value);
}

double frechet_gaussian(const GaussianMoments& a, const GaussianMoments& b) {
  return frechet_gaussian(a.mean, a.cov, b.mean, b.cov);
}

double frechet_distance(const Points& a, const Points& b) {
  return frechet_gaussian(sample_moments(a), sample_moments(b));
}

namespace {

// Squared distance from each point to its k-th nearest neighbour in the same set.
std::vector<double> kth_neighbour_radii(const Points& pts, int k) {
  const std::size_t n = pts.size();
  std::vector<double> radii(n);
  std::vector<double> dist(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t m = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) dist[m++] = squared_distance(pts.row(i), pts.row(j));
    }
    std::nth_element(dist.begin(), dist.begin() + (k - 1), dist.end());
    radii[i] = dist[static_cast<std::size_t>(k - 1)];
  }
  return radii;
}

double coverage(const Points& ref, const std::vector<double>& radii, const Points& query) {
  std::size_t inside = 0;
  for (std::size_t q = 0; q < query.size(); ++q) {
    for (std::size_t r = 0; r < ref.size(); ++r) {
      if (squared_distance(query.row(q), ref.row(r)) <= radii[r]) {
        ++inside;
        break;
      }
    }
  }
  return static_cast<double>(inside) / static_cast<double>(query.size());
}

}  // namespace

PrecisionRecall knn_precision_recall(const Points& real, const Points& gen, int k) {
  require(k >= 1, "knn_precision_recall: k must be >= 1");
  require(real.dim == gen.dim, "knn_precision_recall: dimension mismatch");
  require(real.size() > static_cast<std::size_t>(k) && gen.size() > static_cast<std::size_t>(k),
          "knn_precision_recall: both sets need more than k points");
  PrecisionRecall pr;
  pr.precision = coverage(real, kth_neighbour_radii(real, k), gen);
  pr.recall = coverage(gen, kth_neighbour_radii(gen, k), real);
  return pr;
}

double f_beta(double precision, double recall, double beta) {
  require(beta > 0.0, "f_beta: beta must be > 0");
  if (precision <= 0.0 && recall <= 0.0) return 0.0;
  const double b2 = beta * beta;
  return (1.0 + b2) * precision * recall / (b2 * precision + recall);
}

PrdCurve prd_from_histograms(std::span<const double> ref_hist, std::span<const double> eval_hist, int num_angles) {
  require(ref_hist.size() == eval_hist.size() && !ref_hist.empty(), "prd: histogram shape mismatch");
  require(num_angles >= 3, "prd: need at least 3 angles");
  const double ref_total = std::accumulate(ref_hist.begin(), ref_hist.end(), 0.0);
  const double eval_total = std::accumulate(eval_hist.begin(), eval_hist.end(), 0.0);
  require(ref_total > 0.0 && eval_total > 0.0, "prd: empty histogram");

  constexpr double kEpsilon = 1e-10;
  std::vector<double> slopes;
  slopes.reserve(static_cast<std::size_t>(num_angles) + 1);
  const double lo = kEpsilon;
  const double hi = std::numbers::pi / 2.0 - kEpsilon;
  for (int a = 0; a < num_angles; ++a) slopes.push_back(std::tan(lo + (hi - lo) * a / (num_angles - 1)));
  slopes.push_back(1.0);

  PrdCurve curve;
  for (double slope : slopes) {
    double p = 0.0;
    for (std::size_t b = 0; b < ref_hist.size(); ++b) {
      p += std::min(ref_hist[b] / ref_total * slope, eval_hist[b] / eval_total);
    }
    curve.precision.push_back(std::clamp(p, 0.0, 1.0));
    curve.recall.push_back(std::clamp(p / slope, 0.0, 1.0));
  }
  return curve;
}

FBetaPair max_f_beta(const PrdCurve& curve, double beta) {
  FBetaPair out;
  for (std::size_t i = 0; i < curve.precision.size(); ++i) {
    out.f_beta = std::max(out.f_beta, f_beta(curve.precision[i], curve.recall[i], beta));
    out.f_inv_beta = std::max(out.f_inv_beta, f_beta(curve.precision[i], curve.recall[i], 1.0 / beta));
  }
  return out;
}

KMeansResult kmeans(const Points& pts, int clusters, int iterations, std::uint64_t seed) {
  const std::size_t n = pts.size();
  require(n >= 1, "kmeans: no points");
  require(clusters >= 1, "kmeans: need at least one cluster");
  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(clusters), n);
  KMeansResult res;
  res.centers = Points(pts.dim);

  Rng rng = make_rng(seed, {0x6b6dULL});
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  res.centers.push_back(pts.row(pick(rng)));
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  while (res.centers.size() < k) {
    const auto last = res.centers.row(res.centers.size() - 1);
    std::size_t best = 0;
    double best_d = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], squared_distance(pts.row(i), last));
      if (nearest[i] > best_d) {
        best_d = nearest[i];
        best = i;
      }
    }
    res.centers.push_back(pts.row(best));
  }

  res.assignment.assign(n, 0);
  std::vector<double> sums(k * pts.dim);
  std::vector<std::size_t> counts(k);
  for (int it = 0; it <= iterations; ++it) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        const double d = squared_distance(pts.row(i), res.centers.row(c));
        if (d < best_d) {
          best_d = d;
          best = static_cast<int>(c);
        }
      }
      if (best != res.assignment[i]) changed = true;
      res.assignment[i] = best;
    }
    if (it == iterations || (it > 0 && !changed)) break;
    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = static_cast<std::size_t>(res.assignment[i]);
      ++counts[c];
      auto r = pts.row(i);
      for (std::size_t j = 0; j < pts.dim; ++j) sums[c * pts.dim + j] += r[j];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;  // empty cluster keeps its centre
      auto ctr = res.centers.row(c);
      for (std::size_t j = 0; j < pts.dim; ++j) ctr[j] = sums[c * pts.dim + j] / static_cast<double>(counts[c]);
    }
  }
  return res;
}

FBetaPair prd_f_beta(const Points& real, const Points& gen, int clusters, double beta, std::uint64_t seed, int runs,
                     int iterations) {
  require(real.dim == gen.dim, "prd_f_beta: dimension mismatch");
  require(!real.empty() && !gen.empty(), "prd_f_beta: empty sample set");
  require(runs >= 1, "prd_f_beta: runs must be >= 1");
  Points all(real.dim);
  all.reserve(real.size() + gen.size());
  for (std::size_t i = 0; i < real.size(); ++i) all.push_back(real.row(i));
  for (std::size_t i = 0; i < gen.size(); ++i) all.push_back(gen.row(i));

  PrdCurve mean_curve;
  for (int run = 0; run < runs; ++run) {
    const KMeansResult km = kmeans(all, clusters, iterations, seed + static_cast<std::uint64_t>(run));
    const std::size_t k = km.centers.size();
    std::vector<double> ref(k, 0.0), eval(k, 0.0);
    for (std::size_t i = 0; i < all.size(); ++i) {
      auto& h = i < real.size() ? ref : eval;
      h[static_cast<std::size_t>(km.assignment[i])] += 1.0;
    }
    const PrdCurve c = prd_from_histograms(ref, eval);
    if (mean_curve.precision.empty()) {
      mean_curve = c;
    } else {
      for (std::size_t i = 0; i < c.precision.size(); ++i) {
        mean_curve.precision[i] += c.precision[i];
        mean_curve.recall[i] += c.recall[i];
      }
    }
  }
  for (std::size_t i = 0; i < mean_curve.precision.size(); ++i) {
    mean_curve.precision[i] /= runs;
    mean_curve.recall[i] /= runs;
  }
  return max_f_beta(mean_curve, beta);
}

OverlapMatrix overlap_rate(const std::vector<Points>& gen_per_class, const ToyMixtureSpec& mixture) {
  mixture.validate();
  const std::size_t c = static_cast<std::size_t>(mixture.num_classes());
  require(gen_per_class.size() == c, "overlap_rate: one sample set per mixture component expected");
  OverlapMatrix o(c, std::vector<double>(c, 0.0));
  for (std::size_t k = 0; k < c; ++k) {
    const Points& pts = gen_per_class[k];
    require(!pts.empty(), "overlap_rate: class " + std::to_string(k) + " has no samples");
    for (std::size_t i = 0; i < pts.size(); ++i) o[k][static_cast<std::size_t>(mixture.bayes_class(pts.row(i)))] += 1.0;
    for (double& v : o[k]) v /= static_cast<double>(pts.size());
  }
  return o;
}

std::string_view to_string(Interval iv) {
  switch (iv) {
    case Interval::kMany: return "many";
    case Interval::kMed: return "med";
    case Interval::kFew: return "few";
  }
  return "?";
}

std::vector<Interval> interval_split(const DatasetStats& stats) {
  const int c = stats.num_classes();
  std::vector<Interval> out(static_cast<std::size_t>(c), Interval::kMany);
  if (c < 3) return out;
  std::vector<int> order(static_cast<std::size_t>(c));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return stats.counts[static_cast<std::size_t>(a)] > stats.counts[static_cast<std::size_t>(b)];
  });
  const int third = c / 3;
  for (int r = 0; r < c; ++r) {
    Interval iv = Interval::kMed;
    if (r < third) iv = Interval::kMany;
    if (r >= c - third) iv = Interval::kFew;
    out[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])] = iv;
  }
  return out;
}

ProbeResult linear_probe(const LabeledDataset& train, const LabeledDataset& test, const ProbeConfig& cfg) {
  require(!train.empty() && !test.empty(), "linear_probe: empty dataset");
  require(train.dim() == test.dim(), "linear_probe: dimension mismatch");
  train.validate();
  test.validate();
  const int c = std::max(train.num_classes, test.num_classes);
  const std::size_t d = train.dim();
  const std::size_t n = train.size();

  std::vector<double> mean(d, 0.0), sd(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    auto r = train.samples.row(i);
    for (std::size_t k = 0; k < d; ++k) mean[k] += r[k];
  }
  for (double& v : mean) v /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto r = train.samples.row(i);
    for (std::size_t k = 0; k < d; ++k) sd[k] += (r[k] - mean[k]) * (r[k] - mean[k]);
  }
  for (double& v : sd) v = std::sqrt(v / static_cast<double>(n));
  for (double& v : sd) v = v > 1e-12 ? v : 1.0;

  Matrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d + 1));
  for (std::size_t i = 0; i < n; ++i) {
    auto r = train.samples.row(i);
    for (std::size_t k = 0; k < d; ++k) x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = (r[k] - mean[k]) / sd[k];
    x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) = 1.0;
  }
  Matrix y = Matrix::Zero(static_cast<Eigen::Index>(n), c);
  std::vector<bool> present(static_cast<std::size_t>(c), false);
  for (std::size_t i = 0; i < n; ++i) {
    y(static_cast<Eigen::Index>(i), train.labels[i]) = 1.0;
    present[static_cast<std::size_t>(train.labels[i])] = true;
  }

  ProbeResult res;
  for (int k = 0; k < c; ++k) {
    if (!present[static_cast<std::size_t>(k)]) res.absent_classes.push_back(k);
  }
  const double neg_inf = -std::numeric_limits<double>::infinity();
  auto mask_absent = [&](Matrix& logits) {
    for (int k : res.absent_classes) logits.col(k).setConstant(neg_inf);
  };

  Matrix w = Matrix::Zero(static_cast<Eigen::Index>(d + 1), c);
  for (int it = 0; it < cfg.iterations; ++it) {
    Matrix logits = x * w;
    mask_absent(logits);
    Vector row_max = logits.rowwise().maxCoeff();
    Matrix p = (logits.colwise() - row_max).array().exp().matrix();
    Vector z = p.rowwise().sum();
    p = p.array().colwise() / z.array();
    Matrix g = x.transpose() * (p - y) / static_cast<double>(n);
    g.topRows(static_cast<Eigen::Index>(d)) += cfg.l2 * w.topRows(static_cast<Eigen::Index>(d));
    for (int k : res.absent_classes) g.col(k).setZero();
    w -= cfg.learning_rate * g;
  }

  std::vector<double> tp(static_cast<std::size_t>(c), 0.0), predicted(static_cast<std::size_t>(c), 0.0),
      actual(static_cast<std::size_t>(c), 0.0);
  std::size_t correct = 0;
  Vector feat(static_cast<Eigen::Index>(d + 1));
  for (std::size_t i = 0; i < test.size(); ++i) {
    auto r = test.samples.row(i);
    for (std::size_t k = 0; k < d; ++k) feat(static_cast<Eigen::Index>(k)) = (r[k] - mean[k]) / sd[k];
    feat(static_cast<Eigen::Index>(d)) = 1.0;
    Vector logits = w.transpose() * feat;
    int best = -1;
    for (int k = 0; k < c; ++k) {
      if (!present[static_cast<std::size_t>(k)]) continue;
      if (best < 0 || logits(k) > logits(best)) best = k;
    }
    const int truth = test.labels[i];
    actual[static_cast<std::size_t>(truth)] += 1.0;
    predicted[static_cast<std::size_t>(best)] += 1.0;
    if (best == truth) {
      ++correct;
      tp[static_cast<std::size_t>(truth)] += 1.0;
    }
  }
  res.accuracy = static_cast<double>(correct) / static_cast<double>(test.size());
  int counted = 0;
  for (int k = 0; k < c; ++k) {
    const auto ks = static_cast<std::size_t>(k);
    const double prec = predicted[ks] > 0.0 ? tp[ks] / predicted[ks] : 0.0;
    const double rec = actual[ks] > 0.0 ? tp[ks] / actual[ks] : 0.0;
    res.class_precision.push_back(prec);
    res.class_recall.push_back(rec);
    if (actual[ks] > 0.0) {
      res.macro_precision += prec;
      res.macro_recall += rec;
      ++counted;
    }
  }
  if (counted > 0) {
    res.macro_precision /= counted;
    res.macro_recall /= counted;
  }
  return res;
}

void MetricsConfig::validate() const {
  require(knn_k >= 1, "metrics: knn_k must be >= 1");
  require(beta > 0.0, "metrics: beta must be > 0");
  require(cluster_factor >= 1, "metrics: cluster factor must be >= 1");
  require(prd_runs >= 1, "metrics: prd_runs must be >= 1");
}

MetricsReport evaluate_generation(const LabeledDataset& real, const LabeledDataset& gen,
                                  const ToyMixtureSpec* mixture, const MetricsConfig& cfg) {
  cfg.validate();
  require(real.dim() == gen.dim(), "evaluate_generation: dimension mismatch");
  const int c = real.num_classes;
  MetricsReport rep;
  rep.frechet_global = frechet_distance(real.samples, gen.samples);
  const auto pr = knn_precision_recall(real.samples, gen.samples, cfg.knn_k);
  rep.precision = pr.precision;
  rep.recall = pr.recall;
  const auto fb = prd_f_beta(real.samples, gen.samples, cfg.cluster_factor * c, cfg.beta, cfg.seed, cfg.prd_runs);
  rep.f_8 = fb.f_beta;
  rep.f_1_8 = fb.f_inv_beta;

  std::vector<Points> real_by_class, gen_by_class;
  for (int k = 0; k < c; ++k) {
    real_by_class.push_back(class_samples(real, k));
    gen_by_class.push_back(class_samples(gen, k));
    const bool ok = real_by_class.back().size() >= 2 && gen_by_class.back().size() >= 2;
    rep.frechet_per_class.push_back(ok ? frechet_distance(real_by_class.back(), gen_by_class.back())
                                       : std::numeric_limits<double>::quiet_NaN());
  }
  if (mixture) rep.overlap = overlap_rate(gen_by_class, *mixture);

  const auto split = interval_split(class_stats(real));
  for (Interval iv : {Interval::kMany, Interval::kMed, Interval::kFew}) {
    IntervalSummary s;
    s.interval = iv;
    Points rp(real.dim()), gp(real.dim());
    for (int k = 0; k < c; ++k) {
      if (split[static_cast<std::size_t>(k)] != iv) continue;
      s.classes.push_back(k);
      rp.values.insert(rp.values.end(), real_by_class[static_cast<std::size_t>(k)].values.begin(),
                       real_by_class[static_cast<std::size_t>(k)].values.end());
      gp.values.insert(gp.values.end(), gen_by_class[static_cast<std::size_t>(k)].values.begin(),
                       gen_by_class[static_cast<std::size_t>(k)].values.end());
      if (!rep.overlap.empty()) s.mean_overlap_off_diagonal += 1.0 - rep.overlap[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)];
    }
    if (s.classes.empty()) continue;
    s.mean_overlap_off_diagonal /= static_cast<double>(s.classes.size());
    s.frechet = (rp.size() >= 2 && gp.size() >= 2) ? frechet_distance(rp, gp) : std::numeric_limits<double>::quiet_NaN();
    rep.intervals.push_back(std::move(s));
  }
  return rep;
}

void write_report_csv(const std::filesystem::path& path, const MetricsReport& r) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os << "key,value\n";
  os << "frechet_distance," << format_double(r.frechet_global) << '\n';
  for (std::size_t k = 0; k < r.frechet_per_class.size(); ++k) {
    os << "frechet_distance_class_" << k << ',' << format_double(r.frechet_per_class[k]) << '\n';
  }
  os << "precision," << format_double(r.precision) << '\n';
  os << "recall," << format_double(r.recall) << '\n';
  os << "f_8," << format_double(r.f_8) << '\n';
  os << "f_1_8," << format_double(r.f_1_8) << '\n';
  for (std::size_t a = 0; a < r.overlap.size(); ++a) {
    for (std::size_t b = 0; b < r.overlap[a].size(); ++b) {
      os << "overlap_" << a << "_" << b << ',' << format_double(r.overlap[a][b]) << '\n';
    }
  }
  for (const auto& s : r.intervals) {
    os << "frechet_distance_" << to_string(s.interval) << ',' << format_double(s.frechet) << '\n';
    if (!r.overlap.empty()) {
      os << "overlap_off_diagonal_" << to_string(s.interval) << ',' << format_double(s.mean_overlap_off_diagonal)
         << '\n';
    }
  }
}

void write_overlap_csv(const std::filesystem::path& path, const OverlapMatrix& o) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os << "class";
  for (std::size_t k = 0; k < o.size(); ++k) os << ',' << k;
  os << '\n';
  for (std::size_t a = 0; a < o.size(); ++a) {
    os << a;
    for (double v : o[a]) os << ',' << format_double(v);
    os << '\n';
  }
}

}  // namespace ovl
