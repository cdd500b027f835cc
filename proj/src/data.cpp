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

#include "ovl/data.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace ovl {

std::vector<long> longtail_counts(const ImbalanceSpec& spec) {
  require(spec.num_classes >= 2, "longtail_counts: need at least two classes");
  require(spec.n_max >= 1, "longtail_counts: n_max must be >= 1");
  require(spec.imb > 0.0 && spec.imb <= 1.0, "longtail_counts: imb must lie in (0, 1]");
  std::vector<long> counts(static_cast<std::size_t>(spec.num_classes));
  const double denom = static_cast<double>(spec.num_classes - 1);
  for (int i = 0; i < spec.num_classes; ++i) {
    const double n = static_cast<double>(spec.n_max) * std::pow(spec.imb, static_cast<double>(i) / denom);
    counts[static_cast<std::size_t>(i)] = std::max(1L, std::lround(n));
  }
  return counts;
}

void ToyMixtureSpec::validate() const {
  require(dim >= 1, "mixture: dim must be >= 1");
  const std::size_t k = weights.size();
  require(k >= 1, "mixture: need at least one component");
  require(means.size() == k && scales.size() == k, "mixture: weights, means and scales differ in length");
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    require(weights[i] >= 0.0, "mixture: negative weight");
    require(scales[i] > 0.0 && std::isfinite(scales[i]), "mixture: scales must be > 0");
    require(means[i].size() == static_cast<std::size_t>(dim), "mixture: mean has wrong dimension");
    total += weights[i];
  }
  require(std::abs(total - 1.0) <= 1e-12, "mixture: weights must sum to 1");
}

double ToyMixtureSpec::log_joint(int k, std::span<const double> x) const {
  const auto ks = static_cast<std::size_t>(k);
  const double s2 = scales[ks] * scales[ks];
  const double d2 = squared_distance(x, means[ks]);
  const double log_norm = -0.5 * static_cast<double>(dim) * std::log(2.0 * std::numbers::pi * s2);
  return std::log(weights[ks]) + log_norm - 0.5 * d2 / s2;
}

int ToyMixtureSpec::bayes_class(std::span<const double> x) const {
  require(x.size() == static_cast<std::size_t>(dim), "bayes_class: dimension mismatch");
  int best = 0;
  double best_val = log_joint(0, x);
  for (int k = 1; k < num_classes(); ++k) {
    const double v = log_joint(k, x);
    if (v > best_val) {
      best_val = v;
      best = k;
    }
  }
  return best;
}

ToyMixtureSpec ring_mixture(int num_classes, double radius, double scale, std::vector<double> weights) {
  require(num_classes >= 1, "ring_mixture: need at least one class");
  ToyMixtureSpec spec;
  spec.dim = 2;
  if (weights.empty()) weights.assign(static_cast<std::size_t>(num_classes), 1.0 / num_classes);
  spec.weights = std::move(weights);
  for (int k = 0; k < num_classes; ++k) {
    const double angle = 2.0 * std::numbers::pi * k / num_classes;
    spec.means.push_back({radius * std::cos(angle), radius * std::sin(angle)});
    spec.scales.push_back(scale);
  }
  spec.validate();
  return spec;
}

std::vector<double> weights_from_counts(std::span<const long> counts) {
  long total = 0;
  for (long c : counts) total += c;
  require(total > 0, "weights_from_counts: empty counts");
  std::vector<double> w;
  w.reserve(counts.size());
  for (long c : counts) w.push_back(static_cast<double>(c) / static_cast<double>(total));
  return w;
}

void LabeledDataset::validate() const {
  require(samples.size() == labels.size(), "dataset: samples and labels differ in length");
  for (int c : labels) require(c >= 0 && c < num_classes, "dataset: label out of range");
}

LabeledDataset generate_gmm_dataset(const ToyMixtureSpec& spec, std::span<const long> counts, std::uint64_t seed) {
  spec.validate();
  require(counts.size() == spec.means.size(), "generate_gmm_dataset: counts length differs from component count");
  LabeledDataset ds;
  ds.num_classes = spec.num_classes();
  ds.samples = Points(static_cast<std::size_t>(spec.dim));
  long total = 0;
  for (long c : counts) {
    require(c >= 0, "generate_gmm_dataset: negative count");
    total += c;
  }
  ds.samples.reserve(static_cast<std::size_t>(total));
  ds.labels.reserve(static_cast<std::size_t>(total));

  Rng rng = make_rng(seed, {0x676d6dULL});
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> x(static_cast<std::size_t>(spec.dim));
  for (std::size_t k = 0; k < counts.size(); ++k) {
    for (long n = 0; n < counts[k]; ++n) {
      for (std::size_t j = 0; j < x.size(); ++j) x[j] = spec.means[k][j] + spec.scales[k] * normal(rng);
      ds.samples.push_back(x);
      ds.labels.push_back(static_cast<int>(k));
    }
  }
  std::ostringstream prov;
  prov << "gmm(dim=" << spec.dim << ",classes=" << spec.num_classes() << ",seed=" << seed << ")";
  ds.provenance = prov.str();
  return ds;
}

namespace {

// '#' = ink. One glyph per class.
constexpr std::array<std::array<const char*, kRasterSide>, kRasterClasses> kGlyphs = {{
    {"..####..", ".#....#.", "#......#", "#......#", "#......#", "#......#", ".#....#.", "..####.."},
    {"...##...", "..###...", ".#.##...", "...##...", "...##...", "...##...", "...##...", ".######."},
    {".####...", "#....#..", ".....#..", "....#...", "...#....", "..#.....", ".#......", "######.."},
    {"#######.", "......#.", ".....#..", "...###..", "......#.", "......#.", "#.....#.", ".#####.."},
    {"....##..", "...#.#..", "..#..#..", ".#...#..", "#######.", ".....#..", ".....#..", ".....#.."},
    {"#######.", "#.......", "#.......", "######..", "......#.", "......#.", "#.....#.", ".#####.."},
    {"########", "#......#", "#......#", "#......#", "#......#", "#......#", "#......#", "########"},
    {"#......#", ".#....#.", "..#..#..", "...##...", "...##...", "..#..#..", ".#....#.", "#......#"},
    {"...##...", "...##...", "...##...", "########", "########", "...##...", "...##...", "...##..."},
    {"########", "........", "########", "........", "########", "........", "########", "........"},
}};

}  // namespace

std::vector<double> raster_template(int cls) {
  require(cls >= 0 && cls < kRasterClasses, "raster_template: class out of range");
  std::vector<double> out(kRasterSide * kRasterSide);
  const auto& glyph = kGlyphs[static_cast<std::size_t>(cls)];
  for (int r = 0; r < kRasterSide; ++r) {
    for (int c = 0; c < kRasterSide; ++c) {
      out[static_cast<std::size_t>(r * kRasterSide + c)] = glyph[static_cast<std::size_t>(r)][c] == '#' ? 1.0 : -1.0;
    }
  }
  return out;
}

ToyMixtureSpec raster_mixture(std::span<const long> counts, double noise) {
  require(!counts.empty() && counts.size() <= static_cast<std::size_t>(kRasterClasses),
          "raster data: between 1 and 10 classes");
  require(noise > 0.0, "raster data: noise must be > 0");
  ToyMixtureSpec spec;
  spec.dim = kRasterSide * kRasterSide;
  spec.weights = weights_from_counts(counts);
  for (std::size_t k = 0; k < counts.size(); ++k) {
    spec.means.push_back(raster_template(static_cast<int>(k)));
    spec.scales.push_back(noise);
  }
  return spec;
}

LabeledDataset generate_raster_dataset(std::span<const long> counts, double noise, std::uint64_t seed) {
  LabeledDataset ds = generate_gmm_dataset(raster_mixture(counts, noise), counts, seed);
  ds.provenance = "raster(classes=" + std::to_string(counts.size()) + ",seed=" + std::to_string(seed) + ")";
  return ds;
}

DatasetStats class_stats(const LabeledDataset& ds) {
  require(!ds.empty(), "class_stats: empty dataset");
  ds.validate();
  DatasetStats st;
  st.total = static_cast<long>(ds.size());
  st.counts.assign(static_cast<std::size_t>(ds.num_classes), 0);
  for (int c : ds.labels) ++st.counts[static_cast<std::size_t>(c)];
  st.weights.reserve(st.counts.size());
  for (long n : st.counts) st.weights.push_back(static_cast<double>(n) / static_cast<double>(st.total));
  return st;
}

LabeledDataset resample_uniform(const LabeledDataset& ds, std::size_t total, std::uint64_t seed) {
  ds.validate();
  std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(ds.num_classes));
  for (std::size_t i = 0; i < ds.size(); ++i) members[static_cast<std::size_t>(ds.labels[i])].push_back(i);
  for (std::size_t c = 0; c < members.size(); ++c) {
    require(!members[c].empty(), "resample_uniform: class " + std::to_string(c) + " has no samples");
  }
  LabeledDataset out;
  out.num_classes = ds.num_classes;
  out.samples = Points(ds.dim());
  out.samples.reserve(total);
  out.labels.reserve(total);
  out.provenance = ds.provenance + "|resample_uniform(seed=" + std::to_string(seed) + ")";
  Rng rng = make_rng(seed, {0x7273ULL});
  std::uniform_int_distribution<int> pick_class(0, ds.num_classes - 1);
  for (std::size_t n = 0; n < total; ++n) {
    const int c = pick_class(rng);
    const auto& m = members[static_cast<std::size_t>(c)];
    std::uniform_int_distribution<std::size_t> pick(0, m.size() - 1);
    const std::size_t src = m[pick(rng)];
    out.samples.push_back(ds.samples.row(src));
    out.labels.push_back(c);
  }
  return out;
}

Points class_samples(const LabeledDataset& ds, int cls) {
  Points out(ds.dim());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (ds.labels[i] == cls) out.push_back(ds.samples.row(i));
  }
  return out;
}

void write_dataset_csv(std::ostream& os, const LabeledDataset& ds) {
  const std::size_t d = ds.dim();
  os << "dim,label";
  for (std::size_t j = 0; j < d; ++j) os << ",x" << j;
  os << '\n';
  for (std::size_t i = 0; i < ds.size(); ++i) {
    os << d << ',' << ds.labels[i];
    for (double v : ds.samples.row(i)) os << ',' << format_double(v);
    os << '\n';
  }
}

void write_dataset_csv(const std::filesystem::path& path, const LabeledDataset& ds) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_dataset_csv(os, ds);
}

namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
T parse_number(std::string_view s, const std::string& where) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw InvalidArgument(where + ": cannot parse '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

LabeledDataset read_dataset_csv(const std::filesystem::path& path, int num_classes) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InvalidArgument("cannot open " + path.string());
  std::string line;
  if (!std::getline(is, line)) throw InvalidArgument(path.string() + ": missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto header = split_commas(line);
  require(header.size() >= 2 && header[0] == "dim" && header[1] == "label", path.string() + ": bad header");
  const std::size_t d = header.size() - 2;
  LabeledDataset ds;
  ds.samples = Points(d);
  ds.provenance = "csv(" + path.filename().string() + ")";
  std::vector<double> x(d);
  std::size_t lineno = 1;
  int max_label = -1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(lineno);
    auto cells = split_commas(line);
    require(cells.size() == d + 2, where + ": wrong column count");
    require(parse_number<std::size_t>(cells[0], where) == d, where + ": dim column disagrees with header");
    const int label = parse_number<int>(cells[1], where);
    require(label >= 0, where + ": negative label");
    for (std::size_t j = 0; j < d; ++j) x[j] = parse_number<double>(cells[j + 2], where);
    ds.samples.push_back(x);
    ds.labels.push_back(label);
    max_label = std::max(max_label, label);
  }
  ds.num_classes = num_classes > 0 ? num_classes : max_label + 1;
  ds.validate();
  return ds;
}

void write_raster_pgm(const std::filesystem::path& path, const Points& samples, int columns) {
  require(samples.dim == static_cast<std::size_t>(kRasterSide * kRasterSide), "write_raster_pgm: samples are not 8x8");
  require(columns >= 1, "write_raster_pgm: columns must be >= 1");
  const std::size_t n = samples.size();
  const std::size_t cols = static_cast<std::size_t>(columns);
  const std::size_t rows = std::max<std::size_t>(1, (n + cols - 1) / cols);
  const std::size_t tile = kRasterSide + 1;
  const std::size_t width = cols * tile;
  const std::size_t height = rows * tile;
  std::vector<unsigned char> img(width * height, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t oy = (i / cols) * tile;
    const std::size_t ox = (i % cols) * tile;
    auto r = samples.row(i);
    for (std::size_t y = 0; y < kRasterSide; ++y) {
      for (std::size_t x = 0; x < kRasterSide; ++x) {
        const double v = std::clamp((r[y * kRasterSide + x] + 1.0) * 0.5, 0.0, 1.0);
        img[(oy + y) * width + ox + x] = static_cast<unsigned char>(std::lround(v * 255.0));
      }
    }
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os << "P5\n" << width << ' ' << height << "\n255\n";
  os.write(reinterpret_cast<const char*>(img.data()), static_cast<std::streamsize>(img.size()));
}

}  // namespace ovl
