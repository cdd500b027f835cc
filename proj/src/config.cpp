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

#include "ovl/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace ovl {

namespace {

namespace pt = boost::property_tree;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  T v{};
  const std::string t = trim(text);
  const char* end = t.data() + t.size();
  auto [p, ec] = std::from_chars(t.data(), end, v);
  if (ec != std::errc() || p != end || t.empty()) {
    throw ConfigError("config key '" + key + "': cannot parse '" + text + "' as a number");
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ConfigError("config key '" + key + "': expected a boolean, got '" + text + "'");
}

template <class T>
std::vector<T> parse_list(const std::string& key, const std::string& text) {
  std::vector<T> out;
  for (const auto& item : split(text, ',')) out.push_back(parse_number<T>(key, item));
  return out;
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    if constexpr (std::is_floating_point_v<T>) {
      out += format_double(v[i]);
    } else {
      out += std::to_string(v[i]);
    }
  }
  return out;
}


struct Field {
  std::string name;  // section.key
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&)> set;
};

#define OVL_NUM_FIELD(NAME, MEMBER)                                                              \
  Field {                                                                                        \
    NAME, [](const ExperimentConfig& c) { return num_text(c.MEMBER); },                          \
        [](ExperimentConfig& c, const std::string& v) {                                          \
          c.MEMBER = parse_number<std::decay_t<decltype(c.MEMBER)>>(NAME, v);                    \
        }                                                                                        \
  }

template <class T>
std::string num_text(T v) {
  if constexpr (std::is_floating_point_v<T>) {
    return format_double(v);
  } else {
    return std::to_string(v);
  }
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      {"run.out_dir", [](const ExperimentConfig& c) { return c.out_dir.generic_string(); },
       [](ExperimentConfig& c, const std::string& v) { c.out_dir = trim(v); }},
      OVL_NUM_FIELD("run.seed", seed),

      {"data.kind", [](const ExperimentConfig& c) { return c.data.kind; },
       [](ExperimentConfig& c, const std::string& v) { c.data.kind = trim(v); }},
      {"data.counts", [](const ExperimentConfig& c) { return join(c.data.counts); },
       [](ExperimentConfig& c, const std::string& v) { c.data.counts = parse_list<long>("data.counts", v); }},
      OVL_NUM_FIELD("data.classes", data.classes),
      OVL_NUM_FIELD("data.n_max", data.n_max),
      OVL_NUM_FIELD("data.imb", data.imb),
      {"data.means",
       [](const ExperimentConfig& c) {
         std::string out;
         for (std::size_t i = 0; i < c.data.means.size(); ++i) {
           if (i) out += " | ";
           out += join(c.data.means[i]);
         }
         return out;
       },
       [](ExperimentConfig& c, const std::string& v) {
         c.data.means.clear();
         for (const auto& m : split(v, '|')) c.data.means.push_back(parse_list<double>("data.means", m));
       }},
      OVL_NUM_FIELD("data.radius", data.radius),
      OVL_NUM_FIELD("data.scale", data.scale),
      OVL_NUM_FIELD("data.noise", data.noise),
      {"data.path", [](const ExperimentConfig& c) { return c.data.path.generic_string(); },
       [](ExperimentConfig& c, const std::string& v) { c.data.path = trim(v); }},
      OVL_NUM_FIELD("data.resample", data.resample),

      OVL_NUM_FIELD("schedule.steps", schedule.steps),
      OVL_NUM_FIELD("schedule.beta1", schedule.beta1),
      OVL_NUM_FIELD("schedule.betaT", schedule.betaT),
      {"schedule.sigma_mode", [](const ExperimentConfig& c) { return std::string(to_string(c.schedule.sigma_mode)); },
       [](ExperimentConfig& c, const std::string& v) { c.schedule.sigma_mode = parse_sigma_mode(trim(v)); }},

      {"net.hidden", [](const ExperimentConfig& c) { return join(c.net.hidden); },
       [](ExperimentConfig& c, const std::string& v) { c.net.hidden = parse_list<int>("net.hidden", v); }},
      OVL_NUM_FIELD("net.time_features", net.time_features),
      OVL_NUM_FIELD("net.embed_dim", net.embed_dim),
      {"net.activation", [](const ExperimentConfig& c) { return std::string(to_string(c.net.activation)); },
       [](ExperimentConfig& c, const std::string& v) { c.net.activation = parse_activation(trim(v)); }},

      {"train.mode", [](const ExperimentConfig& c) { return std::string(to_string(c.train.mode)); },
       [](ExperimentConfig& c, const std::string& v) { c.train.mode = parse_loss_mode(trim(v)); }},
      OVL_NUM_FIELD("train.batch_size", train.batch_size),
      OVL_NUM_FIELD("train.steps", train.steps),
      OVL_NUM_FIELD("train.lr", train.lr),
      OVL_NUM_FIELD("train.warmup", train.warmup),
      OVL_NUM_FIELD("train.adam_beta1", train.adam_beta1),
      OVL_NUM_FIELD("train.adam_beta2", train.adam_beta2),
      OVL_NUM_FIELD("train.adam_eps", train.adam_eps),
      OVL_NUM_FIELD("train.cond_dropout", train.cond_dropout),
      {"train.pcl", [](const ExperimentConfig& c) { return std::string(to_string(c.train.pcl.kind)); },
       [](ExperimentConfig& c, const std::string& v) { c.train.pcl.kind = parse_pcl_kind(trim(v)); }},
      OVL_NUM_FIELD("train.margin", train.pcl.margin),
      {"train.tau_kind", [](const ExperimentConfig& c) { return std::string(to_string(c.train.tau.kind)); },
       [](ExperimentConfig& c, const std::string& v) { c.train.tau.kind = parse_tau_kind(trim(v)); }},
      OVL_NUM_FIELD("train.tau0", train.tau.tau0),
      OVL_NUM_FIELD("train.tau_temperature", train.tau.temperature),
      OVL_NUM_FIELD("train.log_every", train.log_every),
      OVL_NUM_FIELD("train.ckpt_every", train.ckpt_every),

      {"sample.omega", [](const ExperimentConfig& c) { return join(c.sample.omegas); },
       [](ExperimentConfig& c, const std::string& v) { c.sample.omegas = parse_list<double>("sample.omega", v); }},
      OVL_NUM_FIELD("sample.count", sample.count),
      {"sample.classes", [](const ExperimentConfig& c) { return join(c.sample.classes); },
       [](ExperimentConfig& c, const std::string& v) { c.sample.classes = parse_list<int>("sample.classes", v); }},
      {"sample.pgm", [](const ExperimentConfig& c) { return std::string(c.sample.pgm ? "true" : "false"); },
       [](ExperimentConfig& c, const std::string& v) { c.sample.pgm = parse_bool("sample.pgm", v); }},

      OVL_NUM_FIELD("metrics.knn_k", metrics.knn_k),
      OVL_NUM_FIELD("metrics.beta", metrics.beta),
      OVL_NUM_FIELD("metrics.cluster_factor", metrics.cluster_factor),
      OVL_NUM_FIELD("metrics.prd_runs", metrics.prd_runs),

      OVL_NUM_FIELD("landscape.pi1", landscape.pi1),
      OVL_NUM_FIELD("landscape.m1", landscape.m1),
      OVL_NUM_FIELD("landscape.m2", landscape.m2),
      OVL_NUM_FIELD("landscape.sigma", landscape.sigma),
      OVL_NUM_FIELD("landscape.lo", landscape.axis.lo),
      OVL_NUM_FIELD("landscape.hi", landscape.axis.hi),
      OVL_NUM_FIELD("landscape.step", landscape.axis.step),
      OVL_NUM_FIELD("landscape.tau", landscape.tau),
      OVL_NUM_FIELD("landscape.margin", landscape.margin),

      {"benchmark.seeds", [](const ExperimentConfig& c) { return join(c.benchmark.seeds); },
       [](ExperimentConfig& c, const std::string& v) {
         c.benchmark.seeds = parse_list<std::uint64_t>("benchmark.seeds", v);
       }},
      {"benchmark.modes",
       [](const ExperimentConfig& c) {
         std::string out;
         for (std::size_t i = 0; i < c.benchmark.modes.size(); ++i) {
           if (i) out += ',';
           out += to_string(c.benchmark.modes[i]);
         }
         return out;
       },
       [](ExperimentConfig& c, const std::string& v) {
         c.benchmark.modes.clear();
         for (const auto& m : split(v, ',')) c.benchmark.modes.push_back(parse_loss_mode(m));
       }},
      OVL_NUM_FIELD("benchmark.samples", benchmark.samples),
  };
  return table;
}

#undef OVL_NUM_FIELD

ExperimentConfig from_entries(const std::vector<std::pair<std::string, std::string>>& entries) {
  std::map<std::string, const Field*> by_name;
  for (const auto& f : fields()) by_name[f.name] = &f;

  ExperimentConfig cfg;
  std::set<std::string> seen;
  for (const auto& [name, value] : entries) {
    auto it = by_name.find(name);
    if (it == by_name.end()) throw ConfigError("unknown config key '" + name + "'");
    try {
      it->second->set(cfg, value);
    } catch (const InvalidArgument& e) {
      throw ConfigError("config key '" + name + "': " + e.what());
    }
    seen.insert(name);
  }
  // Without explicit endpoints the schedule rescales the 1000-step defaults.
  if (!seen.count("schedule.beta1") && !seen.count("schedule.betaT")) {
    cfg.schedule = ScheduleSpec::scaled(cfg.schedule.steps, cfg.schedule.sigma_mode);
  }
  try {
    cfg.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

}  // namespace

std::vector<long> DataConfig::class_counts() const {
  if (!counts.empty()) return counts;
  return longtail_counts({classes, n_max, imb});
}

void ExperimentConfig::validate() const {
  require(data.kind == "gmm" || data.kind == "raster" || data.kind == "csv",
          "data.kind must be gmm | raster | csv");
  if (data.kind == "csv") require(!data.path.empty(), "data.path is required for csv data");
  if (data.kind != "csv") {
    for (long n : data.class_counts()) require(n >= 1, "data.counts must be >= 1");
  }
  if (data.kind == "gmm") {
    require(data.scale > 0.0, "data.scale must be > 0");
    if (!data.means.empty()) {
      require(data.means.size() == data.class_counts().size(), "data.means needs one mean per class");
      for (const auto& m : data.means) require(m.size() == data.means[0].size(), "data.means differ in dimension");
    }
  }
  if (data.kind == "raster") {
    require(data.class_counts().size() <= static_cast<std::size_t>(kRasterClasses), "raster data has at most 10 classes");
    require(data.noise > 0.0, "data.noise must be > 0");
  }
  require(data.resample >= 0, "data.resample must be >= 0");
  require(schedule.steps >= 1, "schedule.steps must be >= 1");
  schedule.build();
  require(!net.hidden.empty(), "net.hidden needs at least one layer");
  for (int h : net.hidden) require(h >= 1, "net.hidden widths must be >= 1");
  require(net.embed_dim >= 1, "net.embed_dim must be >= 1");
  train.validate();
  for (double w : sample.omegas) require(std::isfinite(w), "sample.omega must be finite");
  require(!sample.omegas.empty(), "sample.omega needs at least one value");
  metrics.validate();
  landscape.axis.validate();
  require(landscape.tau >= 0.0, "landscape.tau must be >= 0");
  make_toy_spec(landscape.pi1, landscape.m1, landscape.m2, landscape.sigma);
  require(!benchmark.seeds.empty() && !benchmark.modes.empty(), "benchmark needs seeds and modes");
  require(benchmark.samples >= 2, "benchmark.samples must be >= 2");
}

ExperimentConfig parse_config(std::istream& in, const ConfigOverrides& overrides) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax error: ") + e.what());
  }
  std::vector<std::pair<std::string, std::string>> entries;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError("config key '" + section + "' is outside any section");
    for (const auto& [key, value] : body) entries.emplace_back(section + "." + key, value.data());
  }
  for (const auto& ov : overrides) entries.push_back(ov);
  // Later entries win; keep the last assignment of each key.
  std::vector<std::pair<std::string, std::string>> last;
  std::set<std::string> done;
  for (auto it = entries.rbegin(); it != entries.rend(); ++it) {
    if (done.insert(it->first).second) last.push_back(*it);
  }
  std::reverse(last.begin(), last.end());
  return from_entries(last);
}

ExperimentConfig load_config(const std::filesystem::path& path, const ConfigOverrides& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  return parse_config(in, overrides);
}

ExperimentConfig default_config(const ConfigOverrides& overrides) {
  std::istringstream empty;
  return parse_config(empty, overrides);
}

void write_config(std::ostream& os, const ExperimentConfig& cfg) {
  std::string section;
  for (const auto& f : fields()) {
    const auto dot = f.name.find('.');
    const std::string sec = f.name.substr(0, dot);
    if (sec != section) {
      if (!section.empty()) os << '\n';
      os << '[' << sec << "]\n";
      section = sec;
    }
    os << f.name.substr(dot + 1) << " = " << f.get(cfg) << '\n';
  }
}

void write_config(const std::filesystem::path& path, const ExperimentConfig& cfg) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_config(os, cfg);
}

std::optional<ToyMixtureSpec> build_mixture(const ExperimentConfig& cfg) {
  const auto counts = cfg.data.class_counts();
  if (cfg.data.kind == "raster") return raster_mixture(counts, cfg.data.noise);
  if (cfg.data.kind != "gmm") return std::nullopt;
  const int c = static_cast<int>(counts.size());
  auto weights = weights_from_counts(counts);
  if (cfg.data.means.empty()) return ring_mixture(c, cfg.data.radius, cfg.data.scale, weights);
  ToyMixtureSpec spec;
  spec.dim = static_cast<int>(cfg.data.means[0].size());
  spec.weights = std::move(weights);
  spec.means = cfg.data.means;
  spec.scales.assign(static_cast<std::size_t>(c), cfg.data.scale);
  spec.validate();
  return spec;
}

LabeledDataset build_dataset(const ExperimentConfig& cfg) {
  LabeledDataset ds;
  if (cfg.data.kind == "gmm") {
    ds = generate_gmm_dataset(*build_mixture(cfg), cfg.data.class_counts(), cfg.seed);
  } else if (cfg.data.kind == "raster") {
    ds = generate_raster_dataset(cfg.data.class_counts(), cfg.data.noise, cfg.seed);
  } else {
    ds = read_dataset_csv(cfg.data.path);
  }
  if (cfg.data.resample > 0) ds = resample_uniform(ds, static_cast<std::size_t>(cfg.data.resample), cfg.seed);
  return ds;
}

}  // namespace ovl
