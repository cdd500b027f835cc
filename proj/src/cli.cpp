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

#include "ovl/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>

#include "ovl/sampler.hpp"

namespace ovl {

namespace {

namespace fs = std::filesystem;

ConfigOverrides parse_overrides(const std::vector<std::string>& extras) {
  ConfigOverrides out;
  for (std::size_t i = 0; i < extras.size(); ++i) {
    const std::string& a = extras[i];
    if (a.rfind("--", 0) != 0 || a.size() <= 2) throw ConfigError("unexpected argument '" + a + "'");
    std::string key = a.substr(2);
    std::string value;
    if (const auto eq = key.find('='); eq != std::string::npos) {
      value = key.substr(eq + 1);
      key = key.substr(0, eq);
    } else {
      if (i + 1 >= extras.size()) throw ConfigError("override '" + a + "' has no value");
      value = extras[++i];
    }
    if (key.find('.') == std::string::npos) throw ConfigError("override '" + a + "' must be --section.key");
    out.emplace_back(key, value);
  }
  return out;
}

ExperimentConfig resolve_config(const std::string& path, const std::vector<std::string>& extras) {
  const auto ov = parse_overrides(extras);
  return path.empty() ? default_config(ov) : load_config(path, ov);
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw ConfigError("cannot create output directory '" + dir.string() + "'");
}

std::string omega_tag(double w) { return format_double(w); }

DiffusionSchedule schedule_of(const ExperimentConfig& cfg) { return cfg.schedule.build(); }

// ---- train ----

int cmd_train(const ExperimentConfig& cfg, const std::string& resume, std::ostream& out) {
  ensure_dir(cfg.out_dir);
  write_config(cfg.out_dir / "config.ini", cfg);
  const LabeledDataset ds = build_dataset(cfg);
  write_dataset_csv(cfg.out_dir / "data.csv", ds);
  const NoisePredictor net(network_for(cfg, ds));
  const auto sched = schedule_of(cfg);

  TrainConfig tc = cfg.train;
  tc.seed = cfg.seed;
  const TrainOutput output{cfg.out_dir, cfg.schedule};
  std::optional<Checkpoint> ck;
  if (!resume.empty()) {
    ck = load_checkpoint(resume);
    require(ck->net.input_dim == net.config().input_dim && ck->net.hidden == net.config().hidden &&
                ck->net.num_classes == net.config().num_classes,
            "checkpoint network does not match the config");
  }
  const TrainResult res = train(tc, ds, net, sched, &output, ck ? &*ck : nullptr);
  out << "run_dir " << cfg.out_dir.generic_string() << '\n';
  out << "params " << net.num_params() << '\n';
  out << "steps " << res.optimizer.step << '\n';
  if (!res.log.empty()) out << "last_logged_total " << format_double(res.log.back().total) << '\n';
  if (res.single_class_batches > 0) out << "single_class_batches " << res.single_class_batches << '\n';
  return kExitOk;
}

// ---- sample ----

struct SampleArgs {
  std::string checkpoint;
  std::string out_dir;
  std::vector<int> classes;
  std::size_t count = 1000;
  std::vector<double> omegas{0.0};
  std::uint64_t seed = 0;
  bool pgm = false;
};

int cmd_sample(const SampleArgs& a, std::ostream& out) {
  const Checkpoint ck = load_checkpoint(a.checkpoint);
  const NoisePredictor net(ck.net);
  const auto sched = ck.schedule.build();
  std::vector<int> classes = a.classes;
  if (classes.empty()) {
    for (int c = 0; c < ck.net.num_classes; ++c) classes.push_back(c);
  }
  for (int c : classes) {
    require(c >= 0 && c < ck.net.num_classes, "class " + std::to_string(c) + " out of range [0, " +
                                                  std::to_string(ck.net.num_classes) + ")");
  }
  const fs::path dir = a.out_dir;
  ensure_dir(dir);
  for (double w : a.omegas) {
    const std::string tag = omega_tag(w);
    {
      std::ofstream meta(dir / ("samples_omega" + tag + ".meta"), std::ios::binary);
      meta << "checkpoint=" << fs::path(a.checkpoint).filename().generic_string() << '\n';
      meta << "omega=" << tag << '\n';
      meta << "count=" << a.count << '\n';
      meta << "seed=" << a.seed << '\n';
      meta << "steps=" << ck.schedule.steps << '\n';
      meta << "sigma_mode=" << to_string(ck.schedule.sigma_mode) << '\n';
      meta << "classes=";
      for (std::size_t i = 0; i < classes.size(); ++i) meta << (i ? "," : "") << classes[i];
      meta << '\n';
    }
    for (int c : classes) {
      const SamplerConfig sc{w, a.count, a.seed};
      LabeledDataset gen;
      gen.samples = ancestral_sample(net, ck.params, sched, sc, c);
      gen.labels.assign(a.count, c);
      gen.num_classes = ck.net.num_classes;
      const std::string stem = "samples_omega" + tag + "_class" + std::to_string(c);
      write_dataset_csv(dir / (stem + ".csv"), gen);
      if (a.pgm && gen.dim() == static_cast<std::size_t>(kRasterSide * kRasterSide) && a.count > 0) {
        write_raster_pgm(dir / (stem + ".pgm"), gen.samples);
      }
      out << "wrote " << (dir / (stem + ".csv")).generic_string() << '\n';
    }
  }
  return kExitOk;
}

// ---- landscape ----

int cmd_landscape(const ExperimentConfig& cfg, std::ostream& out) {
  ensure_dir(cfg.out_dir);
  write_config(cfg.out_dir / "config.ini", cfg);
  const auto& L = cfg.landscape;
  const ToyMixtureSpec spec = make_toy_spec(L.pi1, L.m1, L.m2, L.sigma);

  struct Panel {
    std::string name;
    ToyObjective obj;
  };
  const std::vector<Panel> panels = {
      {"fit", {ToyMode::kFit, {}, 0.0}},
      {"naive", {ToyMode::kNaive, {}, L.tau}},
      {"hinge_exponential", {ToyMode::kHinge, {PclKind::kExponential, 0.0}, L.tau}},
      {"hinge_reciprocal", {ToyMode::kHinge, {PclKind::kReciprocal, 0.0}, L.tau}},
      {"hinge_margin", {ToyMode::kHinge, {PclKind::kMaxMarginHinge, L.margin}, L.tau}},
  };
  std::ofstream summary(cfg.out_dir / "landscape_summary.csv", std::ios::binary);
  summary << "objective,tau,argmin_m1,argmin_m2,value,cells_from_truth,within_one_cell,tau_threshold,unbounded\n";
  for (const auto& p : panels) {
    const LandscapeGrid g = landscape(spec, p.obj, L.axis, L.axis);
    write_landscape_csv(cfg.out_dir / ("landscape_" + p.name + ".csv"), g);
    const int cells = g.cells_from(L.m1, L.m2);
    std::string threshold = "";
    if (p.obj.mode == ToyMode::kHinge) {
      const auto th = hinge_tau_threshold(spec, p.obj.variant, L.axis, L.axis);
      threshold = (th.saturated ? ">=" : "") + format_double(th.tau);
    }
    const auto ub = unbounded_direction(spec, p.obj);
    summary << p.name << ',' << format_double(p.obj.tau) << ',' << format_double(g.argmin_m1()) << ','
            << format_double(g.argmin_m2()) << ',' << format_double(g.argmin_value) << ',' << cells << ','
            << (cells <= 1 ? "yes" : "no") << ',' << threshold << ',' << (ub.unbounded ? "yes" : "no") << '\n';
    out << p.name << ": argmin (" << format_double(g.argmin_m1()) << ", " << format_double(g.argmin_m2())
        << ") value " << format_double(g.argmin_value) << ", " << cells << " cell(s) from truth";
    if (!threshold.empty()) out << ", one-cell tau threshold " << threshold;
    if (ub.unbounded) {
      out << ", unbounded direction (" << format_double(ub.direction[0]) << ", " << format_double(ub.direction[1])
          << ") above tau " << format_double(ub.critical_tau);
    }
    out << '\n';
  }
  return kExitOk;
}

// ---- metrics ----

LabeledDataset concat(const std::vector<std::string>& paths, int num_classes) {
  LabeledDataset all;
  for (const auto& p : paths) {
    LabeledDataset part = read_dataset_csv(p, num_classes);
    if (all.labels.empty() && all.samples.dim == 0) {
      all = std::move(part);
      continue;
    }
    require(part.dim() == all.dim(), "metrics: '" + p + "' has a different dimension");
    all.samples.values.insert(all.samples.values.end(), part.samples.values.begin(), part.samples.values.end());
    all.labels.insert(all.labels.end(), part.labels.begin(), part.labels.end());
    all.num_classes = std::max(all.num_classes, part.num_classes);
  }
  return all;
}

int cmd_metrics(const ExperimentConfig& cfg, const std::string& real_path, const std::vector<std::string>& gen_paths,
                bool use_mixture, std::ostream& out) {
  ensure_dir(cfg.out_dir);
  const LabeledDataset real = real_path.empty() ? build_dataset(cfg) : read_dataset_csv(real_path);
  const LabeledDataset gen = concat(gen_paths, real.num_classes);
  require(gen.num_classes <= real.num_classes, "metrics: generated labels exceed the real classes");
  const auto mixture = use_mixture ? build_mixture(cfg) : std::nullopt;
  MetricsConfig mc = cfg.metrics;
  mc.seed = cfg.seed;
  const MetricsReport rep = evaluate_generation(real, gen, mixture ? &*mixture : nullptr, mc);
  write_report_csv(cfg.out_dir / "report.csv", rep);
  if (!rep.overlap.empty()) write_overlap_csv(cfg.out_dir / "overlap.csv", rep.overlap);
  out << "frechet_distance " << format_double(rep.frechet_global) << '\n';
  out << "precision " << format_double(rep.precision) << " recall " << format_double(rep.recall) << '\n';
  out << "f_8 " << format_double(rep.f_8) << " f_1_8 " << format_double(rep.f_1_8) << '\n';
  return kExitOk;
}

// ---- decompose ----

int cmd_decompose(const ExperimentConfig& cfg, const std::string& checkpoint, std::ostream& out) {
  ensure_dir(cfg.out_dir);
  write_config(cfg.out_dir / "config.ini", cfg);
  const LabeledDataset ds = build_dataset(cfg);
  ParameterVector params;
  NetworkConfig nc = network_for(cfg, ds);
  DiffusionSchedule sched = schedule_of(cfg);
  if (!checkpoint.empty()) {
    const Checkpoint ck = load_checkpoint(checkpoint);
    nc = ck.net;
    params = ck.params;
    sched = ck.schedule.build();
  }
  const NoisePredictor net(nc);
  if (params.empty()) params = net.init_params(cfg.seed);
  const PreparedBatch fixed = prepare_full_dataset(ds, sched, cfg.seed);
  const ClassDecomposition dec = decompose_loss_by_class(net, params, sched, ds, fixed);

  std::ofstream os(cfg.out_dir / "decompose.csv", std::ios::binary);
  os << "class,weight,mean_loss\n";
  for (std::size_t c = 0; c < dec.per_class.size(); ++c) {
    os << c << ',' << format_double(dec.weights[c]) << ',' << format_double(dec.per_class[c]) << '\n';
  }
  os << "# global," << format_double(dec.global) << '\n';
  os << "# weighted_sum," << format_double(dec.weighted_sum) << '\n';
  os << "# relative_error," << format_double(dec.relative_error) << '\n';

  constexpr double kTolerance = 1e-12;
  const bool ok = dec.relative_error <= kTolerance;
  out << "global " << format_double(dec.global) << '\n';
  out << "weighted_sum " << format_double(dec.weighted_sum) << '\n';
  out << "relative_error " << format_double(dec.relative_error) << ' ' << (ok ? "PASS" : "FAIL") << '\n';
  return ok ? kExitOk : kExitCheckFailed;
}

// ---- gradcheck ----

double max_relative_error(const NoiseModel& model, std::span<const double> params, const DiffusionSchedule& sched,
                          const PreparedBatch& batch, const Objective& objective) {
  GradientVector analytic;
  loss_and_grad(model, params, sched, batch, objective, &analytic);
  std::vector<double> p(params.begin(), params.end());
  constexpr double kStep = 1e-5;
  constexpr double kFloor = 1e-6;
  double worst = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double keep = p[i];
    p[i] = keep + kStep;
    const double up = loss_and_grad(model, p, sched, batch, objective).total;
    p[i] = keep - kStep;
    const double down = loss_and_grad(model, p, sched, batch, objective).total;
    p[i] = keep;
    const double numeric = (up - down) / (2.0 * kStep);
    const double denom = std::max({std::abs(analytic[i]), std::abs(numeric), kFloor});
    worst = std::max(worst, std::abs(analytic[i] - numeric) / denom);
  }
  return worst;
}

int cmd_gradcheck(const ExperimentConfig& cfg, std::size_t batch_size, std::ostream& out) {
  ensure_dir(cfg.out_dir);
  const LabeledDataset ds = build_dataset(cfg);
  const NoisePredictor net(network_for(cfg, ds));
  const auto sched = schedule_of(cfg);
  const auto params = net.init_params(cfg.seed);

  // Every class represented, so the contrastive term has pairs.
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; idx.size() < batch_size && i < ds.size(); ++i) idx.push_back(i);
  for (int c = 0; c < ds.num_classes; ++c) {
    auto it = std::find(ds.labels.begin(), ds.labels.end(), c);
    if (it != ds.labels.end()) idx.push_back(static_cast<std::size_t>(it - ds.labels.begin()));
  }
  Rng rng = make_rng(cfg.seed, {0x67636b});
  const PreparedBatch batch = prepare_batch(ds, idx, sched, cfg.train.cond_dropout, rng);

  struct Case {
    std::string name;
    Objective objective;
  };
  const TauSchedule tau = cfg.train.tau;
  std::vector<Case> cases = {{"plain", PlainObjective{}}};
  for (PclKind k : {PclKind::kNegativeL2, PclKind::kMaxMarginHinge, PclKind::kReciprocal, PclKind::kExponential}) {
    const double margin = k == PclKind::kMaxMarginHinge ? std::max(cfg.train.pcl.margin, 1.0) : 0.0;
    cases.push_back({"diffrop_" + std::string(to_string(k)), DiffRopObjective{tau, {k, margin}}});
  }
  cases.push_back({"reweighted", ReweightedObjective{class_stats(ds)}});

  constexpr double kTolerance = 1e-4;
  std::ofstream os(cfg.out_dir / "gradcheck.csv", std::ios::binary);
  os << "objective,max_relative_error,pass\n";
  bool all_ok = true;
  out << "params " << net.num_params() << '\n';
  for (const auto& c : cases) {
    const double err = max_relative_error(net, params, sched, batch, c.objective);
    const bool ok = err <= kTolerance;
    all_ok = all_ok && ok;
    os << c.name << ',' << format_double(err) << ',' << (ok ? "yes" : "no") << '\n';
    out << c.name << " max_relative_error " << format_double(err) << ' ' << (ok ? "PASS" : "FAIL") << '\n';
  }
  return all_ok ? kExitOk : kExitCheckFailed;
}

// ---- benchmark ----

int cmd_benchmark(const ExperimentConfig& cfg, std::ostream& out) {
  ensure_dir(cfg.out_dir);
  write_config(cfg.out_dir / "config.ini", cfg);
  const BenchmarkResult res = run_benchmark(cfg, &out);
  write_benchmark_csv(cfg.out_dir / "benchmark.csv", res);
  out << "mode,overlap_tail_head,frechet_tail,frechet_head (medians)\n";
  for (const auto& m : res.medians) {
    out << to_string(m.mode) << ',' << format_double(m.overlap_tail_head) << ',' << format_double(m.frechet_tail)
        << ',' << format_double(m.frechet_head) << '\n';
  }
  return kExitOk;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

NetworkConfig network_for(const ExperimentConfig& cfg, const LabeledDataset& ds) {
  NetworkConfig nc = cfg.net;
  nc.input_dim = static_cast<int>(ds.dim());
  nc.num_classes = ds.num_classes;
  nc.validate();
  return nc;
}

const BenchmarkRow* BenchmarkResult::median(LossMode mode) const {
  for (const auto& m : medians) {
    if (m.mode == mode) return &m;
  }
  return nullptr;
}

BenchmarkResult run_benchmark(const ExperimentConfig& cfg, std::ostream* progress) {
  BenchmarkResult res;
  const auto sched = schedule_of(cfg);
  for (LossMode mode : cfg.benchmark.modes) {
    for (std::uint64_t seed : cfg.benchmark.seeds) {
      ExperimentConfig run = cfg;
      run.seed = seed;
      const LabeledDataset ds = build_dataset(run);
      const auto mixture = build_mixture(run);
      const DatasetStats stats = class_stats(ds);
      res.head_class = static_cast<int>(std::max_element(stats.counts.begin(), stats.counts.end()) - stats.counts.begin());
      res.tail_class = static_cast<int>(std::min_element(stats.counts.begin(), stats.counts.end()) - stats.counts.begin());

      const NoisePredictor net(network_for(run, ds));
      const auto t0 = std::chrono::steady_clock::now();
      TrainConfig tc = run.train;
      tc.seed = seed;
      tc.mode = mode;
      tc.log_every = std::max<long>(tc.steps, 1);
      const TrainResult tr = train(tc, ds, net, sched);

      std::vector<Points> gen;
      for (int c = 0; c < ds.num_classes; ++c) {
        gen.push_back(ancestral_sample(net, tr.params, sched, SamplerConfig{0.0, cfg.benchmark.samples, seed}, c));
      }
      auto frechet_of = [&](int c) {
        const auto g = sample_moments(gen[static_cast<std::size_t>(c)]);
        if (mixture) {
          GaussianMoments truth;
          const std::size_t d = ds.dim();
          truth.mean = mixture->means[static_cast<std::size_t>(c)];
          truth.cov.assign(d * d, 0.0);
          const double s = mixture->scales[static_cast<std::size_t>(c)];
          for (std::size_t k = 0; k < d; ++k) truth.cov[k * d + k] = s * s;
          return frechet_gaussian(g, truth);
        }
        return frechet_gaussian(g, sample_moments(class_samples(ds, c)));
      };

      BenchmarkRow row;
      row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      row.mode = mode;
      row.seed = seed;
      row.frechet_tail = frechet_of(res.tail_class);
      row.frechet_head = frechet_of(res.head_class);
      row.overlap_tail_head = std::numeric_limits<double>::quiet_NaN();
      row.overlap_tail_offdiag = std::numeric_limits<double>::quiet_NaN();
      if (mixture) {
        const OverlapMatrix o = overlap_rate(gen, *mixture);
        const auto t = static_cast<std::size_t>(res.tail_class);
        row.overlap_tail_head = o[t][static_cast<std::size_t>(res.head_class)];
        row.overlap_tail_offdiag = 1.0 - o[t][t];
      }
      row.ddpm_loss = ddpm_simple_loss(net, tr.params, sched, prepare_full_dataset(ds, sched, seed));
      res.rows.push_back(row);
      if (progress) {
        *progress << to_string(mode) << " seed " << seed << ": overlap_tail_head "
                   << format_double(row.overlap_tail_head) << ", frechet_tail " << format_double(row.frechet_tail)
                   << ", frechet_head " << format_double(row.frechet_head) << " (" << static_cast<long>(row.seconds)
                   << " s)\n";
      }
    }
    BenchmarkRow m;
    m.mode = mode;
    auto collect = [&](double BenchmarkRow::*field) {
      std::vector<double> v;
      for (const auto& r : res.rows) {
        if (r.mode == mode) v.push_back(r.*field);
      }
      return median(v);
    };
    m.overlap_tail_head = collect(&BenchmarkRow::overlap_tail_head);
    m.overlap_tail_offdiag = collect(&BenchmarkRow::overlap_tail_offdiag);
    m.frechet_tail = collect(&BenchmarkRow::frechet_tail);
    m.frechet_head = collect(&BenchmarkRow::frechet_head);
    m.ddpm_loss = collect(&BenchmarkRow::ddpm_loss);
    res.medians.push_back(m);
  }
  return res;
}

void write_benchmark_csv(const fs::path& path, const BenchmarkResult& res) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os << "mode,seed,overlap_tail_head,overlap_tail_offdiag,frechet_tail,frechet_head,ddpm_loss\n";
  auto line = [&](const BenchmarkRow& r, const std::string& seed) {
    os << to_string(r.mode) << ',' << seed << ',' << format_double(r.overlap_tail_head) << ','
       << format_double(r.overlap_tail_offdiag) << ',' << format_double(r.frechet_tail) << ','
       << format_double(r.frechet_head) << ',' << format_double(r.ddpm_loss) << '\n';
  };
  for (const auto& r : res.rows) line(r, std::to_string(r.seed));
  for (const auto& m : res.medians) line(m, "median");
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Class-conditional diffusion on long-tailed toy data", "ovl"};
  app.require_subcommand(1);

  std::string config_path;
  auto add_config = [&](CLI::App* sub, bool required) {
    auto* opt = sub->add_option("-c,--config", config_path, "Experiment config (INI)");
    if (required) opt->required();
    sub->allow_extras();
    sub->footer("Any config key can be overridden with --section.key value.");
  };

  auto* train_cmd = app.add_subcommand("train", "Train a noise predictor; writes config snapshot, log and checkpoints");
  add_config(train_cmd, true);
  std::string resume;
  train_cmd->add_option("--resume", resume, "Continue from a checkpoint written by an earlier run");

  SampleArgs sargs;
  auto* sample_cmd = app.add_subcommand("sample", "Draw class-conditional samples from a checkpoint");
  sample_cmd->add_option("--checkpoint", sargs.checkpoint, "Checkpoint file")->required();
  sample_cmd->add_option("-o,--out", sargs.out_dir, "Output directory")->required();
  sample_cmd->add_option("--classes", sargs.classes, "Classes to sample (default: all)")->delimiter(',');
  sample_cmd->add_option("--count", sargs.count, "Samples per class");
  sample_cmd->add_option("--omega", sargs.omegas, "Guidance strengths")->delimiter(',');
  sample_cmd->add_option("--seed", sargs.seed, "Sampling seed");
  sample_cmd->add_flag("--pgm", sargs.pgm, "Also write PGM grids for 8x8 raster data");

  auto* land_cmd = app.add_subcommand("landscape", "Two-mean toy loss landscapes and their minima");
  add_config(land_cmd, false);

  std::string real_path;
  std::vector<std::string> gen_paths;
  bool no_mixture = false;
  auto* metrics_cmd = app.add_subcommand("metrics", "Score generated samples against real data");
  add_config(metrics_cmd, false);
  metrics_cmd->add_option("--real", real_path, "Real samples CSV (default: the config's dataset)");
  metrics_cmd->add_option("--gen", gen_paths, "Generated samples CSV(s)")->required();
  metrics_cmd->add_flag("--no-mixture", no_mixture, "Skip the overlap matrix");

  std::string ckpt_path;
  auto* dec_cmd = app.add_subcommand("decompose", "Check the class-weighted decomposition of the denoising loss");
  add_config(dec_cmd, false);
  dec_cmd->add_option("--checkpoint", ckpt_path, "Evaluate these parameters instead of a fresh initialisation");

  std::size_t gc_batch = 6;
  auto* gc_cmd = app.add_subcommand("gradcheck", "Compare analytic gradients with central differences");
  add_config(gc_cmd, false);
  gc_cmd->add_option("--batch", gc_batch, "Batch size for the check");

  auto* bench_cmd = app.add_subcommand("benchmark", "Plain / reweighted / contrastive comparison table");
  add_config(bench_cmd, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    for (auto* sub : app.get_subcommands()) out << sub->help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    auto extras = [](CLI::App* sub) { return sub->remaining(); };
    if (train_cmd->parsed()) return cmd_train(resolve_config(config_path, extras(train_cmd)), resume, out);
    if (sample_cmd->parsed()) return cmd_sample(sargs, out);
    if (land_cmd->parsed()) return cmd_landscape(resolve_config(config_path, extras(land_cmd)), out);
    if (metrics_cmd->parsed()) {
      return cmd_metrics(resolve_config(config_path, extras(metrics_cmd)), real_path, gen_paths, !no_mixture, out);
    }
    if (dec_cmd->parsed()) return cmd_decompose(resolve_config(config_path, extras(dec_cmd)), ckpt_path, out);
    if (gc_cmd->parsed()) return cmd_gradcheck(resolve_config(config_path, extras(gc_cmd)), gc_batch, out);
    if (bench_cmd->parsed()) return cmd_benchmark(resolve_config(config_path, extras(bench_cmd)), out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const InvalidArgument& e) {
    err << "invalid argument: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const NumericError& e) {
    err << "numeric abort: " << e.what() << '\n';
    return kExitNumericAbort;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
  }
  return kExitConfigError;
}

}  // namespace ovl
