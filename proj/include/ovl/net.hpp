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
#include <string_view>
#include <vector>

#include "ovl/common.hpp"
#include "ovl/schedule.hpp"

namespace ovl {

using ParameterVector = std::vector<double>;
using GradientVector = std::vector<double>;

/// Anything that predicts the noise in x_t for a class (or the null class)
/// and can pull an output cotangent back onto its parameters.
class NoiseModel {
 public:
  virtual ~NoiseModel() = default;

  virtual std::size_t dim() const = 0;
  virtual std::size_t num_params() const = 0;
  virtual int num_classes() const = 0;
  int null_class() const { return num_classes(); }

  virtual void predict(std::span<const double> params, std::span<const double> x, int t, int cls,
                       std::span<double> out) const = 0;

  /// grad += (d predict / d params)^T * dout, evaluated at (x, t, cls).
  virtual void accumulate_vjp(std::span<const double> params, std::span<const double> x, int t, int cls,
                              std::span<const double> dout, std::span<double> grad) const = 0;

  std::vector<double> predict(std::span<const double> params, std::span<const double> x, int t, int cls) const {
    std::vector<double> out(dim());
    predict(params, x, t, cls, out);
    return out;
  }
};

enum class Activation { kSilu, kTanh };

Activation parse_activation(std::string_view name);
std::string_view to_string(Activation a);

struct NetworkConfig {
  int input_dim = 2;
  std::vector<int> hidden = {64, 64};
  int time_features = 16;
  int num_classes = 2;
  int embed_dim = 8;
  Activation activation = Activation::kSilu;

  void validate() const;
  /// Width of [x_t | time features | class embedding].
  int concat_dim() const { return input_dim + time_features + embed_dim; }
};

/// Structured view of the flat parameter vector. Flattening order:
///   1. class embedding table, (num_classes + 1) x embed_dim, row-major
///      (row num_classes is the null class);
///   2. for each dense layer (hidden layers, then the output layer):
///      weight matrix out x in, row-major, followed by the bias vector.
struct NetworkParameters {
  std::vector<double> embedding;
  struct Dense {
    int in = 0;
    int out = 0;
    std::vector<double> weight;
    std::vector<double> bias;
  };
  std::vector<Dense> layers;

  ParameterVector flatten() const;
  static NetworkParameters unflatten(const NetworkConfig& cfg, std::span<const double> flat);
};

/// Conditional noise predictor: MLP over [x_t | sinusoidal(t) | embed(c)]
/// with a linear output head.
class NoisePredictor final : public NoiseModel {
 public:
  explicit NoisePredictor(NetworkConfig cfg);

  const NetworkConfig& config() const { return cfg_; }

  std::size_t dim() const override { return static_cast<std::size_t>(cfg_.input_dim); }
  std::size_t num_params() const override { return num_params_; }
  int num_classes() const override { return cfg_.num_classes; }

  using NoiseModel::predict;
  void predict(std::span<const double> params, std::span<const double> x, int t, int cls,
               std::span<double> out) const override;
  void accumulate_vjp(std::span<const double> params, std::span<const double> x, int t, int cls,
                      std::span<const double> dout, std::span<double> grad) const override;

  /// Fan-in scaled symmetric uniform weights, zero biases, U(-1, 1) embeddings.
  ParameterVector init_params(std::uint64_t seed) const;

  /// d out / d params, rows = output component.
  std::vector<std::vector<double>> jacobian(std::span<const double> params, std::span<const double> x, int t,
                                            int cls) const;

  void time_features(int t, std::span<double> out) const;

 private:
  struct LayerView {
    std::size_t weight_offset;
    std::size_t bias_offset;
    int in;
    int out;
  };
  struct Tape;

  void check_inputs(std::span<const double> params, std::span<const double> x, int cls) const;
  void run_forward(std::span<const double> params, std::span<const double> x, int t, int cls, Tape& tape,
                   std::span<double> out) const;

  NetworkConfig cfg_;
  std::vector<LayerView> layers_;
  std::size_t num_params_ = 0;
};

// Checkpoint layout (all integers and floats little-endian):
//   "OVLCKPT1"                       8-byte magic
//   u32 version (=1)
//   u32 input_dim, num_classes, embed_dim, time_features, activation
//   u32 hidden layer count, then u32 width per layer
//   u32 T, f64 beta1, f64 betaT, u32 sigma_mode    (diffusion schedule)
//   u64 parameter count, then f64 parameters in flattening order
//   optional trainer trailer:
//   "OVLTRNR1", u64 step, f64 first moments[n], f64 second moments[n]
struct ScheduleSpec {
  int steps = 1000;
  double beta1 = 1e-4;
  double betaT = 0.02;
  SigmaMode sigma_mode = SigmaMode::kBeta;

  DiffusionSchedule build() const { return make_linear_schedule(beta1, betaT, steps, sigma_mode); }
  static ScheduleSpec scaled(int steps, SigmaMode mode = SigmaMode::kBeta) {
    const auto e = scaled_linear_endpoints(steps);
    return {steps, e.beta1, e.betaT, mode};
  }
};

struct OptimizerState {
  std::uint64_t step = 0;
  std::vector<double> m;
  std::vector<double> v;
};

struct Checkpoint {
  NetworkConfig net;
  ScheduleSpec schedule;
  ParameterVector params;
  std::optional<OptimizerState> optimizer;
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace ovl
