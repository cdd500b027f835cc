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

#include <array>
#include <filesystem>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "ovl/data.hpp"
#include "ovl/losses.hpp"

namespace ovl {

// Two-mean toy problem: a 1-D mixture of two equal-width Gaussians with known
// weights and scale; the free variables are the two estimated means.

/// pi = (pi1, 1 - pi1), means (m1*, m2*), shared scale.
ToyMixtureSpec make_toy_spec(double pi1, double m1_star, double m2_star, double sigma);
/// (0.95, 0.05) weights, means (0, 2), unit scale.
ToyMixtureSpec default_toy_spec();

enum class ToyMode { kFit, kNaive, kHinge };
ToyMode parse_toy_mode(std::string_view name);  // fit | naive | hinge
std::string_view to_string(ToyMode mode);

struct ToyObjective {
  ToyMode mode = ToyMode::kFit;
  PclVariant variant;  // hinge mode only
  double tau = 0.0;

  void validate() const;
};

/// sum_k pi_k (m_k - m_k*)^2 / (2 sigma^2)
double toy_fit_loss(double m1, double m2, const ToyMixtureSpec& spec);

/// fit                       (fit)
/// fit - tau (m1-m2)^2/(2s^2) (naive)
/// fit + tau h((m1-m2)^2)     (hinge)
double toy_objective(double m1, double m2, const ToyMixtureSpec& spec, const ToyObjective& obj);

/// Grid points lo + i * step for i = 0 .. count() - 1, hi included, rounded
/// to 12 decimals so that e.g. 2.0000000000000004 prints as 2.
struct GridAxis {
  double lo = -1.0;
  double hi = 3.0;
  double step = 0.05;

  int count() const;
  double at(int i) const;
  /// Nearest grid index to x.
  int index_of(double x) const;
  void validate() const;
};

struct LandscapeGrid {
  GridAxis m1_axis;
  GridAxis m2_axis;
  ToyObjective objective;
  std::vector<double> loss;  // m1 index major, m2 index minor
  int argmin_i = 0;
  int argmin_j = 0;
  double argmin_value = 0.0;

  double argmin_m1() const { return m1_axis.at(argmin_i); }
  double argmin_m2() const { return m2_axis.at(argmin_j); }
  double value(int i, int j) const { return loss[static_cast<std::size_t>(i * m2_axis.count() + j)]; }
  /// Chebyshev distance in cells from the argmin to the grid point nearest (m1, m2).
  int cells_from(double m1, double m2) const;
};

/// Dense evaluation; the argmin is the first strict minimum in row-major order.
LandscapeGrid landscape(const ToyMixtureSpec& spec, const ToyObjective& obj, const GridAxis& m1_axis = {},
                        const GridAxis& m2_axis = {});

/// `m1,m2,loss` rows followed by `# argmin,m1,m2,value`.
void write_landscape_csv(std::ostream& os, const LandscapeGrid& grid);
void write_landscape_csv(const std::filesystem::path& path, const LandscapeGrid& grid);

struct TauThreshold {
  double tau = 0.0;         // largest tau found that keeps the argmin within `cells`
  bool saturated = false;   // every tau up to the search bound qualified
};

/// Bisection on tau for the hinge objective, assuming the argmin drifts
/// monotonically away from the true means as tau grows.
TauThreshold hinge_tau_threshold(const ToyMixtureSpec& spec, const PclVariant& variant, const GridAxis& m1_axis,
                                 const GridAxis& m2_axis, int cells = 1, double tau_max = 10.0, int iterations = 50);

struct UnboundedDirection {
  bool unbounded = false;
  std::array<double, 2> direction{0.0, 0.0};  // unit vector of steepest descent to -inf
  double curvature = 0.0;                     // smallest Hessian eigenvalue of the objective
  double critical_tau = 0.0;                  // tau above which the objective is unbounded below
};

/// The naive and negative-l2 objectives are quadratics in (m1, m2); they are
/// unbounded below when their Hessian has a negative eigenvalue. Bounded
/// penalties never are.
UnboundedDirection unbounded_direction(const ToyMixtureSpec& spec, const ToyObjective& obj);

}  // namespace ovl
