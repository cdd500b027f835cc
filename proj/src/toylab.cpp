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

#include "ovl/toylab.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <ostream>

namespace ovl {

namespace {

void check_toy_spec(const ToyMixtureSpec& spec) {
  spec.validate();
  require(spec.dim == 1 && spec.num_classes() == 2, "toy problem: expected two 1-D components");
  require(spec.scales[0] == spec.scales[1], "toy problem: components must share one scale");
}

}  // namespace

ToyMixtureSpec make_toy_spec(double pi1, double m1_star, double m2_star, double sigma) {
  require(pi1 > 0.0 && pi1 < 1.0, "toy problem: pi1 must lie in (0, 1)");
  require(sigma > 0.0, "toy problem: sigma must be > 0");
  ToyMixtureSpec spec;
  spec.dim = 1;
  spec.weights = {pi1, 1.0 - pi1};
  spec.means = {{m1_star}, {m2_star}};
  spec.scales = {sigma, sigma};
  return spec;
}

ToyMixtureSpec default_toy_spec() { return make_toy_spec(0.95, 0.0, 2.0, 1.0); }

ToyMode parse_toy_mode(std::string_view name) {
  if (name == "fit") return ToyMode::kFit;
  if (name == "naive") return ToyMode::kNaive;
  if (name == "hinge") return ToyMode::kHinge;
  throw InvalidArgument("unknown toy objective '" + std::string(name) + "' (expected fit | naive | hinge)");
}

std::string_view to_string(ToyMode mode) {
  switch (mode) {
    case ToyMode::kFit: return "fit";
    case ToyMode::kNaive: return "naive";
    case ToyMode::kHinge: return "hinge";
  }
  return "?";
}

void ToyObjective::validate() const {
  require(std::isfinite(tau) && tau >= 0.0, "toy objective: tau must be finite and >= 0");
  if (mode == ToyMode::kHinge) variant.validate();
}

double toy_fit_loss(double m1, double m2, const ToyMixtureSpec& spec) {
  check_toy_spec(spec);
  const double two_var = 2.0 * spec.scales[0] * spec.scales[0];
  const double e1 = m1 - spec.means[0][0];
  const double e2 = m2 - spec.means[1][0];
  return (spec.weights[0] * e1 * e1 + spec.weights[1] * e2 * e2) / two_var;
}

double toy_objective(double m1, double m2, const ToyMixtureSpec& spec, const ToyObjective& obj) {
  const double fit = toy_fit_loss(m1, m2, spec);
  const double d = (m1 - m2) * (m1 - m2);
  switch (obj.mode) {
    case ToyMode::kFit: return fit;
    case ToyMode::kNaive: return fit - obj.tau * d / (2.0 * spec.scales[0] * spec.scales[0]);
    case ToyMode::kHinge: return fit + obj.tau * pcl_variant_value(obj.variant, d);
  }
  throw InvalidArgument("toy objective: invalid mode");
}

int GridAxis::count() const { return static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1; }

double GridAxis::at(int i) const {
  const double x = lo + i * step;
  return std::round(x * 1e12) / 1e12;
}

int GridAxis::index_of(double x) const { return static_cast<int>(std::lround((x - lo) / step)); }

void GridAxis::validate() const {
  require(std::isfinite(step) && step > 0.0, "grid: step must be > 0");
  require(std::isfinite(lo) && std::isfinite(hi) && hi >= lo, "grid: range must satisfy lo <= hi");
  require(count() <= 100000, "grid: too many points per axis");
}

int LandscapeGrid::cells_from(double m1, double m2) const {
  return std::max(std::abs(argmin_i - m1_axis.index_of(m1)), std::abs(argmin_j - m2_axis.index_of(m2)));
}

LandscapeGrid landscape(const ToyMixtureSpec& spec, const ToyObjective& obj, const GridAxis& m1_axis,
                        const GridAxis& m2_axis) {
  check_toy_spec(spec);
  obj.validate();
  m1_axis.validate();
  m2_axis.validate();
  for (int k = 0; k < 2; ++k) {
    const GridAxis& ax = k == 0 ? m1_axis : m2_axis;
    const double truth = spec.means[static_cast<std::size_t>(k)][0];
    require(truth >= ax.lo && truth <= ax.hi, "landscape: grid range must contain the true means");
  }
  LandscapeGrid g;
  g.m1_axis = m1_axis;
  g.m2_axis = m2_axis;
  g.objective = obj;
  const int n1 = m1_axis.count();
  const int n2 = m2_axis.count();
  g.loss.resize(static_cast<std::size_t>(n1) * static_cast<std::size_t>(n2));
  g.argmin_value = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n1; ++i) {
    for (int j = 0; j < n2; ++j) {
      const double v = toy_objective(m1_axis.at(i), m2_axis.at(j), spec, obj);
      g.loss[static_cast<std::size_t>(i * n2 + j)] = v;
      if (v < g.argmin_value) {
        g.argmin_value = v;
        g.argmin_i = i;
        g.argmin_j = j;
      }
    }
  }
  return g;
}

void write_landscape_csv(std::ostream& os, const LandscapeGrid& g) {
  os << "m1,m2,loss\n";
  const int n1 = g.m1_axis.count();
  const int n2 = g.m2_axis.count();
  for (int i = 0; i < n1; ++i) {
    for (int j = 0; j < n2; ++j) {
      os << format_double(g.m1_axis.at(i)) << ',' << format_double(g.m2_axis.at(j)) << ','
         << format_double(g.value(i, j)) << '\n';
    }
  }
  os << "# argmin," << format_double(g.argmin_m1()) << ',' << format_double(g.argmin_m2()) << ','
     << format_double(g.argmin_value) << '\n';
}

void write_landscape_csv(const std::filesystem::path& path, const LandscapeGrid& g) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_landscape_csv(os, g);
}

TauThreshold hinge_tau_threshold(const ToyMixtureSpec& spec, const PclVariant& variant, const GridAxis& m1_axis,
                                 const GridAxis& m2_axis, int cells, double tau_max, int iterations) {
  require(cells >= 0, "threshold: cell tolerance must be >= 0");
  require(tau_max > 0.0, "threshold: search bound must be > 0");
  auto ok = [&](double tau) {
    const auto g = landscape(spec, ToyObjective{ToyMode::kHinge, variant, tau}, m1_axis, m2_axis);
    return g.cells_from(spec.means[0][0], spec.means[1][0]) <= cells;
  };
  TauThreshold out;
  if (ok(tau_max)) {
    out.tau = tau_max;
    out.saturated = true;
    return out;
  }
  double lo = 0.0, hi = tau_max;
  for (int it = 0; it < iterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? lo : hi) = mid;
  }
  out.tau = lo;
  return out;
}

UnboundedDirection unbounded_direction(const ToyMixtureSpec& spec, const ToyObjective& obj) {
  check_toy_spec(spec);
  obj.validate();
  const double var = spec.scales[0] * spec.scales[0];
  const double a1 = spec.weights[0] / var;
  const double a2 = spec.weights[1] / var;
  // Hessian = diag(a1, a2) - c [[1, -1], [-1, 1]]; c per unit tau is `rate`.
  double rate = 0.0;
  if (obj.mode == ToyMode::kNaive) rate = 1.0 / var;
  if (obj.mode == ToyMode::kHinge && obj.variant.kind == PclKind::kNegativeL2) rate = 2.0;
  const double c = rate * obj.tau;
  const double A = a1 - c, D = a2 - c, B = c;
  const double half_tr = 0.5 * (A + D);
  const double lam = half_tr - std::hypot(0.5 * (A - D), B);

  UnboundedDirection out;
  out.curvature = lam;
  out.critical_tau = rate > 0.0 ? a1 * a2 / ((a1 + a2) * rate) : std::numeric_limits<double>::infinity();
  out.unbounded = lam < 0.0;
  if (out.unbounded) {
    double vx = B, vy = lam - A;
    if (std::hypot(vx, vy) < 1e-300) {
      vx = lam - D;
      vy = B;
    }
    const double n = std::hypot(vx, vy);
    out.direction = {vx / n, vy / n};
    if (out.direction[0] < 0.0) out.direction = {-out.direction[0], -out.direction[1]};
  }
  return out;
}

}  // namespace ovl
