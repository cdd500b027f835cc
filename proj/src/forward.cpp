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

#include "ovl/forward.hpp"

#include <cmath>

#include "ovl/common.hpp"

namespace ovl {

void q_sample_into(std::span<const double> x0, int t, std::span<const double> eps, const DiffusionSchedule& sched,
                   std::span<double> out) {
  require(x0.size() == eps.size() && out.size() == x0.size(), "q_sample: dimension mismatch");
  const double ab = sched.alpha_bar(t);
  const double signal = std::sqrt(ab);
  const double noise = std::sqrt(1.0 - ab);
  for (std::size_t k = 0; k < x0.size(); ++k) {
    if (!std::isfinite(eps[k])) throw InvalidArgument("q_sample: non-finite noise");
    out[k] = signal * x0[k] + noise * eps[k];
  }
}

NoisySample q_sample(std::span<const double> x0, int t, std::span<const double> eps, const DiffusionSchedule& sched,
                     std::size_t source) {
  NoisySample s;
  s.x_t.resize(x0.size());
  q_sample_into(x0, t, eps, sched, s.x_t);
  s.t = t;
  s.eps.assign(eps.begin(), eps.end());
  s.source = source;
  return s;
}

}  // namespace ovl
