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

#include <cstddef>
#include <span>
#include <vector>

#include "ovl/schedule.hpp"

namespace ovl {

struct NoisySample {
  std::vector<double> x_t;
  int t = 0;
  std::vector<double> eps;
  std::size_t source = 0;
};

/// x_t = sqrt(abar_t) x0 + sqrt(1 - abar_t) eps
NoisySample q_sample(std::span<const double> x0, int t, std::span<const double> eps, const DiffusionSchedule& sched,
                     std::size_t source = 0);

/// Allocation-free form of q_sample for inner loops.
void q_sample_into(std::span<const double> x0, int t, std::span<const double> eps, const DiffusionSchedule& sched,
                   std::span<double> out);

}  // namespace ovl
