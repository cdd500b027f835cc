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
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ovl {

/// Precondition violation on a public operation (bad shape, out-of-range
/// index, invalid hyperparameter).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation produced a non-finite value. The message names the term.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Row-major set of equal-length real vectors.
struct Points {
  std::size_t dim = 0;
  std::vector<double> values;

  Points() = default;
  explicit Points(std::size_t d, std::size_t rows = 0) : dim(d), values(d * rows, 0.0) {}

  std::size_t size() const { return dim == 0 ? 0 : values.size() / dim; }
  bool empty() const { return values.empty(); }

  std::span<const double> row(std::size_t i) const { return {values.data() + i * dim, dim}; }
  std::span<double> row(std::size_t i) { return {values.data() + i * dim, dim}; }

  void push_back(std::span<const double> v);
  void reserve(std::size_t rows) { values.reserve(rows * dim); }
};

using Rng = std::mt19937_64;

/// Deterministic generator for a (seed, stream...) tuple. Streams let
/// independent workers draw reproducible numbers without sharing state.
Rng make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> stream = {});

/// Shortest round-trip decimal representation.
std::string format_double(double v);

inline void require(bool cond, const std::string& what) {
  if (!cond) throw InvalidArgument(what);
}

double squared_distance(std::span<const double> a, std::span<const double> b);

}  // namespace ovl
