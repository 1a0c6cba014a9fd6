// Copyright 2026 The Hanforge Authors.
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

#ifndef HANFORGE_TENSOR_HPP_
#define HANFORGE_TENSOR_HPP_

#include <cstdint>
#include <random>
#include <string>

#include <Eigen/Dense>

namespace hanforge {

// Parameters are held in 64-bit for computation but always carry values
// exactly representable in 32-bit, which is the storage precision of the
// model container.
using Matrix = Eigen::MatrixXd;
using Rng = std::mt19937_64;

inline void round_to_storage(Matrix& m) { m = m.cast<float>().cast<double>(); }

// N(0, stddev^2) entries, rounded to storage precision.
Matrix random_normal(Eigen::Index rows, Eigen::Index cols, double stddev, Rng& rng);

// Uniform double in [0, 1) built from the top 53 bits of one draw, so the
// sequence is identical across standard libraries.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Row-wise log-sum-exp of a vector, -inf safe.
double log_sum_exp(const Eigen::Ref<const Eigen::VectorXd>& v);

}  // namespace hanforge

#endif  // HANFORGE_TENSOR_HPP_
