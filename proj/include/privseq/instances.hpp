// Copyright 2026 The privseq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Core>

#include "json.hpp"
#include "privseq/core.hpp"

namespace privseq {

/// Sylvester Hadamard matrix of size 2^n x 2^n, entries +-1, first column all
/// ones. Exact integer arithmetic.
Eigen::MatrixXi hadamard(int n);

/// Separation parameter a = sqrt(K / (9 T min{(e^eps - 1)^2, 1} e^eps)).
/// Throws kHorizonTooShort when T is too small for a <= 1 (the second
/// distribution of a pair would leave the simplex).
double hard_separation(int pairs, long long horizon, double epsilon);

/// Hard family: `pairs` pairs of near-indistinguishable distributions over
/// N = 2^order labels, built from distinct Hadamard columns. The class holds
/// 2*pairs constant hypotheses ordered (p_{1,1}, p_{1,2}, ..., p_{K,1}, p_{K,2}).
struct HardInstance {
  int order = 0;  // N = 2^order
  int pairs = 0;
  double separation = 0;
  HypothesisClass hypotheses;
};

HardInstance build_hard_instance(int pairs, long long horizon, double epsilon);

// Core class schema plus {"a": separation, "n": order}.
nlohmann::json hard_instance_to_json(const HardInstance& inst);

/// K constant hypotheses, each a normalized vector of Exp(1) draws raised to
/// 1/concentration. Large concentration values approach the uniform
/// distribution. Deterministic given the rng stream.
HypothesisClass random_instance(int k, int labels, double concentration, SeededRng& rng);

}  // namespace privseq
