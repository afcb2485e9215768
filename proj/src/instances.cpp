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

#include "privseq/instances.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace privseq {

Eigen::MatrixXi hadamard(int n) {
  if (n < 1) throw_error(ErrorCode::kInvalidArgument, "hadamard needs n >= 1");
  Eigen::MatrixXi h(2, 2);
  h << 1, 1, 1, -1;
  for (int step = 1; step < n; ++step) {
    const auto size = h.rows();
    Eigen::MatrixXi next(2 * size, 2 * size);
    next.topLeftCorner(size, size) = h;
    next.topRightCorner(size, size) = h;
    next.bottomLeftCorner(size, size) = h;
    next.bottomRightCorner(size, size) = -h;
    h = std::move(next);
  }
  return h;
}

double hard_separation(int pairs, long long horizon, double epsilon) {
  if (pairs < 1 || epsilon <= 0) {
    throw_error(ErrorCode::kInvalidArgument, "need pairs >= 1 and epsilon > 0");
  }
  const double boost = std::exp(epsilon);
  const double contrast = std::min((boost - 1.0) * (boost - 1.0), 1.0);
  const double a = std::sqrt(static_cast<double>(pairs) /
                             (9.0 * static_cast<double>(horizon) * contrast * boost));
  if (a > 1.0) {
    throw_error(ErrorCode::kHorizonTooShort,
                "horizon " + std::to_string(horizon) +
                    " is below pairs/(9 min{(e^eps-1)^2,1} e^eps); separation " +
                    std::to_string(a) + " would leave the simplex");
  }
  return a;
}

HardInstance build_hard_instance(int pairs, long long horizon, double epsilon) {
  const double a = hard_separation(pairs, horizon, epsilon);

  int order = 1;
  while ((1 << order) - 1 < pairs) ++order;
  const int n = 1 << order;

  const Eigen::MatrixXi h = hadamard(order);
  std::vector<Hypothesis> members;
  members.reserve(2 * static_cast<std::size_t>(pairs));
  for (int i = 0; i < pairs; ++i) {
    // Column i+1 of the Hadamard matrix (skipping the all-ones column).
    const auto column = h.col(i + 1);
    Eigen::VectorXd base(n);
    Eigen::VectorXd shifted(n);
    for (int y = 0; y < n; ++y) {
      if (column[y] == 1) {
        base[y] = 0.0;
        shifted[y] = a / n;
      } else {
        base[y] = 2.0 / n;
        shifted[y] = (2.0 - a) / n;
      }
    }
    members.push_back(Hypothesis::constant(make_dist(std::move(base))));
    members.push_back(Hypothesis::constant(make_dist(std::move(shifted))));
  }

  HardInstance instance{order, pairs, a, HypothesisClass(std::move(members))};
  return instance;
}

nlohmann::json hard_instance_to_json(const HardInstance& inst) {
  nlohmann::json j = class_to_json(inst.hypotheses);
  j["a"] = inst.separation;
  j["n"] = inst.order;
  return j;
}

HypothesisClass random_instance(int k, int labels, double concentration, SeededRng& rng) {
  if (k < 1 || labels < 2) {
    throw_error(ErrorCode::kInvalidArgument, "need k >= 1 and labels >= 2");
  }
  if (concentration <= 0) {
    throw_error(ErrorCode::kInvalidArgument, "concentration must be positive");
  }
  std::vector<Hypothesis> members;
  members.reserve(static_cast<std::size_t>(k));
  const double power = 1.0 / concentration;
  for (int j = 0; j < k; ++j) {
    Eigen::VectorXd weights(labels);
    for (int y = 0; y < labels; ++y) {
      const double exponential = -std::log(1.0 - rng.uniform01());
      weights[y] = std::pow(exponential, power);
    }
    members.push_back(Hypothesis::constant(make_dist(std::move(weights))));
  }
  return HypothesisClass(std::move(members));
}

}  // namespace privseq
