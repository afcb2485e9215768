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

#include "privseq/clipping.hpp"

#include <cmath>
#include <string>

namespace privseq {

ClipPlan build_clip_plan(const HypothesisClass& cls, Feature x, long long horizon) {
  if (horizon < 1) {
    throw_error(ErrorCode::kInvalidArgument, "horizon must be at least 1");
  }
  const auto m = static_cast<int>(cls.label_count());
  const auto k = static_cast<int>(cls.size());

  ClipPlan plan;
  plan.label_count = m;
  plan.class_size = k;
  plan.horizon = horizon;
  plan.block_sizes.resize(m);
  plan.offsets.resize(m + 1);

  Eigen::VectorXd max_mass = Eigen::VectorXd::Zero(m);
  for (Eigen::Index j = 0; j < k; ++j) {
    max_mass = max_mass.cwiseMax(cls[j](x).probs());
  }

  int total = 0;
  for (int y = 0; y < m; ++y) {
    plan.offsets[y] = total;
    const int size = static_cast<int>(std::ceil(static_cast<double>(m) * max_mass[y]));
    plan.block_sizes[y] = size;
    total += size;
  }
  plan.offsets[m] = total;
  plan.clipped_size = total;

  plan.block_owner.resize(total);
  for (int y = 0; y < m; ++y) {
    for (int i = plan.offsets[y]; i < plan.offsets[y] + plan.block_sizes[y]; ++i) {
      plan.block_owner[i] = y;
    }
  }
  return plan;
}

int sample_within_block(const ClipPlan& plan, int label, SeededRng& rng) {
  const int size = plan.block_sizes[label];
  if (size == 0) {
    throw_error(ErrorCode::kEmptyBlock,
                "label " + std::to_string(label) +
                    " has zero mass under every hypothesis");
  }
  return plan.offsets[label] + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(size)));
}

int sample_clipped(const ClipPlan& plan, int label, SeededRng& rng) {
  if (plan.block_sizes[label] == 0) {
    throw_error(ErrorCode::kEmptyBlock,
                "label " + std::to_string(label) +
                    " has zero mass under every hypothesis");
  }
  const double explore = 1.0 / static_cast<double>(plan.horizon);
  if (rng.uniform01() < explore) {
    return static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(plan.clipped_size)));
  }
  return sample_within_block(plan, label, rng);
}

LabelDist pushforward(const ClipPlan& plan, const LabelDist& p) {
  const double t = static_cast<double>(plan.horizon);
  const double floor_mass = 1.0 / (t * plan.clipped_size);
  const double keep = 1.0 - 1.0 / t;

  Eigen::VectorXd q = Eigen::VectorXd::Constant(plan.clipped_size, floor_mass);
  for (int y = 0; y < plan.label_count; ++y) {
    const double mass = p[y];
    const int size = plan.block_sizes[y];
    if (size > 0) {
      if (mass > 0) {
        q.segment(plan.offsets[y], size).array() += keep * mass / size;
      }
    } else if (mass > kProbTolerance) {
      throw_error(ErrorCode::kEmptyBlock,
                  "distribution puts mass on label " + std::to_string(y) +
                      " outside the plan's support");
    }
  }
  return LabelDist(std::move(q));
}

double pushforward_at(const ClipPlan& plan, const LabelDist& p, int clipped) {
  const double t = static_cast<double>(plan.horizon);
  const int y = plan.block_owner[clipped];
  const int size = plan.block_sizes[y];
  double value = 1.0 / (t * plan.clipped_size);
  if (size > 0) value += (1.0 - 1.0 / t) * p[y] / size;
  return value;
}

LabelDist block_pushforward(const ClipPlan& plan, const LabelDist& p) {
  Eigen::VectorXd q = Eigen::VectorXd::Zero(plan.clipped_size);
  for (int y = 0; y < plan.label_count; ++y) {
    const double mass = p[y];
    const int size = plan.block_sizes[y];
    if (size > 0) {
      if (mass > 0) q.segment(plan.offsets[y], size).array() = mass / size;
    } else if (mass > kProbTolerance) {
      throw_error(ErrorCode::kEmptyBlock,
                  "distribution puts mass on label " + std::to_string(y) +
                      " outside the plan's support");
    }
  }
  return LabelDist(std::move(q));
}

LabelDist unclip(const ClipPlan& plan, const LabelDist& q) {
  if (q.size() != plan.clipped_size) {
    throw_error(ErrorCode::kDimensionMismatch,
                "clipped distribution size disagrees with the plan");
  }
  Eigen::VectorXd p(plan.label_count);
  for (int y = 0; y < plan.label_count; ++y) {
    const int size = plan.block_sizes[y];
    p[y] = size > 0 ? q.probs().segment(plan.offsets[y], size).sum() : 0.0;
  }
  return LabelDist(std::move(p));
}

}  // namespace privseq
