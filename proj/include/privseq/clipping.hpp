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

#include "privseq/core.hpp"

namespace privseq {

/// Per-round clipped alphabet: each label y owns a contiguous block of
/// ceil(M * max_j f_j(x)[y]) synthetic labels, assigned in increasing label
/// order. The blocks partition [0, clipped_size). Zero-mass labels own empty
/// blocks. Immutable and shareable; identical inputs always build identical
/// plans, so the privatizing side and the learning side agree on the alphabet
/// without communication.
struct ClipPlan {
  Eigen::VectorXi block_sizes;  // one per label
  Eigen::VectorXi offsets;      // prefix sums, size label_count + 1
  Eigen::VectorXi block_owner;  // clipped label -> owning label
  int clipped_size = 0;         // sum of block sizes
  int label_count = 0;
  int class_size = 0;
  long long horizon = 0;

  int label_of(int clipped) const { return block_owner[clipped]; }
};

/// Builds the clipped alphabet for feature `x` against `cls` at horizon `T`.
/// The clipped size always lies in [M, M*(K+1)].
ClipPlan build_clip_plan(const HypothesisClass& cls, Feature x, long long horizon);

/// Uniform draw from the block owned by `label`. Throws kEmptyBlock when the
/// label has zero mass under every hypothesis (model misspecification).
int sample_within_block(const ClipPlan& plan, int label, SeededRng& rng);

/// Block draw with probability 1 - 1/T, uniform over the whole clipped
/// alphabet with probability 1/T.
int sample_clipped(const ClipPlan& plan, int label, SeededRng& rng);

/// Closed-form law of sample_clipped when the input label follows `p`.
/// Every output entry lies in [1/(T * clipped_size), 1/M] whenever `p` is a
/// hypothesis of the plan's class (or a mixture of them).
LabelDist pushforward(const ClipPlan& plan, const LabelDist& p);

/// Single entry of pushforward(plan, p) without materializing the vector.
double pushforward_at(const ClipPlan& plan, const LabelDist& p, int clipped);

/// Law of sample_within_block (no uniform exploration component).
LabelDist block_pushforward(const ClipPlan& plan, const LabelDist& p);

/// Collapses a clipped-alphabet distribution back to labels by summing each
/// block. Exact inverse of the block structure; output sums to one.
LabelDist unclip(const ClipPlan& plan, const LabelDist& q);

}  // namespace privseq
