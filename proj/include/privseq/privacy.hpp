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
#include "privseq/clipping.hpp"
#include "privseq/core.hpp"

namespace privseq {

enum class Mechanism {
  kApproxDp,  // (epsilon, delta) with delta > 0; dense Laplace vector
  kPureDp,    // (epsilon, 0); single random coordinate
};

/// Privacy budget and the derived mechanism constants' inputs.
struct PrivacyParams {
  double epsilon = 0;
  double delta = 0;
  double gamma = 0;  // tail parameter; <= 0 means "use log(horizon)"
  int class_size = 0;
  long long horizon = 0;

  /// Width of the clipped log-likelihood range: log((K+1) * T).
  double sensitivity() const;

  /// Tail parameter actually used (gamma, or log T when unset).
  double resolved_gamma() const;
};

/// Tail-offset constant: the magnitude below which a Laplace draw keeps the
/// privatized loss inside [0, 1]; exceeded with probability
/// exp(-(gamma + log K + log T)) per draw.
/// Throws kDeltaRequired for the approximate mechanism with delta == 0.
double noise_shift(const PrivacyParams& params, Mechanism mech);

/// Normalizer 1 / (sensitivity + 2 * noise_shift): scales the shifted noisy
/// log-likelihood into [0, 1].
double loss_normalizer(const PrivacyParams& params, Mechanism mech);

/// Laplace scale used by the mechanism: pure sensitivity/epsilon, approximate
/// (2*sqrt(2K ln(1/delta)) + sqrt(K epsilon)) * sensitivity / epsilon.
double laplace_scale(const PrivacyParams& params, Mechanism mech);

/// Zero-mean Laplace draw via inverse CDF from one uniform; scale must be
/// positive. Pr(|X| >= scale * s) = exp(-s).
double sample_laplace(double scale, SeededRng& rng);

/// Privatized per-round observation: dense length-K vector (approximate
/// mechanism) or one revealed coordinate (pure mechanism).
struct PrivateMessage {
  enum class Kind { kDense, kSparse };
  Kind kind = Kind::kDense;
  Eigen::VectorXd dense;  // kDense only
  int index = -1;         // kSparse only
  double value = 0;       // kSparse only

  bool is_dense() const { return kind == Kind::kDense; }
  nlohmann::json to_json() const;
};

/// Side channel for verification harnesses; never crosses the privacy
/// boundary into learner code.
struct PrivatizeDiag {
  int clipped_label = -1;
  Eigen::VectorXd laplace;  // one draw per coordinate
};

/// Approximate-DP response: privatizes the full clipped log-likelihood vector
/// with independent Laplace noise per coordinate. The clipped label is drawn
/// once and shared across coordinates.
PrivateMessage respond_approx(const ClipPlan& plan, const HypothesisClass& cls,
                              Feature x, int true_label,
                              const PrivacyParams& params, SeededRng& rng,
                              PrivatizeDiag* diag = nullptr);

/// Pure-DP response: reveals the privatized log-likelihood of one coordinate
/// chosen uniformly at random, independently of everything else.
PrivateMessage respond_pure(const ClipPlan& plan, const HypothesisClass& cls,
                            Feature x, int true_label,
                            const PrivacyParams& params, SeededRng& rng,
                            PrivatizeDiag* diag = nullptr);

/// Randomized response over M labels: keeps the label with probability
/// 1 - eta, otherwise uniform over the other M-1, with
/// eta = 1 / (e^epsilon / (M-1) + 1).
int rr_channel(int label, int label_count, double epsilon, SeededRng& rng);

/// Flip probability of rr_channel.
double rr_flip_probability(int label_count, double epsilon);

struct AccountantResult {
  double per_coordinate_epsilon = 0;
  double composed_epsilon = 0;
  bool ok = false;
};

/// Advanced-composition budget check for the approximate mechanism: verifies
/// that K independent per-coordinate releases at the scale used by
/// respond_approx compose to at most epsilon.
AccountantResult accountant_check(int k, double epsilon, double delta);

/// Exact supremum of the absolute log-density ratio of a Laplace mechanism on
/// inputs differing by at most `sensitivity`.
double dp_ratio_bound(double sensitivity, double scale);

}  // namespace privseq
