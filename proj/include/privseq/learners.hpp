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

#include "privseq/clipping.hpp"
#include "privseq/core.hpp"
#include "privseq/privacy.hpp"

namespace privseq {

/// Multiplicative-weights state. Weights stay positive and are rescaled to a
/// maximum of one after every update, which leaves the normalized weights
/// (and hence every prediction) exactly invariant while preventing underflow
/// at long horizons.
struct WeightState {
  Eigen::VectorXd weights;
  double learning_rate = 0;
  long long round = 0;

  Eigen::VectorXd normalized() const { return weights / weights.sum(); }

  static WeightState initial(Eigen::Index k, double learning_rate);
};

double wma_learning_rate(Eigen::Index k, long long horizon);   // sqrt(2 ln K / T)
double exp3_learning_rate(Eigen::Index k, long long horizon);  // sqrt(2 K ln K / T)

/// One full-vector multiplicative update. Loss entries are clamped into
/// [0, 1] before use.
WeightState wma_update(const WeightState& state, Eigen::VectorXd loss);

/// Weighted mixture of the hypotheses' distributions at `x`.
LabelDist hypothesis_mixture(const HypothesisClass& cls, Feature x,
                             const Eigen::VectorXd& normalized_weights);

struct RoundOutput {
  LabelDist prediction;       // over the label alphabet
  LabelDist clipped_mixture;  // over the clipped alphabet
  ClipPlan plan;
};

struct RoundResult {
  RoundOutput output;
  WeightState state;
  int clamped = 0;  // loss entries that fell outside [0, 1]
};

/// Approximate-DP learner round: emits the prediction from history alone,
/// then consumes a dense private message. Learning rate sqrt(2 ln K / T).
RoundResult wma_ldp_round(const WeightState& state, const HypothesisClass& cls,
                          Feature x, const PrivacyParams& params,
                          const PrivateMessage& message);

/// Pure-DP learner round: same prediction path, but only the revealed
/// coordinate's weight is updated. Learning rate sqrt(2 K ln K / T).
RoundResult exp3_pure_round(const WeightState& state, const HypothesisClass& cls,
                            Feature x, const PrivacyParams& params,
                            const PrivateMessage& message);

struct RrRoundResult {
  LabelDist prediction;  // unclipped mixture
  WeightState state;
};

/// Randomized-response baseline round: log-loss of the channel-smoothed
/// hypotheses at the flipped label, rescaled into [0, 1] by its analytic
/// range, then a plain WMA update.
RrRoundResult rr_baseline_round(const WeightState& state, const HypothesisClass& cls,
                                Feature x, double epsilon, int flipped_label);

/// Accumulates realized losses to check the deterministic regret and
/// potential inequalities after a run.
class RegretLedger {
 public:
  explicit RegretLedger(Eigen::Index k);

  void add_dense(const Eigen::VectorXd& normalized_weights, const Eigen::VectorXd& loss);
  void add_sparse(const Eigen::VectorXd& normalized_weights, int index, double value);

  /// Realized regret: sum_t <w~_t, v_t> - min_i sum_t v_{t,i}.
  double realized_regret() const;

  /// sum_t sum_j w~_j v_{t,j}^2 (the quadratic potential term).
  double quadratic_term() const { return quadratic_; }

  /// Full-information bound sqrt(2 T ln K) on realized regret.
  bool wma_bound_holds() const;

  /// Potential inequality: regret <= ln K / eta + (eta/2) * quadratic term.
  bool potential_holds(double eta) const;

  long long rounds() const { return rounds_; }

 private:
  Eigen::VectorXd cumulative_;
  double weighted_ = 0;
  double quadratic_ = 0;
  long long rounds_ = 0;
};

}  // namespace privseq
