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

#include "privseq/learners.hpp"

#include <cmath>
#include <utility>

namespace privseq {

WeightState WeightState::initial(Eigen::Index k, double learning_rate) {
  WeightState state;
  state.weights = Eigen::VectorXd::Ones(k);
  state.learning_rate = learning_rate;
  state.round = 0;
  return state;
}

double wma_learning_rate(Eigen::Index k, long long horizon) {
  return std::sqrt(2.0 * std::log(static_cast<double>(k)) / static_cast<double>(horizon));
}

double exp3_learning_rate(Eigen::Index k, long long horizon) {
  return std::sqrt(2.0 * static_cast<double>(k) * std::log(static_cast<double>(k)) /
                   static_cast<double>(horizon));
}

namespace {

int clamp01(Eigen::VectorXd& loss) {
  int clamped = 0;
  for (Eigen::Index j = 0; j < loss.size(); ++j) {
    if (loss[j] < 0) {
      loss[j] = 0;
      ++clamped;
    } else if (loss[j] > 1) {
      loss[j] = 1;
      ++clamped;
    }
  }
  return clamped;
}

void rescale_to_max(Eigen::VectorXd& weights) {
  weights /= weights.maxCoeff();
}

}  // namespace

WeightState wma_update(const WeightState& state, Eigen::VectorXd loss) {
  clamp01(loss);
  WeightState next = state;
  next.weights = state.weights.array() * (-state.learning_rate * loss.array()).exp();
  rescale_to_max(next.weights);
  next.round = state.round + 1;
  return next;
}

LabelDist hypothesis_mixture(const HypothesisClass& cls, Feature x,
                             const Eigen::VectorXd& normalized_weights) {
  Eigen::VectorXd mix = Eigen::VectorXd::Zero(cls.label_count());
  for (Eigen::Index j = 0; j < cls.size(); ++j) {
    mix.noalias() += normalized_weights[j] * cls[j](x).probs();
  }
  return LabelDist(std::move(mix));
}

namespace {

RoundOutput make_round_output(const HypothesisClass& cls, Feature x,
                              const PrivacyParams& params,
                              const Eigen::VectorXd& normalized_weights) {
  RoundOutput out;
  out.plan = build_clip_plan(cls, x, params.horizon);
  // Mixing before the pushforward is exact: the clipped map is linear.
  const LabelDist mixture = hypothesis_mixture(cls, x, normalized_weights);
  out.clipped_mixture = pushforward(out.plan, mixture);
  out.prediction = unclip(out.plan, out.clipped_mixture);
  return out;
}

}  // namespace

RoundResult wma_ldp_round(const WeightState& state, const HypothesisClass& cls,
                          Feature x, const PrivacyParams& params,
                          const PrivateMessage& message) {
  if (!message.is_dense()) {
    throw_error(ErrorCode::kInvalidArgument, "dense message required");
  }
  if (message.dense.size() != cls.size()) {
    throw_error(ErrorCode::kDimensionMismatch,
                "message length disagrees with the class size");
  }
  RoundResult result;
  result.output = make_round_output(cls, x, params, state.normalized());

  Eigen::VectorXd loss = message.dense;
  result.clamped = clamp01(loss);
  result.state = state;
  result.state.weights =
      state.weights.array() * (-state.learning_rate * loss.array()).exp();
  rescale_to_max(result.state.weights);
  result.state.round = state.round + 1;
  return result;
}

RoundResult exp3_pure_round(const WeightState& state, const HypothesisClass& cls,
                            Feature x, const PrivacyParams& params,
                            const PrivateMessage& message) {
  if (message.is_dense()) {
    throw_error(ErrorCode::kInvalidArgument, "sparse message required");
  }
  if (message.index < 0 || message.index >= cls.size()) {
    throw_error(ErrorCode::kIndexOutOfRange,
                "revealed coordinate " + std::to_string(message.index) +
                    " outside the class");
  }
  RoundResult result;
  result.output = make_round_output(cls, x, params, state.normalized());

  double value = message.value;
  if (value < 0) {
    value = 0;
    result.clamped = 1;
  } else if (value > 1) {
    value = 1;
    result.clamped = 1;
  }
  result.state = state;
  result.state.weights[message.index] =
      state.weights[message.index] * std::exp(-state.learning_rate * value);
  rescale_to_max(result.state.weights);
  result.state.round = state.round + 1;
  return result;
}

RrRoundResult rr_baseline_round(const WeightState& state, const HypothesisClass& cls,
                                Feature x, double epsilon, int flipped_label) {
  const auto m = static_cast<int>(cls.label_count());
  const auto k = cls.size();
  const double eta = rr_flip_probability(m, epsilon);

  RrRoundResult result;
  result.prediction = hypothesis_mixture(cls, x, state.normalized());

  // Channel-smoothed likelihood of the revealed label; its negative log has
  // analytic range exactly [lo, lo + epsilon].
  const double lo = -std::log(1.0 - eta);
  Eigen::VectorXd loss(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    const double mass = cls[j](x)[flipped_label];
    const double smoothed = (1.0 - eta) * mass + eta * (1.0 - mass) / (m - 1);
    loss[j] = (-std::log(smoothed) - lo) / epsilon;
  }
  result.state = wma_update(state, std::move(loss));
  return result;
}

RegretLedger::RegretLedger(Eigen::Index k) : cumulative_(Eigen::VectorXd::Zero(k)) {}

void RegretLedger::add_dense(const Eigen::VectorXd& normalized_weights,
                             const Eigen::VectorXd& loss) {
  weighted_ += normalized_weights.dot(loss);
  quadratic_ += normalized_weights.dot(loss.cwiseProduct(loss));
  cumulative_ += loss;
  ++rounds_;
}

void RegretLedger::add_sparse(const Eigen::VectorXd& normalized_weights, int index,
                              double value) {
  weighted_ += normalized_weights[index] * value;
  quadratic_ += normalized_weights[index] * value * value;
  cumulative_[index] += value;
  ++rounds_;
}

double RegretLedger::realized_regret() const {
  return weighted_ - cumulative_.minCoeff();
}

bool RegretLedger::wma_bound_holds() const {
  const double bound = std::sqrt(2.0 * static_cast<double>(rounds_) *
                                 std::log(static_cast<double>(cumulative_.size())));
  return realized_regret() <= bound;
}

bool RegretLedger::potential_holds(double eta) const {
  const double bound =
      std::log(static_cast<double>(cumulative_.size())) / eta + eta / 2.0 * quadratic_;
  return realized_regret() <= bound;
}

}  // namespace privseq
