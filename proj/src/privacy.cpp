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

#include "privseq/privacy.hpp"

#include <cmath>

namespace privseq {

double PrivacyParams::sensitivity() const {
  return std::log(static_cast<double>(class_size + 1) * static_cast<double>(horizon));
}

double PrivacyParams::resolved_gamma() const {
  return gamma > 0 ? gamma : std::log(static_cast<double>(horizon));
}

namespace {

// 2*sqrt(2K ln(1/delta)) + sqrt(K epsilon): the dense mechanism's budget
// split across K coordinates.
double approx_budget_divisor(int k, double epsilon, double delta) {
  return 2.0 * std::sqrt(2.0 * k * std::log(1.0 / delta)) + std::sqrt(k * epsilon);
}

void require_delta(const PrivacyParams& params) {
  if (params.delta <= 0) {
    throw_error(ErrorCode::kDeltaRequired,
                "the approximate mechanism needs delta > 0");
  }
}

}  // namespace

double noise_shift(const PrivacyParams& params, Mechanism mech) {
  const double tail = params.resolved_gamma() +
                      std::log(static_cast<double>(params.class_size)) +
                      std::log(static_cast<double>(params.horizon));
  return laplace_scale(params, mech) * tail;
}

double loss_normalizer(const PrivacyParams& params, Mechanism mech) {
  return 1.0 / (params.sensitivity() + 2.0 * noise_shift(params, mech));
}

double laplace_scale(const PrivacyParams& params, Mechanism mech) {
  const double base = params.sensitivity() / params.epsilon;
  if (mech == Mechanism::kPureDp) return base;
  require_delta(params);
  return approx_budget_divisor(params.class_size, params.epsilon, params.delta) * base;
}

double sample_laplace(double scale, SeededRng& rng) {
  if (scale <= 0) {
    throw_error(ErrorCode::kInvalidArgument, "Laplace scale must be positive");
  }
  const double u = rng.uniform01_open() - 0.5;  // in (-0.5, 0.5)
  const double magnitude = -scale * std::log(1.0 - 2.0 * std::abs(u));
  return u < 0 ? -magnitude : magnitude;
}

nlohmann::json PrivateMessage::to_json() const {
  nlohmann::json j;
  if (is_dense()) {
    nlohmann::json arr = nlohmann::json::array();
    for (Eigen::Index i = 0; i < dense.size(); ++i) arr.push_back(dense[i]);
    j["dense"] = std::move(arr);
  } else {
    j["sparse"] = {{"j", index}, {"v", value}};
  }
  return j;
}

PrivateMessage respond_approx(const ClipPlan& plan, const HypothesisClass& cls,
                              Feature x, int true_label,
                              const PrivacyParams& params, SeededRng& rng,
                              PrivatizeDiag* diag) {
  require_delta(params);
  const auto k = static_cast<int>(cls.size());
  const int clipped = sample_clipped(plan, true_label, rng);

  const double scale = laplace_scale(params, Mechanism::kApproxDp);
  const double shift = noise_shift(params, Mechanism::kApproxDp);
  const double normalizer = loss_normalizer(params, Mechanism::kApproxDp);
  const double log_m = std::log(static_cast<double>(plan.label_count));

  Eigen::VectorXd noise(k);
  Eigen::VectorXd response(k);
  for (int j = 0; j < k; ++j) {
    noise[j] = sample_laplace(scale, rng);
    const double stat = std::log(pushforward_at(plan, cls[j](x), clipped));
    response[j] = -normalizer * (stat + noise[j] + log_m - shift);
  }
  if (diag != nullptr) {
    diag->clipped_label = clipped;
    diag->laplace = noise;
  }
  PrivateMessage msg;
  msg.kind = PrivateMessage::Kind::kDense;
  msg.dense = std::move(response);
  return msg;
}

PrivateMessage respond_pure(const ClipPlan& plan, const HypothesisClass& cls,
                            Feature x, int true_label,
                            const PrivacyParams& params, SeededRng& rng,
                            PrivatizeDiag* diag) {
  const auto k = static_cast<int>(cls.size());
  // The revealed coordinate is drawn before (and independently of) the label
  // randomization.
  const int picked = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(k)));
  const int clipped = sample_clipped(plan, true_label, rng);

  const double scale = laplace_scale(params, Mechanism::kPureDp);
  const double shift = noise_shift(params, Mechanism::kPureDp);
  const double normalizer = loss_normalizer(params, Mechanism::kPureDp);
  const double log_m = std::log(static_cast<double>(plan.label_count));

  // One latent draw per coordinate; only the picked one is ever revealed.
  // The extra draws leave the message's law unchanged and let verification
  // evaluate the realized noise terms of the risk bound.
  Eigen::VectorXd noise(k);
  for (int j = 0; j < k; ++j) noise[j] = sample_laplace(scale, rng);

  const double stat = std::log(pushforward_at(plan, cls[picked](x), clipped));
  PrivateMessage msg;
  msg.kind = PrivateMessage::Kind::kSparse;
  msg.index = picked;
  msg.value = -normalizer * (stat + noise[picked] + log_m - shift);

  if (diag != nullptr) {
    diag->clipped_label = clipped;
    diag->laplace = std::move(noise);
  }
  return msg;
}

double rr_flip_probability(int label_count, double epsilon) {
  return 1.0 / (std::exp(epsilon) / (label_count - 1) + 1.0);
}

int rr_channel(int label, int label_count, double epsilon, SeededRng& rng) {
  if (label_count < 2) {
    throw_error(ErrorCode::kInvalidArgument, "randomized response needs M >= 2");
  }
  if (epsilon <= 0) {
    throw_error(ErrorCode::kInvalidArgument, "randomized response needs epsilon > 0");
  }
  const double eta = rr_flip_probability(label_count, epsilon);
  if (rng.uniform01() >= eta) return label;
  const auto other =
      static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(label_count - 1)));
  return other < label ? other : other + 1;
}

AccountantResult accountant_check(int k, double epsilon, double delta) {
  AccountantResult result;
  result.per_coordinate_epsilon = epsilon / approx_budget_divisor(k, epsilon, delta);
  const double eps2 = result.per_coordinate_epsilon * result.per_coordinate_epsilon;
  result.composed_epsilon =
      k * eps2 / 2.0 + std::sqrt(2.0 * std::log(1.0 / delta) * k * eps2);
  result.ok = result.composed_epsilon <= epsilon;
  return result;
}

double dp_ratio_bound(double sensitivity, double scale) {
  if (scale <= 0) {
    throw_error(ErrorCode::kInvalidArgument, "Laplace scale must be positive");
  }
  return sensitivity / scale;
}

}  // namespace privseq
