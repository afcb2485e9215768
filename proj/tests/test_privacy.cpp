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

#include <cmath>
#include <vector>

#include "doctest.h"
#include "privseq/instances.hpp"
#include "privseq/privacy.hpp"

using namespace privseq;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> values) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

HypothesisClass constant_class(std::vector<Eigen::VectorXd> rows) {
  std::vector<Hypothesis> members;
  for (auto& r : rows) members.push_back(Hypothesis::constant(make_dist(std::move(r))));
  return HypothesisClass(std::move(members));
}

PrivacyParams params_for(int k, long long t, double epsilon, double delta,
                         double gamma = 0) {
  PrivacyParams p;
  p.epsilon = epsilon;
  p.delta = delta;
  p.gamma = gamma;
  p.class_size = k;
  p.horizon = t;
  return p;
}

double laplace_log_density(double x, double scale) {
  return -std::log(2.0 * scale) - std::abs(x) / scale;
}

}  // namespace

TEST_CASE("noise shift and normalizer match the pure-mechanism constants") {
  // K=4, T=100, eps=1, gamma=ln 100; sensitivity ln 500.
  const auto p = params_for(4, 100, 1.0, 0.0, std::log(100.0));
  CHECK(p.sensitivity() == doctest::Approx(6.214608098422191).epsilon(1e-12));
  CHECK(noise_shift(p, Mechanism::kPureDp) ==
        doctest::Approx(65.85393202832074).epsilon(1e-12));
  CHECK(loss_normalizer(p, Mechanism::kPureDp) ==
        doctest::Approx(0.007250450085289354).epsilon(1e-12));
}

TEST_CASE("approximate constants need delta and shrink with epsilon") {
  const auto p = params_for(4, 100, 1.0, 0.01, std::log(100.0));
  CHECK(noise_shift(p, Mechanism::kApproxDp) ==
        doctest::Approx(931.1362083483159).epsilon(1e-12));

  const auto no_delta = params_for(4, 100, 1.0, 0.0, std::log(100.0));
  try {
    noise_shift(no_delta, Mechanism::kApproxDp);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDeltaRequired);
  }

  // Monotonicity in epsilon for both variants.
  for (const auto mech : {Mechanism::kPureDp, Mechanism::kApproxDp}) {
    double previous = std::numeric_limits<double>::infinity();
    for (double eps : {0.5, 1.0, 2.0, 4.0}) {
      const auto q = params_for(8, 1000, eps, 1e-4, 3.0);
      const double shift = noise_shift(q, mech);
      CHECK(shift < previous);
      previous = shift;
    }
  }
}

TEST_CASE("laplace sampler has the right mean and tails") {
  SeededRng rng(101, 0);
  double sum = 0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) sum += sample_laplace(1.0, rng);
  CHECK(std::abs(sum / n) <= 0.01);

  // Pr(|X| >= b ln 100) = 0.01.
  const double b = 2.0;
  const double threshold = b * std::log(100.0);
  int tail = 0;
  const int n2 = 100000;
  for (int i = 0; i < n2; ++i) {
    if (std::abs(sample_laplace(b, rng)) >= threshold) ++tail;
  }
  CHECK(std::abs(tail / static_cast<double>(n2) - 0.01) <= 0.003);

  CHECK_THROWS_AS(sample_laplace(0.0, rng), Error);
}

TEST_CASE("dense response stays in range at high-confidence gamma") {
  SeededRng rng(7, 2);
  const auto cls = random_instance(4, 8, 0.8, rng);
  const long long t = 200;
  const int rounds = 10000;
  const auto p = params_for(4, t, 1.0, 1e-3,
                            std::log(4.0 * t * static_cast<double>(rounds)));
  const ClipPlan plan = build_clip_plan(cls, 0, t);
  const LabelDist& truth = cls[1](0);
  for (int i = 0; i < rounds; ++i) {
    const int label = static_cast<int>(sample_label(truth, rng));
    const PrivateMessage msg = respond_approx(plan, cls, 0, label, p, rng);
    REQUIRE(msg.is_dense());
    for (Eigen::Index j = 0; j < msg.dense.size(); ++j) {
      CHECK(msg.dense[j] >= 0.0);
      CHECK(msg.dense[j] <= 1.0);
    }
  }
}

TEST_CASE("dense response differs across coordinates only through noise") {
  // All hypotheses equal: pre-noise statistics identical, so the response
  // differences reduce to scaled Laplace differences.
  const auto cls = constant_class(
      {vec({0.4, 0.6}), vec({0.4, 0.6}), vec({0.4, 0.6})});
  const long long t = 50;
  const auto p = params_for(3, t, 1.0, 1e-2);
  const ClipPlan plan = build_clip_plan(cls, 0, t);
  SeededRng rng(13, 5);
  PrivatizeDiag diag;
  const PrivateMessage msg = respond_approx(plan, cls, 0, 1, p, rng, &diag);
  const double c = loss_normalizer(p, Mechanism::kApproxDp);
  for (Eigen::Index j = 1; j < msg.dense.size(); ++j) {
    const double observed = msg.dense[j] - msg.dense[0];
    const double from_noise = -c * (diag.laplace[j] - diag.laplace[0]);
    CHECK(observed == doctest::Approx(from_noise).epsilon(1e-10));
  }
}

TEST_CASE("per-coordinate budget of the dense mechanism") {
  const auto p = params_for(8, 1000, 2.0, 1e-4);
  const double ratio =
      dp_ratio_bound(p.sensitivity(), laplace_scale(p, Mechanism::kApproxDp));
  const double expected =
      p.epsilon / (2.0 * std::sqrt(2.0 * 8 * std::log(1.0 / p.delta)) +
                   std::sqrt(8 * p.epsilon));
  CHECK(ratio == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("sparse response reveals exactly one coordinate, uniformly") {
  SeededRng rng(23, 1);
  const auto cls = random_instance(5, 6, 1.0, rng);
  const long long t = 100;
  const auto p = params_for(5, t, 1.0, 0.0);
  const ClipPlan plan = build_clip_plan(cls, 0, t);

  std::vector<int> counts(5, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const PrivateMessage msg = respond_pure(plan, cls, 0, 2, p, rng);
    REQUIRE_FALSE(msg.is_dense());
    REQUIRE(msg.index >= 0);
    REQUIRE(msg.index < 5);
    ++counts[static_cast<std::size_t>(msg.index)];
  }
  for (int c : counts) {
    CHECK(std::abs(c / static_cast<double>(n) - 0.2) <= 0.01);
  }
}

TEST_CASE("sparse response value is in range when the noise is moderate") {
  SeededRng rng(29, 4);
  const auto cls = random_instance(4, 8, 0.8, rng);
  const long long t = 100;
  const auto p = params_for(4, t, 1.0, 0.0);
  const double shift = noise_shift(p, Mechanism::kPureDp);
  const ClipPlan plan = build_clip_plan(cls, 0, t);
  int checked = 0;
  for (int i = 0; i < 5000; ++i) {
    PrivatizeDiag diag;
    const PrivateMessage msg = respond_pure(plan, cls, 0, 1, p, rng, &diag);
    if (std::abs(diag.laplace[msg.index]) <= shift) {
      CHECK(msg.value >= 0.0);
      CHECK(msg.value <= 1.0);
      ++checked;
    }
  }
  CHECK(checked > 0);
}

TEST_CASE("randomized response keeps the label with the advertised rate") {
  const double eps = std::log(3.0);
  CHECK(rr_flip_probability(3, eps) == doctest::Approx(0.4).epsilon(1e-12));

  // Degradation factor (e^eps - 1) / (e^eps + M - 1).
  const double c_eta = (std::exp(eps) - 1.0) / (std::exp(eps) + 3.0 - 1.0);
  CHECK(c_eta == doctest::Approx(0.4).epsilon(1e-12));

  SeededRng rng(31, 0);
  int kept = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    if (rr_channel(1, 3, eps, rng) == 1) ++kept;
  }
  CHECK(std::abs(kept / static_cast<double>(n) - 0.6) <= 0.01);
}

TEST_CASE("randomized response channel matrix respects the budget") {
  for (const int m : {2, 3, 8, 64}) {
    for (const double eps : {0.5, 1.0, 2.0}) {
      const double eta = rr_flip_probability(m, eps);
      Eigen::MatrixXd channel(m, m);
      for (int y = 0; y < m; ++y) {
        for (int out = 0; out < m; ++out) {
          channel(y, out) = out == y ? 1.0 - eta : eta / (m - 1);
        }
      }
      for (int y = 0; y < m; ++y) {
        CHECK(channel.row(y).sum() == doctest::Approx(1.0).epsilon(1e-12));
      }
      double worst = 0;
      for (int out = 0; out < m; ++out) {
        for (int y1 = 0; y1 < m; ++y1) {
          for (int y2 = 0; y2 < m; ++y2) {
            worst = std::max(worst, channel(y1, out) / channel(y2, out));
          }
        }
      }
      CHECK(worst <= std::exp(eps) * (1 + 1e-12));
      CHECK(worst == doctest::Approx(std::exp(eps)).epsilon(1e-9));
    }
  }
}

TEST_CASE("accountant example and grid") {
  const auto r = accountant_check(4, 1.0, 0.01);
  CHECK(r.per_coordinate_epsilon == doctest::Approx(0.07072427367542167).epsilon(1e-12));
  CHECK(r.composed_epsilon == doctest::Approx(0.43927957209841023).epsilon(1e-12));
  CHECK(r.ok);

  for (int k = 1; k <= 1024; k *= 2) {
    for (const double eps : {0.1, 0.5, 1.0, 2.0}) {
      for (const double delta : {1e-2, 1e-6}) {
        CHECK(accountant_check(k, eps, delta).ok);
      }
    }
  }
}

TEST_CASE("dp ratio bound on the pure mechanism's scale") {
  const auto p = params_for(16, 100000, 0.7, 0.0);
  const double scale = laplace_scale(p, Mechanism::kPureDp);
  CHECK(dp_ratio_bound(p.sensitivity(), scale) ==
        doctest::Approx(0.7).epsilon(1e-12));
  CHECK(dp_ratio_bound(0.0, 2.5) == 0.0);
}

TEST_CASE("laplace log-density differences respect the ratio bound") {
  SeededRng rng(37, 0);
  const double sensitivity = 2.3;
  const double scale = 1.7;
  const double bound = dp_ratio_bound(sensitivity, scale);
  for (int i = 0; i < 1000; ++i) {
    const double center1 = 4.0 * rng.uniform01() - 2.0;
    const double center2 = center1 + sensitivity * (2.0 * rng.uniform01() - 1.0);
    const double out = 8.0 * rng.uniform01() - 4.0;
    const double diff = laplace_log_density(out - center1, scale) -
                        laplace_log_density(out - center2, scale);
    CHECK(std::abs(diff) <= bound + 1e-12);
  }
}

TEST_CASE("pre-noise statistic range matches the clipped bounds") {
  SeededRng rng(41, 0);
  const auto cls = random_instance(6, 10, 0.8, rng);
  const long long t = 77;
  const ClipPlan plan = build_clip_plan(cls, 0, t);
  const double lo = std::log(1.0 / (static_cast<double>(t) * plan.clipped_size));
  const double hi = std::log(1.0 / cls.label_count());
  const double log_m = std::log(static_cast<double>(cls.label_count()));
  const double sensitivity =
      std::log(static_cast<double>(cls.size() + 1) * static_cast<double>(t));
  for (Eigen::Index j = 0; j < cls.size(); ++j) {
    for (int i = 0; i < plan.clipped_size; ++i) {
      const double stat = std::log(pushforward_at(plan, cls[j](0), i));
      CHECK(stat >= lo - 1e-12);
      CHECK(stat <= hi + 1e-12);
      // Centered form: log(pbar * M) in [-sensitivity, 0].
      const double centered = stat + log_m;
      CHECK(centered <= 1e-12);
      CHECK(centered >= -sensitivity - 1e-12);
    }
  }
}

TEST_CASE("private message serialization") {
  PrivateMessage dense;
  dense.kind = PrivateMessage::Kind::kDense;
  dense.dense = vec({0.25, 0.5});
  const auto dense_json = dense.to_json();
  CHECK(dense_json.contains("dense"));
  CHECK(dense_json.at("dense").size() == 2);

  PrivateMessage sparse;
  sparse.kind = PrivateMessage::Kind::kSparse;
  sparse.index = 3;
  sparse.value = 0.125;
  const auto sparse_json = sparse.to_json();
  CHECK(sparse_json.at("sparse").at("j") == 3);
  CHECK(sparse_json.at("sparse").at("v") == doctest::Approx(0.125));
}
