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
#include "privseq/clipping.hpp"
#include "privseq/instances.hpp"
#include "privseq/metrics.hpp"

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
  members.reserve(rows.size());
  for (auto& r : rows) members.push_back(Hypothesis::constant(make_dist(std::move(r))));
  return HypothesisClass(std::move(members));
}

}  // namespace

TEST_CASE("clip plan block sizes follow the ceiling rule") {
  // K=2, M=2, f1=(0.5,0.5), f2=(1,0): blocks ceil(2*1)=2 and ceil(2*0.5)=1.
  const auto cls = constant_class({vec({0.5, 0.5}), vec({1, 0})});
  const ClipPlan plan = build_clip_plan(cls, 0, 100);
  CHECK(plan.block_sizes[0] == 2);
  CHECK(plan.block_sizes[1] == 1);
  CHECK(plan.clipped_size == 3);
  CHECK(plan.offsets[0] == 0);
  CHECK(plan.offsets[1] == 2);
  CHECK(plan.offsets[2] == 3);

  const auto uniform = constant_class({vec({0.5, 0.5})});
  const ClipPlan plan_u = build_clip_plan(uniform, 0, 100);
  CHECK(plan_u.block_sizes[0] == 1);
  CHECK(plan_u.block_sizes[1] == 1);
  CHECK(plan_u.clipped_size == 2);

  const auto point = constant_class({vec({1, 0})});
  const ClipPlan plan_p = build_clip_plan(point, 0, 100);
  CHECK(plan_p.block_sizes[0] == 2);
  CHECK(plan_p.block_sizes[1] == 0);
  CHECK(plan_p.clipped_size == 2);
}

TEST_CASE("clip plan blocks partition the clipped alphabet") {
  SeededRng rng(5, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const int k = 1 + static_cast<int>(rng.uniform_below(6));
    const int m = 2 + static_cast<int>(rng.uniform_below(12));
    const auto cls = random_instance(k, m, 0.7, rng);
    const ClipPlan plan = build_clip_plan(cls, 0, 50);

    CHECK(plan.clipped_size >= m);
    CHECK(plan.clipped_size <= m * (k + 1));
    CHECK(plan.block_sizes.sum() == plan.clipped_size);
    // Each clipped label owned exactly once, in increasing label order.
    int covered = 0;
    for (int y = 0; y < m; ++y) {
      CHECK(plan.offsets[y] == covered);
      for (int i = 0; i < plan.block_sizes[y]; ++i) {
        CHECK(plan.label_of(covered + i) == y);
      }
      covered += plan.block_sizes[y];
    }
    CHECK(covered == plan.clipped_size);
  }
}

TEST_CASE("sample_within_block draws uniformly") {
  const auto cls = constant_class({vec({0.5, 0.5}), vec({1, 0})});
  const ClipPlan plan = build_clip_plan(cls, 0, 100);
  SeededRng rng(21, 0);

  // Singleton block: always its lone element.
  for (int i = 0; i < 100; ++i) {
    CHECK(sample_within_block(plan, 1, rng) == 2);
  }

  int counts[2] = {0, 0};
  const int n = 10000;
  for (int i = 0; i < n; ++i) ++counts[sample_within_block(plan, 0, rng)];
  CHECK(std::abs(counts[0] / static_cast<double>(n) - 0.5) <= 0.02);
  CHECK(std::abs(counts[1] / static_cast<double>(n) - 0.5) <= 0.02);
}

TEST_CASE("empty blocks reject sampling") {
  const auto cls = constant_class({vec({1, 0})});
  const ClipPlan plan = build_clip_plan(cls, 0, 100);
  SeededRng rng(3, 0);
  try {
    sample_within_block(plan, 1, rng);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kEmptyBlock);
  }
  CHECK_THROWS_AS(sample_clipped(plan, 1, rng), Error);
}

TEST_CASE("sample_clipped mixes block and uniform draws") {
  // Blocks (1,1), clipped size 2, T=2: Pr(output = own block) = 0.5 + 0.25.
  const auto cls = constant_class({vec({0.5, 0.5})});
  const ClipPlan plan = build_clip_plan(cls, 0, 2);
  SeededRng rng(17, 0);
  const int n = 100000;
  int own = 0;
  for (int i = 0; i < n; ++i) {
    if (sample_clipped(plan, 0, rng) == 0) ++own;
  }
  CHECK(std::abs(own / static_cast<double>(n) - 0.75) < 0.01);
}

TEST_CASE("sample_clipped law matches the pushforward of a point mass") {
  const auto cls = constant_class({vec({0.6, 0.3, 0.1}), vec({0.2, 0.2, 0.6})});
  const ClipPlan plan = build_clip_plan(cls, 0, 8);
  SeededRng rng(29, 1);

  const int label = 1;
  const LabelDist law =
      pushforward(plan, LabelDist::point_mass(cls.label_count(), label));
  Eigen::VectorXd empirical = Eigen::VectorXd::Zero(plan.clipped_size);
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    empirical[sample_clipped(plan, label, rng)] += 1.0;
  }
  empirical /= static_cast<double>(n);
  CHECK(tv(empirical, law.probs()) < 0.01);
}

TEST_CASE("pushforward closed form on a two-label plan") {
  const auto cls = constant_class({vec({0.5, 0.5})});
  const ClipPlan plan = build_clip_plan(cls, 0, 2);
  const LabelDist q = pushforward(plan, make_dist(vec({0.5, 0.5})));
  CHECK(q[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(q[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("pushforward of uniform over unit blocks stays uniform") {
  const auto cls = constant_class({vec({0.25, 0.25, 0.25, 0.25})});
  for (long long t : {2LL, 7LL, 1000LL}) {
    const ClipPlan plan = build_clip_plan(cls, 0, t);
    REQUIRE(plan.clipped_size == 4);
    const LabelDist q = pushforward(plan, LabelDist::uniform(4));
    for (int i = 0; i < 4; ++i) CHECK(q[i] == doctest::Approx(0.25).epsilon(1e-12));
  }
}

TEST_CASE("pushforward range property") {
  SeededRng rng(31, 0);
  for (int trial = 0; trial < 30; ++trial) {
    const int k = 1 + static_cast<int>(rng.uniform_below(8));
    const int m = 2 + static_cast<int>(rng.uniform_below(20));
    const long long t = 2 + static_cast<long long>(rng.uniform_below(1000));
    const auto cls = random_instance(k, m, 0.5, rng);
    const ClipPlan plan = build_clip_plan(cls, 0, t);
    const double lo = 1.0 / (static_cast<double>(t) * plan.clipped_size);
    const double hi = 1.0 / m;
    for (Eigen::Index j = 0; j < cls.size(); ++j) {
      const LabelDist q = pushforward(plan, cls[j](0));
      for (Eigen::Index i = 0; i < q.size(); ++i) {
        CHECK(q[i] >= lo * (1 - 1e-12));
        CHECK(q[i] <= hi * (1 + 1e-12));
      }
    }
  }
}

TEST_CASE("pushforward is linear in the distribution") {
  SeededRng rng(37, 0);
  const auto cls = random_instance(5, 9, 1.0, rng);
  const ClipPlan plan = build_clip_plan(cls, 0, 64);
  const LabelDist p1 = cls[0](0);
  const LabelDist p2 = cls[1](0);
  for (double alpha : {0.0, 0.25, 0.7, 1.0}) {
    const LabelDist mixed =
        make_dist(alpha * p1.probs() + (1 - alpha) * p2.probs());
    const Eigen::VectorXd direct = pushforward(plan, mixed).probs();
    const Eigen::VectorXd combined = alpha * pushforward(plan, p1).probs() +
                                     (1 - alpha) * pushforward(plan, p2).probs();
    CHECK((direct - combined).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("pushforward_at agrees with the dense pushforward") {
  SeededRng rng(41, 0);
  const auto cls = random_instance(4, 7, 0.8, rng);
  const ClipPlan plan = build_clip_plan(cls, 0, 33);
  for (Eigen::Index j = 0; j < cls.size(); ++j) {
    const LabelDist dense = pushforward(plan, cls[j](0));
    for (int i = 0; i < plan.clipped_size; ++i) {
      CHECK(pushforward_at(plan, cls[j](0), i) ==
            doctest::Approx(dense[i]).epsilon(1e-14));
    }
  }
}

TEST_CASE("unclip sums blocks") {
  const auto cls = constant_class({vec({0.5, 0.5}), vec({1, 0})});
  const ClipPlan plan = build_clip_plan(cls, 0, 100);  // blocks (2,1)
  const LabelDist q = make_dist(vec({0.2, 0.3, 0.5}));
  const LabelDist p = unclip(plan, q);
  CHECK(p[0] == doctest::Approx(0.5));
  CHECK(p[1] == doctest::Approx(0.5));

  // Uniform q puts block-size/clipped-size on each label.
  const LabelDist pu = unclip(plan, LabelDist::uniform(3));
  CHECK(pu[0] == doctest::Approx(2.0 / 3));
  CHECK(pu[1] == doctest::Approx(1.0 / 3));
}

TEST_CASE("unclip after pushforward mixes toward block mass") {
  // Single hypothesis: unclip(push(p))[y] = (1-1/T) p[y] + s_y/(T N').
  const auto cls = constant_class({vec({0.3, 0.2, 0.5})});
  const long long t = 10;
  const ClipPlan plan = build_clip_plan(cls, 0, t);
  const LabelDist p = cls[0](0);
  const LabelDist round_trip = unclip(plan, pushforward(plan, p));
  for (Eigen::Index y = 0; y < p.size(); ++y) {
    const double expected =
        (1.0 - 1.0 / t) * p[y] +
        static_cast<double>(plan.block_sizes[y]) / (t * plan.clipped_size);
    CHECK(round_trip[y] == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("unclipping preserves the mixture KL") {
  // KL(block pushforward of truth, clipped mixture) equals
  // KL(truth, unclip(clipped mixture)) when the mixture is built from the
  // hypotheses' pushforwards.
  SeededRng rng(43, 0);
  const auto cls = random_instance(4, 6, 0.6, rng);
  const ClipPlan plan = build_clip_plan(cls, 0, 40);

  Eigen::VectorXd weights(4);
  weights << 0.1, 0.4, 0.2, 0.3;
  Eigen::VectorXd mixture = Eigen::VectorXd::Zero(plan.clipped_size);
  for (Eigen::Index j = 0; j < cls.size(); ++j) {
    mixture += weights[j] * pushforward(plan, cls[j](0)).probs();
  }
  const LabelDist clipped_mixture = make_dist(mixture);

  const LabelDist truth = cls[2](0);
  const double clipped_kl = kl(block_pushforward(plan, truth), clipped_mixture);
  const double label_kl = kl(truth, unclip(plan, clipped_mixture));
  CHECK(clipped_kl == doctest::Approx(label_kl).epsilon(1e-12));
}

TEST_CASE("horizon one degenerates to the uniform clipped law") {
  const auto cls = constant_class({vec({0.9, 0.1})});
  const ClipPlan plan = build_clip_plan(cls, 0, 1);
  const LabelDist q = pushforward(plan, cls[0](0));
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    CHECK(q[i] == doctest::Approx(1.0 / plan.clipped_size).epsilon(1e-12));
  }
}
