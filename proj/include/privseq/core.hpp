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
#include <cstdint>
#include <vector>

#include "json.hpp"
#include "privseq/common.hpp"
#include "privseq/rng.hpp"

namespace privseq {

using Feature = std::int64_t;

/// Absolute tolerance for sum-to-one checks on probability vectors.
inline constexpr double kProbTolerance = 1e-9;

/// Probability distribution over a finite label alphabet.
///
/// Construction validates and normalizes, so every accessible instance has
/// non-negative entries summing to one (within kProbTolerance). Immutable
/// after construction and safe to share across threads.
class LabelDist {
 public:
  LabelDist() = default;

  /// Normalizes `weights` by its sum. Throws kNegativeWeight on any negative
  /// entry, kAllZero if every entry is zero, kInvalidArgument on non-finite
  /// input.
  explicit LabelDist(Eigen::VectorXd weights);

  static LabelDist point_mass(Eigen::Index labels, Eigen::Index label);
  static LabelDist uniform(Eigen::Index labels);

  Eigen::Index size() const { return probs_.size(); }
  double operator[](Eigen::Index y) const { return probs_[y]; }
  const Eigen::VectorXd& probs() const { return probs_; }

 private:
  Eigen::VectorXd probs_;
};

/// Normalizes a weight vector into a distribution.
inline LabelDist make_dist(Eigen::VectorXd weights) {
  return LabelDist(std::move(weights));
}

/// A map from features to label distributions. Constant hypotheses ignore the
/// feature; table hypotheses index a finite list of rows.
class Hypothesis {
 public:
  static Hypothesis constant(LabelDist dist);
  static Hypothesis table(std::vector<LabelDist> rows);

  bool is_constant() const { return constant_; }
  Eigen::Index label_count() const { return rows_.front().size(); }
  Eigen::Index table_size() const { return static_cast<Eigen::Index>(rows_.size()); }

  /// Evaluates the hypothesis at feature `x`. Throws kFeatureOutOfRange for a
  /// table hypothesis indexed outside its rows.
  const LabelDist& operator()(Feature x) const;

 private:
  Hypothesis(std::vector<LabelDist> rows, bool constant);

  std::vector<LabelDist> rows_;
  bool constant_ = true;
};

inline const LabelDist& evaluate(const Hypothesis& h, Feature x) { return h(x); }

/// Ordered finite hypothesis set; all members share one label alphabet.
class HypothesisClass {
 public:
  explicit HypothesisClass(std::vector<Hypothesis> members);

  Eigen::Index size() const { return static_cast<Eigen::Index>(members_.size()); }
  Eigen::Index label_count() const { return members_.front().label_count(); }
  const Hypothesis& operator[](Eigen::Index j) const { return members_[static_cast<std::size_t>(j)]; }

  auto begin() const { return members_.begin(); }
  auto end() const { return members_.end(); }

 private:
  std::vector<Hypothesis> members_;
};

/// Produces one feature per round.
class FeatureStream {
 public:
  enum class Kind { kFixed, kCyclic, kScripted };

  static FeatureStream fixed(Feature x);
  static FeatureStream cyclic(std::vector<Feature> values);
  static FeatureStream scripted(std::vector<Feature> values);

  Kind kind() const { return kind_; }

  /// Feature for round t (0-based). Scripted streams require t < script length.
  Feature at(long long t) const;

 private:
  FeatureStream(Kind kind, std::vector<Feature> values);

  Kind kind_;
  std::vector<Feature> values_;
};

// JSON schema: {"M": int, "hypotheses": [{"kind":"constant","probs":[...]}
//                                        | {"kind":"table","rows":[[...],...]}]}
nlohmann::json class_to_json(const HypothesisClass& cls);
HypothesisClass class_from_json(const nlohmann::json& j);

/// Samples one label from `dist` by inverse-CDF walk.
Eigen::Index sample_label(const LabelDist& dist, SeededRng& rng);

}  // namespace privseq
