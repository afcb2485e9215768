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

#include "privseq/core.hpp"

#include <cmath>
#include <utility>

namespace privseq {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kAllZero: return "AllZero";
    case ErrorCode::kNegativeWeight: return "NegativeWeight";
    case ErrorCode::kFeatureOutOfRange: return "FeatureOutOfRange";
    case ErrorCode::kEmptyBlock: return "EmptyBlock";
    case ErrorCode::kDeltaRequired: return "DeltaRequired";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kHorizonTooShort: return "HorizonTooShort";
    case ErrorCode::kEmptyList: return "EmptyList";
    case ErrorCode::kConfigInvalid: return "ConfigInvalid";
    case ErrorCode::kSchemaMismatch: return "SchemaMismatch";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

LabelDist::LabelDist(Eigen::VectorXd weights) : probs_(std::move(weights)) {
  if (probs_.size() == 0) {
    throw_error(ErrorCode::kInvalidArgument, "distribution needs at least one entry");
  }
  double sum = 0;
  for (Eigen::Index i = 0; i < probs_.size(); ++i) {
    const double w = probs_[i];
    if (!std::isfinite(w)) {
      throw_error(ErrorCode::kInvalidArgument, "non-finite weight");
    }
    if (w < 0) throw_error(ErrorCode::kNegativeWeight, "negative weight");
    sum += w;
  }
  if (sum <= 0) throw_error(ErrorCode::kAllZero, "all weights are zero");
  probs_ /= sum;
}

LabelDist LabelDist::point_mass(Eigen::Index labels, Eigen::Index label) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(labels);
  w[label] = 1.0;
  return LabelDist(std::move(w));
}

LabelDist LabelDist::uniform(Eigen::Index labels) {
  return LabelDist(Eigen::VectorXd::Ones(labels));
}

Hypothesis::Hypothesis(std::vector<LabelDist> rows, bool constant)
    : rows_(std::move(rows)), constant_(constant) {
  if (rows_.empty()) {
    throw_error(ErrorCode::kInvalidArgument, "hypothesis needs at least one row");
  }
  const Eigen::Index m = rows_.front().size();
  for (const auto& row : rows_) {
    if (row.size() != m) {
      throw_error(ErrorCode::kDimensionMismatch, "table rows differ in label count");
    }
  }
}

Hypothesis Hypothesis::constant(LabelDist dist) {
  std::vector<LabelDist> rows;
  rows.push_back(std::move(dist));
  return Hypothesis(std::move(rows), true);
}

Hypothesis Hypothesis::table(std::vector<LabelDist> rows) {
  return Hypothesis(std::move(rows), false);
}

const LabelDist& Hypothesis::operator()(Feature x) const {
  if (constant_) return rows_.front();
  if (x < 0 || x >= static_cast<Feature>(rows_.size())) {
    throw_error(ErrorCode::kFeatureOutOfRange,
                "feature " + std::to_string(x) + " outside table of size " +
                    std::to_string(rows_.size()));
  }
  return rows_[static_cast<std::size_t>(x)];
}

HypothesisClass::HypothesisClass(std::vector<Hypothesis> members)
    : members_(std::move(members)) {
  if (members_.empty()) {
    throw_error(ErrorCode::kInvalidArgument, "hypothesis class must be nonempty");
  }
  const Eigen::Index m = members_.front().label_count();
  for (const auto& h : members_) {
    if (h.label_count() != m) {
      throw_error(ErrorCode::kDimensionMismatch,
                  "hypotheses disagree on label count");
    }
  }
}

FeatureStream::FeatureStream(Kind kind, std::vector<Feature> values)
    : kind_(kind), values_(std::move(values)) {
  if (kind_ != Kind::kFixed && values_.empty()) {
    throw_error(ErrorCode::kInvalidArgument, "feature stream needs values");
  }
}

FeatureStream FeatureStream::fixed(Feature x) {
  return FeatureStream(Kind::kFixed, {x});
}

FeatureStream FeatureStream::cyclic(std::vector<Feature> values) {
  return FeatureStream(Kind::kCyclic, std::move(values));
}

FeatureStream FeatureStream::scripted(std::vector<Feature> values) {
  return FeatureStream(Kind::kScripted, std::move(values));
}

Feature FeatureStream::at(long long t) const {
  switch (kind_) {
    case Kind::kFixed:
      return values_.front();
    case Kind::kCyclic:
      return values_[static_cast<std::size_t>(t % static_cast<long long>(values_.size()))];
    case Kind::kScripted:
      if (t < 0 || t >= static_cast<long long>(values_.size())) {
        throw_error(ErrorCode::kInvalidArgument,
                    "scripted stream exhausted at round " + std::to_string(t));
      }
      return values_[static_cast<std::size_t>(t)];
  }
  throw_error(ErrorCode::kInvalidArgument, "unreachable stream kind");
}

namespace {

Eigen::VectorXd vector_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty()) {
    throw_error(ErrorCode::kSchemaMismatch, "expected a nonempty probability array");
  }
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  Eigen::Index i = 0;
  for (const auto& entry : j) {
    if (!entry.is_number()) {
      throw_error(ErrorCode::kSchemaMismatch, "probability entries must be numbers");
    }
    v[i++] = entry.get<double>();
  }
  return v;
}

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

}  // namespace

nlohmann::json class_to_json(const HypothesisClass& cls) {
  nlohmann::json j;
  j["M"] = cls.label_count();
  nlohmann::json members = nlohmann::json::array();
  for (const auto& h : cls) {
    nlohmann::json entry;
    if (h.is_constant()) {
      entry["kind"] = "constant";
      entry["probs"] = vector_to_json(h(0).probs());
    } else {
      entry["kind"] = "table";
      nlohmann::json rows = nlohmann::json::array();
      for (Eigen::Index r = 0; r < h.table_size(); ++r) {
        rows.push_back(vector_to_json(h(r).probs()));
      }
      entry["rows"] = rows;
    }
    members.push_back(std::move(entry));
  }
  j["hypotheses"] = std::move(members);
  return j;
}

HypothesisClass class_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("M") || !j.contains("hypotheses")) {
    throw_error(ErrorCode::kSchemaMismatch, "expected {\"M\", \"hypotheses\"}");
  }
  const auto m = j.at("M").get<Eigen::Index>();
  const auto& members = j.at("hypotheses");
  if (!members.is_array() || members.empty()) {
    throw_error(ErrorCode::kSchemaMismatch, "\"hypotheses\" must be a nonempty array");
  }
  std::vector<Hypothesis> parsed;
  parsed.reserve(members.size());
  for (const auto& entry : members) {
    if (!entry.is_object() || !entry.contains("kind")) {
      throw_error(ErrorCode::kSchemaMismatch, "hypothesis entries need a \"kind\"");
    }
    const auto kind = entry.at("kind").get<std::string>();
    if (kind == "constant") {
      auto v = vector_from_json(entry.at("probs"));
      if (v.size() != m) {
        throw_error(ErrorCode::kSchemaMismatch, "constant probs disagree with M");
      }
      parsed.push_back(Hypothesis::constant(make_dist(std::move(v))));
    } else if (kind == "table") {
      const auto& rows = entry.at("rows");
      if (!rows.is_array() || rows.empty()) {
        throw_error(ErrorCode::kSchemaMismatch, "\"rows\" must be a nonempty array");
      }
      std::vector<LabelDist> dists;
      dists.reserve(rows.size());
      for (const auto& row : rows) {
        auto v = vector_from_json(row);
        if (v.size() != m) {
          throw_error(ErrorCode::kSchemaMismatch, "table row disagrees with M");
        }
        dists.push_back(make_dist(std::move(v)));
      }
      parsed.push_back(Hypothesis::table(std::move(dists)));
    } else {
      throw_error(ErrorCode::kSchemaMismatch, "unknown hypothesis kind: " + kind);
    }
  }
  return HypothesisClass(std::move(parsed));
}

Eigen::Index sample_label(const LabelDist& dist, SeededRng& rng) {
  const double u = rng.uniform01();
  double acc = 0;
  const Eigen::Index m = dist.size();
  for (Eigen::Index y = 0; y < m; ++y) {
    acc += dist[y];
    if (u < acc) return y;
  }
  // Rounding in the partial sums can leave acc fractionally below one.
  Eigen::Index y = m - 1;
  while (y > 0 && dist[y] == 0) --y;
  return y;
}

}  // namespace privseq
