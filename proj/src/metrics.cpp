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

#include "privseq/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <vector>

namespace privseq {

double kl(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  if (p.size() != q.size()) {
    throw_error(ErrorCode::kDimensionMismatch, "kl needs equal dimensions");
  }
  double sum = 0;
  for (Eigen::Index y = 0; y < p.size(); ++y) {
    if (p[y] == 0) continue;
    if (q[y] == 0) return std::numeric_limits<double>::infinity();
    sum += p[y] * std::log(p[y] / q[y]);
  }
  return sum < 0 ? 0.0 : sum;  // tiny negatives from rounding on p ~ q
}

double tv(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  if (p.size() != q.size()) {
    throw_error(ErrorCode::kDimensionMismatch, "tv needs equal dimensions");
  }
  return (p - q).cwiseMax(0.0).sum();
}

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_trace_rows(std::ostream& out, const RiskTrace& trace) {
  for (const auto& row : trace.rows) {
    out << trace.run_id << ',' << trace.algorithm << ',' << trace.class_size << ','
        << trace.label_count << ',' << trace.horizon << ','
        << format_double(trace.epsilon) << ',' << format_double(trace.delta) << ','
        << format_double(trace.gamma) << ',' << trace.seed << ',' << row.t << ','
        << format_double(row.kl_instant) << ',' << format_double(row.kl_cum) << ','
        << format_double(row.tv_instant) << ',' << format_double(row.tv_avg) << ','
        << row.clamp_events << '\n';
  }
}

bool pinsker_check(const RiskTrace& trace) {
  constexpr double kSlack = 1e-9;
  for (const auto& row : trace.rows) {
    if (row.tv_instant > std::sqrt(row.kl_instant / 2.0) + kSlack) return false;
    const double t = static_cast<double>(row.t);
    if (row.tv_avg > std::sqrt(row.kl_cum / (2.0 * t)) + kSlack) return false;
  }
  return true;
}

LabelDist online_to_batch(const std::vector<LabelDist>& predictions) {
  if (predictions.empty()) {
    throw_error(ErrorCode::kEmptyList, "no predictions to average");
  }
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(predictions.front().size());
  for (const auto& p : predictions) {
    if (p.size() != mean.size()) {
      throw_error(ErrorCode::kDimensionMismatch, "predictions differ in dimension");
    }
    mean += p.probs();
  }
  mean /= static_cast<double>(predictions.size());
  return LabelDist(std::move(mean));
}

LabelDist median_boost(const std::vector<LabelDist>& estimates) {
  if (estimates.empty()) {
    throw_error(ErrorCode::kEmptyList, "no estimates to select from");
  }
  const std::size_t n = estimates.size();
  if (n == 1) return estimates.front();

  // Radius needed to cover ceil(n/2) of the estimates, itself included.
  const std::size_t cover = (n + 1) / 2;
  std::size_t best = 0;
  double best_radius = std::numeric_limits<double>::infinity();
  std::vector<double> distances(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      distances[j] = tv(estimates[i], estimates[j]);
    }
    std::nth_element(distances.begin(), distances.begin() + (cover - 1), distances.end());
    const double radius = distances[cover - 1];
    if (radius < best_radius) {
      best_radius = radius;
      best = i;
    }
  }
  return estimates[best];
}

}  // namespace privseq
