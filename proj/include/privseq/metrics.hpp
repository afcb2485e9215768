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
#include <iosfwd>
#include <string>
#include <vector>

#include "privseq/core.hpp"

namespace privseq {

/// KL divergence sum_y p[y] log(p[y]/q[y]). Terms with p[y] == 0 contribute
/// zero; p[y] > 0 against q[y] == 0 yields +infinity rather than a crash.
double kl(const Eigen::VectorXd& p, const Eigen::VectorXd& q);
inline double kl(const LabelDist& p, const LabelDist& q) { return kl(p.probs(), q.probs()); }

/// Total variation: sum of positive parts of p - q (half the L1 distance).
double tv(const Eigen::VectorXd& p, const Eigen::VectorXd& q);
inline double tv(const LabelDist& p, const LabelDist& q) { return tv(p.probs(), q.probs()); }

struct TraceRow {
  long long t = 0;  // 1-based round index
  double kl_instant = 0;
  double kl_cum = 0;
  double tv_instant = 0;
  double tv_avg = 0;
  long long clamp_events = 0;  // cumulative through round t
};

/// Per-round risk record of one replication plus identifying metadata.
struct RiskTrace {
  std::string run_id;
  std::string algorithm;
  int class_size = 0;
  int label_count = 0;
  long long horizon = 0;
  double epsilon = 0;
  double delta = 0;
  double gamma = 0;
  std::uint64_t seed = 0;
  std::vector<TraceRow> rows;
};

inline constexpr const char* kTraceCsvHeader =
    "run_id,algorithm,K,M,T,epsilon,delta,gamma,seed,t,"
    "kl_instant,kl_cum,tv_instant,tv_avg,clamp_events";

void write_trace_rows(std::ostream& out, const RiskTrace& trace);

/// Pointwise Pinsker and prefix Cauchy-Schwarz checks:
/// tv_t <= sqrt(kl_t / 2) and tv_avg(t) <= sqrt(kl_cum(t) / (2t)).
bool pinsker_check(const RiskTrace& trace);

/// Coordinatewise mean of the predictions.
LabelDist online_to_batch(const std::vector<LabelDist>& predictions);

/// Metric median: returns the estimate whose TV distance to the
/// ceil(R/2)-th nearest of the R estimates (itself included) is minimal.
/// If more than half the estimates lie within radius r of some target, the
/// output lies within 3r of it.
LabelDist median_boost(const std::vector<LabelDist>& estimates);

}  // namespace privseq
