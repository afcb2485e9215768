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

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "privseq/core.hpp"
#include "privseq/instances.hpp"
#include "privseq/learners.hpp"
#include "privseq/metrics.hpp"
#include "privseq/privacy.hpp"

namespace privseq {

enum class Algorithm { kWmaLdp, kExp3Pure, kRrBaseline };

const char* algorithm_name(Algorithm alg);
Algorithm algorithm_from_name(const std::string& name);

struct InstanceSpec {
  enum class Kind { kRandom, kHard, kFile };
  Kind kind = Kind::kRandom;
  std::string path;              // kFile
  double concentration = 1.0;    // kRandom sampler shape
};

struct TruthSpec {
  bool scan = false;
  int index = 0;
};

struct FeatureStreamSpec {
  enum class Kind { kDefault, kFixed, kCyclic, kScripted };
  Kind kind = Kind::kDefault;
  Feature fixed_value = 0;
  std::vector<Feature> values;
};

struct ExperimentConfig {
  Algorithm algorithm = Algorithm::kExp3Pure;
  InstanceSpec instance;
  TruthSpec truth;
  int k = 0;          // hypotheses for random instances; pairs for hard ones
  int m = 0;          // labels (random instances; derived for hard)
  long long horizon = 0;
  double epsilon = 0;
  double delta = 0;
  double gamma = 0;   // <= 0 resolves to log(horizon)
  std::uint64_t seed = 1;
  int replications = 1;
  FeatureStreamSpec stream;
  std::string out_csv;
  long long trace_stride = 0;  // 0 -> about 1000 recorded rows per replication

  /// Throws kConfigInvalid with field-level diagnostics.
  void validate() const;
};

ExperimentConfig config_from_json(const nlohmann::json& j);

struct RepSummary {
  int replication = 0;
  int truth_index = 0;
  double kl_cum = 0;
  double tv_avg = 0;
  long long clamp_events = 0;
  double noise_term = 0;     // realized sum_t (<w~_t, Lap_t> - Lap_{t,truth})
  bool losses_clean = true;  // no loss left [0,1] before clamping
  bool potential_ok = true;  // pure-DP potential inequality (realized)
  bool bound_ok = true;      // risk bound with realized noise term
};

struct ExperimentReport {
  std::string algorithm;
  int class_size = 0;
  int label_count = 0;
  long long horizon = 0;
  double epsilon = 0;
  double delta = 0;
  double gamma = 0;
  int truth_index = 0;  // worst truth under scan

  std::vector<RepSummary> reps;
  std::vector<RiskTrace> traces;

  double mean_kl_cum = 0;
  double stddev_kl_cum = 0;
  double se_kl_cum = 0;
  double mean_tv_avg = 0;
  double stddev_tv_avg = 0;

  double risk_bound = 0;        // deterministic part of the applicable bound
  bool bound_ok_mean = true;    // mean_kl_cum <= risk_bound + 3 * se
  int bound_ok_reps = 0;        // replications satisfying the realized bound
  bool potential_ok_all = true;
  bool pinsker_ok_all = true;

  std::optional<AccountantResult> accountant;

  // Present under truth scanning: mean kl_cum per candidate truth.
  std::vector<std::pair<int, double>> scan_means;
};

/// Test-only hook: overrides the label the user observes at a given 0-based
/// round. Used to verify that predictions depend only on the past.
using LabelOverride = std::function<std::optional<int>(long long t, int label)>;

/// Runs the full Nature/User/Learner protocol for every replication (and
/// every candidate truth under scanning), aggregates risk summaries, and
/// checks the applicable deterministic and statistical bounds. Fully
/// deterministic given the config. Approximate-DP runs refuse to start when
/// the composition budget check fails.
ExperimentReport run_experiment(const ExperimentConfig& cfg,
                                const LabelOverride& override_label = nullptr);

void write_report_csv(std::ostream& out, const ExperimentReport& report);
void write_report_csv_file(const std::string& path, const ExperimentReport& report);

enum class SweepAxis { kHorizon, kClassSize, kLabelCount, kEpsilon };

SweepAxis sweep_axis_from_name(const std::string& name);

struct SweepReport {
  SweepAxis axis = SweepAxis::kHorizon;
  std::vector<double> values;
  std::vector<ExperimentReport> reports;
  double loglog_slope = 0;  // of mean kl_cum against the axis values
};

/// One experiment per axis value (values must be ascending). The combined CSV
/// carries an extra axis_value column.
SweepReport sweep(const ExperimentConfig& base, SweepAxis axis,
                  const std::vector<double>& values);

void write_sweep_csv(std::ostream& out, const SweepReport& report);
void write_sweep_csv_file(const std::string& path, const SweepReport& report);

struct PlotSpec {
  std::string x;
  std::string y;
  std::string group;  // optional
};

/// Renders a deterministic SVG line chart (one polyline per group) from a
/// trace CSV. Throws kSchemaMismatch when the required columns are missing or
/// the body is empty.
std::string render_svg(const std::string& csv_path, const PlotSpec& spec);
void render_svg_file(const std::string& csv_path, const PlotSpec& spec,
                     const std::string& out_path);

struct BatchSelectResult {
  LabelDist estimate;
  double tv_error = 0;
  long long horizon_used = 0;
};

/// Online-to-batch pipeline: `boost` independent pure-DP runs, each averaged
/// into one estimate, then a metric-median vote across runs. The horizon
/// comes from the config when set, otherwise from the TV-target relation
/// T = ceil(C * K / (epsilon^2 alpha^4)) with an empirically measured C.
BatchSelectResult batch_select(const ExperimentConfig& cfg, double alpha, int boost);

}  // namespace privseq
