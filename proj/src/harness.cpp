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

#include "privseq/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace privseq {

namespace {

// Reserved rng stream for instance generation; replications use streams >= 1.
constexpr std::uint64_t kInstanceStream = 0;

// Measured constant of the TV-target horizon relation T = C * K / (eps^2 a^4).
constexpr double kBatchHorizonConstant = 8.0;

}  // namespace

const char* algorithm_name(Algorithm alg) {
  switch (alg) {
    case Algorithm::kWmaLdp: return "wma-ldp";
    case Algorithm::kExp3Pure: return "exp3-pure";
    case Algorithm::kRrBaseline: return "rr-baseline";
  }
  return "unknown";
}

Algorithm algorithm_from_name(const std::string& name) {
  if (name == "wma-ldp") return Algorithm::kWmaLdp;
  if (name == "exp3-pure") return Algorithm::kExp3Pure;
  if (name == "rr-baseline") return Algorithm::kRrBaseline;
  throw_error(ErrorCode::kConfigInvalid, "alg: unknown algorithm '" + name + "'");
}

void ExperimentConfig::validate() const {
  std::vector<std::string> problems;
  if (horizon < 1) problems.push_back("T: must be >= 1");
  if (k < 1) problems.push_back("K: must be >= 1");
  if (instance.kind == InstanceSpec::Kind::kRandom && m < 2) {
    problems.push_back("M: must be >= 2 for random instances");
  }
  if (instance.kind == InstanceSpec::Kind::kRandom && instance.concentration <= 0) {
    problems.push_back("instance_alpha: must be > 0");
  }
  if (instance.kind == InstanceSpec::Kind::kFile && instance.path.empty()) {
    problems.push_back("instance: file path is empty");
  }
  if (!(epsilon > 0)) problems.push_back("epsilon: must be > 0");
  if (algorithm == Algorithm::kWmaLdp) {
    if (!(delta > 0 && delta < 1)) {
      problems.push_back("delta: wma-ldp requires delta in (0,1)");
    }
  } else if (delta != 0) {
    problems.push_back("delta: must be 0 for " + std::string(algorithm_name(algorithm)));
  }
  if (replications < 1) problems.push_back("reps: must be >= 1");
  if (!truth.scan && truth.index < 0) problems.push_back("truth: index must be >= 0");
  if (trace_stride < 0) problems.push_back("trace_stride: must be >= 0");
  if (!problems.empty()) {
    std::string joined;
    for (std::size_t i = 0; i < problems.size(); ++i) {
      if (i > 0) joined += "; ";
      joined += problems[i];
    }
    throw_error(ErrorCode::kConfigInvalid, joined);
  }
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  if (!j.is_object()) {
    throw_error(ErrorCode::kConfigInvalid, "config: expected a JSON object");
  }
  if (j.contains("alg")) cfg.algorithm = algorithm_from_name(j.at("alg").get<std::string>());
  if (j.contains("instance")) {
    const auto name = j.at("instance").get<std::string>();
    if (name == "random") {
      cfg.instance.kind = InstanceSpec::Kind::kRandom;
    } else if (name == "hard") {
      cfg.instance.kind = InstanceSpec::Kind::kHard;
    } else if (name.rfind("file:", 0) == 0) {
      cfg.instance.kind = InstanceSpec::Kind::kFile;
      cfg.instance.path = name.substr(5);
    } else {
      throw_error(ErrorCode::kConfigInvalid, "instance: unknown source '" + name + "'");
    }
  }
  if (j.contains("instance_alpha")) cfg.instance.concentration = j.at("instance_alpha").get<double>();
  if (j.contains("K")) cfg.k = j.at("K").get<int>();
  if (j.contains("M")) cfg.m = j.at("M").get<int>();
  if (j.contains("T")) cfg.horizon = j.at("T").get<long long>();
  if (j.contains("epsilon")) cfg.epsilon = j.at("epsilon").get<double>();
  if (j.contains("delta")) cfg.delta = j.at("delta").get<double>();
  if (j.contains("gamma")) cfg.gamma = j.at("gamma").get<double>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("reps")) cfg.replications = j.at("reps").get<int>();
  if (j.contains("truth")) {
    const auto& t = j.at("truth");
    if (t.is_string() && t.get<std::string>() == "scan") {
      cfg.truth.scan = true;
    } else if (t.is_number_integer()) {
      cfg.truth.scan = false;
      cfg.truth.index = t.get<int>();
    } else {
      throw_error(ErrorCode::kConfigInvalid, "truth: expected an index or \"scan\"");
    }
  }
  if (j.contains("out")) cfg.out_csv = j.at("out").get<std::string>();
  if (j.contains("trace_stride")) cfg.trace_stride = j.at("trace_stride").get<long long>();
  if (j.contains("feature_stream")) {
    const auto& fs = j.at("feature_stream");
    const auto kind = fs.at("kind").get<std::string>();
    if (kind == "fixed") {
      cfg.stream.kind = FeatureStreamSpec::Kind::kFixed;
      cfg.stream.fixed_value = fs.value("value", 0);
    } else if (kind == "cyclic" || kind == "scripted") {
      cfg.stream.kind = kind == "cyclic" ? FeatureStreamSpec::Kind::kCyclic
                                         : FeatureStreamSpec::Kind::kScripted;
      cfg.stream.values = fs.at("values").get<std::vector<Feature>>();
    } else {
      throw_error(ErrorCode::kConfigInvalid, "feature_stream: unknown kind '" + kind + "'");
    }
  }
  return cfg;
}

namespace {

HypothesisClass resolve_instance(const ExperimentConfig& cfg) {
  switch (cfg.instance.kind) {
    case InstanceSpec::Kind::kRandom: {
      SeededRng rng(cfg.seed, kInstanceStream);
      return random_instance(cfg.k, cfg.m, cfg.instance.concentration, rng);
    }
    case InstanceSpec::Kind::kHard:
      return build_hard_instance(cfg.k, cfg.horizon, cfg.epsilon).hypotheses;
    case InstanceSpec::Kind::kFile: {
      std::ifstream in(cfg.instance.path);
      if (!in) {
        throw_error(ErrorCode::kConfigInvalid,
                    "instance: cannot open '" + cfg.instance.path + "'");
      }
      nlohmann::json j;
      in >> j;
      return class_from_json(j);
    }
  }
  throw_error(ErrorCode::kConfigInvalid, "instance: unreachable kind");
}

FeatureStream resolve_stream(const ExperimentConfig& cfg, const HypothesisClass& cls) {
  switch (cfg.stream.kind) {
    case FeatureStreamSpec::Kind::kFixed:
      return FeatureStream::fixed(cfg.stream.fixed_value);
    case FeatureStreamSpec::Kind::kCyclic:
      return FeatureStream::cyclic(cfg.stream.values);
    case FeatureStreamSpec::Kind::kScripted:
      return FeatureStream::scripted(cfg.stream.values);
    case FeatureStreamSpec::Kind::kDefault:
      break;
  }
  // Constant classes ignore features; table classes cycle through the rows
  // every hypothesis can index.
  Eigen::Index min_rows = std::numeric_limits<Eigen::Index>::max();
  bool any_table = false;
  for (const auto& h : cls) {
    if (!h.is_constant()) {
      any_table = true;
      min_rows = std::min(min_rows, h.table_size());
    }
  }
  if (!any_table) return FeatureStream::fixed(0);
  std::vector<Feature> cycle;
  cycle.reserve(static_cast<std::size_t>(min_rows));
  for (Eigen::Index r = 0; r < min_rows; ++r) cycle.push_back(r);
  return FeatureStream::cyclic(std::move(cycle));
}

double clamp_unit(double v, bool* clamped) {
  if (v < 0) {
    *clamped = true;
    return 0;
  }
  if (v > 1) {
    *clamped = true;
    return 1;
  }
  return v;
}

struct RepData {
  RiskTrace trace;
  RepSummary summary;
};

std::string make_run_id(const ExperimentConfig& cfg, int truth, int rep) {
  std::ostringstream id;
  id << algorithm_name(cfg.algorithm) << "-K" << cfg.k << "-T" << cfg.horizon
     << "-x" << truth << "-r" << rep;
  return id.str();
}

RepData run_one_replication(const ExperimentConfig& cfg, const HypothesisClass& cls,
                            const FeatureStream& stream, int truth, int rep,
                            const LabelOverride& override_label,
                            Eigen::VectorXd* prediction_mean_out) {
  const long long horizon = cfg.horizon;
  const auto k = cls.size();
  const auto m = static_cast<int>(cls.label_count());

  PrivacyParams params;
  params.epsilon = cfg.epsilon;
  params.delta = cfg.delta;
  params.gamma = cfg.gamma;
  params.class_size = static_cast<int>(k);
  params.horizon = horizon;

  SeededRng rng(cfg.seed, static_cast<std::uint64_t>(rep) + 1);

  WeightState state = WeightState::initial(
      k, cfg.algorithm == Algorithm::kExp3Pure ? exp3_learning_rate(k, horizon)
                                               : wma_learning_rate(k, horizon));
  RegretLedger ledger(k);

  RepData data;
  data.trace.run_id = make_run_id(cfg, truth, rep);
  data.trace.algorithm = algorithm_name(cfg.algorithm);
  data.trace.class_size = static_cast<int>(k);
  data.trace.label_count = m;
  data.trace.horizon = horizon;
  data.trace.epsilon = cfg.epsilon;
  data.trace.delta = cfg.delta;
  data.trace.gamma = params.resolved_gamma();
  data.trace.seed = cfg.seed;

  const long long stride =
      cfg.trace_stride > 0 ? cfg.trace_stride : std::max<long long>(1, horizon / 1000);

  double kl_cum = 0;
  double tv_sum = 0;
  long long clamp_events = 0;
  double noise_term = 0;
  bool losses_clean = true;

  if (prediction_mean_out != nullptr) {
    *prediction_mean_out = Eigen::VectorXd::Zero(m);
  }

  for (long long t = 0; t < horizon; ++t) {
    const Feature x = stream.at(t);
    const LabelDist& truth_dist = cls[truth](x);

    int label = static_cast<int>(sample_label(truth_dist, rng));
    if (override_label) {
      if (auto forced = override_label(t, label)) label = *forced;
    }

    const Eigen::VectorXd pre_weights = state.normalized();
    const LabelDist* prediction = nullptr;
    RoundResult round;
    RrRoundResult rr_round;

    switch (cfg.algorithm) {
      case Algorithm::kWmaLdp: {
        const ClipPlan plan = build_clip_plan(cls, x, horizon);
        PrivatizeDiag diag;
        const PrivateMessage msg =
            respond_approx(plan, cls, x, label, params, rng, &diag);
        round = wma_ldp_round(state, cls, x, params, msg);
        prediction = &round.output.prediction;

        Eigen::VectorXd consumed = msg.dense;
        bool clamped = false;
        for (Eigen::Index j = 0; j < consumed.size(); ++j) {
          consumed[j] = clamp_unit(consumed[j], &clamped);
        }
        ledger.add_dense(pre_weights, consumed);
        noise_term += pre_weights.dot(diag.laplace) - diag.laplace[truth];
        clamp_events += round.clamped;
        losses_clean = losses_clean && round.clamped == 0;
        state = std::move(round.state);
        break;
      }
      case Algorithm::kExp3Pure: {
        const ClipPlan plan = build_clip_plan(cls, x, horizon);
        PrivatizeDiag diag;
        const PrivateMessage msg =
            respond_pure(plan, cls, x, label, params, rng, &diag);
        round = exp3_pure_round(state, cls, x, params, msg);
        prediction = &round.output.prediction;

        bool clamped = false;
        const double consumed = clamp_unit(msg.value, &clamped);
        ledger.add_sparse(pre_weights, msg.index, consumed);
        noise_term += pre_weights.dot(diag.laplace) - diag.laplace[truth];
        clamp_events += round.clamped;
        losses_clean = losses_clean && round.clamped == 0;
        state = std::move(round.state);
        break;
      }
      case Algorithm::kRrBaseline: {
        const int flipped = rr_channel(label, m, cfg.epsilon, rng);
        rr_round = rr_baseline_round(state, cls, x, cfg.epsilon, flipped);
        prediction = &rr_round.prediction;
        state = std::move(rr_round.state);
        break;
      }
    }

    const double kl_t = kl(truth_dist, *prediction);
    const double tv_t = tv(truth_dist, *prediction);
    kl_cum += kl_t;
    tv_sum += tv_t;
    if (prediction_mean_out != nullptr) {
      *prediction_mean_out += prediction->probs();
    }

    const long long round_index = t + 1;
    if (round_index % stride == 0 || round_index == 1 || round_index == horizon) {
      if (data.trace.rows.empty() || data.trace.rows.back().t != round_index) {
        TraceRow row;
        row.t = round_index;
        row.kl_instant = kl_t;
        row.kl_cum = kl_cum;
        row.tv_instant = tv_t;
        row.tv_avg = tv_sum / static_cast<double>(round_index);
        row.clamp_events = clamp_events;
        data.trace.rows.push_back(row);
      }
    }
  }

  if (prediction_mean_out != nullptr) {
    *prediction_mean_out /= static_cast<double>(horizon);
  }

  auto& summary = data.summary;
  summary.replication = rep;
  summary.truth_index = truth;
  summary.kl_cum = kl_cum;
  summary.tv_avg = tv_sum / static_cast<double>(horizon);
  summary.clamp_events = clamp_events;
  summary.noise_term = noise_term;
  summary.losses_clean = losses_clean;
  summary.potential_ok = cfg.algorithm == Algorithm::kRrBaseline
                             ? true
                             : ledger.potential_holds(state.learning_rate);
  return data;
}

/// Deterministic part of the applicable cumulative KL-risk bound.
double risk_bound_value(const ExperimentConfig& cfg, Eigen::Index class_size) {
  PrivacyParams params;
  params.epsilon = cfg.epsilon;
  params.delta = cfg.delta;
  params.gamma = cfg.gamma;
  params.class_size = static_cast<int>(class_size);
  params.horizon = cfg.horizon;

  const double t = static_cast<double>(cfg.horizon);
  const double log_k = std::log(static_cast<double>(class_size));
  switch (cfg.algorithm) {
    case Algorithm::kWmaLdp:
      return std::sqrt(2.0 * t * log_k) / loss_normalizer(params, Mechanism::kApproxDp) +
             3.0 * params.sensitivity();
    case Algorithm::kExp3Pure:
      return std::sqrt(2.0 * t * static_cast<double>(class_size) * log_k) /
                 loss_normalizer(params, Mechanism::kPureDp) +
             3.0 * params.sensitivity();
    case Algorithm::kRrBaseline:
      return std::numeric_limits<double>::infinity();
  }
  return std::numeric_limits<double>::infinity();
}

struct TruthRun {
  std::vector<RepData> reps;
  double mean_kl_cum = 0;
};

TruthRun run_truth(const ExperimentConfig& cfg, const HypothesisClass& cls,
                   const FeatureStream& stream, int truth,
                   const LabelOverride& override_label) {
  TruthRun result;
  result.reps.resize(static_cast<std::size_t>(cfg.replications));

  const unsigned workers =
      std::min<unsigned>(std::thread::hardware_concurrency(),
                         static_cast<unsigned>(cfg.replications));
  auto worker = [&](int begin, int end) {
    for (int rep = begin; rep < end; ++rep) {
      result.reps[static_cast<std::size_t>(rep)] =
          run_one_replication(cfg, cls, stream, truth, rep, override_label, nullptr);
    }
  };
  if (workers > 1) {
    std::vector<std::thread> pool;
    const int chunk = (cfg.replications + static_cast<int>(workers) - 1) /
                      static_cast<int>(workers);
    for (unsigned w = 0; w < workers; ++w) {
      const int begin = static_cast<int>(w) * chunk;
      const int end = std::min(cfg.replications, begin + chunk);
      if (begin < end) pool.emplace_back(worker, begin, end);
    }
    for (auto& thread : pool) thread.join();
  } else {
    worker(0, cfg.replications);
  }

  double total = 0;
  for (const auto& rep : result.reps) total += rep.summary.kl_cum;
  result.mean_kl_cum = total / static_cast<double>(cfg.replications);
  return result;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg,
                                const LabelOverride& override_label) {
  cfg.validate();
  const HypothesisClass cls = resolve_instance(cfg);
  const FeatureStream stream = resolve_stream(cfg, cls);
  const auto class_size = cls.size();

  if (!cfg.truth.scan && cfg.truth.index >= class_size) {
    throw_error(ErrorCode::kConfigInvalid,
                "truth: index " + std::to_string(cfg.truth.index) +
                    " outside class of size " + std::to_string(class_size));
  }

  ExperimentReport report;
  report.algorithm = algorithm_name(cfg.algorithm);
  report.class_size = static_cast<int>(class_size);
  report.label_count = static_cast<int>(cls.label_count());
  report.horizon = cfg.horizon;
  report.epsilon = cfg.epsilon;
  report.delta = cfg.delta;
  report.gamma = cfg.gamma > 0 ? cfg.gamma : std::log(static_cast<double>(cfg.horizon));

  if (cfg.algorithm == Algorithm::kWmaLdp) {
    report.accountant =
        accountant_check(static_cast<int>(class_size), cfg.epsilon, cfg.delta);
    if (!report.accountant->ok) {
      throw_error(ErrorCode::kConfigInvalid,
                  "accountant: composed epsilon " +
                      std::to_string(report.accountant->composed_epsilon) +
                      " exceeds the budget " + std::to_string(cfg.epsilon));
    }
  }

  std::vector<int> truths;
  if (cfg.truth.scan) {
    truths.reserve(static_cast<std::size_t>(class_size));
    for (int j = 0; j < class_size; ++j) truths.push_back(j);
  } else {
    truths.push_back(cfg.truth.index);
  }

  TruthRun worst;
  int worst_truth = truths.front();
  bool first = true;
  for (int truth : truths) {
    TruthRun run = run_truth(cfg, cls, stream, truth, override_label);
    report.scan_means.emplace_back(truth, run.mean_kl_cum);
    if (first || run.mean_kl_cum > worst.mean_kl_cum) {
      worst = std::move(run);
      worst_truth = truth;
      first = false;
    }
  }
  if (!cfg.truth.scan) report.scan_means.clear();
  report.truth_index = worst_truth;

  report.risk_bound = risk_bound_value(cfg, class_size);

  const auto n = static_cast<double>(worst.reps.size());
  double kl_sum = 0;
  double tv_total = 0;
  for (auto& rep : worst.reps) {
    rep.summary.bound_ok = rep.summary.kl_cum <= report.risk_bound + rep.summary.noise_term;
    kl_sum += rep.summary.kl_cum;
    tv_total += rep.summary.tv_avg;
    report.bound_ok_reps += rep.summary.bound_ok ? 1 : 0;
    report.potential_ok_all = report.potential_ok_all && rep.summary.potential_ok;
    report.pinsker_ok_all = report.pinsker_ok_all && pinsker_check(rep.trace);
  }
  report.mean_kl_cum = kl_sum / n;
  report.mean_tv_avg = tv_total / n;

  double kl_var = 0;
  double tv_var = 0;
  for (const auto& rep : worst.reps) {
    kl_var += (rep.summary.kl_cum - report.mean_kl_cum) *
              (rep.summary.kl_cum - report.mean_kl_cum);
    tv_var += (rep.summary.tv_avg - report.mean_tv_avg) *
              (rep.summary.tv_avg - report.mean_tv_avg);
  }
  if (worst.reps.size() > 1) {
    report.stddev_kl_cum = std::sqrt(kl_var / (n - 1.0));
    report.stddev_tv_avg = std::sqrt(tv_var / (n - 1.0));
  }
  report.se_kl_cum = report.stddev_kl_cum / std::sqrt(n);
  report.bound_ok_mean =
      report.mean_kl_cum <= report.risk_bound + 3.0 * report.se_kl_cum;

  report.reps.reserve(worst.reps.size());
  report.traces.reserve(worst.reps.size());
  for (auto& rep : worst.reps) {
    report.reps.push_back(rep.summary);
    report.traces.push_back(std::move(rep.trace));
  }
  return report;
}

void write_report_csv(std::ostream& out, const ExperimentReport& report) {
  out << kTraceCsvHeader << '\n';
  for (const auto& trace : report.traces) write_trace_rows(out, trace);
}

void write_report_csv_file(const std::string& path, const ExperimentReport& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw_error(ErrorCode::kConfigInvalid, "out: cannot open '" + path + "'");
  write_report_csv(out, report);
}

SweepAxis sweep_axis_from_name(const std::string& name) {
  if (name == "T") return SweepAxis::kHorizon;
  if (name == "K") return SweepAxis::kClassSize;
  if (name == "M") return SweepAxis::kLabelCount;
  if (name == "epsilon") return SweepAxis::kEpsilon;
  throw_error(ErrorCode::kConfigInvalid, "axis: unknown sweep axis '" + name + "'");
}

SweepReport sweep(const ExperimentConfig& base, SweepAxis axis,
                  const std::vector<double>& values) {
  if (values.empty()) {
    throw_error(ErrorCode::kConfigInvalid, "values: sweep needs at least one value");
  }
  if (!std::is_sorted(values.begin(), values.end())) {
    throw_error(ErrorCode::kConfigInvalid, "values: must be ascending");
  }

  SweepReport report;
  report.axis = axis;
  report.values = values;
  report.reports.reserve(values.size());
  for (double value : values) {
    ExperimentConfig cfg = base;
    switch (axis) {
      case SweepAxis::kHorizon: cfg.horizon = static_cast<long long>(value); break;
      case SweepAxis::kClassSize: cfg.k = static_cast<int>(value); break;
      case SweepAxis::kLabelCount: cfg.m = static_cast<int>(value); break;
      case SweepAxis::kEpsilon: cfg.epsilon = value; break;
    }
    report.reports.push_back(run_experiment(cfg));
  }

  // Least-squares slope of log mean risk against the log axis value.
  if (values.size() >= 2) {
    double x_mean = 0;
    double y_mean = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      x_mean += std::log(values[i]);
      y_mean += std::log(report.reports[i].mean_kl_cum);
    }
    x_mean /= static_cast<double>(values.size());
    y_mean /= static_cast<double>(values.size());
    double cov = 0;
    double var = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double dx = std::log(values[i]) - x_mean;
      cov += dx * (std::log(report.reports[i].mean_kl_cum) - y_mean);
      var += dx * dx;
    }
    report.loglog_slope = cov / var;
  }
  return report;
}

void write_sweep_csv(std::ostream& out, const SweepReport& report) {
  out << kTraceCsvHeader << ",axis_value\n";
  char buf[40];
  for (std::size_t i = 0; i < report.reports.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", report.values[i]);
    for (const auto& trace : report.reports[i].traces) {
      std::ostringstream rows;
      write_trace_rows(rows, trace);
      std::istringstream lines(rows.str());
      std::string line;
      while (std::getline(lines, line)) {
        out << line << ',' << buf << '\n';
      }
    }
  }
}

void write_sweep_csv_file(const std::string& path, const SweepReport& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw_error(ErrorCode::kConfigInvalid, "out: cannot open '" + path + "'");
  write_sweep_csv(out, report);
}

BatchSelectResult batch_select(const ExperimentConfig& cfg, double alpha, int boost) {
  if (!(alpha > 0 && alpha < 1)) {
    throw_error(ErrorCode::kConfigInvalid, "alpha: must lie in (0,1)");
  }
  if (boost < 1) throw_error(ErrorCode::kConfigInvalid, "boost: must be >= 1");

  ExperimentConfig run_cfg = cfg;
  run_cfg.algorithm = Algorithm::kExp3Pure;
  run_cfg.delta = 0;
  if (run_cfg.horizon <= 0) {
    const double derived = kBatchHorizonConstant * run_cfg.k /
                           (run_cfg.epsilon * run_cfg.epsilon * alpha * alpha * alpha * alpha);
    run_cfg.horizon = static_cast<long long>(std::ceil(derived));
  }
  run_cfg.replications = 1;
  run_cfg.validate();

  const HypothesisClass cls = resolve_instance(run_cfg);
  for (const auto& h : cls) {
    if (!h.is_constant()) {
      throw_error(ErrorCode::kConfigInvalid,
                  "instance: batch selection needs constant hypotheses");
    }
  }
  if (run_cfg.truth.scan) {
    throw_error(ErrorCode::kConfigInvalid, "truth: batch selection needs a fixed truth");
  }
  if (run_cfg.truth.index >= cls.size()) {
    throw_error(ErrorCode::kConfigInvalid, "truth: index outside the class");
  }
  const FeatureStream stream = resolve_stream(run_cfg, cls);

  std::vector<LabelDist> estimates;
  estimates.reserve(static_cast<std::size_t>(boost));
  for (int r = 0; r < boost; ++r) {
    Eigen::VectorXd mean;
    run_one_replication(run_cfg, cls, stream, run_cfg.truth.index, r, nullptr, &mean);
    estimates.push_back(LabelDist(std::move(mean)));
  }

  BatchSelectResult result;
  result.estimate = median_boost(estimates);
  result.horizon_used = run_cfg.horizon;
  result.tv_error = tv(cls[run_cfg.truth.index](0), result.estimate);
  return result;
}

}  // namespace privseq
