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

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "privseq/harness.hpp"

namespace {

using privseq::ExperimentConfig;

struct SimArgs {
  std::string config_path;
  std::string alg;
  std::string instance;
  std::string truth;
  std::string out;
  int k = 0;
  int m = 0;
  long long horizon = 0;
  double epsilon = 0;
  double delta = 0;
  double gamma = 0;
  std::uint64_t seed = 1;
  int reps = 1;
  double instance_alpha = 1.0;
  long long trace_stride = 0;

  CLI::Option* o_alg = nullptr;
  CLI::Option* o_instance = nullptr;
  CLI::Option* o_truth = nullptr;
  CLI::Option* o_out = nullptr;
  CLI::Option* o_k = nullptr;
  CLI::Option* o_m = nullptr;
  CLI::Option* o_horizon = nullptr;
  CLI::Option* o_epsilon = nullptr;
  CLI::Option* o_delta = nullptr;
  CLI::Option* o_gamma = nullptr;
  CLI::Option* o_seed = nullptr;
  CLI::Option* o_reps = nullptr;
  CLI::Option* o_alpha = nullptr;
  CLI::Option* o_stride = nullptr;
};

void add_sim_options(CLI::App* cmd, SimArgs& a) {
  cmd->add_option("--config", a.config_path, "JSON config file; flags override its values");
  a.o_alg = cmd->add_option("--alg", a.alg, "wma-ldp | exp3-pure | rr-baseline");
  a.o_instance = cmd->add_option("--instance", a.instance, "random | hard | file:PATH");
  a.o_k = cmd->add_option("--K", a.k, "hypotheses (random) or pairs (hard)");
  a.o_m = cmd->add_option("--M", a.m, "label count (random instances)");
  a.o_horizon = cmd->add_option("--T", a.horizon, "horizon");
  a.o_epsilon = cmd->add_option("--epsilon", a.epsilon, "privacy budget");
  a.o_delta = cmd->add_option("--delta", a.delta, "approximate-DP delta");
  a.o_gamma = cmd->add_option("--gamma", a.gamma, "tail parameter (default ln T)");
  a.o_seed = cmd->add_option("--seed", a.seed, "base seed");
  a.o_reps = cmd->add_option("--reps", a.reps, "replications");
  a.o_truth = cmd->add_option("--truth", a.truth, "truth index or 'scan'");
  a.o_out = cmd->add_option("--out", a.out, "output CSV path");
  a.o_alpha = cmd->add_option("--instance-alpha", a.instance_alpha,
                              "random-instance concentration");
  a.o_stride = cmd->add_option("--trace-stride", a.trace_stride,
                               "record every n-th round (0 = auto)");
}

void apply_instance_string(ExperimentConfig& cfg, const std::string& name) {
  if (name == "random") {
    cfg.instance.kind = privseq::InstanceSpec::Kind::kRandom;
  } else if (name == "hard") {
    cfg.instance.kind = privseq::InstanceSpec::Kind::kHard;
  } else if (name.rfind("file:", 0) == 0) {
    cfg.instance.kind = privseq::InstanceSpec::Kind::kFile;
    cfg.instance.path = name.substr(5);
  } else {
    privseq::throw_error(privseq::ErrorCode::kConfigInvalid,
                         "instance: unknown source '" + name + "'");
  }
}

ExperimentConfig build_config(const SimArgs& a) {
  ExperimentConfig cfg;
  if (!a.config_path.empty()) {
    std::ifstream in(a.config_path);
    if (!in) {
      privseq::throw_error(privseq::ErrorCode::kConfigInvalid,
                           "config: cannot open '" + a.config_path + "'");
    }
    nlohmann::json j;
    in >> j;
    cfg = privseq::config_from_json(j);
  }
  if (a.o_alg->count() > 0) cfg.algorithm = privseq::algorithm_from_name(a.alg);
  if (a.o_instance->count() > 0) apply_instance_string(cfg, a.instance);
  if (a.o_k->count() > 0) cfg.k = a.k;
  if (a.o_m->count() > 0) cfg.m = a.m;
  if (a.o_horizon->count() > 0) cfg.horizon = a.horizon;
  if (a.o_epsilon->count() > 0) cfg.epsilon = a.epsilon;
  if (a.o_delta->count() > 0) cfg.delta = a.delta;
  if (a.o_gamma->count() > 0) cfg.gamma = a.gamma;
  if (a.o_seed->count() > 0) cfg.seed = a.seed;
  if (a.o_reps->count() > 0) cfg.replications = a.reps;
  if (a.o_alpha->count() > 0) cfg.instance.concentration = a.instance_alpha;
  if (a.o_stride->count() > 0) cfg.trace_stride = a.trace_stride;
  if (a.o_truth->count() > 0) {
    if (a.truth == "scan") {
      cfg.truth.scan = true;
    } else {
      cfg.truth.scan = false;
      try {
        cfg.truth.index = std::stoi(a.truth);
      } catch (const std::exception&) {
        privseq::throw_error(privseq::ErrorCode::kConfigInvalid,
                             "truth: expected an index or 'scan'");
      }
    }
  }
  if (a.o_out->count() > 0) cfg.out_csv = a.out;
  return cfg;
}

void print_report(const privseq::ExperimentReport& report) {
  std::printf("algorithm=%s K=%d M=%d T=%lld epsilon=%g delta=%g gamma=%g truth=%d reps=%zu\n",
              report.algorithm.c_str(), report.class_size, report.label_count,
              report.horizon, report.epsilon, report.delta, report.gamma,
              report.truth_index, report.reps.size());
  std::printf("mean_kl_cum=%.6g stddev_kl_cum=%.6g se_kl_cum=%.6g\n",
              report.mean_kl_cum, report.stddev_kl_cum, report.se_kl_cum);
  std::printf("mean_tv_avg=%.6g stddev_tv_avg=%.6g\n", report.mean_tv_avg,
              report.stddev_tv_avg);
  std::printf("risk_bound=%.6g bound_ok_mean=%s bound_ok_reps=%d/%zu\n",
              report.risk_bound, report.bound_ok_mean ? "true" : "false",
              report.bound_ok_reps, report.reps.size());
  std::printf("potential_ok=%s pinsker_ok=%s\n",
              report.potential_ok_all ? "true" : "false",
              report.pinsker_ok_all ? "true" : "false");
  if (report.accountant) {
    std::printf("accountant per_coordinate_epsilon=%.6g composed_epsilon=%.6g ok=%s\n",
                report.accountant->per_coordinate_epsilon,
                report.accountant->composed_epsilon,
                report.accountant->ok ? "true" : "false");
  }
  if (!report.scan_means.empty()) {
    for (const auto& [truth, mean] : report.scan_means) {
      std::printf("scan truth=%d mean_kl_cum=%.6g\n", truth, mean);
    }
  }
}

int run_main(int argc, char** argv) {
  CLI::App app{"Locally private online distribution learning simulator"};
  app.require_subcommand(1);

  auto* sim = app.add_subcommand("simulate", "run one experiment");
  SimArgs sim_args;
  add_sim_options(sim, sim_args);

  auto* sweep_cmd = app.add_subcommand("sweep", "run one experiment per axis value");
  SimArgs sweep_args;
  add_sim_options(sweep_cmd, sweep_args);
  std::string axis_name;
  std::string values_csv;
  sweep_cmd->add_option("--axis", axis_name, "T | K | M | epsilon")->required();
  sweep_cmd->add_option("--values", values_csv, "ascending comma-separated list")->required();

  auto* hard = app.add_subcommand("hard-instance", "emit a hard instance as JSON");
  int hard_k = 0;
  long long hard_t = 0;
  double hard_eps = 0;
  std::string hard_out;
  hard->add_option("--K", hard_k, "pairs")->required();
  hard->add_option("--T", hard_t, "horizon")->required();
  hard->add_option("--epsilon", hard_eps, "privacy budget")->required();
  hard->add_option("--out", hard_out, "output JSON path")->required();

  auto* acct = app.add_subcommand("accountant", "composition budget check");
  int acct_k = 0;
  double acct_eps = 0;
  double acct_delta = 0;
  acct->add_option("--K", acct_k, "coordinates")->required();
  acct->add_option("--epsilon", acct_eps, "budget")->required();
  acct->add_option("--delta", acct_delta, "delta")->required();

  auto* batch = app.add_subcommand("batch-select", "online-to-batch hypothesis selection");
  SimArgs batch_args;
  add_sim_options(batch, batch_args);
  double batch_alpha = 0;
  int batch_boost = 1;
  batch->add_option("--alpha", batch_alpha, "TV target")->required();
  batch->add_option("--boost", batch_boost, "independent runs for the median vote")
      ->required();

  auto* plot = app.add_subcommand("plot", "render a trace CSV as SVG");
  std::string plot_in;
  std::string plot_x;
  std::string plot_y;
  std::string plot_group;
  std::string plot_out;
  plot->add_option("--in", plot_in, "input CSV")->required();
  plot->add_option("--x", plot_x, "x column")->required();
  plot->add_option("--y", plot_y, "y column")->required();
  plot->add_option("--group", plot_group, "group column");
  plot->add_option("--out", plot_out, "output SVG path")->required();

  CLI11_PARSE(app, argc, argv);

  if (app.got_subcommand(sim)) {
    ExperimentConfig cfg = build_config(sim_args);
    const auto report = privseq::run_experiment(cfg);
    print_report(report);
    if (!cfg.out_csv.empty()) {
      privseq::write_report_csv_file(cfg.out_csv, report);
      std::printf("csv=%s\n", cfg.out_csv.c_str());
    }
    return 0;
  }

  if (app.got_subcommand(sweep_cmd)) {
    ExperimentConfig cfg = build_config(sweep_args);
    const auto axis = privseq::sweep_axis_from_name(axis_name);
    std::vector<double> values;
    std::istringstream in(values_csv);
    std::string token;
    while (std::getline(in, token, ',')) {
      try {
        values.push_back(std::stod(token));
      } catch (const std::exception&) {
        privseq::throw_error(privseq::ErrorCode::kConfigInvalid,
                             "values: non-numeric entry '" + token + "'");
      }
    }
    const auto report = privseq::sweep(cfg, axis, values);
    for (std::size_t i = 0; i < report.values.size(); ++i) {
      std::printf("axis_value=%g mean_kl_cum=%.6g mean_tv_avg=%.6g\n",
                  report.values[i], report.reports[i].mean_kl_cum,
                  report.reports[i].mean_tv_avg);
    }
    std::printf("loglog_slope=%.6g\n", report.loglog_slope);
    if (!cfg.out_csv.empty()) {
      privseq::write_sweep_csv_file(cfg.out_csv, report);
      std::printf("csv=%s\n", cfg.out_csv.c_str());
    }
    return 0;
  }

  if (app.got_subcommand(hard)) {
    const auto instance = privseq::build_hard_instance(hard_k, hard_t, hard_eps);
    std::ofstream out(hard_out, std::ios::binary);
    if (!out) {
      privseq::throw_error(privseq::ErrorCode::kConfigInvalid,
                           "out: cannot open '" + hard_out + "'");
    }
    out << privseq::hard_instance_to_json(instance).dump(2) << '\n';
    std::printf("pairs=%d order=%d labels=%d a=%.8g json=%s\n", instance.pairs,
                instance.order, 1 << instance.order, instance.separation,
                hard_out.c_str());
    return 0;
  }

  if (app.got_subcommand(acct)) {
    const auto result = privseq::accountant_check(acct_k, acct_eps, acct_delta);
    std::printf("per_coordinate_epsilon=%.8g composed_epsilon=%.8g ok=%s\n",
                result.per_coordinate_epsilon, result.composed_epsilon,
                result.ok ? "true" : "false");
    return 0;
  }

  if (app.got_subcommand(batch)) {
    ExperimentConfig cfg = build_config(batch_args);
    const auto result = privseq::batch_select(cfg, batch_alpha, batch_boost);
    std::printf("tv_error=%.6g T_used=%lld boost=%d\n", result.tv_error,
                result.horizon_used, batch_boost);
    if (!cfg.out_csv.empty()) {
      nlohmann::json j;
      j["tv_error"] = result.tv_error;
      j["T_used"] = result.horizon_used;
      j["estimate"] = std::vector<double>(
          result.estimate.probs().data(),
          result.estimate.probs().data() + result.estimate.size());
      std::ofstream out(cfg.out_csv, std::ios::binary);
      if (!out) {
        privseq::throw_error(privseq::ErrorCode::kConfigInvalid,
                             "out: cannot open '" + cfg.out_csv + "'");
      }
      out << j.dump(2) << '\n';
    }
    return 0;
  }

  if (app.got_subcommand(plot)) {
    privseq::render_svg_file(plot_in, privseq::PlotSpec{plot_x, plot_y, plot_group},
                             plot_out);
    std::printf("svg=%s\n", plot_out.c_str());
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_main(argc, argv);
  } catch (const privseq::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: Internal: %s\n", e.what());
    return 1;
  }
}
