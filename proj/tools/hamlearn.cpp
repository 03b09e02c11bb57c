// Copyright 2026 The hamlearn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// hamlearn command-line driver.

#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hamlearn/bounds.hpp"
#include "hamlearn/parallel.hpp"
#include "hamlearn/protocol.hpp"
#include "hamlearn/recover.hpp"
#include "hamlearn/rfe.hpp"

namespace {

using namespace hamlearn;

struct CommonOptions {
  std::string config;
  std::string preset;
  std::optional<std::uint64_t> seed;
  std::string out;
  int threads = 0;
};

void add_common(CLI::App* app, CommonOptions& opts) {
  app->add_option("--config", opts.config, "JSON run configuration")->check(CLI::ExistingFile);
  app->add_option("--preset", opts.preset, "built-in instance")
      ->check(CLI::IsMember({"single-qubit", "two-qubit"}));
  app->add_option("--seed", opts.seed, "master seed");
  app->add_option("--out", opts.out, "output path (stdout when omitted)");
  app->add_option("--threads", opts.threads, "worker threads (0 = hardware)");
}

RunConfig load_run(const CommonOptions& opts) {
  RunConfig run;
  if (!opts.config.empty()) {
    std::ifstream in(opts.config);
    auto j = nlohmann::json::parse(in);
    if (!opts.preset.empty() && !j.contains("preset")) j["preset"] = opts.preset;
    run = run_config_from_json(j);
  } else if (opts.preset == "two-qubit") {
    run = preset_two_qubit();
  } else {
    run = preset_single_qubit();
  }
  if (opts.seed) run.seed = *opts.seed;
  if (!opts.out.empty()) run.output = opts.out;
  set_worker_threads(opts.threads);
  return run;
}

template <typename Fn>
void emit(const std::string& path, Fn write) {
  if (path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  write(os);
}

std::string sibling(const std::string& path, const std::string& suffix) {
  if (path.empty()) return {};
  const auto dot = path.rfind('.');
  if (dot == std::string::npos || path.find('/', dot) != std::string::npos) return path + suffix;
  return path.substr(0, dot) + suffix;
}

int run_learn(const CommonOptions& opts, const std::string& configs_out) {
  const auto run = load_run(opts);
  const auto result = learn(run);
  emit(run.output, [&](std::ostream& os) { os << to_json(result).dump(2) << '\n'; });
  if (!configs_out.empty()) emit(configs_out, [&](std::ostream& os) { write_learn_configs_csv(os, result); });
  std::cerr << "l2_error " << result.l2_error << "  T " << result.total_evolution_time << "  converged "
            << result.converged << '\n';
  return result.converged ? 0 : 2;
}

int run_sweep(const CommonOptions& opts, SweepResult (*sweep)(const RunConfig&)) {
  const auto run = load_run(opts);
  const auto result = sweep(run);
  emit(run.output, [&](std::ostream& os) { write_sweep_rows_csv(os, result); });
  const auto summary_path = sibling(run.output, ".summary.csv");
  emit(summary_path, [&](std::ostream& os) { write_sweep_summary_csv(os, result); });
  return 0;
}

int run_bounds(const CommonOptions& opts, const std::string& verifier_out, int samples) {
  BoundsGrid grid;
  if (opts.seed) grid.seed = *opts.seed;
  grid.verifier_samples = samples;
  set_worker_threads(opts.threads);
  const auto report = bounds_report(grid);
  emit(opts.out, [&](std::ostream& os) { write_bounds_csv(os, report); });
  if (!verifier_out.empty()) emit(verifier_out, [&](std::ostream& os) { write_verifier_csv(os, report); });
  std::cerr << "unitary bound pass fraction " << report.pass_fraction << '\n';
  return report.pass_fraction == 1.0 ? 0 : 1;
}

struct Check {
  std::string name;
  bool ok;
  std::string detail;
};

// Fast self-checks of the whole stack; exit code 0 only if all pass.
int run_verify(const CommonOptions& opts) {
  set_worker_threads(opts.threads);
  const std::uint64_t seed = opts.seed.value_or(1);
  std::vector<Check> checks;
  auto add = [&](std::string name, bool ok, double value) {
    std::ostringstream s;
    s << value;
    checks.push_back({std::move(name), ok, s.str()});
  };

  {
    const auto f = bounds::verify_unitary_bound(10000, CounterStream(seed));
    add("unitary_bound_fraction", f == 1.0, f);
  }
  {
    double worst = -1.0;
    for (double eps : {0.0, 0.01, 0.05, 0.2}) {
      for (double nu : {0.0, 0.3, 0.6, 0.9}) {
        for (double t : {0.0, 0.5, 2.0, 10.0}) {
          bounds::BoundParams p;
          p.epsilon = eps;
          p.nu = nu;
          p.T = t;
          p.L = 1;
          for (const auto& dir : {std::array<double, 3>{0, 0, 1}, {1, 0, 0}, {0, 1, 0}}) {
            const double gap = bounds::tv_single_experiment_raw(p) - bounds::exact_single_experiment_tv(eps, nu, t, dir);
            worst = (worst < 0.0) ? gap : std::min(worst, gap);
          }
        }
      }
    }
    add("tv_single_dominates_exact", worst >= -1e-12, worst);
  }
  {
    const double theta = 2.0 * std::sqrt(0.01 + 0.25 + 1.44);
    RfeConfig cfg;
    cfg.phi_max = 10.0;
    cfg.epsilon = 1e-8;
    auto oracle = exact_oracle(theta);
    const auto r = rfe_estimate(oracle, cfg);
    add("rfe_exact_oracle", std::abs(r.theta_hat - theta) <= 1e-8, std::abs(r.theta_hat - theta));
  }
  {
    auto run = preset_single_qubit();
    run.gap_source = GapSource::Exact;
    const auto r = learn(run);
    add("learn_exact_gaps_single_qubit", r.converged && r.l2_error < 1e-9, r.l2_error);
  }
  {
    auto run = preset_single_qubit();
    run.seed = seed;
    run.target_epsilon = 1e-4;
    const auto r = learn(run);
    add("learn_sampled_single_qubit", r.converged && r.l2_error < 1e-3, r.l2_error);
    add("time_accounting", std::abs(r.total_evolution_time - r.trace_time_sum) <= 1e-9 * r.total_evolution_time,
        r.total_evolution_time - r.trace_time_sum);
  }

  bool all = true;
  for (const auto& c : checks) {
    std::cout << (c.ok ? "PASS " : "FAIL ") << c.name << " " << c.detail << '\n';
    all = all && c.ok;
  }
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hamlearn: Heisenberg-limited Hamiltonian learning simulator"};
  app.require_subcommand(1);

  CommonOptions learn_opts, time_opts, spam_opts, guess_opts, bounds_opts, verify_opts;
  std::string configs_out, verifier_out;
  int bound_samples = 10000;

  auto* learn_cmd = app.add_subcommand("learn", "learn the coefficients of one hidden Hamiltonian");
  add_common(learn_cmd, learn_opts);
  learn_cmd->add_option("--configs-out", configs_out, "per-config gap estimates (CSV)");

  auto* time_cmd = app.add_subcommand("sweep-time", "error versus total evolution time");
  add_common(time_cmd, time_opts);
  auto* spam_cmd = app.add_subcommand("sweep-spam", "error versus time across SPAM rates");
  add_common(spam_cmd, spam_opts);
  auto* guess_cmd = app.add_subcommand("sweep-guess", "final error versus initial-guess offset");
  add_common(guess_cmd, guess_opts);

  auto* bounds_cmd = app.add_subcommand("bounds", "time lower bounds and the unitary-distance verifier");
  add_common(bounds_cmd, bounds_opts);
  bounds_cmd->add_option("--verifier-out", verifier_out, "per-sample verifier rows (CSV)");
  bounds_cmd->add_option("--samples", bound_samples, "verifier samples")->check(CLI::PositiveNumber);

  auto* verify_cmd = app.add_subcommand("verify", "self-checks; exit 0 only if all pass");
  add_common(verify_cmd, verify_opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*learn_cmd) return run_learn(learn_opts, configs_out);
    if (*time_cmd) return run_sweep(time_opts, &sweep_error_vs_time);
    if (*spam_cmd) return run_sweep(spam_opts, &sweep_spam);
    if (*guess_cmd) return run_sweep(guess_opts, &sweep_initial_guess);
    if (*bounds_cmd) return run_bounds(bounds_opts, verifier_out, bound_samples);
    if (*verify_cmd) return run_verify(verify_opts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
