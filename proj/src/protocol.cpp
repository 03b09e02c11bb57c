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

#include "hamlearn/protocol.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <stdexcept>
#include <tuple>

#include <nlohmann/json.hpp>

#include "hamlearn/parallel.hpp"
#include "hamlearn/rfe.hpp"
#include "hamlearn/rng.hpp"

namespace hamlearn {

using nlohmann::json;

void RunConfig::validate() const {
  if (true_lambda.size() == 0) throw std::invalid_argument("run config: true_lambda missing");
  if (initial_guess.num_qubits() != true_lambda.num_qubits()) {
    throw std::invalid_argument("run config: initial guess and true_lambda differ in system size");
  }
  true_lambda.check_bounded();
  initial_guess.check_bounded();
  if (!(nu > 0.0)) throw std::invalid_argument("run config: nu must be positive");
  if (!(target_epsilon > 0.0)) throw std::invalid_argument("run config: target_epsilon must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("run config: delta must lie in (0, 1)");
  if (!(gap_epsilon >= 0.0)) throw std::invalid_argument("run config: gap_epsilon must be >= 0");
  noise.validate();
  if (rfe.shots < 1 || rfe.votes < 1 || rfe.medians < 0 || !(rfe.kappa > 0.0)) {
    throw std::invalid_argument("run config: invalid rfe overrides");
  }
  if (sweep.seeds < 1) throw std::invalid_argument("run config: sweep needs at least one seed");
}

int RunConfig::medians() const {
  if (rfe.medians > 0) return rfe.medians;
  return 2 * static_cast<int>(std::ceil(std::log(1.0 / delta))) + 1;
}

namespace {

GapSource gap_source_from_string(const std::string& s) {
  if (s == "sampled") return GapSource::Sampled;
  if (s == "expectation") return GapSource::Expectation;
  if (s == "exact") return GapSource::Exact;
  throw std::invalid_argument("unknown gap_source '" + s + "'");
}

std::string to_string(GapSource s) {
  switch (s) {
    case GapSource::Sampled:
      return "sampled";
    case GapSource::Expectation:
      return "expectation";
    case GapSource::Exact:
      return "exact";
  }
  return "sampled";
}

template <typename T>
void read_if(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

RunConfig run_config_from_json(const json& j) {
  RunConfig run;
  if (j.contains("preset")) {
    const auto name = j.at("preset").get<std::string>();
    if (name == "single-qubit") {
      run = preset_single_qubit();
    } else if (name == "two-qubit") {
      run = preset_two_qubit();
    } else {
      throw std::invalid_argument("unknown preset '" + name + "'");
    }
  }
  if (j.contains("true_lambda")) run.true_lambda = coefficients_from_json(j.at("true_lambda"));
  if (j.contains("initial_guess")) run.initial_guess = coefficients_from_json(j.at("initial_guess"));
  read_if(j, "nu", run.nu);
  read_if(j, "target_epsilon", run.target_epsilon);
  read_if(j, "delta", run.delta);
  read_if(j, "eta", run.noise.eta);
  read_if(j, "c_hat", run.c_hat);
  read_if(j, "gap_epsilon", run.gap_epsilon);
  read_if(j, "seed", run.seed);
  read_if(j, "output", run.output);
  if (j.contains("gap_source")) run.gap_source = gap_source_from_string(j.at("gap_source").get<std::string>());
  if (j.contains("rfe")) {
    const auto& r = j.at("rfe");
    read_if(r, "shots", run.rfe.shots);
    read_if(r, "votes", run.rfe.votes);
    read_if(r, "medians", run.rfe.medians);
    read_if(r, "kappa", run.rfe.kappa);
  }
  if (j.contains("sweep")) {
    const auto& s = j.at("sweep");
    read_if(s, "epsilons", run.sweep.epsilons);
    read_if(s, "nus", run.sweep.nus);
    read_if(s, "etas", run.sweep.etas);
    read_if(s, "guess_offsets", run.sweep.guess_offsets);
    read_if(s, "seeds", run.sweep.seeds);
  }
  if (run.initial_guess.size() == 0 && run.true_lambda.size() != 0) {
    throw std::invalid_argument("run config: initial_guess is required");
  }
  run.validate();
  return run;
}

json to_json(const RunConfig& run) {
  return {{"true_lambda", to_json(run.true_lambda)},
          {"initial_guess", to_json(run.initial_guess)},
          {"nu", run.nu},
          {"target_epsilon", run.target_epsilon},
          {"delta", run.delta},
          {"eta", run.noise.eta},
          {"c_hat", run.c_hat},
          {"gap_epsilon", run.gap_epsilon},
          {"seed", run.seed},
          {"gap_source", to_string(run.gap_source)},
          {"rfe", {{"shots", run.rfe.shots}, {"votes", run.rfe.votes}, {"medians", run.rfe.medians},
                   {"kappa", run.rfe.kappa}}},
          {"sweep", {{"epsilons", run.sweep.epsilons}, {"nus", run.sweep.nus}, {"etas", run.sweep.etas},
                     {"guess_offsets", run.sweep.guess_offsets}, {"seeds", run.sweep.seeds}}},
          {"output", run.output}};
}

RunConfig preset_single_qubit() {
  RunConfig run;
  run.true_lambda = CoefficientVector(1, {0.1, 0.5, 0.3});
  run.initial_guess = CoefficientVector(1, {0.09, 0.51, 0.29});
  run.nu = 3.0;
  run.noise.eta = 0.05;
  run.sweep.epsilons = {1e-3, 3e-4, 1e-4, 3e-5, 1e-5, 3e-6, 1e-6};
  run.sweep.nus = {1.9, 3.0};
  run.sweep.etas = {0.0, 0.05, 0.1, 0.15, 0.2, 0.25};
  run.sweep.seeds = 20;
  return run;
}

RunConfig preset_two_qubit() {
  RunConfig run;
  // Coefficients listed in coefficient_index order IX, IY, IZ, XI, ..., ZZ.
  run.true_lambda =
      CoefficientVector(2, {0.1, 0.2, 0.3, 0.5, 0.6, 0.3, 0.2, 0.1, 0.1, 0.2, 0.1, 0.1, 0.3, 0.22, 0.15});
  run.initial_guess =
      CoefficientVector(2, {0.11, 0.21, 0.32, 0.51, 0.63, 0.31, 0.22, 0.11, 0.11, 0.22, 0.11, 0.11, 0.33, 0.22, 0.15});
  run.nu = 5.0;
  run.noise.eta = 0.03;
  run.sweep.epsilons = {1e-3, 3e-4, 1e-4, 3e-5, 1e-5, 3e-6};
  run.sweep.nus = {5.0};
  run.sweep.guess_offsets = {0.0, 0.027, 0.1, 0.2, 0.3, 0.5, 0.7, 1.0};
  run.sweep.seeds = 10;
  return run;
}

namespace {

double calibrate_c_hat(const RunConfig& run, const CounterStream& stream) {
  const auto probes = probe_stability(run.initial_guess, run.nu, {1e-4, 1e-3, 1e-2}, 3, stream);
  double c = 0.0;
  for (const auto& p : probes) c = std::max(c, p.ratio);
  return std::max(c, 1e-12);
}

}  // namespace

LearnResult learn(const RunConfig& run) {
  run.validate();
  const auto start = std::chrono::steady_clock::now();
  const int n = run.true_lambda.num_qubits();
  const auto configs = enumerate_configs(n, run.nu);
  const CounterStream root(run.seed);

  LearnResult result;
  result.c_hat = run.c_hat > 0.0 ? run.c_hat : calibrate_c_hat(run, root.derive(2));
  result.gap_epsilon = run.gap_epsilon > 0.0 ? run.gap_epsilon : run.target_epsilon / result.c_hat;

  RfeConfig rfe;
  rfe.phi_max = gap_upper_bound(run.initial_guess, run.nu);
  rfe.epsilon = result.gap_epsilon;
  rfe.shots_per_quadrature = run.rfe.shots;
  rfe.votes = run.rfe.votes;
  rfe.medians = run.medians();
  rfe.kappa = run.rfe.kappa;
  rfe.validate();

  result.configs.resize(configs.size());
  parallel_for(configs.size(), [&](std::size_t i) {
    const PhaseEstimationExperiment experiment(run.true_lambda, configs[i]);
    auto& out = result.configs[i];
    out.config = configs[i];
    out.exact = experiment.gap().gap;
    out.degenerate = experiment.gap().degenerate;
    if (run.gap_source == GapSource::Exact) {
      out.estimate = out.exact;
      return;
    }
    std::vector<OracleCall> trace;
    auto run_oracle = [&](QuadratureOracle& oracle) {
      oracle.set_trace(&trace);
      const auto r = rfe_median_estimate(oracle, rfe);
      out.estimate = r.theta_hat;
      out.time_used = oracle.total_time();
      out.queries = oracle.calls();
      out.experiments = oracle.experiments();
    };
    if (run.gap_source == GapSource::Expectation) {
      ExpectationOracle oracle(experiment, run.noise);
      run_oracle(oracle);
    } else {
      ExperimentOracle oracle(experiment, run.noise, run.rfe.shots, root.derive({1, i}));
      run_oracle(oracle);
    }
    for (const auto& c : trace) out.trace_time += c.time_cost;
  });

  GapVector e_hat{n, run.nu, Eigen::VectorXd(static_cast<Eigen::Index>(configs.size())), {}};
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const auto& c = result.configs[i];
    e_hat.values(static_cast<Eigen::Index>(i)) = c.estimate;
    result.total_evolution_time += c.time_used;
    result.trace_time_sum += c.trace_time;
    result.total_queries += c.queries;
    result.total_experiments += c.experiments;
  }

  SolverOptions options;
  options.mask = nondegenerate_rows(run.initial_guess, run.nu);
  result.solver = solve_fixed_point(e_hat, run.initial_guess, run.nu, options);
  result.solver_used = "fixed_point";
  if (!result.solver.converged) {
    try {
      auto gn = solve_gauss_newton(e_hat, run.initial_guess, run.nu, options);
      if (gn.converged || gn.loss < result.solver.loss) {
        result.solver = std::move(gn);
        result.solver_used = "gauss_newton";
      }
    } catch (const std::runtime_error&) {
      // keep the fixed-point report
    }
  }
  result.lambda_hat = result.solver.lambda_hat;
  result.converged = result.solver.converged;
  result.l2_error = (result.lambda_hat.values() - run.true_lambda.values()).norm();
  result.residuals = gap_vector(result.lambda_hat, run.nu).values - e_hat.values;
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

json to_json(const LearnResult& result) {
  json configs = json::array();
  for (std::size_t i = 0; i < result.configs.size(); ++i) {
    const auto& c = result.configs[i];
    configs.push_back({{"k", c.config.k + 1},
                       {"s", c.config.s_bits()},
                       {"beta", c.config.beta_string()},
                       {"estimate", c.estimate},
                       {"exact", c.exact},
                       {"residual", result.residuals(static_cast<Eigen::Index>(i))},
                       {"time", c.time_used},
                       {"queries", c.queries}});
  }
  return {{"lambda_hat", to_json(result.lambda_hat)},
          {"l2_error", result.l2_error},
          {"total_evolution_time", result.total_evolution_time},
          {"trace_time_sum", result.trace_time_sum},
          {"total_experiments", result.total_experiments},
          {"total_queries", result.total_queries},
          {"c_hat", result.c_hat},
          {"gap_epsilon", result.gap_epsilon},
          {"solver", to_json(result.solver)},
          {"solver_used", result.solver_used},
          {"converged", result.converged},
          {"wall_seconds", result.wall_seconds},
          {"configs", configs}};
}

double percentile(std::vector<double> values, double pct) {
  if (values.empty()) throw std::invalid_argument("percentile of an empty list");
  std::sort(values.begin(), values.end());
  const double pos = pct / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

SlopeFit fit_log_log(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("slope fit needs >= 2 matched points");
  const auto m = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  SlopeFit fit;
  fit.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / m;
  fit.points = static_cast<int>(x.size());
  return fit;
}

namespace {

std::uint64_t seed_for(std::uint64_t base, int seed_index) {
  return mix64(base ^ mix64(static_cast<std::uint64_t>(seed_index) + 0x5851f42d4c957f2dULL));
}

struct SweepTask {
  RunConfig run;
  SweepRow row;
};

SweepResult run_tasks(std::vector<SweepTask> tasks) {
  SweepResult result;
  result.rows.resize(tasks.size());
  parallel_for(tasks.size(), [&](std::size_t i) {
    const auto r = learn(tasks[i].run);
    auto row = tasks[i].row;
    row.total_time = r.total_evolution_time;
    row.trace_time = r.trace_time_sum;
    row.experiments = r.total_experiments;
    row.queries = r.total_queries;
    row.l2_error = r.l2_error;
    row.converged = r.converged;
    result.rows[i] = row;
  });

  // Group by (nu, eta, epsilon, offset) in first-seen order.
  std::vector<std::tuple<double, double, double, double>> keys;
  std::map<std::tuple<double, double, double, double>, std::vector<const SweepRow*>> groups;
  for (const auto& row : result.rows) {
    const auto key = std::make_tuple(row.nu, row.eta, row.epsilon, row.guess_offset);
    if (!groups.contains(key)) keys.push_back(key);
    groups[key].push_back(&row);
  }
  for (const auto& key : keys) {
    const auto& members = groups[key];
    std::vector<double> errors, times, queries;
    SweepSummary s;
    std::tie(s.nu, s.eta, s.epsilon, s.guess_offset) = key;
    for (const auto* r : members) {
      errors.push_back(r->l2_error);
      times.push_back(r->total_time);
      queries.push_back(static_cast<double>(r->queries));
      s.converged += r->converged ? 1 : 0;
    }
    s.count = static_cast<int>(members.size());
    s.median_time = percentile(times, 50);
    s.median_queries = percentile(queries, 50);
    const double pcts[5] = {25, 35, 50, 65, 75};
    for (int p = 0; p < 5; ++p) s.error_percentiles[static_cast<std::size_t>(p)] = percentile(errors, pcts[p]);
    result.summary.push_back(s);
  }
  return result;
}

void add_fits(SweepResult& result) {
  std::vector<std::pair<double, double>> keys;
  for (const auto& s : result.summary) {
    const auto key = std::make_pair(s.nu, s.eta);
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
  }
  for (const auto& [nu, eta] : keys) {
    std::vector<double> x, y;
    for (const auto& s : result.summary) {
      if (s.nu == nu && s.eta == eta && s.error_percentiles[2] > 0.0) {
        x.push_back(s.median_time);
        y.push_back(s.error_percentiles[2]);
      }
    }
    if (x.size() < 2) continue;
    auto fit = fit_log_log(x, y);
    fit.nu = nu;
    fit.eta = eta;
    result.fits.push_back(fit);
  }
}

std::vector<SweepTask> ladder_tasks(const RunConfig& run, const std::vector<double>& nus, double eta) {
  std::vector<SweepTask> tasks;
  for (double nu : nus) {
    for (double eps : run.sweep.epsilons) {
      for (int s = 0; s < run.sweep.seeds; ++s) {
        SweepTask task{run, {}};
        task.run.nu = nu;
        task.run.noise.eta = eta;
        task.run.target_epsilon = eps;
        task.run.seed = seed_for(run.seed, s);
        task.row.nu = nu;
        task.row.eta = eta;
        task.row.epsilon = eps;
        task.row.seed_index = s;
        tasks.push_back(std::move(task));
      }
    }
  }
  return tasks;
}

}  // namespace

SweepResult sweep_error_vs_time(const RunConfig& run) {
  run.validate();
  if (run.sweep.epsilons.empty()) throw std::invalid_argument("sweep: epsilon ladder is empty");
  const auto nus = run.sweep.nus.empty() ? std::vector<double>{run.nu} : run.sweep.nus;
  auto result = run_tasks(ladder_tasks(run, nus, run.noise.eta));
  add_fits(result);
  return result;
}

SweepResult sweep_spam(const RunConfig& run) {
  run.validate();
  if (run.sweep.epsilons.empty()) throw std::invalid_argument("sweep: epsilon ladder is empty");
  const auto etas = run.sweep.etas.empty() ? std::vector<double>{run.noise.eta} : run.sweep.etas;
  std::vector<SweepTask> tasks;
  for (double eta : etas) {
    auto more = ladder_tasks(run, {run.nu}, eta);
    tasks.insert(tasks.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
  }
  auto result = run_tasks(std::move(tasks));
  add_fits(result);
  return result;
}

SweepResult sweep_initial_guess(const RunConfig& run) {
  run.validate();
  const auto offsets = run.sweep.guess_offsets.empty() ? std::vector<double>{0.0} : run.sweep.guess_offsets;
  const auto m = run.true_lambda.size();
  std::vector<SweepTask> tasks;
  for (double offset : offsets) {
    for (int s = 0; s < run.sweep.seeds; ++s) {
      SweepTask task{run, {}};
      task.run.seed = seed_for(run.seed, s);
      const auto dir_stream = CounterStream(run.seed).derive({3, static_cast<std::uint64_t>(s)});
      Eigen::VectorXd dir(m);
      for (Eigen::Index i = 0; i < m; ++i) dir(i) = normal(dir_stream, static_cast<std::uint64_t>(i));
      const Eigen::VectorXd guess = run.true_lambda.values() + offset * dir.normalized();
      task.run.initial_guess =
          CoefficientVector(run.true_lambda.num_qubits(), guess.cwiseMax(-kCoefficientCap).cwiseMin(kCoefficientCap));
      task.row.nu = run.nu;
      task.row.eta = run.noise.eta;
      task.row.epsilon = run.gap_epsilon > 0.0 ? run.gap_epsilon : run.target_epsilon;
      task.run.gap_epsilon = task.row.epsilon;
      task.row.guess_offset = offset;
      task.row.seed_index = s;
      tasks.push_back(std::move(task));
    }
  }
  return run_tasks(std::move(tasks));
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_sweep_rows_csv(std::ostream& os, const SweepResult& result) {
  os << kCsvMagic << '\n';
  os << "nu,eta,epsilon,guess_offset,seed_index,total_time,trace_time,experiments,queries,l2_error,converged\n";
  for (const auto& r : result.rows) {
    os << format_double(r.nu) << ',' << format_double(r.eta) << ',' << format_double(r.epsilon) << ','
       << format_double(r.guess_offset) << ',' << r.seed_index << ',' << format_double(r.total_time) << ','
       << format_double(r.trace_time) << ',' << r.experiments << ',' << r.queries << ','
       << format_double(r.l2_error) << ',' << (r.converged ? 1 : 0) << '\n';
  }
}

void write_sweep_summary_csv(std::ostream& os, const SweepResult& result) {
  os << kCsvMagic << '\n';
  os << "nu,eta,epsilon,guess_offset,count,converged,median_time,median_queries,p25,p35,p50,p65,p75\n";
  for (const auto& s : result.summary) {
    os << format_double(s.nu) << ',' << format_double(s.eta) << ',' << format_double(s.epsilon) << ','
       << format_double(s.guess_offset) << ',' << s.count << ',' << s.converged << ','
       << format_double(s.median_time) << ',' << format_double(s.median_queries);
    for (double p : s.error_percentiles) os << ',' << format_double(p);
    os << '\n';
  }
  for (const auto& f : result.fits) {
    os << "# slope nu=" << format_double(f.nu) << " eta=" << format_double(f.eta)
       << " slope=" << format_double(f.slope) << " points=" << f.points << '\n';
  }
}

void write_gap_csv(std::ostream& os, const std::vector<ControlConfig>& configs, const Eigen::VectorXd& gaps) {
  if (static_cast<Eigen::Index>(configs.size()) != gaps.size()) {
    throw std::invalid_argument("gap csv: configs and gaps differ in length");
  }
  os << kCsvMagic << '\n' << "k,s_bits,beta_string,gap\n";
  for (std::size_t i = 0; i < configs.size(); ++i) {
    os << configs[i].k + 1 << ',' << configs[i].s_bits() << ',' << configs[i].beta_string() << ','
       << format_double(gaps(static_cast<Eigen::Index>(i))) << '\n';
  }
}

void write_learn_configs_csv(std::ostream& os, const LearnResult& result) {
  os << kCsvMagic << '\n' << "k,s_bits,beta_string,gap_estimate,gap_exact,residual,time,trace_time,queries\n";
  for (std::size_t i = 0; i < result.configs.size(); ++i) {
    const auto& c = result.configs[i];
    os << c.config.k + 1 << ',' << c.config.s_bits() << ',' << c.config.beta_string() << ','
       << format_double(c.estimate) << ',' << format_double(c.exact) << ','
       << format_double(result.residuals(static_cast<Eigen::Index>(i))) << ',' << format_double(c.time_used) << ','
       << format_double(c.trace_time) << ',' << c.queries << '\n';
  }
}

BoundsReport bounds_report(const BoundsGrid& grid) {
  BoundsReport report;
  for (double nu : grid.nus) {
    for (double eps : grid.epsilons) {
      bounds::BoundParams p;
      p.epsilon = eps;
      p.nu = nu;
      p.q = grid.q;
      p.k_factor = grid.k_factor;
      p.L = grid.L0;
      const double t0 = bounds::time_lower_bound(p);
      report.rows.push_back({eps, nu, grid.q, grid.k_factor, grid.L0, t0, t0 * eps});
    }
  }
  report.samples = bounds::sample_unitary_bound(grid.verifier_samples, CounterStream(grid.seed));
  const auto ok = std::count_if(report.samples.begin(), report.samples.end(),
                                [](const bounds::UnitarySample& s) { return s.ok; });
  report.pass_fraction =
      report.samples.empty() ? 1.0 : static_cast<double>(ok) / static_cast<double>(report.samples.size());
  return report;
}

void write_bounds_csv(std::ostream& os, const BoundsReport& report) {
  os << kCsvMagic << '\n' << "epsilon,nu,q,k_factor,L0,time_lower_bound,time_times_epsilon\n";
  for (const auto& r : report.rows) {
    os << format_double(r.epsilon) << ',' << format_double(r.nu) << ',' << format_double(r.q) << ','
       << format_double(r.k_factor) << ',' << format_double(r.L0) << ',' << format_double(r.time_lower_bound) << ','
       << format_double(r.scaled) << '\n';
  }
}

void write_verifier_csv(std::ostream& os, const BoundsReport& report) {
  os << kCsvMagic << '\n' << "epsilon,nu,t,exact,bound,ok\n";
  for (const auto& s : report.samples) {
    os << format_double(s.epsilon) << ',' << format_double(s.nu) << ',' << format_double(s.t) << ','
       << format_double(s.exact) << ',' << format_double(s.bound) << ',' << (s.ok ? 1 : 0) << '\n';
  }
}

}  // namespace hamlearn
