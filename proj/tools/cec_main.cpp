#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <httplib.h>

#include "cec/config.hpp"
#include "cec/errors.hpp"
#include "cec/experiments.hpp"
#include "cec/service.hpp"
#include "cec/validate.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kCheckFailure = 1;
constexpr int kUsage = 2;

// Flag values; only those given on the command line override the config.
struct Overrides {
  std::string config_path;
  std::string from_csv;
  std::optional<std::string> model;
  std::optional<double> mu, sigma, r, s0, horizon, beta;
  std::optional<int> n_steps;
  std::vector<std::string> alphas;
  std::vector<double> stds;
  std::optional<double> mean, budget;
  std::optional<std::size_t> periods, scenarios, jobs;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output;
  std::optional<double> hedge_std;
  std::vector<std::size_t> rebalances;
  std::optional<std::size_t> hedge_paths, grid_steps;
  std::optional<double> decompose_alpha, decompose_std;
  std::optional<std::size_t> decompose_periods, population;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "JSON config file")->check(CLI::ExistingFile);
  cmd->add_option("--from-csv", o.from_csv,
                  "Re-run with the config embedded in an output CSV")
      ->check(CLI::ExistingFile);
  cmd->add_option("--model", o.model, "black-scholes | cev");
  cmd->add_option("--mu", o.mu, "Stock drift");
  cmd->add_option("--sigma", o.sigma, "Stock volatility");
  cmd->add_option("--r", o.r, "Risk-free rate");
  cmd->add_option("--s0", o.s0, "Initial stock price");
  cmd->add_option("--horizon", o.horizon, "Horizon T in years");
  cmd->add_option("--beta", o.beta, "CEV elasticity, in (-1/2, 0)");
  cmd->add_option("--n-steps", o.n_steps, "CEV time steps");
  cmd->add_option("--alphas", o.alphas, "Clayton alphas (or 'independent')")->delimiter(',');
  cmd->add_option("--stds", o.stds, "Per-period target standard deviations")->delimiter(',');
  cmd->add_option("--mean", o.mean, "Per-period target mean");
  cmd->add_option("--budget", o.budget, "Budget for the frontier");
  cmd->add_option("--periods", o.periods, "Number of periods N");
  cmd->add_option("--scenarios", o.scenarios, "Monte Carlo scenarios n");
  cmd->add_option("--seed", o.seed, "Root seed");
  cmd->add_option("-o,--output", o.output, "Output CSV (default: stdout)");
  cmd->add_option("--jobs", o.jobs, "Worker threads (0: all cores)");
}

cec::ExperimentConfig resolve(const Overrides& o) {
  cec::ExperimentConfig c;
  if (!o.from_csv.empty()) c = cec::config_from_csv(o.from_csv);
  if (!o.config_path.empty()) c = cec::load_config(o.config_path);
  if (o.model) c.model = *o.model;
  if (o.mu) c.market.mu = *o.mu;
  if (o.sigma) c.market.sigma = *o.sigma;
  if (o.r) c.market.r = *o.r;
  if (o.s0) c.market.s0 = *o.s0;
  if (o.horizon) c.market.horizon = *o.horizon;
  if (o.beta) c.beta = *o.beta;
  if (o.n_steps) c.n_steps = *o.n_steps;
  if (!o.alphas.empty()) {
    std::vector<std::string> bad;
    c.alphas.clear();
    for (std::size_t i = 0; i < o.alphas.size(); ++i) {
      if (o.alphas[i] == "independent") {
        c.alphas.emplace_back(std::nullopt);
        continue;
      }
      try {
        std::size_t used = 0;
        c.alphas.emplace_back(std::stod(o.alphas[i], &used));
        if (used != o.alphas[i].size()) throw std::invalid_argument("trailing characters");
      } catch (const std::exception&) {
        bad.push_back(fmt::format("alphas[{}]: not a number: '{}'", i, o.alphas[i]));
      }
    }
    if (!bad.empty()) throw cec::ConfigError(bad);
  }
  if (!o.stds.empty()) c.stds = o.stds;
  if (o.mean) c.mean = *o.mean;
  if (o.budget) c.budget = *o.budget;
  if (o.periods) c.periods = *o.periods;
  if (o.scenarios) c.scenarios = *o.scenarios;
  if (o.seed) c.seed = *o.seed;
  if (o.output) c.output = *o.output;
  if (o.jobs) c.jobs = *o.jobs;
  if (o.hedge_std) c.hedge_std = *o.hedge_std;
  if (!o.rebalances.empty()) c.rebalances = o.rebalances;
  if (o.hedge_paths) c.hedge_paths = *o.hedge_paths;
  if (o.grid_steps) c.grid_steps = *o.grid_steps;
  if (o.decompose_alpha) c.decompose_alpha = *o.decompose_alpha;
  if (o.decompose_std) c.decompose_std = *o.decompose_std;
  if (o.decompose_periods) c.decompose_periods = *o.decompose_periods;
  if (o.population) c.population = *o.population;
  cec::validate(c);
  return c;
}

// Writes via a temporary so a failed run leaves no partial file.
template <class Fn>
void emit(const cec::ExperimentConfig& cfg, Fn&& write) {
  if (cfg.output.empty()) {
    write(std::cout);
    return;
  }
  const std::string tmp = cfg.output + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error(fmt::format("cannot write {}", tmp));
    write(out);
    if (!out) throw std::runtime_error(fmt::format("write to {} failed", tmp));
  }
  if (std::rename(tmp.c_str(), cfg.output.c_str()) != 0) {
    throw std::runtime_error(fmt::format("cannot move {} to {}", tmp, cfg.output));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cost-efficient consumption: Monte Carlo pricing of copula-linked "
               "consumption profiles under Black-Scholes and CEV markets"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(CEC_VERSION));

  Overrides o;
  auto* surface = app.add_subcommand("cost-surface", "Minimal cost over an (alpha, std) grid");
  add_common(surface, o);
  surface->footer("CSV columns: alpha, std, cost, std_error, status");

  auto* front = app.add_subcommand("frontier", "Per-period mean affordable at a fixed budget");
  add_common(front, o);
  front->footer("CSV columns: alpha, std, per_period_mean, achieved_cost, budget, status");

  auto* hedge = app.add_subcommand("hedge-sim", "Discrete-rebalancing replication error");
  add_common(hedge, o);
  hedge->add_option("--hedge-std", o.hedge_std, "Target standard deviation");
  hedge->add_option("--rebalances", o.rebalances, "Rebalance counts")->delimiter(',');
  hedge->add_option("--hedge-paths", o.hedge_paths, "Simulated paths");
  hedge->add_option("--grid-steps", o.grid_steps, "Path grid steps");
  hedge->footer("CSV columns: rebalances, rms_error, mean_error, initial_capital");

  auto* decomp = app.add_subcommand("decompose-demo",
                                    "Split exogenous sums into a prescribed joint law");
  add_common(decomp, o);
  decomp->add_option("--decompose-alpha", o.decompose_alpha, "Clayton alpha of the population");
  decomp->add_option("--decompose-std", o.decompose_std, "Marginal standard deviation");
  decomp->add_option("--decompose-periods", o.decompose_periods, "Columns N");
  decomp->add_option("--population", o.population, "Population rows m");
  decomp->footer("CSV columns: column, ks, critical, status (last row: max_abs_sum_error)");

  auto* check = app.add_subcommand("validate", "Run the invariant suite");
  std::uint64_t validate_seed = cec::ValidationOptions{}.seed;
  check->add_option("--seed", validate_seed, "Root seed");

  auto* serve = app.add_subcommand("serve", "Start the HTTP/JSON service");
  std::string host = "127.0.0.1";
  int port = 8080;
  cec::ServiceOptions service_options;
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--port", port, "Port");
  serve->add_option("--scenario-cap", service_options.scenario_cap, "Max scenarios per request");
  serve->add_option("--max-jobs", service_options.max_jobs, "Concurrent computations");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*surface) {
      const auto cfg = resolve(o);
      const auto rows = cec::cost_surface(cfg);
      emit(cfg, [&](std::ostream& out) { cec::write_cost_surface(out, cfg, rows); });
    } else if (*front) {
      const auto cfg = resolve(o);
      const auto rows = cec::frontier_rows(cfg);
      emit(cfg, [&](std::ostream& out) { cec::write_frontier(out, cfg, rows); });
    } else if (*hedge) {
      const auto cfg = resolve(o);
      const auto rows = cec::hedge_rows(cfg);
      emit(cfg, [&](std::ostream& out) { cec::write_hedge(out, cfg, rows); });
    } else if (*decomp) {
      const auto cfg = resolve(o);
      const auto report = cec::decompose_demo(cfg);
      emit(cfg, [&](std::ostream& out) { cec::write_decompose(out, cfg, report); });
      for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
      for (const auto& c : report.columns) {
        if (!(c.ks < c.critical)) return kCheckFailure;
      }
      if (report.max_abs_sum_error != 0.0) return kCheckFailure;
    } else if (*check) {
      cec::ValidationOptions options;
      options.seed = validate_seed;
      bool ok = true;
      for (const auto& r : cec::run_validation(options)) {
        std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << std::endl;
        ok = ok && r.passed;
      }
      return ok ? kOk : kCheckFailure;
    } else if (*serve) {
      httplib::Server server;
      cec::Service service(service_options);
      service.mount(server);
      std::cerr << fmt::format("listening on http://{}:{}\n", host, port);
      if (!server.listen(host, port)) {
        std::cerr << fmt::format("error: cannot bind {}:{}\n", host, port);
        return kCheckFailure;
      }
    }
  } catch (const cec::ConfigError& e) {
    for (const auto& p : e.problems()) std::cerr << "error: " << p << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kCheckFailure;
  }
  return kOk;
}
