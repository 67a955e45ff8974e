#include "cec/experiments.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include <fmt/chrono.h>
#include <fmt/format.h>

#include "cec/copula.hpp"
#include "cec/decompose.hpp"
#include "cec/errors.hpp"
#include "cec/hedge.hpp"
#include "cec/optimizer.hpp"
#include "cec/stats.hpp"
#include "cec/targetdist.hpp"

#ifndef CEC_VERSION
#define CEC_VERSION "unknown"
#endif

namespace cec {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Status for an alpha that cannot be used with this many periods, or "".
std::string admissibility(const AlphaEntry& alpha, std::size_t periods) {
  if (!alpha) return {};
  try {
    ClaytonParams(*alpha).check_dimension(periods);
  } catch (const std::exception& e) {
    return fmt::format("rejected: {}", e.what());
  }
  return {};
}

}  // namespace

void parallel_for(std::size_t count, std::size_t jobs,
                  const std::function<void(std::size_t)>& fn) {
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min(jobs, count);
  if (jobs <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < jobs; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::string format_alpha(const AlphaEntry& alpha) {
  return alpha ? fmt::format("{:.17g}", *alpha) : "independent";
}

std::vector<CostSurfaceRow> cost_surface(const ExperimentConfig& cfg,
                                         const StatePriceSample& kernel) {
  validate(cfg);
  const std::size_t n_std = cfg.stds.size();
  std::vector<CostSurfaceRow> rows(cfg.alphas.size() * n_std);
  parallel_for(rows.size(), cfg.jobs, [&](std::size_t idx) {
    const auto& alpha = cfg.alphas[idx / n_std];
    auto& row = rows[idx];
    row.alpha = alpha;
    row.std = cfg.stds[idx % n_std];
    if (auto status = admissibility(alpha, cfg.periods); !status.empty()) {
      row.status = status;
      row.cost = row.std_error = kNaN;
      return;
    }
    const std::vector targets(cfg.periods, TargetDistribution::from_mean_std(cfg.mean, row.std));
    const auto result = efficient_cost(targets, cfg.dependence(alpha), kernel, cfg.seed);
    row.cost = result.cost;
    row.std_error = result.std_error;
  });
  return rows;
}

std::vector<CostSurfaceRow> cost_surface(const ExperimentConfig& cfg) {
  validate(cfg);
  return cost_surface(cfg, state_price(cfg.scenarios, cfg.model_spec(), cfg.seed));
}

std::vector<FrontierRow> frontier_rows(const ExperimentConfig& cfg,
                                       const StatePriceSample& kernel) {
  validate(cfg);
  const double discount = std::exp(-cfg.market.r * cfg.market.horizon);
  const std::size_t n_std = cfg.stds.size();
  std::vector<FrontierRow> rows(cfg.alphas.size() * n_std);
  for (std::size_t a = 0; a < cfg.alphas.size(); ++a) {
    const auto& alpha = cfg.alphas[a];
    const auto status = admissibility(alpha, cfg.periods);
    std::optional<CopulaSample> copula;
    if (status.empty()) {
      copula = cfg.periods == 1
                   ? sample_independent(kernel.xi.size(), 1, cfg.seed)
                   : sample(kernel.xi.size(), cfg.periods, cfg.dependence(alpha), cfg.seed);
    }
    parallel_for(n_std, cfg.jobs, [&](std::size_t s) {
      auto& row = rows[a * n_std + s];
      row.alpha = alpha;
      row.std = cfg.stds[s];
      row.budget = cfg.budget;
      if (!status.empty()) {
        row.status = status;
        row.per_period_mean = row.achieved_cost = kNaN;
        return;
      }
      try {
        const auto p = frontier_point(cfg.budget, row.std, cfg.dependence(alpha), kernel,
                                      *copula, discount);
        row.per_period_mean = p.per_period_mean;
        row.achieved_cost = p.achieved_cost;
        row.iterations = p.iterations;
      } catch (const RootNotBracketed& e) {
        row.status = fmt::format("not bracketed: [{:.6g}, {:.6g}]", e.lo(), e.hi());
        row.per_period_mean = row.achieved_cost = kNaN;
      } catch (const ConvergenceError& e) {
        row.status = fmt::format("not converged: {}", e.what());
        row.per_period_mean = row.achieved_cost = kNaN;
      }
    });
  }
  return rows;
}

std::vector<FrontierRow> frontier_rows(const ExperimentConfig& cfg) {
  validate(cfg);
  return frontier_rows(cfg, state_price(cfg.scenarios, cfg.model_spec(), cfg.seed));
}

std::vector<HedgeRow> hedge_rows(const ExperimentConfig& cfg) {
  validate(cfg);
  const auto target = TargetDistribution::from_mean_std(cfg.mean, cfg.hedge_std);
  const auto hp = LognormalHedgeParams::make(target, cfg.market);
  const auto results = hedge_experiment(target, cfg.market, cfg.rebalances,
                                        cfg.hedge_paths, cfg.grid_steps, cfg.seed);
  std::vector<HedgeRow> rows;
  for (const auto& r : results) {
    rows.push_back({r.rebalance_steps, r.rms_error, r.mean_error,
                    hp.value(0.0, cfg.market.s0)});
  }
  return rows;
}

DecomposeReport decompose_demo(const ExperimentConfig& cfg) {
  validate(cfg);
  const std::size_t periods = cfg.decompose_periods;
  const auto target = TargetDistribution::from_mean_std(cfg.mean, cfg.decompose_std);
  const std::vector targets(periods, target);
  const auto dep = Dependence::clayton_alpha(cfg.decompose_alpha);
  const auto population =
      build_consumption(sample(cfg.population, periods, dep, cfg.seed), targets);
  // An independent redraw of the sum, from a different root seed.
  const auto redraw = build_consumption(
      sample(cfg.population, periods, dep, cfg.seed ^ 0x5eed5eed5eed5eedULL), targets);

  const auto result = allocate(population.values, redraw.row_sums, cfg.seed);
  DecomposeReport report;
  report.rows = result.values.rows();
  report.warnings = result.warnings;
  for (std::size_t k = 0; k < periods; ++k) {
    const auto col = result.values.column(k);
    report.columns.push_back(
        {k, ks_statistic(col, [&](double x) { return target.cdf(x); }),
         ks_critical_1pct(col.size())});
  }
  for (std::size_t i = 0; i < report.rows; ++i) {
    report.max_abs_sum_error = std::max(
        report.max_abs_sum_error, std::abs(row_sum(result.values.row(i)) - result.z_tilde[i]));
  }
  return report;
}

CsvWriter::CsvWriter(std::ostream& out, const ExperimentConfig& cfg,
                     const std::string& kind, const std::vector<std::string>& columns)
    : out_(out) {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  out_ << "# cec " << CEC_VERSION << ' ' << kind << '\n';
  out_ << "# generated: " << fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(now)) << '\n';
  out_ << "# config: " << to_json(cfg).dump() << '\n';
  row(columns);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    const bool quote = cells[i].find_first_of(",\"\n") != std::string::npos;
    if (quote) {
      out_ << '"';
      for (char ch : cells[i]) out_ << (ch == '"' ? "\"\"" : std::string(1, ch));
      out_ << '"';
    } else {
      out_ << cells[i];
    }
  }
  out_ << '\n';
}

std::string CsvWriter::num(double x) { return fmt::format("{:.17g}", x); }

void write_cost_surface(std::ostream& out, const ExperimentConfig& cfg,
                        const std::vector<CostSurfaceRow>& rows) {
  CsvWriter csv(out, cfg, "cost-surface", {"alpha", "std", "cost", "std_error", "status"});
  for (const auto& r : rows) {
    csv.row({format_alpha(r.alpha), CsvWriter::num(r.std), CsvWriter::num(r.cost),
             CsvWriter::num(r.std_error), r.status});
  }
}

void write_frontier(std::ostream& out, const ExperimentConfig& cfg,
                    const std::vector<FrontierRow>& rows) {
  CsvWriter csv(out, cfg, "frontier",
                {"alpha", "std", "per_period_mean", "achieved_cost", "budget", "status"});
  for (const auto& r : rows) {
    csv.row({format_alpha(r.alpha), CsvWriter::num(r.std), CsvWriter::num(r.per_period_mean),
             CsvWriter::num(r.achieved_cost), CsvWriter::num(r.budget), r.status});
  }
}

void write_hedge(std::ostream& out, const ExperimentConfig& cfg,
                 const std::vector<HedgeRow>& rows) {
  CsvWriter csv(out, cfg, "hedge-sim",
                {"rebalances", "rms_error", "mean_error", "initial_capital"});
  for (const auto& r : rows) {
    csv.row({std::to_string(r.rebalances), CsvWriter::num(r.rms_error),
             CsvWriter::num(r.mean_error), CsvWriter::num(r.initial_capital)});
  }
}

void write_decompose(std::ostream& out, const ExperimentConfig& cfg,
                     const DecomposeReport& report) {
  CsvWriter csv(out, cfg, "decompose-demo", {"column", "ks", "critical", "status"});
  for (const auto& c : report.columns) {
    csv.row({std::to_string(c.column), CsvWriter::num(c.ks), CsvWriter::num(c.critical),
             c.ks < c.critical ? "ok" : "ks-fail"});
  }
  csv.row({"max_abs_sum_error", CsvWriter::num(report.max_abs_sum_error), "", "rows=" +
           std::to_string(report.rows)});
}

}  // namespace cec
