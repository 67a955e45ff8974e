#pragma once

#include <cstddef>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "cec/config.hpp"
#include "cec/market.hpp"

namespace cec {

/// Runs fn(0..count-1) on `jobs` threads (0: hardware concurrency). Each index
/// runs exactly once; callers write into preallocated slots so results come
/// out in index order regardless of scheduling.
void parallel_for(std::size_t count, std::size_t jobs,
                  const std::function<void(std::size_t)>& fn);

std::string format_alpha(const AlphaEntry& alpha);

struct CostSurfaceRow {
  AlphaEntry alpha;
  double std = 0.0;
  double cost = 0.0;
  double std_error = 0.0;
  std::string status = "ok";
};

/// One row per (alpha, std), alpha-major. Inadmissible alphas for the period
/// count yield rows with status "rejected: ..." and NaN cost.
std::vector<CostSurfaceRow> cost_surface(const ExperimentConfig& cfg,
                                         const StatePriceSample& kernel);
std::vector<CostSurfaceRow> cost_surface(const ExperimentConfig& cfg);

struct FrontierRow {
  AlphaEntry alpha;
  double std = 0.0;
  double per_period_mean = 0.0;
  double achieved_cost = 0.0;
  double budget = 0.0;
  int iterations = 0;
  std::string status = "ok";
};

/// One row per (alpha, std); a point whose root is not bracketed is reported
/// in its status and the run continues.
std::vector<FrontierRow> frontier_rows(const ExperimentConfig& cfg,
                                       const StatePriceSample& kernel);
std::vector<FrontierRow> frontier_rows(const ExperimentConfig& cfg);

struct HedgeRow {
  std::size_t rebalances = 0;
  double rms_error = 0.0;
  double mean_error = 0.0;
  double initial_capital = 0.0;
};

/// Black-Scholes market of the config, lognormal(mean, hedge_std) target.
std::vector<HedgeRow> hedge_rows(const ExperimentConfig& cfg);

struct DecomposeColumn {
  std::size_t column = 0;
  double ks = 0.0;
  double critical = 0.0;
};

struct DecomposeReport {
  std::vector<DecomposeColumn> columns;
  double max_abs_sum_error = 0.0;
  std::size_t rows = 0;
  std::vector<std::string> warnings;
};

/// Clayton(decompose_alpha) population with lognormal(mean, decompose_std)
/// marginals, allocated against an independent redraw of the row sums.
DecomposeReport decompose_demo(const ExperimentConfig& cfg);

/// CSV with a commented metadata header (code version, timestamp, resolved
/// config) and numbers printed with 17 significant digits.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const ExperimentConfig& cfg, const std::string& kind,
            const std::vector<std::string>& columns);
  void row(const std::vector<std::string>& cells);

  static std::string num(double x);

 private:
  std::ostream& out_;
};

void write_cost_surface(std::ostream& out, const ExperimentConfig& cfg,
                        const std::vector<CostSurfaceRow>& rows);
void write_frontier(std::ostream& out, const ExperimentConfig& cfg,
                    const std::vector<FrontierRow>& rows);
void write_hedge(std::ostream& out, const ExperimentConfig& cfg,
                 const std::vector<HedgeRow>& rows);
void write_decompose(std::ostream& out, const ExperimentConfig& cfg,
                     const DecomposeReport& report);

}  // namespace cec
