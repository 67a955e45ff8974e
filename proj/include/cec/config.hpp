#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cec/copula.hpp"
#include "cec/market.hpp"

namespace cec {

/// Dependence grid entry: a Clayton alpha, or nullopt for i.i.d. uniforms.
using AlphaEntry = std::optional<double>;

struct ExperimentConfig {
  std::string model = "black-scholes";  // or "cev"
  BsParams market;
  double beta = -0.25;
  int n_steps = 1000;

  std::vector<AlphaEntry> alphas{-0.9, 1.0, 5.0, 10.0, 20.0};
  std::vector<double> stds{10, 20, 30, 40, 50, 60, 70, 80};
  double mean = 100.0;
  double budget = 1000.0;
  std::size_t periods = 10;
  std::size_t scenarios = 100000;
  std::uint64_t seed = 20240501;

  // hedge-sim
  double hedge_std = 40.0;
  std::vector<std::size_t> rebalances{32, 64, 128, 256, 512};
  std::size_t hedge_paths = 10000;
  std::size_t grid_steps = 512;

  // decompose-demo
  double decompose_alpha = 5.0;
  double decompose_std = 40.0;
  std::size_t decompose_periods = 3;
  std::size_t population = 100000;

  std::string output;
  std::size_t jobs = 0;  // 0: hardware concurrency

  ModelSpec model_spec() const;
  Dependence dependence(const AlphaEntry& alpha) const;
  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Field-level validation failure; each message starts with the field path.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  std::vector<std::string> problems_;
};

/// Problems with the config as a whole, empty if valid. Grid alphas that are
/// admissible in general but not for `periods` are not problems here; they
/// surface as rejected rows.
std::vector<std::string> validation_problems(const ExperimentConfig& cfg);
void validate(const ExperimentConfig& cfg);

nlohmann::json to_json(const ExperimentConfig& cfg);
/// Overlays the keys present in `j` onto `base`. Unknown keys and type errors
/// are reported by field path.
ExperimentConfig from_json(const nlohmann::json& j, ExperimentConfig base = {});

ExperimentConfig load_config(const std::string& path);
void save_config(const ExperimentConfig& cfg, const std::string& path);
/// Reads the "# config: {...}" metadata line written at the top of every CSV.
ExperimentConfig config_from_csv(const std::string& path);

}  // namespace cec
