#include "cec/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "cec/errors.hpp"

namespace cec {

using nlohmann::json;

namespace {

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += "; ";
    out += s;
  }
  return out;
}

json alpha_to_json(const AlphaEntry& a) {
  return a ? json(*a) : json("independent");
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::invalid_argument("invalid config: " + join(problems)),
      problems_(std::move(problems)) {}

ModelSpec ExperimentConfig::model_spec() const {
  if (model == "cev") return CevParams{market, beta, n_steps};
  return market;
}

Dependence ExperimentConfig::dependence(const AlphaEntry& alpha) const {
  return alpha ? Dependence::clayton_alpha(*alpha) : Dependence::independent();
}

std::vector<std::string> validation_problems(const ExperimentConfig& c) {
  std::vector<std::string> p;
  auto positive = [&](const char* field, double v) {
    if (!(v > 0.0) || !std::isfinite(v)) p.push_back(fmt::format("{}: must be > 0, got {}", field, v));
  };
  if (c.model != "black-scholes" && c.model != "cev") {
    p.push_back(fmt::format("model: must be \"black-scholes\" or \"cev\", got \"{}\"", c.model));
  }
  if (!std::isfinite(c.market.mu)) p.push_back("market.mu: must be finite");
  if (!std::isfinite(c.market.r)) p.push_back("market.r: must be finite");
  positive("market.sigma", c.market.sigma);
  positive("market.s0", c.market.s0);
  positive("market.horizon", c.market.horizon);
  if (c.model == "cev") {
    if (!(c.beta > -0.5 && c.beta < 0.0)) {
      p.push_back(fmt::format("beta: must lie in (-1/2, 0), got {}", c.beta));
    }
    if (c.n_steps < 1) p.push_back(fmt::format("n_steps: must be >= 1, got {}", c.n_steps));
  }
  if (c.alphas.empty()) p.push_back("alphas: must not be empty");
  for (std::size_t i = 0; i < c.alphas.size(); ++i) {
    if (!c.alphas[i]) continue;
    try {
      ClaytonParams{*c.alphas[i]};
    } catch (const std::exception& e) {
      p.push_back(fmt::format("alphas[{}]: {}", i, e.what()));
    }
  }
  if (c.stds.empty()) p.push_back("stds: must not be empty");
  for (std::size_t i = 0; i < c.stds.size(); ++i) {
    if (!(c.stds[i] > 0.0) || !std::isfinite(c.stds[i])) {
      p.push_back(fmt::format("stds[{}]: must be > 0, got {}", i, c.stds[i]));
    }
  }
  positive("mean", c.mean);
  positive("budget", c.budget);
  positive("hedge_std", c.hedge_std);
  positive("decompose_std", c.decompose_std);
  if (c.periods < 1) p.push_back("periods: must be >= 1");
  if (c.scenarios < 1) p.push_back("scenarios: must be >= 1");
  if (c.rebalances.empty()) p.push_back("rebalances: must not be empty");
  if (c.grid_steps < 1) p.push_back("grid_steps: must be >= 1");
  for (std::size_t i = 0; i < c.rebalances.size(); ++i) {
    if (c.rebalances[i] == 0 || (c.grid_steps > 0 && c.grid_steps % c.rebalances[i] != 0)) {
      p.push_back(fmt::format("rebalances[{}]: {} must divide grid_steps = {}", i,
                              c.rebalances[i], c.grid_steps));
    }
  }
  if (c.hedge_paths < 1) p.push_back("hedge_paths: must be >= 1");
  if (c.decompose_periods < 2) p.push_back("decompose_periods: must be >= 2");
  if (c.population < 1) p.push_back("population: must be >= 1");
  try {
    ClaytonParams{c.decompose_alpha}.check_dimension(c.decompose_periods);
  } catch (const std::exception& e) {
    p.push_back(fmt::format("decompose_alpha: {}", e.what()));
  }
  return p;
}

void validate(const ExperimentConfig& cfg) {
  auto problems = validation_problems(cfg);
  if (!problems.empty()) throw ConfigError(std::move(problems));
}

json to_json(const ExperimentConfig& c) {
  json alphas = json::array();
  for (const auto& a : c.alphas) alphas.push_back(alpha_to_json(a));
  return json{
      {"model", c.model},
      {"market",
       {{"mu", c.market.mu},
        {"sigma", c.market.sigma},
        {"r", c.market.r},
        {"s0", c.market.s0},
        {"horizon", c.market.horizon}}},
      {"beta", c.beta},
      {"n_steps", c.n_steps},
      {"alphas", alphas},
      {"stds", c.stds},
      {"mean", c.mean},
      {"budget", c.budget},
      {"periods", c.periods},
      {"scenarios", c.scenarios},
      {"seed", c.seed},
      {"hedge_std", c.hedge_std},
      {"rebalances", c.rebalances},
      {"hedge_paths", c.hedge_paths},
      {"grid_steps", c.grid_steps},
      {"decompose_alpha", c.decompose_alpha},
      {"decompose_std", c.decompose_std},
      {"decompose_periods", c.decompose_periods},
      {"population", c.population},
      {"output", c.output},
      {"jobs", c.jobs},
  };
}

namespace {

template <class T>
void read(const json& j, const std::string& path, const char* key, T& into,
          std::vector<std::string>& problems) {
  if (!j.contains(key)) return;
  try {
    into = j.at(key).get<T>();
  } catch (const json::exception&) {
    problems.push_back(fmt::format("{}{}: wrong type ({})", path, key, j.at(key).type_name()));
  }
}

void check_keys(const json& j, const std::string& path,
                std::initializer_list<const char*> allowed,
                std::vector<std::string>& problems) {
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) problems.push_back(fmt::format("{}{}: unknown field", path, key));
  }
}

}  // namespace

ExperimentConfig from_json(const json& j, ExperimentConfig c) {
  std::vector<std::string> p;
  if (!j.is_object()) throw ConfigError({"(root): expected a JSON object"});
  check_keys(j, "",
             {"model", "market", "beta", "n_steps", "alphas", "stds", "mean", "budget",
              "periods", "scenarios", "seed", "hedge_std", "rebalances", "hedge_paths", "grid_steps",
              "decompose_alpha", "decompose_std", "decompose_periods", "population", "output", "jobs"},
             p);
  read(j, "", "model", c.model, p);
  if (j.contains("market")) {
    const auto& m = j.at("market");
    if (!m.is_object()) {
      p.push_back("market: expected an object");
    } else {
      check_keys(m, "market.", {"mu", "sigma", "r", "s0", "horizon"}, p);
      read(m, "market.", "mu", c.market.mu, p);
      read(m, "market.", "sigma", c.market.sigma, p);
      read(m, "market.", "r", c.market.r, p);
      read(m, "market.", "s0", c.market.s0, p);
      read(m, "market.", "horizon", c.market.horizon, p);
    }
  }
  read(j, "", "beta", c.beta, p);
  read(j, "", "n_steps", c.n_steps, p);
  if (j.contains("alphas")) {
    const auto& a = j.at("alphas");
    if (!a.is_array()) {
      p.push_back("alphas: expected an array");
    } else {
      c.alphas.clear();
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].is_number()) {
          c.alphas.emplace_back(a[i].get<double>());
        } else if (a[i] == "independent") {
          c.alphas.emplace_back(std::nullopt);
        } else {
          p.push_back(fmt::format("alphas[{}]: expected a number or \"independent\"", i));
        }
      }
    }
  }
  read(j, "", "stds", c.stds, p);
  read(j, "", "mean", c.mean, p);
  read(j, "", "budget", c.budget, p);
  read(j, "", "periods", c.periods, p);
  read(j, "", "scenarios", c.scenarios, p);
  read(j, "", "seed", c.seed, p);
  read(j, "", "hedge_std", c.hedge_std, p);
  read(j, "", "rebalances", c.rebalances, p);
  read(j, "", "hedge_paths", c.hedge_paths, p);
  read(j, "", "grid_steps", c.grid_steps, p);
  read(j, "", "decompose_alpha", c.decompose_alpha, p);
  read(j, "", "decompose_std", c.decompose_std, p);
  read(j, "", "decompose_periods", c.decompose_periods, p);
  read(j, "", "population", c.population, p);
  read(j, "", "output", c.output, p);
  read(j, "", "jobs", c.jobs, p);
  if (!p.empty()) throw ConfigError(std::move(p));
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot open config file {}", path));
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError({fmt::format("(file {}): {}", path, e.what())});
  }
  return from_json(j);
}

void save_config(const ExperimentConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(fmt::format("cannot write config file {}", path));
  out << to_json(cfg).dump(2) << '\n';
}

ExperimentConfig config_from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot open {}", path));
  const std::string prefix = "# config: ";
  std::string line;
  while (std::getline(in, line) && line.rfind("#", 0) == 0) {
    if (line.rfind(prefix, 0) == 0) {
      return from_json(json::parse(line.substr(prefix.size())));
    }
  }
  throw std::runtime_error(fmt::format("{} has no '# config:' header line", path));
}

}  // namespace cec
