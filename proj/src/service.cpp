#include "cec/service.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>
#include <httplib.h>

#include "cec/errors.hpp"
#include "cec/optimizer.hpp"
#include "cec/targetdist.hpp"

namespace cec {

using nlohmann::json;

namespace {

constexpr const char* kJson = "application/json";

json error_body(const std::string& message, const std::vector<std::string>& problems = {}) {
  json j{{"error", message}};
  if (!problems.empty()) j["problems"] = problems;
  return j;
}

json alpha_json(const AlphaEntry& a) { return a ? json(*a) : json("independent"); }

json market_json(const BsParams& m) {
  return {{"mu", m.mu}, {"sigma", m.sigma}, {"r", m.r}, {"s0", m.s0}, {"horizon", m.horizon}};
}

}  // namespace

class Service::JobSlot {
 public:
  explicit JobSlot(Service& s) : service_(s), held_(s.try_acquire()) {}
  ~JobSlot() {
    if (held_) service_.release();
  }
  JobSlot(const JobSlot&) = delete;
  JobSlot& operator=(const JobSlot&) = delete;
  bool held() const noexcept { return held_; }

 private:
  Service& service_;
  bool held_;
};

Service::Service(ServiceOptions options) : options_(options) {}

bool Service::try_acquire() {
  auto current = active_.load();
  while (current < options_.max_jobs) {
    if (active_.compare_exchange_weak(current, current + 1)) return true;
  }
  return false;
}

void Service::release() { --active_; }

json Service::models() const {
  const BsParams bs;
  const CevParams cev;
  const ExperimentConfig defaults;
  auto bs_params = json{
      {"mu", {{"default", bs.mu}}},
      {"sigma", {{"default", bs.sigma}, {"min", 0.0}, {"min_exclusive", true}}},
      {"r", {{"default", bs.r}}},
      {"s0", {{"default", bs.s0}, {"min", 0.0}, {"min_exclusive", true}}},
      {"horizon", {{"default", bs.horizon}, {"min", 0.0}, {"min_exclusive", true}}},
  };
  auto cev_params = bs_params;
  cev_params["beta"] = {{"default", cev.beta},
                        {"min", -0.5},
                        {"max", 0.0},
                        {"min_exclusive", true},
                        {"max_exclusive", true}};
  cev_params["n_steps"] = {{"default", cev.n_steps}, {"min", 1}};
  return {
      {"models",
       {{{"id", "black-scholes"}, {"name", "Black-Scholes"}, {"parameters", bs_params}},
        {{"id", "cev"}, {"name", "Constant elasticity of variance"}, {"parameters", cev_params}}}},
      {"alpha",
       {{"min", -1.0},
        {"excluded", {0.0}},
        {"min_for_periods", "alpha >= -1/(N-1) when N > 2"},
        {"independent", "\"independent\" selects i.i.d. uniforms"},
        {"grid", {-0.9, 1.0, 5.0, 10.0, 20.0}}}},
      {"defaults",
       {{"model", "black-scholes"},
        {"mu", bs.mu},
        {"sigma", bs.sigma},
        {"r", bs.r},
        {"s0", bs.s0},
        {"horizon", bs.horizon},
        {"beta", cev.beta},
        {"n_steps", cev.n_steps},
        {"periods", defaults.periods},
        {"mean", defaults.mean},
        {"std", 40.0},
        {"stds", defaults.stds},
        {"budget", defaults.budget},
        {"alpha", 20.0},
        {"scenarios", std::min(defaults.scenarios, options_.scenario_cap)},
        {"seed", defaults.seed}}},
      {"scenario_cap", options_.scenario_cap},
  };
}

Service::Resolved Service::resolve(const json& request, bool frontier) const {
  if (!request.is_object()) throw RequestError({"(root): expected a JSON object"}, true);

  std::vector<std::string> schema;
  const std::vector<std::string> common{"model", "market", "beta", "n_steps", "alpha",
                                        "periods", "scenarios", "seed"};
  const std::vector<std::string> own = frontier
                                           ? std::vector<std::string>{"budget", "stds"}
                                           : std::vector<std::string>{"mean", "std"};
  json translated = json::object();
  for (const auto& [key, value] : request.items()) {
    const bool known = std::find(common.begin(), common.end(), key) != common.end() ||
                       std::find(own.begin(), own.end(), key) != own.end();
    if (!known) {
      schema.push_back(fmt::format("{}: unknown field", key));
    } else if (key == "alpha") {
      translated["alphas"] = json::array({value});
    } else if (key == "std") {
      translated["stds"] = json::array({value});
    } else {
      translated[key] = value;
    }
  }
  if (!schema.empty()) throw RequestError(schema, true);

  ExperimentConfig base;
  base.alphas = {20.0};
  base.stds = frontier ? base.stds : std::vector<double>{40.0};
  base.scenarios = std::min(base.scenarios, options_.scenario_cap);
  ExperimentConfig cfg;
  try {
    cfg = from_json(translated, base);
  } catch (const ConfigError& e) {
    auto problems = e.problems();
    for (auto& p : problems) {
      if (p.rfind("alphas[0]", 0) == 0) p.replace(0, 9, "alpha");
      if (!frontier && p.rfind("stds[0]", 0) == 0) p.replace(0, 7, "std");
    }
    throw RequestError(problems, true);
  }

  std::vector<std::string> domain;
  for (auto p : validation_problems(cfg)) {
    if (p.rfind("alphas[0]", 0) == 0) p.replace(0, 9, "alpha");
    if (!frontier && p.rfind("stds[0]", 0) == 0) p.replace(0, 7, "std");
    domain.push_back(p);
  }
  if (domain.empty() && cfg.alphas.front()) {
    try {
      ClaytonParams(*cfg.alphas.front()).check_dimension(cfg.periods);
    } catch (const std::exception& e) {
      domain.push_back(fmt::format("alpha: {}", e.what()));
    }
  }
  if (cfg.scenarios > options_.scenario_cap) {
    domain.push_back(fmt::format("scenarios: {} exceeds the server cap of {}", cfg.scenarios,
                                 options_.scenario_cap));
  }
  if (!domain.empty()) throw RequestError(domain, false);

  json echo{{"model", cfg.model},
            {"market", market_json(cfg.market)},
            {"alpha", alpha_json(cfg.alphas.front())},
            {"periods", cfg.periods},
            {"scenarios", cfg.scenarios},
            {"seed", cfg.seed}};
  if (cfg.model == "cev") {
    echo["beta"] = cfg.beta;
    echo["n_steps"] = cfg.n_steps;
  }
  if (frontier) {
    std::sort(cfg.stds.begin(), cfg.stds.end());
    echo["budget"] = cfg.budget;
    echo["stds"] = cfg.stds;
  } else {
    echo["mean"] = cfg.mean;
    echo["std"] = cfg.stds.front();
  }
  return {cfg, echo};
}

namespace {

template <class Fn>
ServiceReply guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const RequestError& e) {
    return {e.schema() ? 400 : 422,
            error_body(e.schema() ? "invalid request" : "parameter out of range", e.problems())};
  } catch (const std::domain_error& e) {
    return {422, error_body(e.what())};
  } catch (const std::invalid_argument& e) {
    return {400, error_body(e.what())};
  }
}

json parse_body(const std::string& body) {
  try {
    return json::parse(body);
  } catch (const json::parse_error& e) {
    throw RequestError({fmt::format("(body): malformed JSON: {}", e.what())}, true);
  }
}

}  // namespace

ServiceReply Service::cost(const std::string& body) {
  return guarded([&]() -> ServiceReply {
    const auto resolved = resolve(parse_body(body), false);
    JobSlot slot(*this);
    if (!slot.held()) return {503, error_body("too many concurrent jobs, retry later")};
    const auto& cfg = resolved.config;
    const std::vector targets(cfg.periods,
                              TargetDistribution::from_mean_std(cfg.mean, cfg.stds.front()));
    const auto model = cfg.model_spec();
    const auto kernel = state_price(cfg.scenarios, model, cfg.seed);
    const auto result =
        efficient_cost(targets, cfg.dependence(cfg.alphas.front()), kernel, cfg.seed);

    const std::size_t n = kernel.xi.size();
    const std::size_t points = std::min(n, options_.scatter_points);
    json scatter = json::array();
    for (std::size_t j = 0; j < points; ++j) {
      const std::size_t i = points > 1 ? j * (n - 1) / (points - 1) : 0;
      scatter.push_back({kernel.xi[i], result.z_star[i]});
    }
    return {200,
            {{"request", resolved.echo},
             {"cost", result.cost},
             {"std_error", result.std_error},
             {"per_period_mean", cfg.mean},
             {"seed", cfg.seed},
             {"absorbed", kernel.absorbed},
             {"scatter", scatter}}};
  });
}

ServiceReply Service::frontier(const std::string& body,
                               const std::function<bool(const json&)>& emit) {
  return guarded([&]() -> ServiceReply {
    const auto resolved = resolve(parse_body(body), true);
    JobSlot slot(*this);
    if (!slot.held()) return {503, error_body("too many concurrent jobs, retry later")};
    const auto& cfg = resolved.config;
    const auto alpha = cfg.alphas.front();
    const auto dep = cfg.dependence(alpha);
    const auto kernel = state_price(cfg.scenarios, cfg.model_spec(), cfg.seed);
    const auto copula = cfg.periods == 1
                            ? sample_independent(cfg.scenarios, 1, cfg.seed)
                            : sample(cfg.scenarios, cfg.periods, dep, cfg.seed);
    const double discount = std::exp(-cfg.market.r * cfg.market.horizon);
    std::size_t sent = 0;
    for (double s : cfg.stds) {
      json point{{"alpha", alpha_json(alpha)}, {"std", s}, {"budget", cfg.budget}};
      try {
        const auto p = frontier_point(cfg.budget, s, dep, kernel, copula, discount);
        point["per_period_mean"] = p.per_period_mean;
        point["achieved_cost"] = p.achieved_cost;
        point["status"] = "ok";
      } catch (const RootNotBracketed& e) {
        point["status"] = fmt::format("not bracketed: [{:.6g}, {:.6g}]", e.lo(), e.hi());
      } catch (const ConvergenceError& e) {
        point["status"] = fmt::format("not converged: {}", e.what());
      }
      ++sent;
      if (!emit(point)) break;
    }
    return {200, {{"request", resolved.echo}, {"points", sent}}};
  });
}

void Service::mount(httplib::Server& server) {
  server.Get("/api/models", [this](const httplib::Request&, httplib::Response& res) {
    res.set_content(models().dump(), kJson);
  });
  server.Post("/api/cost", [this](const httplib::Request& req, httplib::Response& res) {
    const auto reply = cost(req.body);
    res.status = reply.status;
    res.set_content(reply.body.dump(), kJson);
  });
  server.Post("/api/frontier", [this](const httplib::Request& req, httplib::Response& res) {
    // Validate up front so errors get a proper status instead of a stream.
    try {
      resolve(parse_body(req.body), true);
    } catch (const RequestError& e) {
      res.status = e.schema() ? 400 : 422;
      res.set_content(error_body(e.schema() ? "invalid request" : "parameter out of range",
                                 e.problems())
                          .dump(),
                      kJson);
      return;
    }
    const std::string body = req.body;
    res.set_chunked_content_provider(
        "application/x-ndjson", [this, body](std::size_t, httplib::DataSink& sink) {
          const auto reply = frontier(body, [&](const json& point) {
            if (!sink.is_writable()) return false;
            const auto line = point.dump() + "\n";
            return sink.write(line.data(), line.size());
          });
          if (reply.status != 200) {
            const auto line = reply.body.dump() + "\n";
            sink.write(line.data(), line.size());
          }
          sink.done();
          return true;
        });
  });
}

}  // namespace cec
