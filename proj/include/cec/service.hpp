#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <string>

#include <json.hpp>

#include "cec/config.hpp"

namespace httplib {
class Server;
}

namespace cec {

struct ServiceOptions {
  std::size_t scenario_cap = 200000;
  std::size_t max_jobs = 4;  // concurrent cost/frontier computations
  std::size_t scatter_points = 500;
};

struct ServiceReply {
  int status = 200;
  nlohmann::json body;
};

/// HTTP/JSON front of the optimizer. The handlers are plain functions of the
/// request body so they can be exercised without a socket; `mount` wires
/// them to an httplib server.
class Service {
 public:
  explicit Service(ServiceOptions options = {});

  const ServiceOptions& options() const noexcept { return options_; }

  nlohmann::json models() const;
  ServiceReply cost(const std::string& body);
  /// Streams one JSON object per std grid point in ascending std. `emit`
  /// returns false to cancel; remaining points are then skipped. A non-200
  /// reply means nothing was streamed.
  ServiceReply frontier(const std::string& body,
                        const std::function<bool(const nlohmann::json&)>& emit);

  void mount(httplib::Server& server);

  /// Resolves a single-point request into a config (alphas and stds of length
  /// one). Throws for schema problems (400) and for domain
  /// problems (422) as a RequestError.
  struct Resolved {
    ExperimentConfig config;
    nlohmann::json echo;
  };
  Resolved resolve(const nlohmann::json& request, bool frontier) const;

 private:
  class JobSlot;
  bool try_acquire();
  void release();

  ServiceOptions options_;
  std::atomic<std::size_t> active_{0};
};

/// Raised by Service::resolve; `schema` distinguishes 400 from 422.
class RequestError : public ConfigError {
 public:
  RequestError(std::vector<std::string> problems, bool schema)
      : ConfigError(std::move(problems)), schema_(schema) {}
  bool schema() const noexcept { return schema_; }

 private:
  bool schema_;
};

}  // namespace cec
