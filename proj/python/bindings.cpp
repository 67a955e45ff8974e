#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cec/copula.hpp"
#include "cec/decompose.hpp"
#include "cec/errors.hpp"
#include "cec/hedge.hpp"
#include "cec/market.hpp"
#include "cec/optimizer.hpp"
#include "cec/service.hpp"
#include "cec/targetdist.hpp"
#include "cec/validate.hpp"

namespace py = pybind11;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

py::array_t<double> to_numpy(const cec::Matrix& m) {
  py::array_t<double> out({m.rows(), m.cols()});
  std::copy(m.data().begin(), m.data().end(), out.mutable_data());
  return out;
}

py::array_t<double> to_numpy(const std::vector<double>& v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

std::span<const double> view(const Array& a) {
  if (a.ndim() != 1) throw std::invalid_argument("expected a 1-d array");
  return {a.data(), static_cast<std::size_t>(a.size())};
}

cec::Matrix from_numpy(const Array& a) {
  if (a.ndim() != 2) throw std::invalid_argument("expected a 2-d array");
  cec::Matrix m(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
  std::copy(a.data(), a.data() + a.size(), m.data().begin());
  return m;
}

cec::Dependence dependence(std::optional<double> alpha) {
  return alpha ? cec::Dependence::clayton_alpha(*alpha) : cec::Dependence::independent();
}

std::vector<cec::TargetDistribution> lognormal_targets(double mean, double std,
                                                       std::size_t periods) {
  return std::vector(periods, cec::TargetDistribution::from_mean_std(mean, std));
}

py::dict cost_dict(const cec::CostResult& r) {
  py::dict d;
  d["cost"] = r.cost;
  d["std_error"] = r.std_error;
  d["permutation"] = r.permutation;
  d["z_star"] = to_numpy(r.z_star);
  return d;
}

}  // namespace

PYBIND11_MODULE(_cec, m) {
  m.doc() = "Cost-efficient consumption profiles: copulas, pricing kernels, rearrangement";
  m.attr("__version__") = CEC_VERSION;

  py::register_exception<cec::DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<cec::SizeMismatch>(m, "SizeMismatch", PyExc_ValueError);
  py::register_exception<cec::UnsupportedRegime>(m, "UnsupportedRegime", PyExc_ValueError);
  py::register_exception<cec::ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);
  py::register_exception<cec::RootNotBracketed>(m, "RootNotBracketed", PyExc_RuntimeError);

  py::class_<cec::BsParams>(m, "BsParams")
      .def(py::init<>())
      .def(py::init([](double mu, double sigma, double r, double s0, double horizon) {
             return cec::BsParams{mu, sigma, r, s0, horizon};
           }),
           py::arg("mu") = 0.03, py::arg("sigma") = 0.3, py::arg("r") = 0.02,
           py::arg("s0") = 1.0, py::arg("horizon") = 10.0)
      .def_readwrite("mu", &cec::BsParams::mu)
      .def_readwrite("sigma", &cec::BsParams::sigma)
      .def_readwrite("r", &cec::BsParams::r)
      .def_readwrite("s0", &cec::BsParams::s0)
      .def_readwrite("horizon", &cec::BsParams::horizon)
      .def_property_readonly("theta", &cec::BsParams::theta);

  py::class_<cec::CevParams>(m, "CevParams")
      .def(py::init([](const cec::BsParams& market, double beta, int n_steps) {
             return cec::CevParams{market, beta, n_steps};
           }),
           py::arg("market") = cec::BsParams{}, py::arg("beta") = -0.25,
           py::arg("n_steps") = 1000)
      .def_readwrite("market", &cec::CevParams::market)
      .def_readwrite("beta", &cec::CevParams::beta)
      .def_readwrite("n_steps", &cec::CevParams::n_steps);

  m.def("sample",
        [](std::size_t n, std::size_t periods, std::optional<double> alpha, std::uint64_t seed) {
          return to_numpy(cec::sample(n, periods, dependence(alpha), seed).values);
        },
        py::arg("n"), py::arg("periods"), py::arg("alpha"), py::arg("seed"),
        "n x N Clayton(alpha) uniforms; alpha=None gives independent uniforms.");
  m.def("radial_cdf",
        [](double v, double alpha, std::size_t periods) {
          return cec::radial_cdf(v, cec::ClaytonParams(alpha), periods);
        },
        py::arg("v"), py::arg("alpha"), py::arg("periods"));
  m.def("radial_quantile",
        [](double w, double alpha, std::size_t periods) {
          return cec::radial_quantile(w, cec::ClaytonParams(alpha), periods);
        },
        py::arg("w"), py::arg("alpha"), py::arg("periods"));

  m.def("state_price",
        [](std::size_t n, const std::variant<cec::BsParams, cec::CevParams>& model,
           std::uint64_t seed) {
          const auto k = cec::state_price(n, model, seed);
          py::dict d;
          d["xi"] = to_numpy(k.xi);
          d["terminal_price"] = to_numpy(k.terminal_price);
          d["absorbed"] = k.absorbed;
          return d;
        },
        py::arg("n"), py::arg("model"), py::arg("seed"));
  m.def("laplace_qv",
        [](double s, const cec::CevParams& p, double t) { return cec::laplace_qv(s, p, t); },
        py::arg("s"), py::arg("model"), py::arg("t") = 0.0);
  m.def("kummer_m", &cec::kummer_m, py::arg("a"), py::arg("c"), py::arg("z"));

  m.def("rearrange_antimonotone",
        [](const Array& z, const Array& xi) { return cec::rearrange_antimonotone(view(z), view(xi)); },
        py::arg("z"), py::arg("xi"));
  m.def("cost",
        [](const Array& z, const Array& xi, bool rearranged) {
          return cost_dict(cec::cost(view(z), view(xi), rearranged));
        },
        py::arg("z"), py::arg("xi"), py::arg("rearranged") = true);
  m.def("efficient_cost",
        [](double mean, double std, std::size_t periods, std::optional<double> alpha,
           const std::variant<cec::BsParams, cec::CevParams>& model, std::size_t n,
           std::uint64_t seed) {
          const auto targets = lognormal_targets(mean, std, periods);
          return cost_dict(cec::efficient_cost(targets, dependence(alpha), model, n, seed));
        },
        py::arg("mean"), py::arg("std"), py::arg("periods"), py::arg("alpha"),
        py::arg("model"), py::arg("n"), py::arg("seed"),
        "Minimal cost of N lognormal(mean, std) periods linked by Clayton(alpha).");
  m.def("frontier",
        [](double budget, const std::vector<double>& stds, std::optional<double> alpha,
           const std::variant<cec::BsParams, cec::CevParams>& model, std::size_t periods,
           std::size_t n, std::uint64_t seed) {
          py::list out;
          for (const auto& p :
               cec::frontier(budget, stds, dependence(alpha), model, periods, n, seed)) {
            py::dict d;
            d["std"] = p.target_std;
            d["per_period_mean"] = p.per_period_mean;
            d["achieved_cost"] = p.achieved_cost;
            d["budget"] = p.budget;
            out.append(d);
          }
          return out;
        },
        py::arg("budget"), py::arg("stds"), py::arg("alpha"), py::arg("model"),
        py::arg("periods"), py::arg("n"), py::arg("seed"));

  m.def("allocate",
        [](const Array& population, const Array& z_tilde, std::uint64_t seed) {
          const auto r = cec::allocate(from_numpy(population), view(z_tilde), seed);
          py::dict d;
          d["values"] = to_numpy(r.values);
          d["uniforms_used"] = to_numpy(r.uniforms_used);
          d["remainders"] = to_numpy(r.remainders);
          d["warnings"] = r.warnings;
          return d;
        },
        py::arg("population"), py::arg("z_tilde"), py::arg("seed"));

  m.def("hedge_positions",
        [](double t, double s, double mean, double std, const cec::BsParams& market) {
          const auto hp = cec::LognormalHedgeParams::make(
              cec::TargetDistribution::from_mean_std(mean, std), market);
          const auto p = cec::hedge_positions(t, s, hp);
          return py::make_tuple(p.delta, p.psi);
        },
        py::arg("t"), py::arg("s"), py::arg("mean"), py::arg("std"), py::arg("market"),
        "(stock units, bond units) replicating the lognormal(mean, std) payoff.");

  m.def("validate",
        [](std::uint64_t seed) {
          cec::ValidationOptions o;
          o.seed = seed;
          py::list out;
          for (const auto& r : cec::run_validation(o)) {
            out.append(py::make_tuple(r.name, r.passed, r.detail));
          }
          return out;
        },
        py::arg("seed") = cec::ValidationOptions{}.seed);

  m.def("service_cost",
        [](const std::string& body) {
          cec::Service service;
          const auto reply = service.cost(body);
          return py::make_tuple(reply.status, reply.body.dump());
        },
        py::arg("body"), "Runs the /api/cost handler on a JSON body; returns (status, json).");
}
