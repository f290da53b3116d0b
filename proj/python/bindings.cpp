#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "expertroute/bounds.hpp"
#include "expertroute/harness.hpp"
#include "expertroute/io.hpp"
#include "expertroute/models.hpp"
#include "expertroute/routing.hpp"

namespace py = pybind11;
using namespace expertroute;

namespace {

std::vector<Level> to_levels(std::span<const Level> s) { return {s.begin(), s.end()}; }
std::vector<ExpertId> to_ids(std::span<const ExpertId> s) { return {s.begin(), s.end()}; }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Decentralized query routing in expert networks";

  py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::enum_<ModelKind>(m, "ModelKind")
      .value("UNIFIED", ModelKind::kUnified)
      .value("DIVERSIFIED", ModelKind::kDiversified);

  py::enum_<TieBreak>(m, "TieBreak")
      .value("CLOSEST_ABOVE", TieBreak::kClosestAbove)
      .value("HIGHEST_SKILL", TieBreak::kHighestSkill);

  py::class_<ModelConfig>(m, "ModelConfig")
      .def_static("unified", &ModelConfig::unified, py::arg("n"), py::arg("h"), py::arg("k") = 1,
                  py::arg("r") = 0.0, py::arg("seed") = 0)
      .def_static("diversified", &ModelConfig::diversified, py::arg("m"), py::arg("lam"),
                  py::arg("k") = 1, py::arg("r") = 0.0, py::arg("seed") = 0)
      .def_readonly("kind", &ModelConfig::kind)
      .def_readonly("n", &ModelConfig::n)
      .def_readonly("h", &ModelConfig::h)
      .def_readonly("m", &ModelConfig::m)
      .def_readonly("lam", &ModelConfig::lambda)
      .def_readonly("delta", &ModelConfig::delta)
      .def_readwrite("k", &ModelConfig::k)
      .def_readwrite("r", &ModelConfig::r)
      .def_readwrite("seed", &ModelConfig::seed)
      .def_readwrite("no_long_range", &ModelConfig::no_long_range)
      .def("validate", &ModelConfig::validate);

  py::class_<ExpertNetwork>(m, "ExpertNetwork")
      .def_property_readonly("config", &ExpertNetwork::config)
      .def("__len__", &ExpertNetwork::size)
      .def("expertise", [](const ExpertNetwork& n, ExpertId u) { return to_levels(n.expertise(u)); })
      .def("local_contacts", [](const ExpertNetwork& n, ExpertId u) { return to_ids(n.local_contacts()[u]); })
      .def("long_range_contacts",
           [](const ExpertNetwork& n, ExpertId u) { return to_ids(n.long_range_contacts()[u]); })
      .def("candidate_set", &ExpertNetwork::candidate_set)
      .def("to_json", [](const ExpertNetwork& n) { return network_to_json(n).dump(); })
      .def_static("from_json", [](const std::string& s) { return network_from_json(nlohmann::json::parse(s)); });

  m.def("build_network", &build_network, py::arg("config"));

  m.def("l1_norm", [](const std::vector<Level>& v) { return l1_norm(v); });
  m.def("expertise_distance",
        [](const std::vector<Level>& u, const std::vector<Level>& w) { return expertise_distance(u, w); });
  m.def("is_local_contact", [](const std::vector<Level>& u, const std::vector<Level>& w, Level delta) {
    return is_local_contact(u, w, delta);
  });

  py::class_<Query>(m, "Query")
      .def(py::init([](int area, Level tau) { return Query{area, tau}; }), py::arg("area"), py::arg("tau"))
      .def_readonly("area", &Query::area)
      .def_readonly("tau", &Query::tau);

  py::enum_<RouteStatus>(m, "RouteStatus")
      .value("RESOLVED", RouteStatus::kResolved)
      .value("ABORTED_HOP_CAP", RouteStatus::kAbortedHopCap);

  py::class_<RouteResult>(m, "RouteResult")
      .def_readonly("path", &RouteResult::path)
      .def_readonly("hops", &RouteResult::hops)
      .def_readonly("status", &RouteResult::status);

  m.def(
      "route",
      [](const ExpertNetwork& net, const Query& q, ExpertId start, double c, std::uint64_t seed, TieBreak tie) {
        SplitMix64 rng(seed);
        return route(q, start, net, ErrorModel{c}, rng, tie);
      },
      py::arg("net"), py::arg("query"), py::arg("start"), py::arg("c") = 0.0, py::arg("seed") = 0,
      py::arg("tie") = TieBreak::kClosestAbove);

  m.def(
      "next_hop",
      [](const ExpertNetwork& net, ExpertId u, const Query& q, std::optional<Level> tau_eff, TieBreak tie) {
        return next_hop(u, q, net, tau_eff.value_or(q.tau), tie);
      },
      py::arg("net"), py::arg("u"), py::arg("query"), py::arg("tau_eff") = py::none(),
      py::arg("tie") = TieBreak::kClosestAbove);

  m.def("ability_count", [](std::int64_t phi, std::int64_t mm, std::int64_t lambda) {
    // Exact big integer, handed to Python as int.
    return py::int_(py::str(ability_count(phi, mm, lambda).str()));
  });
  m.def("expected_ability", &expected_ability, py::arg("m"), py::arg("n"));

  m.def("upper_unified", [](double n, double h, double r, bool ex) {
    return upper_unified(n, h, r, BoundOptions{ex, std::nullopt});
  }, py::arg("n"), py::arg("h"), py::arg("r"), py::arg("explicit_constants") = false);
  m.def("lower_unified", [](double n, double h, double k, double r, bool ex) {
    return lower_unified(n, h, k, r, BoundOptions{ex, std::nullopt});
  }, py::arg("n"), py::arg("h"), py::arg("k"), py::arg("r"), py::arg("explicit_constants") = false);
  m.def("upper_diversified", [](double n, double mm, double r, bool ex) {
    return upper_diversified(n, mm, r, BoundOptions{ex, std::nullopt});
  }, py::arg("n"), py::arg("m"), py::arg("r"), py::arg("explicit_constants") = false);
  m.def("lower_diversified", [](double n, double mm, double k, double r, bool ex) {
    return lower_diversified(n, mm, k, r, BoundOptions{ex, std::nullopt});
  }, py::arg("n"), py::arg("m"), py::arg("k"), py::arg("r"), py::arg("explicit_constants") = false);
  m.def("path_cap", &path_cap, py::arg("config"));
  m.def("predict_ratio", &predict_ratio, py::arg("n"), py::arg("m"), py::arg("k"), py::arg("r1"), py::arg("r2"));

  m.def(
      "fit_r",
      [](const ExpertNetwork& net, const std::vector<std::pair<ExpertId, ExpertId>>& edges) {
        return fit_r(net, edges).r;
      },
      py::arg("net"), py::arg("edges"));
  m.def("long_range_edges", &long_range_edges, py::arg("net"));

  py::class_<SweepReport>(m, "SweepReport")
      .def_readonly("model", &SweepReport::model)
      .def_readonly("n", &SweepReport::n)
      .def_readonly("h_or_m", &SweepReport::h_or_m)
      .def_readonly("k", &SweepReport::k)
      .def_readonly("r", &SweepReport::r)
      .def_readonly("c", &SweepReport::c)
      .def_readonly("mean_hops", &SweepReport::mean_hops)
      .def_readonly("stderr_hops", &SweepReport::stderr_hops)
      .def_readonly("max_hops", &SweepReport::max_hops)
      .def_readonly("trials", &SweepReport::trials)
      .def_readonly("cap_violations", &SweepReport::cap_violations);

  m.def(
      "run_sweep",
      [](const ModelConfig& config, const std::vector<double>& r_grid, const std::vector<std::int64_t>& k_grid,
         double c, std::int64_t realizations, std::int64_t trials, unsigned threads) {
        py::gil_scoped_release release;
        SweepOptions opts;
        opts.threads = threads;
        return run_sweep(SweepPoint{config, c, realizations, trials}, r_grid, k_grid, opts);
      },
      py::arg("config"), py::arg("r_grid"), py::arg("k_grid"), py::arg("c") = 0.0,
      py::arg("realizations") = 100, py::arg("trials") = 500, py::arg("threads") = 0);

  m.def("sweep_csv", [](const std::vector<SweepReport>& reports) {
    std::ostringstream os;
    write_sweep_csv(os, reports);
    return os.str();
  });
}
