// Python bindings. Structured values cross the boundary as JSON text; the
// package wrapper turns them into dicts.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "uavsched/energy.hpp"
#include "uavsched/mdp.hpp"
#include "uavsched/report.hpp"
#include "uavsched/reward.hpp"
#include "uavsched/scheduler.hpp"
#include "uavsched/sim.hpp"

namespace py = pybind11;
using namespace uavsched;

namespace {

Scenario scenario_from(const std::string& text) {
  return text.empty() ? default_scenario() : build_scenario(Json::parse(text));
}

std::string run(const std::string& scenario, const std::string& policy, double epsilon,
                std::uint64_t seed, bool check_invariants) {
  const Scenario s = scenario_from(scenario);
  const Policy p = parse_policy(policy, epsilon);
  py::gil_scoped_release release;
  return to_json(run_episode(s, p, seed, {check_invariants})).dump();
}

std::string run_compare(const std::string& scenario, const std::vector<std::string>& policies,
                        double epsilon, const std::vector<std::uint64_t>& seeds, unsigned threads) {
  const Scenario s = scenario_from(scenario);
  std::vector<Policy> ps;
  for (const auto& name : policies) ps.push_back(parse_policy(name, epsilon));
  py::gil_scoped_release release;
  return to_json(compare(s, ps, seeds, {}, threads)).dump();
}

std::size_t initial_assignments(const std::string& scenario, std::uint64_t seed) {
  const Scenario s = scenario_from(scenario);
  EpisodeStreams streams(seed);
  const SystemState st = initial_state(s, streams.events);
  return count_assignments(scheduling_problem(st, s), static_cast<std::size_t>(-1));
}

std::string solve_mdp(const std::string& instance) {
  const auto in = mdp::instance_from_json(Json::parse(instance));
  const auto sol = mdp::value_iteration(in);
  const auto gap = mdp::greedy_gap(in);
  return Json{{"states", mdp::state_count(in)},
              {"optimal", gap.optimal},
              {"greedy", gap.greedy},
              {"ratio", gap.ratio()},
              {"bellman_residual", mdp::bellman_residual(in, sol)}}
      .dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "UAV charging and offloading scheduler core";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);

  m.def("hover_power", [] { return hover_power(Airframe::phantom4pro()); });
  m.def("cruise_power", [](double v) { return cruise_power(Airframe::phantom4pro(), v); }, py::arg("speed"));
  m.def("charge_amount", &charge_amount, py::arg("offer_power"), py::arg("eta_tower"), py::arg("eta_uav"),
        py::arg("step_len"), py::arg("travel_time"));
  m.def("apply_charge", &apply_charge, py::arg("energy"), py::arg("charged"), py::arg("capacity"));
  m.def("tower_data_reward", [](const std::vector<double>& d) { return tower_data_reward(d); }, py::arg("data"));

  m.def("default_scenario", [] { return scenario_to_json(default_scenario()).dump(); });
  m.def("load_scenario", [](const std::string& path) { return scenario_to_json(load_scenario_file(path)).dump(); },
        py::arg("path"));
  m.def("scenario_digest", [](const std::string& s) { return scenario_digest(scenario_from(s)); },
        py::arg("scenario"));

  m.def("run_episode", &run, py::arg("scenario"), py::arg("policy"), py::arg("epsilon"), py::arg("seed"),
        py::arg("check_invariants"));
  m.def("compare", &run_compare, py::arg("scenario"), py::arg("policies"), py::arg("epsilon"),
        py::arg("seeds"), py::arg("threads"));
  m.def("initial_assignment_count", &initial_assignments, py::arg("scenario"), py::arg("seed"));
  m.def("solve_mdp", &solve_mdp, py::arg("instance"));
}
