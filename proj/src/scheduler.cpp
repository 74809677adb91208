#include "uavsched/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "uavsched/energy.hpp"
#include "uavsched/mobility.hpp"
#include "uavsched/reward.hpp"
#include "uavsched/sim.hpp"

namespace uavsched {

Policy Policy::proposed(double epsilon) {
  if (!(epsilon >= 0 && epsilon <= 1)) throw ValidationError("epsilon", "must lie in [0, 1]");
  Policy p;
  p.kind = PolicyKind::kProposed;
  p.epsilon = epsilon;
  return p;
}

Policy Policy::comp1() {
  Policy p;
  p.kind = PolicyKind::kComp1;
  return p;
}

Policy Policy::comp2() {
  Policy p;
  p.kind = PolicyKind::kComp2;
  return p;
}

Policy Policy::comp3() {
  Policy p;
  p.kind = PolicyKind::kComp3;
  return p;
}

double Policy::weight() const {
  switch (kind) {
    case PolicyKind::kComp1: return 0.0;
    case PolicyKind::kComp2: return 1.0;
    default: return epsilon;
  }
}

std::string Policy::name() const {
  switch (kind) {
    case PolicyKind::kProposed: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "proposed(%g)", epsilon);
      return buf;
    }
    case PolicyKind::kComp1: return "comp1";
    case PolicyKind::kComp2: return "comp2";
    case PolicyKind::kComp3: return "comp3";
  }
  return "?";
}

Policy parse_policy(const std::string& name, double epsilon) {
  if (name == "proposed") return Policy::proposed(epsilon);
  if (name == "comp1") return Policy::comp1();
  if (name == "comp2") return Policy::comp2();
  if (name == "comp3") return Policy::comp3();
  throw ValidationError("policy", "expected proposed|comp1|comp2|comp3, got '" + name + "'");
}

SearchKind parse_search(const std::string& name) {
  if (name == "exhaustive") return SearchKind::kExhaustive;
  if (name == "local") return SearchKind::kLocal;
  throw ValidationError("search", "expected exhaustive|local, got '" + name + "'");
}

bool AssignmentProblem::is_feasible(const Assignment& a) const {
  std::vector<int> load(n_towers, 0);
  std::vector<int> uses(n_uavs, 0);
  for (const auto& p : a.pairs) {
    if (p.tower < 0 || p.tower >= n_towers || p.uav < 0 || p.uav >= n_uavs) return false;
    if (!allows(p)) return false;
    if (++load[p.tower] > panels[p.tower]) return false;
    if (++uses[p.uav] > 1) return false;
  }
  return true;
}

namespace {

class Enumerator {
 public:
  Enumerator(const AssignmentProblem& p, const std::function<bool(const Assignment&)>& visit)
      : p_(p), visit_(visit), used_(p.n_uavs, 0) {}

  void run() { tower(0); }

 private:
  // returns false to stop
  bool tower(int i) {
    if (i == p_.n_towers) return visit_(cur_);
    return choose(i, 0, p_.panels[i]);
  }

  bool choose(int i, int start, int remaining) {
    if (!tower(i + 1)) return false;
    if (remaining == 0) return true;
    for (int j = start; j < p_.n_uavs; ++j) {
      if (used_[j] || !p_.allowed[i][j]) continue;
      used_[j] = 1;
      cur_.pairs.push_back({i, j});
      const bool go = choose(i, j + 1, remaining - 1);
      cur_.pairs.pop_back();
      used_[j] = 0;
      if (!go) return false;
    }
    return true;
  }

  const AssignmentProblem& p_;
  const std::function<bool(const Assignment&)>& visit_;
  std::vector<char> used_;
  Assignment cur_;
};

}  // namespace

void for_each_assignment(const AssignmentProblem& problem,
                         const std::function<void(const Assignment&)>& visit) {
  std::function<bool(const Assignment&)> wrapped = [&](const Assignment& a) {
    visit(a);
    return true;
  };
  Enumerator(problem, wrapped).run();
}

std::size_t count_assignments(const AssignmentProblem& problem, std::size_t cap) {
  std::size_t n = 0;
  std::function<bool(const Assignment&)> counter = [&](const Assignment&) { return ++n <= cap; };
  Enumerator(problem, counter).run();
  return n;
}

bool preferred(double value_a, const Assignment& a, double value_b, const Assignment& b) {
  const double tol = 1e-12 * std::max({1.0, std::abs(value_a), std::abs(value_b)});
  if (value_a > value_b + tol) return true;
  if (value_b > value_a + tol) return false;
  if (a.size() != b.size()) return a.size() < b.size();
  return a.pairs < b.pairs;
}

ScoredAssignment best_assignment_exhaustive(const AssignmentProblem& problem,
                                            const Objective& objective, std::size_t bound) {
  const std::size_t n = count_assignments(problem, bound);
  if (n > bound)
    throw SearchBoundExceeded("more than " + std::to_string(bound) +
                              " feasible assignments; use local search");
  ScoredAssignment best;
  bool first = true;
  for_each_assignment(problem, [&](const Assignment& a) {
    const double v = objective(a);
    if (first || preferred(v, a, best.objective, best.assignment)) {
      best.assignment = a;
      best.objective = v;
      first = false;
    }
  });
  return best;
}

ScoredAssignment local_search(const AssignmentProblem& problem, const Objective& objective,
                              int budget, Rng& rng) {
  ScoredAssignment cur{Assignment{}, objective(Assignment{})};
  for (int iter = 0; iter < budget; ++iter) {
    std::vector<int> load(problem.n_towers, 0);
    std::vector<int> tower_of(problem.n_uavs, -1);
    for (const auto& p : cur.assignment.pairs) {
      ++load[p.tower];
      tower_of[p.uav] = p.tower;
    }

    std::vector<Assignment> moves;
    for (int i = 0; i < problem.n_towers; ++i)
      for (int j = 0; j < problem.n_uavs; ++j) {
        if (!problem.allowed[i][j] || tower_of[j] >= 0 || load[i] >= problem.panels[i]) continue;
        Assignment a = cur.assignment;
        a.add({i, j});
        moves.push_back(std::move(a));
      }
    for (const auto& p : cur.assignment.pairs) {
      Assignment removed = cur.assignment;
      removed.remove(p);
      moves.push_back(removed);
      for (int j = 0; j < problem.n_uavs; ++j) {
        if (j == p.uav || tower_of[j] >= 0 || !problem.allowed[p.tower][j]) continue;
        Assignment a = removed;
        a.add({p.tower, j});
        moves.push_back(std::move(a));
      }
      for (int i = 0; i < problem.n_towers; ++i) {
        if (i == p.tower || load[i] >= problem.panels[i] || !problem.allowed[i][p.uav]) continue;
        Assignment a = removed;
        a.add({i, p.uav});
        moves.push_back(std::move(a));
      }
    }
    std::shuffle(moves.begin(), moves.end(), rng);

    std::optional<ScoredAssignment> best;
    for (auto& m : moves) {
      const double v = objective(m);
      const double tol = 1e-12 * std::max(1.0, std::abs(v));
      if (!best || v > best->objective + tol) best = ScoredAssignment{std::move(m), v};
    }
    if (!best || !(best->objective > cur.objective + 1e-12 * std::max(1.0, std::abs(cur.objective))))
      break;
    cur = std::move(*best);
  }
  return cur;
}

AssignmentProblem scheduling_problem(const SystemState& state, const Scenario& s) {
  AssignmentProblem p;
  p.n_towers = static_cast<int>(s.towers.size());
  p.n_uavs = static_cast<int>(s.uavs.size());
  for (const auto& t : s.towers) p.panels.push_back(t.panels);
  p.allowed.assign(p.n_towers, std::vector<char>(p.n_uavs, 0));
  for (int i = 0; i < p.n_towers; ++i)
    for (int j = 0; j < p.n_uavs; ++j) {
      if (!state.uav_active[j]) continue;
      const double d = distance(s.towers[i].position, state.uav_position[j]);
      p.allowed[i][j] = 2.0 * travel_time(d, s.uavs[j].speed) <= s.step_len;
    }
  return p;
}

std::vector<Assignment> feasible_assignments(const SystemState& state, const Scenario& s) {
  std::vector<Assignment> out;
  for_each_assignment(scheduling_problem(state, s), [&](const Assignment& a) { out.push_back(a); });
  return out;
}

namespace {

void require_objective(const Policy& policy) {
  if (policy.kind == PolicyKind::kComp3)
    throw std::logic_error("comp3 schedules at random and has no objective");
}

}  // namespace

double one_step_objective(const SystemState& state, const Scenario& s, const Assignment& assignment,
                          const Policy& policy) {
  require_objective(policy);
  if (!scheduling_problem(state, s).is_feasible(assignment))
    throw InfeasiblePairError("infeasible assignment " + assignment.to_string());
  SystemState scratch = state;
  apply_exchange(scratch, assignment, s, trajectories(s));
  return state_reward(scratch, s, policy.weight()).combined;
}

Objective make_objective(const SystemState& state, const Scenario& s, const Policy& policy) {
  require_objective(policy);
  const auto trajs = trajectories(s);
  const double t0 = clock_at(s, state.t);
  const std::size_t n = s.towers.size(), m = s.uavs.size();

  auto drain = [](double e, double used) { return e - used <= 0.0 ? 0.0 : e - used; };

  std::vector<double> held(m, 0.0), idle(m, 0.0), cap(m, 0.0);
  std::vector<std::vector<double>> scheduled(n, std::vector<double>(m, 0.0));
  for (std::size_t j = 0; j < m; ++j) {
    const auto& uav = s.uavs[j];
    cap[j] = uav.battery_capacity;
    held[j] = std::accumulate(state.uav_contents[j].begin(), state.uav_contents[j].end(), 0.0,
                              [](double acc, const Content& c) { return acc + c.size; });
    if (!state.uav_active[j]) {
      idle[j] = state.uav_energy[j];
      continue;
    }
    idle[j] = drain(state.uav_energy[j],
                    step_consumption(uav, trajs[j], t0, std::nullopt, s.step_len));
    for (std::size_t i = 0; i < n; ++i) {
      const auto& tower = s.towers[i];
      const double d = distance(tower.position, state.uav_position[j]);
      const double tau = travel_time(d, uav.speed);
      if (2.0 * tau > s.step_len) continue;
      const double ec = charge_amount(tower.offer_power, tower.eta_tower, uav.eta_uav, s.step_len, tau);
      const double charged = apply_charge(state.uav_energy[j], ec, uav.battery_capacity);
      scheduled[i][j] = drain(charged, step_consumption(uav, trajs[j], t0, d, s.step_len));
    }
  }

  return [=, data = state.tower_data, energy = std::vector<double>(m),
          towers = std::vector<double>(n), weight = policy.weight(), mode = s.reward_mode,
          dcap = s.data_capacity(), floor = s.sigma_floor](const Assignment& a) mutable {
    towers = data;
    energy = idle;
    for (const auto& p : a.pairs) {
      towers[p.tower] += held[p.uav];
      energy[p.uav] = scheduled[p.tower][p.uav];
    }
    return combined_reward(weight, {towers, energy, cap}, mode, dcap, floor).combined;
  };
}

Assignment best_assignment_exhaustive(const SystemState& state, const Scenario& s,
                                      const Policy& policy) {
  return best_assignment_exhaustive(scheduling_problem(state, s), make_objective(state, s, policy),
                                    policy.exhaustive_bound)
      .assignment;
}

Assignment local_search_assignment(const SystemState& state, const Scenario& s,
                                   const Policy& policy, Rng& rng) {
  return local_search(scheduling_problem(state, s), make_objective(state, s, policy),
                      policy.search_budget, rng)
      .assignment;
}

Assignment random_assignment(const AssignmentProblem& problem, Rng& rng) {
  std::vector<int> order;
  for (int j = 0; j < problem.n_uavs; ++j) {
    for (int i = 0; i < problem.n_towers; ++i)
      if (problem.allowed[i][j]) {
        order.push_back(j);
        break;
      }
  }
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> load(problem.n_towers, 0);
  Assignment a;
  for (int j : order) {
    std::vector<int> options{-1};
    for (int i = 0; i < problem.n_towers; ++i)
      if (problem.allowed[i][j] && load[i] < problem.panels[i]) options.push_back(i);
    std::uniform_int_distribution<std::size_t> pick(0, options.size() - 1);
    const int i = options[pick(rng)];
    if (i < 0) continue;
    ++load[i];
    a.add({i, j});
  }
  return a;
}

Assignment decide(const Policy& policy, const SystemState& state, const Scenario& s, Rng& rng) {
  const AssignmentProblem problem = scheduling_problem(state, s);
  if (policy.kind == PolicyKind::kComp3) return random_assignment(problem, rng);
  const Objective objective = make_objective(state, s, policy);
  if (policy.search == SearchKind::kExhaustive &&
      count_assignments(problem, policy.exhaustive_bound) <= policy.exhaustive_bound) {
    return best_assignment_exhaustive(problem, objective, policy.exhaustive_bound).assignment;
  }
  return local_search(problem, objective, policy.search_budget, rng).assignment;
}

}  // namespace uavsched
