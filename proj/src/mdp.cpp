#include "uavsched/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

#include "uavsched/format.hpp"
#include "uavsched/reward.hpp"

namespace uavsched::mdp {

namespace {

bool active(const MdpState& s, int uav) { return s.uav_energy[uav] > 0; }

// Transfer, charge and consumption; content pickup is left to the outcome.
MdpState exchange(const SmallMdpInstance& in, const MdpState& s, const Assignment& a) {
  MdpState next = s;
  for (const auto& p : a.pairs) {
    next.tower_data[p.tower] = std::min(in.data_levels - 1, next.tower_data[p.tower] + next.uav_content[p.uav]);
    next.uav_content[p.uav] = 0;
  }
  for (const auto& p : a.pairs)
    next.uav_energy[p.uav] = std::min(in.energy_levels - 1, next.uav_energy[p.uav] + in.charge_gain);
  for (int j = 0; j < in.n_uavs; ++j) {
    if (!active(s, j)) continue;
    int cost = in.idle_cost;
    if (auto t = a.tower_of(j)) cost += in.travel_cost[*t][j];
    next.uav_energy[j] = std::max(0, next.uav_energy[j] - cost);
  }
  return next;
}

void require_feasible(const SmallMdpInstance& in, const MdpState& s, const Assignment& a) {
  if (!action_problem(in, s).is_feasible(a))
    throw InfeasibleAction("action " + a.to_string() + " is infeasible");
}

}  // namespace

SmallMdpInstance normalized(SmallMdpInstance in) {
  if (in.panels.empty()) in.panels.assign(std::max(0, in.n_towers), 1);
  if (in.travel_cost.empty())
    in.travel_cost.assign(std::max(0, in.n_towers), std::vector<int>(std::max(0, in.n_uavs), 0));
  if (in.initial.tower_data.empty() && in.initial.uav_energy.empty() && in.initial.uav_content.empty()) {
    in.initial.tower_data.assign(std::max(0, in.n_towers), 0);
    in.initial.uav_energy.assign(std::max(0, in.n_uavs), in.energy_levels - 1);
    in.initial.uav_content.assign(std::max(0, in.n_uavs), 0);
  }
  validate(in);
  return in;
}

void validate(const SmallMdpInstance& in) {
  if (in.n_towers < 1 || in.n_towers > 3) throw ValidationError("mdp.n_towers", "must lie in [1, 3]");
  if (in.n_uavs < 1 || in.n_uavs > 3) throw ValidationError("mdp.n_uavs", "must lie in [1, 3]");
  if (in.energy_levels < 2 || in.energy_levels > 5)
    throw ValidationError("mdp.energy_levels", "must lie in [2, 5]");
  if (in.data_levels < 2 || in.data_levels > 5) throw ValidationError("mdp.data_levels", "must lie in [2, 5]");
  if (in.horizon < 1 || in.horizon > 8) throw ValidationError("mdp.horizon", "must lie in [1, 8]");
  if (!(in.gamma >= 0 && in.gamma <= 1)) throw ValidationError("mdp.gamma", "must lie in [0, 1]");
  if (!(in.epsilon >= 0 && in.epsilon <= 1)) throw ValidationError("mdp.epsilon", "must lie in [0, 1]");
  if (in.charge_gain < 0) throw ValidationError("mdp.charge_gain", "must be >= 0");
  if (in.idle_cost < 0) throw ValidationError("mdp.idle_cost", "must be >= 0");
  if (static_cast<int>(in.panels.size()) != in.n_towers) throw ValidationError("mdp.panels", "one entry per tower");
  for (int h : in.panels)
    if (h < 1) throw ValidationError("mdp.panels", "must be >= 1");
  if (static_cast<int>(in.travel_cost.size()) != in.n_towers)
    throw ValidationError("mdp.travel_cost", "one row per tower");
  for (const auto& row : in.travel_cost) {
    if (static_cast<int>(row.size()) != in.n_uavs) throw ValidationError("mdp.travel_cost", "one column per UAV");
    for (int c : row)
      if (c < kUnreachable) throw ValidationError("mdp.travel_cost", "must be >= 0 or -1 (unreachable)");
  }
  if (in.content_outcomes.empty()) throw ValidationError("mdp.content_outcomes", "at least one outcome");
  double total = 0.0;
  for (const auto& o : in.content_outcomes) {
    if (o.size < 0) throw ValidationError("mdp.content_outcomes", "sizes must be >= 0");
    if (!(o.probability >= 0)) throw ValidationError("mdp.content_outcomes", "probabilities must be >= 0");
    total += o.probability;
  }
  if (std::abs(total - 1.0) > 1e-12) throw ValidationError("mdp.content_outcomes", "probabilities must sum to 1");
  const double count = std::pow(in.data_levels, in.n_towers) *
                       std::pow(static_cast<double>(in.energy_levels) * in.data_levels, in.n_uavs);
  if (count > static_cast<double>(kMaxStates))
    throw ValidationError("mdp", "state space of " + std::to_string(static_cast<long long>(count)) +
                                     " exceeds " + std::to_string(kMaxStates));
  const auto& s0 = in.initial;
  if (static_cast<int>(s0.tower_data.size()) != in.n_towers || static_cast<int>(s0.uav_energy.size()) != in.n_uavs ||
      static_cast<int>(s0.uav_content.size()) != in.n_uavs)
    throw ValidationError("mdp.initial", "shape does not match the instance");
  for (int d : s0.tower_data)
    if (d < 0 || d >= in.data_levels) throw ValidationError("mdp.initial.tower_data", "level out of range");
  for (int e : s0.uav_energy)
    if (e < 0 || e >= in.energy_levels) throw ValidationError("mdp.initial.uav_energy", "level out of range");
  for (int c : s0.uav_content)
    if (c < 0 || c >= in.data_levels) throw ValidationError("mdp.initial.uav_content", "level out of range");
}

std::size_t state_count(const SmallMdpInstance& in) {
  std::size_t n = 1;
  for (int i = 0; i < in.n_towers; ++i) n *= in.data_levels;
  for (int j = 0; j < in.n_uavs; ++j) n *= static_cast<std::size_t>(in.energy_levels) * in.data_levels;
  return n;
}

std::size_t index_of(const SmallMdpInstance& in, const MdpState& s) {
  std::size_t idx = 0;
  for (int i = 0; i < in.n_towers; ++i) idx = idx * in.data_levels + s.tower_data[i];
  for (int j = 0; j < in.n_uavs; ++j) {
    idx = idx * in.energy_levels + s.uav_energy[j];
    idx = idx * in.data_levels + s.uav_content[j];
  }
  return idx;
}

MdpState state_of(const SmallMdpInstance& in, std::size_t idx) {
  MdpState s;
  s.tower_data.resize(in.n_towers);
  s.uav_energy.resize(in.n_uavs);
  s.uav_content.resize(in.n_uavs);
  for (int j = in.n_uavs - 1; j >= 0; --j) {
    s.uav_content[j] = static_cast<int>(idx % in.data_levels);
    idx /= in.data_levels;
    s.uav_energy[j] = static_cast<int>(idx % in.energy_levels);
    idx /= in.energy_levels;
  }
  for (int i = in.n_towers - 1; i >= 0; --i) {
    s.tower_data[i] = static_cast<int>(idx % in.data_levels);
    idx /= in.data_levels;
  }
  return s;
}

std::vector<MdpState> enumerate_states(const SmallMdpInstance& in) {
  validate(in);
  const std::size_t n = state_count(in);
  std::vector<MdpState> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) out.push_back(state_of(in, k));
  return out;
}

AssignmentProblem action_problem(const SmallMdpInstance& in, const MdpState& s) {
  AssignmentProblem p;
  p.n_towers = in.n_towers;
  p.n_uavs = in.n_uavs;
  p.panels = in.panels;
  p.allowed.assign(in.n_towers, std::vector<char>(in.n_uavs, 0));
  for (int i = 0; i < in.n_towers; ++i)
    for (int j = 0; j < in.n_uavs; ++j)
      p.allowed[i][j] = active(s, j) && in.travel_cost[i][j] != kUnreachable;
  return p;
}

std::vector<Assignment> actions(const SmallMdpInstance& in, const MdpState& s) {
  std::vector<Assignment> out;
  for_each_assignment(action_problem(in, s), [&](const Assignment& a) { out.push_back(a); });
  return out;
}

double immediate_reward(const SmallMdpInstance& in, const MdpState& s, const Assignment& a) {
  const MdpState post = exchange(in, s, a);
  std::vector<double> data(post.tower_data.begin(), post.tower_data.end());
  std::vector<double> energy, cap(in.n_uavs, 1.0);
  for (int e : post.uav_energy) energy.push_back(static_cast<double>(e) / (in.energy_levels - 1));
  const double dcap = static_cast<double>(in.n_towers) * (in.data_levels - 1);
  return combined_reward(in.epsilon, {data, energy, cap}, RewardMode::kNormalized, dcap).combined;
}

Transition transition(const SmallMdpInstance& in, const MdpState& s, const Assignment& a,
                      std::size_t outcome) {
  require_feasible(in, s, a);
  if (outcome >= in.content_outcomes.size()) throw ValidationError("outcome", "index out of range");
  const auto& o = in.content_outcomes[outcome];
  Transition tr{exchange(in, s, a), o.probability};
  for (int j = 0; j < in.n_uavs; ++j) {
    if (!active(tr.next, j) || a.tower_of(j)) continue;
    tr.next.uav_content[j] = std::min(in.data_levels - 1, tr.next.uav_content[j] + o.size);
  }
  return tr;
}

std::vector<Transition> successors(const SmallMdpInstance& in, const MdpState& s, const Assignment& a) {
  std::vector<Transition> out;
  for (std::size_t k = 0; k < in.content_outcomes.size(); ++k) out.push_back(transition(in, s, a, k));
  return out;
}

namespace {

double q_value(const SmallMdpInstance& in, const MdpState& s, const Assignment& a,
               const std::vector<double>& next_value) {
  double expect = 0.0;
  for (const auto& tr : successors(in, s, a)) expect += tr.probability * next_value[index_of(in, tr.next)];
  return immediate_reward(in, s, a) + in.gamma * expect;
}

}  // namespace

MdpSolution value_iteration(const SmallMdpInstance& instance) {
  validate(instance);
  const std::size_t n = state_count(instance);
  MdpSolution sol;
  sol.value.assign(instance.horizon + 1, std::vector<double>(n, 0.0));
  sol.policy.assign(instance.horizon, std::vector<Assignment>(n));
  for (int t = instance.horizon - 1; t >= 0; --t) {
    for (std::size_t k = 0; k < n; ++k) {
      const MdpState s = state_of(instance, k);
      bool first = true;
      double best = 0.0;
      Assignment best_a;
      for_each_assignment(action_problem(instance, s), [&](const Assignment& a) {
        const double q = q_value(instance, s, a, sol.value[t + 1]);
        if (first || preferred(q, a, best, best_a)) {
          best = q;
          best_a = a;
          first = false;
        }
      });
      sol.value[t][k] = best;
      sol.policy[t][k] = best_a;
    }
  }
  return sol;
}

double bellman_residual(const SmallMdpInstance& instance, const MdpSolution& sol) {
  double worst = 0.0;
  for (double v : sol.value.back()) worst = std::max(worst, std::abs(v));
  for (int t = 0; t < instance.horizon; ++t)
    for (std::size_t k = 0; k < sol.value[t].size(); ++k) {
      const MdpState s = state_of(instance, k);
      double best = -std::numeric_limits<double>::infinity();
      for (const auto& a : actions(instance, s)) best = std::max(best, q_value(instance, s, a, sol.value[t + 1]));
      worst = std::max(worst, std::abs(best - sol.value[t][k]));
    }
  return worst;
}

PolicyTable optimal_policy(const MdpSolution& sol) {
  PolicyTable table;
  for (const auto& stage : sol.policy) {
    table.emplace_back();
    for (const auto& a : stage) table.back().emplace_back(a);
  }
  return table;
}

PolicyTable greedy_policy(const SmallMdpInstance& instance) {
  validate(instance);
  const std::size_t n = state_count(instance);
  std::vector<std::optional<Assignment>> stage(n);
  for (std::size_t k = 0; k < n; ++k) {
    const MdpState s = state_of(instance, k);
    stage[k] = best_assignment_exhaustive(
                   action_problem(instance, s),
                   [&](const Assignment& a) { return immediate_reward(instance, s, a); })
                   .assignment;
  }
  return PolicyTable(instance.horizon, stage);
}

namespace {

const Assignment& lookup(const SmallMdpInstance& in, const PolicyTable& policy, int t, std::size_t k) {
  if (t >= static_cast<int>(policy.size()) || k >= policy[t].size() || !policy[t][k])
    throw ValidationError("policy", "no action for (step " + std::to_string(t) + ", state " +
                                        std::to_string(k) + ")");
  (void)in;
  return *policy[t][k];
}

}  // namespace

double evaluate_policy(const SmallMdpInstance& instance, const PolicyTable& policy) {
  validate(instance);
  const std::size_t n = state_count(instance);
  const double unset = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::vector<double>> memo(instance.horizon, std::vector<double>(n, unset));
  std::function<double(int, std::size_t)> value = [&](int t, std::size_t k) -> double {
    if (t == instance.horizon) return 0.0;
    if (!std::isnan(memo[t][k])) return memo[t][k];
    const MdpState s = state_of(instance, k);
    const Assignment& a = lookup(instance, policy, t, k);
    double expect = 0.0;
    for (const auto& tr : successors(instance, s, a))
      expect += tr.probability * value(t + 1, index_of(instance, tr.next));
    return memo[t][k] = immediate_reward(instance, s, a) + instance.gamma * expect;
  };
  return value(0, index_of(instance, instance.initial));
}

RolloutEstimate evaluate_policy(const SmallMdpInstance& instance, const PolicyTable& policy,
                                int n_rollouts, std::uint64_t seed) {
  validate(instance);
  if (n_rollouts < 1) throw ValidationError("n_rollouts", "must be >= 1");
  Rng rng(seed);
  std::vector<double> weights;
  for (const auto& o : instance.content_outcomes) weights.push_back(o.probability);
  std::discrete_distribution<std::size_t> draw(weights.begin(), weights.end());
  std::vector<double> returns;
  returns.reserve(n_rollouts);
  for (int r = 0; r < n_rollouts; ++r) {
    MdpState s = instance.initial;
    double ret = 0.0, discount = 1.0;
    for (int t = 0; t < instance.horizon; ++t) {
      const Assignment& a = lookup(instance, policy, t, index_of(instance, s));
      ret += discount * immediate_reward(instance, s, a);
      discount *= instance.gamma;
      s = transition(instance, s, a, draw(rng)).next;
    }
    returns.push_back(ret);
  }
  RolloutEstimate est;
  est.rollouts = n_rollouts;
  est.mean = std::accumulate(returns.begin(), returns.end(), 0.0) / n_rollouts;
  if (n_rollouts > 1) {
    double ss = 0.0;
    for (double v : returns) ss += (v - est.mean) * (v - est.mean);
    est.std_error = std::sqrt(ss / (n_rollouts - 1)) / std::sqrt(static_cast<double>(n_rollouts));
  }
  return est;
}

SmallMdpInstance random_instance(Rng& rng, bool deterministic, int max_horizon) {
  auto uniform_int = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  auto uniform = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  SmallMdpInstance in;
  do {
    in.n_towers = uniform_int(1, 3);
    in.n_uavs = uniform_int(1, 3);
    in.energy_levels = uniform_int(2, 3);
    in.data_levels = uniform_int(2, 3);
  } while (state_count(in) > 729);
  in.horizon = uniform_int(2, std::max(2, max_horizon));
  in.gamma = uniform(0.5, 1.0);
  in.epsilon = uniform(0.0, 1.0);
  in.charge_gain = uniform_int(1, 2);
  in.idle_cost = 1;
  in.panels.clear();
  for (int i = 0; i < in.n_towers; ++i) in.panels.push_back(uniform_int(1, 2));
  in.travel_cost.assign(in.n_towers, std::vector<int>(in.n_uavs, 0));
  for (auto& row : in.travel_cost)
    for (auto& c : row) {
      const double u = uniform(0.0, 1.0);
      c = u < 0.2 ? kUnreachable : (u < 0.7 ? 0 : 1);
    }
  if (deterministic) {
    in.content_outcomes = {{uniform_int(0, 2), 1.0}};
  } else {
    const int low = uniform_int(0, 1);
    const double p = uniform(0.2, 0.8);
    in.content_outcomes = {{low, p}, {low + 1, 1.0 - p}};
  }
  in.initial.tower_data.clear();
  in.initial.uav_energy.clear();
  in.initial.uav_content.clear();
  for (int i = 0; i < in.n_towers; ++i) in.initial.tower_data.push_back(uniform_int(0, in.data_levels - 1));
  for (int j = 0; j < in.n_uavs; ++j) {
    in.initial.uav_energy.push_back(uniform_int(1, in.energy_levels - 1));
    in.initial.uav_content.push_back(uniform_int(0, in.data_levels - 1));
  }
  validate(in);
  return in;
}

namespace {

template <typename T>
void read(const Json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ValidationError(std::string("mdp.") + key, "wrong type");
  }
}

}  // namespace

SmallMdpInstance instance_from_json(const Json& j) {
  if (!j.is_object()) throw ValidationError("mdp", "expected an object");
  static const std::vector<std::string> known{
      "n_towers", "n_uavs",     "energy_levels", "data_levels",      "horizon", "gamma",
      "epsilon",  "panels",     "travel_cost",   "charge_gain",      "idle_cost", "content_outcomes",
      "initial"};
  for (const auto& [key, _] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ValidationError("mdp." + key, "unknown key");
  SmallMdpInstance in;
  read(j, "n_towers", in.n_towers);
  read(j, "n_uavs", in.n_uavs);
  read(j, "energy_levels", in.energy_levels);
  read(j, "data_levels", in.data_levels);
  read(j, "horizon", in.horizon);
  read(j, "gamma", in.gamma);
  read(j, "epsilon", in.epsilon);
  read(j, "panels", in.panels);
  read(j, "travel_cost", in.travel_cost);
  read(j, "charge_gain", in.charge_gain);
  read(j, "idle_cost", in.idle_cost);
  if (j.contains("content_outcomes")) {
    in.content_outcomes.clear();
    for (const auto& o : j["content_outcomes"]) {
      if (!o.is_object() || !o.contains("size") || !o.contains("probability"))
        throw ValidationError("mdp.content_outcomes", "expected {size, probability}");
      in.content_outcomes.push_back({o["size"].get<int>(), o["probability"].get<double>()});
    }
  }
  if (j.contains("initial")) {
    const Json& s0 = j["initial"];
    if (!s0.is_object()) throw ValidationError("mdp.initial", "expected an object");
    for (const auto& [key, _] : s0.items())
      if (key != "tower_data" && key != "uav_energy" && key != "uav_content")
        throw ValidationError("mdp.initial." + key, "unknown key");
    read(s0, "tower_data", in.initial.tower_data);
    read(s0, "uav_energy", in.initial.uav_energy);
    read(s0, "uav_content", in.initial.uav_content);
  }
  return normalized(std::move(in));
}

Json to_json(const SmallMdpInstance& in) {
  Json outcomes = Json::array();
  for (const auto& o : in.content_outcomes) outcomes.push_back({{"size", o.size}, {"probability", o.probability}});
  return Json{{"n_towers", in.n_towers},
              {"n_uavs", in.n_uavs},
              {"energy_levels", in.energy_levels},
              {"data_levels", in.data_levels},
              {"horizon", in.horizon},
              {"gamma", in.gamma},
              {"epsilon", in.epsilon},
              {"panels", in.panels},
              {"travel_cost", in.travel_cost},
              {"charge_gain", in.charge_gain},
              {"idle_cost", in.idle_cost},
              {"content_outcomes", outcomes},
              {"initial",
               {{"tower_data", in.initial.tower_data},
                {"uav_energy", in.initial.uav_energy},
                {"uav_content", in.initial.uav_content}}}};
}

std::string solution_csv(const SmallMdpInstance& instance, const MdpSolution& sol) {
  std::ostringstream out;
  out << "step,state_index,value,action\n";
  for (int t = 0; t < instance.horizon; ++t)
    for (std::size_t k = 0; k < sol.value[t].size(); ++k)
      out << t << ',' << k << ',' << format6(sol.value[t][k]) << ',' << sol.policy[t][k].to_string() << '\n';
  return out.str();
}

GreedyGap greedy_gap(const SmallMdpInstance& instance) {
  const MdpSolution sol = value_iteration(instance);
  GreedyGap gap;
  gap.optimal = sol.value[0][index_of(instance, instance.initial)];
  gap.greedy = evaluate_policy(instance, greedy_policy(instance));
  return gap;
}

}  // namespace uavsched::mdp
