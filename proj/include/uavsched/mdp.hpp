#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "uavsched/domain.hpp"
#include "uavsched/scheduler.hpp"

namespace uavsched::mdp {

/// Quantized world state: a level per tower and an (energy, content) level
/// pair per UAV.
struct MdpState {
  std::vector<int> tower_data;
  std::vector<int> uav_energy;
  std::vector<int> uav_content;
  friend auto operator<=>(const MdpState&, const MdpState&) = default;
};

struct ContentOutcome {
  int size = 0;  ///< content levels picked up by every collecting UAV
  double probability = 1.0;
};

class InfeasibleAction : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kMaxStates = 100'000;
inline constexpr int kUnreachable = -1;

/// Small enumerable mini-world. Energy levels run 0..energy_levels-1 with 0
/// meaning the UAV is down; data levels saturate at data_levels-1.
struct SmallMdpInstance {
  int n_towers = 1;
  int n_uavs = 1;
  int energy_levels = 3;  ///< Q
  int data_levels = 3;    ///< D
  int horizon = 4;
  double gamma = 0.95;
  double epsilon = 0.5;
  std::vector<int> panels;                    ///< per tower, default 1
  std::vector<std::vector<int>> travel_cost;  ///< [tower][uav], kUnreachable to forbid
  int charge_gain = 2;  ///< energy levels gained when scheduled
  int idle_cost = 1;    ///< energy levels burnt by every active UAV per step
  std::vector<ContentOutcome> content_outcomes{{1, 1.0}};
  MdpState initial;
};

/// Fills defaults (panels, travel costs, initial state) and checks bounds.
SmallMdpInstance normalized(SmallMdpInstance instance);
void validate(const SmallMdpInstance& instance);

std::size_t state_count(const SmallMdpInstance& instance);
std::vector<MdpState> enumerate_states(const SmallMdpInstance& instance);
std::size_t index_of(const SmallMdpInstance& instance, const MdpState& state);
MdpState state_of(const SmallMdpInstance& instance, std::size_t index);

AssignmentProblem action_problem(const SmallMdpInstance& instance, const MdpState& state);
std::vector<Assignment> actions(const SmallMdpInstance& instance, const MdpState& state);

/// Reward of the post-exchange state (before content pickup), normalized
/// mode, instance epsilon.
double immediate_reward(const SmallMdpInstance& instance, const MdpState& state,
                        const Assignment& action);

struct Transition {
  MdpState next;
  double probability = 0.0;
};

Transition transition(const SmallMdpInstance& instance, const MdpState& state,
                      const Assignment& action, std::size_t outcome);

/// All successors of (state, action), one per outcome (not merged).
std::vector<Transition> successors(const SmallMdpInstance& instance, const MdpState& state,
                                   const Assignment& action);

struct MdpSolution {
  std::vector<std::vector<double>> value;       ///< [step][state], step == horizon is 0
  std::vector<std::vector<Assignment>> policy;  ///< [step][state]
};

/// Finite-horizon backward induction with per-stage discount gamma.
MdpSolution value_iteration(const SmallMdpInstance& instance);

/// Largest violation of the Bellman optimality recursion.
double bellman_residual(const SmallMdpInstance& instance, const MdpSolution& solution);

using PolicyTable = std::vector<std::vector<std::optional<Assignment>>>;

PolicyTable optimal_policy(const MdpSolution& solution);
/// Myopic policy: each (step, state) takes the scheduler's exhaustive
/// maximizer of the immediate reward.
PolicyTable greedy_policy(const SmallMdpInstance& instance);

/// Expected discounted return from the initial state. Throws when a
/// reachable (step, state) has no action.
double evaluate_policy(const SmallMdpInstance& instance, const PolicyTable& policy);

struct RolloutEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  int rollouts = 0;
};

RolloutEstimate evaluate_policy(const SmallMdpInstance& instance, const PolicyTable& policy,
                                int n_rollouts, std::uint64_t seed);

/// Random instance within the enumeration bounds. `deterministic` forces a
/// single content outcome.
SmallMdpInstance random_instance(Rng& rng, bool deterministic = false, int max_horizon = 6);

SmallMdpInstance instance_from_json(const Json& j);
Json to_json(const SmallMdpInstance& instance);

/// Rows `step,state_index,value,action` for every non-terminal stage.
std::string solution_csv(const SmallMdpInstance& instance, const MdpSolution& solution);

struct GreedyGap {
  double optimal = 0.0;
  double greedy = 0.0;
  double ratio() const { return optimal > 0.0 ? greedy / optimal : 1.0; }
};

GreedyGap greedy_gap(const SmallMdpInstance& instance);

}  // namespace uavsched::mdp
