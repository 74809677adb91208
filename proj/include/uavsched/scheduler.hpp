#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "uavsched/domain.hpp"

namespace uavsched {

enum class PolicyKind { kProposed, kComp1, kComp2, kComp3 };
enum class SearchKind { kExhaustive, kLocal };

struct Policy {
  PolicyKind kind = PolicyKind::kProposed;
  double epsilon = 0.5;  ///< only read for kProposed
  SearchKind search = SearchKind::kExhaustive;
  int search_budget = 1000;
  std::size_t exhaustive_bound = 1'000'000;

  static Policy proposed(double epsilon = 0.5);
  static Policy comp1();
  static Policy comp2();
  static Policy comp3();

  /// The reward weight this policy optimizes: comp1 is 0, comp2 is 1.
  double weight() const;
  std::string name() const;
};

Policy parse_policy(const std::string& name, double epsilon = 0.5);
SearchKind parse_search(const std::string& name);

/// Shape of one step's decision: who may be paired with whom. `allowed`
/// already folds in activity and reachability.
struct AssignmentProblem {
  int n_towers = 0;
  int n_uavs = 0;
  std::vector<int> panels;
  std::vector<std::vector<char>> allowed;  ///< [tower][uav]

  bool allows(Pair p) const { return allowed[p.tower][p.uav] != 0; }
  bool is_feasible(const Assignment& a) const;
};

using Objective = std::function<double(const Assignment&)>;

/// Visits every feasible assignment, the empty one first. Pairs come out
/// sorted.
void for_each_assignment(const AssignmentProblem& problem,
                         const std::function<void(const Assignment&)>& visit);

/// Number of feasible assignments, counting stops once it exceeds `cap`.
std::size_t count_assignments(const AssignmentProblem& problem, std::size_t cap);

/// Strict preference: higher objective, then fewer pairs, then the
/// lexicographically smaller pair set. Objectives within a relative 1e-12
/// count as tied.
bool preferred(double value_a, const Assignment& a, double value_b, const Assignment& b);

struct ScoredAssignment {
  Assignment assignment;
  double objective = 0.0;
};

class SearchBoundExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

ScoredAssignment best_assignment_exhaustive(const AssignmentProblem& problem,
                                            const Objective& objective,
                                            std::size_t bound = 1'000'000);

/// Best-improvement hill climbing over add / remove / swap moves starting
/// from the empty assignment. Each accepted move spends one unit of budget.
ScoredAssignment local_search(const AssignmentProblem& problem, const Objective& objective,
                              int budget, Rng& rng);

/// Decision problem for a state: active UAVs whose round trip to the tower
/// fits inside one step.
AssignmentProblem scheduling_problem(const SystemState& state, const Scenario& s);

std::vector<Assignment> feasible_assignments(const SystemState& state, const Scenario& s);

/// Reward of the state after the step's exchange (transfer, charge,
/// consumption) under `assignment`, weighted with the policy's epsilon.
double one_step_objective(const SystemState& state, const Scenario& s,
                          const Assignment& assignment, const Policy& policy);

/// Fast evaluator equivalent to one_step_objective for a fixed state.
Objective make_objective(const SystemState& state, const Scenario& s, const Policy& policy);

Assignment best_assignment_exhaustive(const SystemState& state, const Scenario& s,
                                      const Policy& policy);
Assignment local_search_assignment(const SystemState& state, const Scenario& s,
                                   const Policy& policy, Rng& rng);

/// Uniformly random feasible assignment: UAVs in random order each pick
/// among "stay" and the reachable towers that still have a free panel.
Assignment random_assignment(const AssignmentProblem& problem, Rng& rng);

Assignment decide(const Policy& policy, const SystemState& state, const Scenario& s, Rng& rng);

}  // namespace uavsched
