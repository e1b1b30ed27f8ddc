#pragma once

#include <optional>
#include <span>

#include "das/routing.hpp"

namespace das {

// nullopt stands for minus-infinity (infeasible second stage); it is a
// distinguished value and all arithmetic with it short-circuits.
using MaybeValue = std::optional<double>;

struct Scenario {
  std::vector<Request> requests;  // accepted set, pending request, futures
  double probability = 0.0;
};

struct ScenarioSet {
  std::vector<Scenario> scenarios;
  double total_probability() const {
    double p = 0.0;
    for (const auto& s : scenarios) p += s.probability;
    return p;
  }
};

enum class Decision : uint8_t { reject = 0, accept = 1 };

struct DecisionRecord {
  Decision decision = Decision::reject;
  bool forced = false;  // feasibility left no choice (set by the simulator)
  // Expected second-stage values, present for the stochastic-program rule.
  std::optional<MaybeValue> q_accept;
  std::optional<MaybeValue> q_reject;
  std::vector<int> votes;            // consensus rule: one 0/1 per scenario
  std::vector<double> wall_times_s;  // one entry per subproblem solved
};

// How scenario subproblems are executed. Results are identical in both
// modes (aggregation happens in scenario-index order); parallel uses OpenMP.
enum class EvalMode : uint8_t { serial, parallel };

// Optimal value of one scenario's planning problem with the accepted set
// pinned to accept and the pending request pinned to `fixed_decision`;
// nullopt when that fixing is infeasible.
MaybeValue q_sigma(const Network& network, const SystemState& state,
                   Decision fixed_decision, const Scenario& scenario);

// Stochastic-program rule: accept iff the probability-weighted expected
// value under accept strictly exceeds the one under reject. Solves 2|Omega|
// subproblems (all of them, even after an infeasible accept is known).
DecisionRecord decide_2ssp(const Network& network, const SystemState& state,
                           const ScenarioSet& scenarios,
                           EvalMode mode = EvalMode::parallel);

// Consensus rule: one unfixed solve per scenario votes on the pending
// request (objective ties vote reject); accept iff the accepting probability
// mass reaches half of the total mass.
DecisionRecord decide_consensus(const Network& network, const SystemState& state,
                                const ScenarioSet& scenarios,
                                EvalMode mode = EvalMode::parallel);

// Myopic rule: ignore future demand; accept only if acceptance strictly
// improves the profit of serving the already-accepted set.
DecisionRecord decide_myopic(const Network& network, const SystemState& state);

// The parallel kernel behind the rules, exposed for the benchmark: one
// planning solve per task.
struct SubproblemTask {
  const Scenario* scenario = nullptr;
  FixedDecisions fixed;
  const std::string* prefer_reject = nullptr;
};

struct SubproblemResult {
  std::optional<FullInfoSolution> solution;
  double wall_s = 0.0;
};

std::vector<SubproblemResult> solve_subproblems(const Network& network,
                                                std::span<const SubproblemTask> tasks,
                                                EvalMode mode);

}  // namespace das
