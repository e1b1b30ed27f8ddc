#include "das/policies.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

namespace das {

namespace {

double now_s() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

FixedDecisions accepted_fixed(const SystemState& state) {
  FixedDecisions fixed;
  for (const auto& r : state.accepted) fixed.emplace(r.id, true);
  return fixed;
}

void check_scenario(const SystemState& state, const Scenario& scenario) {
  auto contains = [&](const std::string& id) {
    return std::any_of(scenario.requests.begin(), scenario.requests.end(),
                       [&](const Request& r) { return r.id == id; });
  };
  if (!contains(state.pending.id))
    throw std::invalid_argument("scenario is missing the pending request " +
                                state.pending.id);
  for (const auto& r : state.accepted)
    if (!contains(r.id))
      throw std::invalid_argument("scenario is missing accepted request " + r.id);
}

}  // namespace

std::vector<SubproblemResult> solve_subproblems(const Network& network,
                                                std::span<const SubproblemTask> tasks,
                                                EvalMode mode) {
  std::vector<SubproblemResult> results(tasks.size());
  auto run_one = [&](size_t i) {
    const SubproblemTask& task = tasks[i];
    SolveOptions options;
    options.fixed = &task.fixed;
    options.prefer_reject = task.prefer_reject;
    double t0 = now_s();
    results[i].solution =
        full_info_solve_with(network, task.scenario->requests, options);
    results[i].wall_s = now_s() - t0;
  };
  if (mode == EvalMode::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < static_cast<long>(tasks.size()); ++i)
      run_one(static_cast<size_t>(i));
  } else {
    for (size_t i = 0; i < tasks.size(); ++i) run_one(i);
  }
  return results;
}

MaybeValue q_sigma(const Network& network, const SystemState& state,
                   Decision fixed_decision, const Scenario& scenario) {
  check_scenario(state, scenario);
  SubproblemTask task;
  task.scenario = &scenario;
  task.fixed = accepted_fixed(state);
  task.fixed[state.pending.id] = (fixed_decision == Decision::accept);
  auto results = solve_subproblems(network, {&task, 1}, EvalMode::serial);
  if (!results[0].solution) return std::nullopt;
  return results[0].solution->objective;
}

DecisionRecord decide_2ssp(const Network& network, const SystemState& state,
                           const ScenarioSet& scenarios, EvalMode mode) {
  if (scenarios.scenarios.empty())
    throw std::invalid_argument("decide_2ssp needs at least one scenario");
  const size_t k = scenarios.scenarios.size();
  std::vector<SubproblemTask> tasks(2 * k);
  FixedDecisions base = accepted_fixed(state);
  for (size_t i = 0; i < k; ++i) {
    check_scenario(state, scenarios.scenarios[i]);
    tasks[i].scenario = &scenarios.scenarios[i];
    tasks[i].fixed = base;
    tasks[i].fixed[state.pending.id] = true;
    tasks[k + i].scenario = &scenarios.scenarios[i];
    tasks[k + i].fixed = base;
    tasks[k + i].fixed[state.pending.id] = false;
  }
  auto results = solve_subproblems(network, tasks, mode);

  // Sums run in scenario-index order so parallel and serial agree bitwise.
  MaybeValue q_accept = 0.0, q_reject = 0.0;
  for (size_t i = 0; i < k; ++i) {
    const double p = scenarios.scenarios[i].probability;
    if (q_accept && results[i].solution)
      q_accept = *q_accept + p * results[i].solution->objective;
    else
      q_accept = std::nullopt;
  }
  for (size_t i = 0; i < k; ++i) {
    const double p = scenarios.scenarios[i].probability;
    if (q_reject && results[k + i].solution)
      q_reject = *q_reject + p * results[k + i].solution->objective;
    else
      q_reject = std::nullopt;
  }

  DecisionRecord record;
  record.q_accept = q_accept;
  record.q_reject = q_reject;
  bool accept = q_accept && (!q_reject || *q_accept > *q_reject);
  record.decision = accept ? Decision::accept : Decision::reject;
  record.wall_times_s.reserve(2 * k);
  for (const auto& r : results) record.wall_times_s.push_back(r.wall_s);
  return record;
}

DecisionRecord decide_consensus(const Network& network, const SystemState& state,
                                const ScenarioSet& scenarios, EvalMode mode) {
  if (scenarios.scenarios.empty())
    throw std::invalid_argument("decide_consensus needs at least one scenario");
  const size_t k = scenarios.scenarios.size();
  std::vector<SubproblemTask> tasks(k);
  FixedDecisions base = accepted_fixed(state);
  for (size_t i = 0; i < k; ++i) {
    check_scenario(state, scenarios.scenarios[i]);
    tasks[i].scenario = &scenarios.scenarios[i];
    tasks[i].fixed = base;
    tasks[i].prefer_reject = &state.pending.id;
  }
  auto results = solve_subproblems(network, tasks, mode);

  DecisionRecord record;
  double accepting_mass = 0.0;
  for (size_t i = 0; i < k; ++i) {
    int vote = 0;
    if (results[i].solution &&
        std::binary_search(results[i].solution->accepted.begin(),
                           results[i].solution->accepted.end(), state.pending.id))
      vote = 1;
    record.votes.push_back(vote);
    if (vote) accepting_mass += scenarios.scenarios[i].probability;
    record.wall_times_s.push_back(results[i].wall_s);
  }
  record.decision = accepting_mass >= 0.5 * scenarios.total_probability()
                        ? Decision::accept
                        : Decision::reject;
  return record;
}

DecisionRecord decide_myopic(const Network& network, const SystemState& state) {
  Scenario degenerate;
  degenerate.requests = state.accepted;
  degenerate.requests.push_back(state.pending);
  degenerate.probability = 1.0;

  SubproblemTask task;
  task.scenario = &degenerate;
  task.fixed = accepted_fixed(state);
  task.prefer_reject = &state.pending.id;
  auto results = solve_subproblems(network, {&task, 1}, EvalMode::serial);

  DecisionRecord record;
  bool accept = results[0].solution &&
                std::binary_search(results[0].solution->accepted.begin(),
                                   results[0].solution->accepted.end(),
                                   state.pending.id);
  record.decision = accept ? Decision::accept : Decision::reject;
  record.wall_times_s.push_back(results[0].wall_s);
  return record;
}

}  // namespace das
