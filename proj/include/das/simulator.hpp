#pragma once

#include <functional>

#include "das/policies.hpp"

namespace das {

enum class PolicyKind : uint8_t { twossp, consensus, myopic };

struct EpisodeResult {
  std::vector<DecisionRecord> decisions;  // one per request, stream order
  std::vector<std::string> accepted_ids;  // sorted
  RoutePlan final_route;
  double profit = 0.0;  // sum of accepted utilities - final route cost
  int served = 0;
  int total_requests = 0;
  double served_fraction = 0.0;
  double serial_time_s = 0.0;       // sum of all subproblem wall times
  double parallel_time_lb_s = 0.0;  // sum over epochs of the max wall time
};

// Supplies the scenario set for one decision epoch; unused by the myopic
// policy. Typically wraps build_scenarios over the instance's demand model.
using ScenarioSampler = std::function<ScenarioSet(const SystemState&, int k)>;

// Replays the request stream in (request_time, id) order, forcing rejection
// whenever acceptance is infeasible, and finalizes the cost-minimal route
// over the accepted set. Deterministic except for the wall-time fields.
EpisodeResult run_episode(const Instance& instance, PolicyKind policy,
                          int k_scenarios, const ScenarioSampler& sampler,
                          EvalMode mode = EvalMode::parallel);

// Optimal objective when the whole stream is known upfront.
double full_info_bound(const Instance& instance);

struct GapResult {
  bool defined = false;  // the ratio gap needs a positive bound
  double value = 0.0;    // gap when defined, |bound - policy| otherwise
};

// 1 - policy_value / bound_value when the bound is positive.
GapResult optimality_gap(double policy_value, double bound_value);

// Exhaustive arrival realizations for the Bellman oracle: each node is one
// possible next request; sibling probabilities sum to 1.
struct ArrivalNode {
  Request request;
  double probability = 1.0;
  std::vector<ArrivalNode> children;
};

struct ArrivalTree {
  std::vector<ArrivalNode> roots;
};

// Exact optimal-policy value by backward induction over the full tree.
// Refuses trees above the node budget. Test oracle, not a production path.
double brute_force_policy_value(const Network& network, const ArrivalTree& tree,
                                int max_nodes = 200000);

Json episode_to_json(const EpisodeResult& episode);

}  // namespace das
