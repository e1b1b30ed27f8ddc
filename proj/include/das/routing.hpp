#pragma once

#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "das/core.hpp"

namespace das {

// One Pareto-minimal way to run segment h visiting exactly `visited`:
// f_h -> (visited, in `order`) -> f_{h+1}.
struct SegmentLabel {
  int segment = 0;
  std::vector<int> visited;  // stop indices, sorted
  std::vector<int> order;    // visit order
  double cost = 0.0;
  double duration_s = 0.0;
};

// Exact subset-path enumeration for one segment: for every subset of
// candidate_stops, the (cost, duration) Pareto frontier over elementary
// paths f_h -> subset -> f_{h+1}, by dynamic programming over
// (subset, last stop). Subsets with no connecting path are omitted.
// Elementary paths make subtours structurally impossible.
std::vector<SegmentLabel> segment_labels(const Network& network, int h,
                                         const std::vector<int>& candidate_stops);

// Min-cost plan serving every request in `accepted` (at least one visited
// pickup stop and one visited dropoff stop each) within all compulsory time
// windows; waiting happens at compulsory stops only. nullopt when the set
// cannot be served.
std::optional<RoutePlan> optimal_route(const Network& network,
                                       std::span<const Request> accepted);

bool is_feasible(const Network& network, std::span<const Request> accepted);

struct FullInfoSolution {
  std::vector<std::string> accepted;  // request ids, sorted
  RoutePlan route;
  double objective = 0.0;  // sum of accepted utilities - route cost
};

// Acceptance decisions a request may be pinned to before solving.
using FixedDecisions = std::unordered_map<std::string, bool>;

struct SolveOptions {
  const FixedDecisions* fixed = nullptr;
  // When set, objective ties are broken toward solutions rejecting this
  // request (ahead of the fewer-accepted / lexicographic rules).
  const std::string* prefer_reject = nullptr;
};

// Globally optimal joint acceptance + route by depth-first branch-and-bound
// (requests in descending-utility order, accept branch first; node bound =
// optimistic utilities minus the current accepted set's route cost).
// Equal-objective ties resolve toward fewer accepted requests, then the
// lexicographically smaller id set. Returns nullopt only when requests fixed
// to accept cannot be served.
std::optional<FullInfoSolution> full_info_solve_with(
    const Network& network, std::span<const Request> requests,
    const SolveOptions& options);

FullInfoSolution full_info_solve(const Network& network,
                                 std::span<const Request> requests);

}  // namespace das
