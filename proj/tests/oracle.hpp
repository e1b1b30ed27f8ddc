#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "das/core.hpp"
#include "das/routing.hpp"

// Exhaustive enumeration oracles. Everything here recomputes results from
// the Network primitives only (arc lookups, windows); nothing calls into the
// solver paths it is used to check.
namespace oracle {

struct SegPath {
  std::vector<int> order;  // optional stop indices in visit order
  double cost = 0.0;
  double duration = 0.0;
};

// Every elementary f_h -> subset -> f_{h+1} path over the candidates
// (all subsets, all permutations; missing arcs skip the path).
std::vector<SegPath> enumerate_segment_paths(const das::Network& net, int h,
                                             const std::vector<int>& candidates);

struct RouteBest {
  bool feasible = false;
  double cost = 0.0;
};

// Min-cost feasible route serving every request, by cross-segment
// enumeration over all candidate paths with forward time propagation.
RouteBest best_route(const das::Network& net, std::span<const das::Request> accepted);

struct FullBest {
  double objective = 0.0;
  std::vector<std::string> accepted;  // sorted
};

// Optimum over all acceptance subsets honoring `fixed`, with the tie-break
// chain: higher objective, [rejects prefer_reject], fewer accepted,
// lexicographically smaller id set. nullopt when the fixed-to-accept set
// cannot be served.
std::optional<FullBest> best_full_info(const das::Network& net,
                                       std::span<const das::Request> requests,
                                       const das::FixedDecisions* fixed = nullptr,
                                       const std::string* prefer_reject = nullptr);

}  // namespace oracle
