#include "oracle.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace oracle {

using das::Network;
using das::Request;
using das::StopKind;

std::vector<SegPath> enumerate_segment_paths(const Network& net, int h,
                                             const std::vector<int>& candidates) {
  const int source = net.compulsory(h);
  const int sink = net.compulsory(h + 1);
  std::vector<SegPath> out;

  std::vector<int> cand(candidates);
  std::sort(cand.begin(), cand.end());
  const int m = static_cast<int>(cand.size());
  for (uint32_t mask = 0; mask < (1u << m); ++mask) {
    std::vector<int> subset;
    for (int i = 0; i < m; ++i)
      if (mask & (1u << i)) subset.push_back(cand[i]);
    std::sort(subset.begin(), subset.end());
    do {
      SegPath path;
      path.order = subset;
      int prev = source;
      bool ok = true;
      for (int stop : subset) {
        if (!net.has_arc(prev, stop)) {
          ok = false;
          break;
        }
        path.cost += net.arc_cost(prev, stop);
        path.duration += net.arc_time(prev, stop);
        prev = stop;
      }
      if (!ok || !net.has_arc(prev, sink)) continue;
      path.cost += net.arc_cost(prev, sink);
      path.duration += net.arc_time(prev, sink);
      out.push_back(std::move(path));
    } while (std::next_permutation(subset.begin(), subset.end()));
  }
  return out;
}

namespace {

// Coverage sets per request side that contain no compulsory stop.
std::vector<std::set<int>> requirement_sets(const Network& net,
                                            std::span<const Request> accepted) {
  std::set<std::set<int>> dedup;
  for (const Request& r : accepted) {
    for (const auto* side : {&r.pickup_stops, &r.dropoff_stops}) {
      std::set<int> stops;
      bool has_compulsory = false;
      for (const auto& sid : *side) {
        int idx = net.stop_index(sid);
        if (net.is_compulsory(idx)) {
          has_compulsory = true;
          break;
        }
        stops.insert(idx);
      }
      if (!has_compulsory) dedup.insert(std::move(stops));
    }
  }
  return {dedup.begin(), dedup.end()};
}

}  // namespace

RouteBest best_route(const Network& net, std::span<const Request> accepted) {
  const int n = net.segment_count();
  auto requirements = requirement_sets(net, accepted);

  std::vector<std::vector<int>> candidates(n + 1);
  for (const auto& req : requirements)
    for (int stop : req)
      candidates[net.stops()[stop].segment].push_back(stop);

  std::vector<std::vector<SegPath>> paths(n + 1);
  for (int h = 1; h <= n; ++h)
    paths[h] = enumerate_segment_paths(net, h, candidates[h]);

  RouteBest best;
  std::vector<const SegPath*> choice(n + 1, nullptr);
  auto recurse = [&](auto&& self, int h, double cost, double time) -> void {
    if (h > n) {
      std::set<int> visited;
      for (int hh = 1; hh <= n; ++hh)
        for (int stop : choice[hh]->order) visited.insert(stop);
      for (const auto& req : requirements) {
        bool covered = false;
        for (int stop : req)
          if (visited.count(stop)) {
            covered = true;
            break;
          }
        if (!covered) return;
      }
      if (!best.feasible || cost < best.cost) {
        best.feasible = true;
        best.cost = cost;
      }
      return;
    }
    const das::TimeWindow& w = net.window(h + 1);
    for (const SegPath& path : paths[h]) {
      double arrival = time + path.duration;
      if (arrival > w.close_s + 1e-9) continue;
      choice[h] = &path;
      self(self, h + 1, cost + path.cost, std::max(arrival, w.open_s));
    }
  };
  recurse(recurse, 1, 0.0, net.window(1).open_s);
  return best;
}

std::optional<FullBest> best_full_info(const Network& net,
                                       std::span<const Request> requests,
                                       const das::FixedDecisions* fixed,
                                       const std::string* prefer_reject) {
  std::vector<const Request*> base, free;
  for (const Request& r : requests) {
    const bool* pin = nullptr;
    if (fixed) {
      auto it = fixed->find(r.id);
      if (it != fixed->end()) pin = &it->second;
    }
    if (pin && !*pin) continue;
    if (pin && *pin)
      base.push_back(&r);
    else
      free.push_back(&r);
  }

  bool have = false;
  FullBest best;
  auto consider = [&](const std::vector<const Request*>& chosen) {
    std::vector<Request> accepted;
    double utility = 0.0;
    for (const Request* r : chosen) {
      accepted.push_back(*r);
      utility += r->utility;
    }
    RouteBest route = best_route(net, accepted);
    if (!route.feasible) return;
    double objective = utility - route.cost;
    std::vector<std::string> ids;
    for (const Request* r : chosen) ids.push_back(r->id);
    std::sort(ids.begin(), ids.end());

    bool better;
    if (!have) {
      better = true;
    } else if (objective > best.objective + 1e-9) {
      better = true;
    } else if (objective < best.objective - 1e-9) {
      better = false;
    } else {
      better = false;
      bool decided = false;
      if (prefer_reject) {
        bool cand_rejects = !std::binary_search(ids.begin(), ids.end(), *prefer_reject);
        bool best_rejects = !std::binary_search(best.accepted.begin(),
                                                best.accepted.end(), *prefer_reject);
        if (cand_rejects != best_rejects) {
          better = cand_rejects;
          decided = true;
        }
      }
      if (!decided && ids.size() != best.accepted.size()) {
        better = ids.size() < best.accepted.size();
        decided = true;
      }
      if (!decided)
        better = std::lexicographical_compare(ids.begin(), ids.end(),
                                              best.accepted.begin(),
                                              best.accepted.end());
    }
    if (better) {
      have = true;
      best.objective = objective;
      best.accepted = std::move(ids);
    }
  };

  const size_t k = free.size();
  for (uint64_t bits = 0; bits < (1ULL << k); ++bits) {
    std::vector<const Request*> chosen = base;
    for (size_t i = 0; i < k; ++i)
      if (bits & (1ULL << i)) chosen.push_back(free[i]);
    consider(chosen);
  }
  if (!have) return std::nullopt;
  return best;
}

}  // namespace oracle
