#include "das/routing.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <limits>
#include <map>

namespace das {

namespace {

constexpr double kTimeEps = 1e-9;
constexpr double kObjEps = 1e-9;

struct PathNode {
  double cost;
  double time;
  const PathNode* parent;
  int stop;  // stop index appended by this node, -1 at the root
};

// Insert into a (cost, time) Pareto frontier; returns null when dominated.
template <typename NodeT>
NodeT* pareto_insert(std::vector<NodeT*>& frontier, std::deque<NodeT>& pool,
                     NodeT candidate) {
  for (const NodeT* e : frontier)
    if (e->cost <= candidate.cost && e->time <= candidate.time) return nullptr;
  std::erase_if(frontier, [&](const NodeT* e) {
    return candidate.cost <= e->cost && candidate.time <= e->time;
  });
  pool.push_back(candidate);
  frontier.push_back(&pool.back());
  return &pool.back();
}

}  // namespace

std::vector<SegmentLabel> segment_labels(const Network& network, int h,
                                         const std::vector<int>& candidate_stops) {
  const int m = static_cast<int>(candidate_stops.size());
  if (m > 16)
    throw std::invalid_argument("segment_labels: more than 16 candidate stops");
  const int source = network.compulsory(h);
  const int sink = network.compulsory(h + 1);

  std::vector<int> cand(candidate_stops);
  std::sort(cand.begin(), cand.end());

  std::deque<PathNode> pool;
  // frontier[mask * m + last]
  std::vector<std::vector<PathNode*>> open(static_cast<size_t>(1 << m) * std::max(1, m));
  auto cell = [&](uint32_t mask, int last) -> std::vector<PathNode*>& {
    return open[static_cast<size_t>(mask) * m + last];
  };

  for (int i = 0; i < m; ++i) {
    if (!network.has_arc(source, cand[i])) continue;
    pareto_insert(cell(1u << i, i), pool,
                  PathNode{network.arc_cost(source, cand[i]),
                           network.arc_time(source, cand[i]), nullptr, cand[i]});
  }

  for (uint32_t mask = 1; mask < (1u << m); ++mask) {
    for (int last = 0; last < m; ++last) {
      if (!(mask & (1u << last))) continue;
      for (PathNode* node : cell(mask, last)) {
        for (int nxt = 0; nxt < m; ++nxt) {
          if (mask & (1u << nxt)) continue;
          if (!network.has_arc(cand[last], cand[nxt])) continue;
          pareto_insert(cell(mask | (1u << nxt), nxt), pool,
                        PathNode{node->cost + network.arc_cost(cand[last], cand[nxt]),
                                 node->time + network.arc_time(cand[last], cand[nxt]),
                                 node, cand[nxt]});
        }
      }
    }
  }

  std::vector<SegmentLabel> labels;
  // Empty subset: the direct arc.
  if (network.has_arc(source, sink)) {
    labels.push_back({h, {}, {}, network.arc_cost(source, sink),
                      network.arc_time(source, sink)});
  }
  std::deque<PathNode> closed_pool;
  for (uint32_t mask = 1; mask < (1u << m); ++mask) {
    std::vector<PathNode*> closed;
    for (int last = 0; last < m; ++last) {
      if (!(mask & (1u << last))) continue;
      if (!network.has_arc(cand[last], sink)) continue;
      for (PathNode* node : cell(mask, last)) {
        pareto_insert(closed, closed_pool,
                      PathNode{node->cost + network.arc_cost(cand[last], sink),
                               node->time + network.arc_time(cand[last], sink),
                               node, -1});
      }
    }
    for (const PathNode* entry : closed) {
      SegmentLabel label;
      label.segment = h;
      label.cost = entry->cost;
      label.duration_s = entry->time;
      for (const PathNode* p = entry->parent; p != nullptr; p = p->parent)
        label.order.insert(label.order.begin(), p->stop);
      label.visited = label.order;
      std::sort(label.visited.begin(), label.visited.end());
      labels.push_back(std::move(label));
    }
  }
  return labels;
}

namespace {

// A coverage obligation: at least one of `stops` must be visited. Derived
// from a request side whose stop set contains no compulsory stop.
struct Requirement {
  std::vector<int> stops;  // optional stop indices, sorted
  int first_segment = 0;
  int last_segment = 0;
  std::vector<uint32_t> seg_masks;  // [1..n]: stops in segment h as candidate bits
};

struct RouteEntry {
  double cost;
  double time;
  const RouteEntry* parent;
  int label_idx;  // label taken to arrive at this boundary, -1 at boundary 1
};

struct RouteResult {
  bool feasible = false;
  double cost = 0.0;
  RoutePlan plan;
};

// Shared solver state for one request universe: interned requirements,
// per-segment candidate stops and labels, and memoized routes per
// requirement subset.
class RoutingEngine {
 public:
  RoutingEngine(const Network& net, std::span<const Request> requests)
      : net_(net) {
    const int n = net.segment_count();
    seg_candidates_.assign(n + 1, {});
    req_of_request_.reserve(requests.size());
    for (const Request& r : requests) {
      req_of_request_.push_back(
          {intern_side(r.pickup_stops), intern_side(r.dropoff_stops)});
    }
    if (requirements_.size() > 63)
      throw std::invalid_argument("routing: more than 63 distinct coverage sets");

    seg_labels_.assign(n + 1, {});
    for (int h = 1; h <= n; ++h) {
      std::sort(seg_candidates_[h].begin(), seg_candidates_[h].end());
      seg_candidates_[h].erase(
          std::unique(seg_candidates_[h].begin(), seg_candidates_[h].end()),
          seg_candidates_[h].end());
      seg_labels_[h] = segment_labels(net, h, seg_candidates_[h]);
    }

    // Candidate-bit masks for labels and requirement stops.
    label_masks_.assign(n + 1, {});
    for (int h = 1; h <= n; ++h) {
      for (const auto& label : seg_labels_[h]) {
        uint32_t mask = 0;
        for (int stop : label.visited) mask |= 1u << cand_bit(h, stop);
        label_masks_[h].push_back(mask);
      }
    }
    for (auto& req : requirements_) {
      req.seg_masks.assign(n + 1, 0);
      req.first_segment = n + 1;
      req.last_segment = 0;
      for (int stop : req.stops) {
        int h = net.stops()[stop].segment;
        req.seg_masks[h] |= 1u << cand_bit(h, stop);
        req.first_segment = std::min(req.first_segment, h);
        req.last_segment = std::max(req.last_segment, h);
      }
    }
  }

  // Requirement mask a request contributes (0, one, or two bits).
  uint64_t request_mask(size_t request_idx) const {
    auto [p, d] = req_of_request_[request_idx];
    uint64_t m = 0;
    if (p >= 0) m |= 1ULL << p;
    if (d >= 0) m |= 1ULL << d;
    return m;
  }

  const RouteResult& route_for(uint64_t req_mask) {
    auto it = memo_.find(req_mask);
    if (it != memo_.end()) return it->second;
    return memo_.emplace(req_mask, solve(req_mask)).first->second;
  }

 private:
  int cand_bit(int h, int stop) const {
    const auto& cands = seg_candidates_[h];
    return static_cast<int>(
        std::lower_bound(cands.begin(), cands.end(), stop) - cands.begin());
  }

  // Interns the coverage set of one request side; -1 when a compulsory stop
  // makes the side free.
  int intern_side(const std::vector<std::string>& stop_ids) {
    std::vector<int> stops;
    for (const auto& sid : stop_ids) {
      int idx = net_.stop_index(sid);
      if (idx < 0) throw std::invalid_argument("request references unknown stop " + sid);
      if (net_.is_compulsory(idx)) return -1;
      stops.push_back(idx);
    }
    std::sort(stops.begin(), stops.end());
    auto key = stops;
    auto it = intern_.find(key);
    if (it != intern_.end()) return it->second;
    int id = static_cast<int>(requirements_.size());
    intern_.emplace(std::move(key), id);
    Requirement req;
    req.stops = std::move(stops);
    for (int stop : req.stops)
      seg_candidates_[net_.stops()[stop].segment].push_back(stop);
    requirements_.push_back(std::move(req));
    return id;
  }

  RouteResult solve(uint64_t query) const {
    const int n = net_.segment_count();
    std::deque<RouteEntry> pool;
    // Open-requirement mask -> Pareto frontier, per boundary.
    std::map<uint64_t, std::vector<RouteEntry*>> layer;
    pool.push_back({0.0, net_.window(1).open_s, nullptr, -1});
    layer[query].push_back(&pool.back());

    for (int h = 1; h <= n; ++h) {
      std::map<uint64_t, std::vector<RouteEntry*>> next;
      const TimeWindow& w = net_.window(h + 1);
      for (auto& [open, frontier] : layer) {
        for (size_t li = 0; li < seg_labels_[h].size(); ++li) {
          const SegmentLabel& label = seg_labels_[h][li];
          uint64_t still_open = open;
          if (open != 0 && label_masks_[h][li] != 0) {
            for (uint64_t bits = open; bits;) {
              int q = std::countr_zero(bits);
              bits &= bits - 1;
              if (requirements_[q].seg_masks[h] & label_masks_[h][li])
                still_open &= ~(1ULL << q);
            }
          }
          // Requirements that can no longer be covered kill the state.
          bool dead = false;
          for (uint64_t bits = still_open; bits;) {
            int q = std::countr_zero(bits);
            bits &= bits - 1;
            if (requirements_[q].last_segment <= h) {
              dead = true;
              break;
            }
          }
          if (dead) continue;
          for (RouteEntry* entry : frontier) {
            double arrival = entry->time + label.duration_s;
            if (arrival > w.close_s + kTimeEps) continue;
            double depart = std::max(arrival, w.open_s);
            pareto_insert(next[still_open], pool,
                          RouteEntry{entry->cost + label.cost, depart, entry,
                                     static_cast<int>(li)});
          }
        }
      }
      layer = std::move(next);
    }

    RouteResult result;
    const RouteEntry* best = nullptr;
    for (auto& [open, frontier] : layer) {
      (void)open;  // only the fully-covered mask survives the pruning above
      for (const RouteEntry* e : frontier)
        if (!best || e->cost < best->cost ||
            (e->cost == best->cost && e->time < best->time))
          best = e;
    }
    if (!best) return result;

    result.feasible = true;
    result.cost = best->cost;
    RoutePlan& plan = result.plan;
    plan.total_cost = best->cost;
    plan.segment_visits.assign(n + 1, {});
    plan.departure_times.assign(n + 2, 0.0);
    int h = n + 1;
    for (const RouteEntry* e = best; e != nullptr; e = e->parent, --h) {
      plan.departure_times[h] = e->time;
      if (e->label_idx >= 0) {
        const SegmentLabel& label = seg_labels_[h - 1][e->label_idx];
        for (int stop : label.order)
          plan.segment_visits[h - 1].push_back(net_.stops()[stop].id);
      }
    }
    return result;
  }

  const Network& net_;
  std::vector<Requirement> requirements_;
  std::map<std::vector<int>, int> intern_;
  std::vector<std::pair<int, int>> req_of_request_;
  std::vector<std::vector<int>> seg_candidates_;    // [1..n]
  std::vector<std::vector<SegmentLabel>> seg_labels_;  // [1..n]
  std::vector<std::vector<uint32_t>> label_masks_;     // [1..n]
  std::unordered_map<uint64_t, RouteResult> memo_;
};

// Candidate incumbent ordering; see full_info_solve_with contract.
struct Incumbent {
  double objective = -std::numeric_limits<double>::infinity();
  std::vector<std::string> ids;  // sorted
  uint64_t req_mask = 0;
  bool valid = false;
};

bool better_than(double obj, const std::vector<std::string>& ids,
                 const Incumbent& inc, const std::string* prefer_reject) {
  if (!inc.valid) return true;
  if (obj > inc.objective + kObjEps) return true;
  if (obj < inc.objective - kObjEps) return false;
  if (prefer_reject) {
    bool cand_rejects = !std::binary_search(ids.begin(), ids.end(), *prefer_reject);
    bool inc_rejects =
        !std::binary_search(inc.ids.begin(), inc.ids.end(), *prefer_reject);
    if (cand_rejects != inc_rejects) return cand_rejects;
  }
  if (ids.size() != inc.ids.size()) return ids.size() < inc.ids.size();
  return std::lexicographical_compare(ids.begin(), ids.end(), inc.ids.begin(),
                                      inc.ids.end());
}

struct BranchItem {
  size_t request_idx;
  double utility;
  const std::string* id;
  uint64_t mask;
};

}  // namespace

std::optional<RoutePlan> optimal_route(const Network& network,
                                       std::span<const Request> accepted) {
  RoutingEngine engine(network, accepted);
  uint64_t mask = 0;
  for (size_t i = 0; i < accepted.size(); ++i) mask |= engine.request_mask(i);
  const RouteResult& res = engine.route_for(mask);
  if (!res.feasible) return std::nullopt;
  return res.plan;
}

bool is_feasible(const Network& network, std::span<const Request> accepted) {
  RoutingEngine engine(network, accepted);
  uint64_t mask = 0;
  for (size_t i = 0; i < accepted.size(); ++i) mask |= engine.request_mask(i);
  return engine.route_for(mask).feasible;
}

std::optional<FullInfoSolution> full_info_solve_with(
    const Network& network, std::span<const Request> requests,
    const SolveOptions& options) {
  RoutingEngine engine(network, requests);

  uint64_t base_mask = 0;
  double base_utility = 0.0;
  std::vector<std::string> base_ids;
  std::vector<BranchItem> branch;
  for (size_t i = 0; i < requests.size(); ++i) {
    const Request& r = requests[i];
    const bool* fixed = nullptr;
    if (options.fixed) {
      auto it = options.fixed->find(r.id);
      if (it != options.fixed->end()) fixed = &it->second;
    }
    if (fixed && !*fixed) continue;  // pinned to reject: contributes nothing
    uint64_t mask = engine.request_mask(i);
    if (fixed && *fixed) {
      base_mask |= mask;
      base_utility += r.utility;
      base_ids.push_back(r.id);
    } else if (mask == 0) {
      // No coverage obligation: accepting is a strict improvement.
      base_utility += r.utility;
      base_ids.push_back(r.id);
    } else {
      branch.push_back({i, r.utility, &r.id, mask});
    }
  }
  if (!engine.route_for(base_mask).feasible) return std::nullopt;

  std::sort(branch.begin(), branch.end(), [](const BranchItem& a, const BranchItem& b) {
    if (a.utility != b.utility) return a.utility > b.utility;
    return *a.id < *b.id;
  });

  auto finish_ids = [&](const std::vector<const std::string*>& extra) {
    std::vector<std::string> ids = base_ids;
    for (const std::string* id : extra) ids.push_back(*id);
    std::sort(ids.begin(), ids.end());
    return ids;
  };

  Incumbent incumbent;
  auto offer = [&](double obj, uint64_t mask,
                   const std::vector<const std::string*>& extra) {
    auto ids = finish_ids(extra);
    if (better_than(obj, ids, incumbent, options.prefer_reject)) {
      incumbent = {obj, std::move(ids), mask, true};
    }
  };

  // Myopic pass seeds the incumbent.
  {
    uint64_t mask = base_mask;
    double utility = base_utility;
    std::vector<const std::string*> taken;
    double cost = engine.route_for(mask).cost;
    for (const BranchItem& item : branch) {
      uint64_t trial = mask | item.mask;
      const RouteResult& res = engine.route_for(trial);
      if (res.feasible && utility + item.utility - res.cost > utility - cost + kObjEps) {
        mask = trial;
        utility += item.utility;
        cost = res.cost;
        taken.push_back(item.id);
      }
    }
    offer(utility - cost, mask, taken);
  }

  // Depth-first branch and bound, accept branch first.
  std::vector<double> tail_utility(branch.size() + 1, 0.0);
  for (size_t i = branch.size(); i-- > 0;)
    tail_utility[i] = tail_utility[i + 1] + branch[i].utility;

  std::vector<const std::string*> taken;
  auto dfs = [&](auto&& self, size_t idx, uint64_t mask, double utility) -> void {
    const RouteResult& here = engine.route_for(mask);
    double bound = utility + tail_utility[idx] - here.cost;
    if (incumbent.valid && bound < incumbent.objective - kObjEps) return;
    if (idx == branch.size()) {
      offer(utility - here.cost, mask, taken);
      return;
    }
    const BranchItem& item = branch[idx];
    uint64_t with = mask | item.mask;
    if (engine.route_for(with).feasible) {
      taken.push_back(item.id);
      self(self, idx + 1, with, utility + item.utility);
      taken.pop_back();
    }
    self(self, idx + 1, mask, utility);
  };
  dfs(dfs, 0, base_mask, base_utility);

  FullInfoSolution solution;
  solution.accepted = incumbent.ids;
  solution.objective = incumbent.objective;
  solution.route = engine.route_for(incumbent.req_mask).plan;
  return solution;
}

FullInfoSolution full_info_solve(const Network& network,
                                 std::span<const Request> requests) {
  auto result = full_info_solve_with(network, requests, {});
  if (!result)
    throw std::logic_error(
        "full_info_solve: empty acceptance infeasible; instance not validated");
  return *result;
}

}  // namespace das
