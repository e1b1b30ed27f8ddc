#include "das/simulator.hpp"

#include <algorithm>
#include <cmath>

namespace das {

EpisodeResult run_episode(const Instance& instance, PolicyKind policy,
                          int k_scenarios, const ScenarioSampler& sampler,
                          EvalMode mode) {
  const Network& net = instance.network;
  std::vector<Request> stream = instance.requests;
  std::sort(stream.begin(), stream.end(), [](const Request& a, const Request& b) {
    if (a.request_time_s != b.request_time_s) return a.request_time_s < b.request_time_s;
    return a.id < b.id;
  });

  EpisodeResult episode;
  episode.total_requests = static_cast<int>(stream.size());

  std::vector<Request> accepted;
  double accepted_utility = 0.0;
  int theta = 0;
  for (const Request& pending : stream) {
    ++theta;
    SystemState state{accepted, pending, theta};

    std::vector<Request> with(accepted);
    with.push_back(pending);
    DecisionRecord record;
    if (!is_feasible(net, with)) {
      record.decision = Decision::reject;
      record.forced = true;
    } else if (policy == PolicyKind::myopic) {
      record = decide_myopic(net, state);
    } else {
      ScenarioSet scenarios = sampler(state, k_scenarios);
      record = policy == PolicyKind::twossp
                   ? decide_2ssp(net, state, scenarios, mode)
                   : decide_consensus(net, state, scenarios, mode);
    }

    if (record.decision == Decision::accept) {
      accepted.push_back(pending);
      accepted_utility += pending.utility;
    }
    double epoch_max = 0.0;
    for (double w : record.wall_times_s) {
      episode.serial_time_s += w;
      epoch_max = std::max(epoch_max, w);
    }
    episode.parallel_time_lb_s += epoch_max;
    episode.decisions.push_back(std::move(record));
  }

  auto route = optimal_route(net, accepted);
  if (!route)
    throw std::logic_error("run_episode: accepted set became infeasible");
  episode.final_route = std::move(*route);
  episode.profit = accepted_utility - episode.final_route.total_cost;
  episode.served = static_cast<int>(accepted.size());
  episode.served_fraction =
      stream.empty() ? 0.0 : static_cast<double>(episode.served) / stream.size();
  for (const auto& r : accepted) episode.accepted_ids.push_back(r.id);
  std::sort(episode.accepted_ids.begin(), episode.accepted_ids.end());
  return episode;
}

double full_info_bound(const Instance& instance) {
  return full_info_solve(instance.network, instance.requests).objective;
}

GapResult optimality_gap(double policy_value, double bound_value) {
  if (bound_value > 0.0) return {true, 1.0 - policy_value / bound_value};
  return {false, std::abs(bound_value - policy_value)};
}

namespace {

struct BellmanOracle {
  const Network& net;
  int budget;

  double continuation(const std::vector<Request>& accepted,
                      const std::vector<ArrivalNode>& children) {
    if (children.empty()) {
      auto route = optimal_route(net, accepted);
      if (!route)
        throw std::logic_error("arrival tree reached an infeasible accepted set");
      return -route->total_cost;
    }
    double value = 0.0;
    for (const ArrivalNode& child : children)
      value += child.probability * visit(child, accepted);
    return value;
  }

  double visit(const ArrivalNode& node, const std::vector<Request>& accepted) {
    if (--budget < 0)
      throw std::invalid_argument("brute_force_policy_value: node budget exceeded");
    double best = continuation(accepted, node.children);  // reject
    std::vector<Request> with(accepted);
    with.push_back(node.request);
    if (is_feasible(net, with))
      best = std::max(best, node.request.utility + continuation(with, node.children));
    return best;
  }
};

}  // namespace

double brute_force_policy_value(const Network& network, const ArrivalTree& tree,
                                int max_nodes) {
  BellmanOracle oracle{network, max_nodes};
  std::vector<Request> none;
  if (tree.roots.empty()) return oracle.continuation(none, tree.roots);
  double value = 0.0;
  for (const ArrivalNode& root : tree.roots)
    value += root.probability * oracle.visit(root, none);
  return value;
}

Json episode_to_json(const EpisodeResult& episode) {
  Json decisions = Json::array();
  for (const auto& d : episode.decisions) {
    Json jd;
    jd["decision"] = d.decision == Decision::accept ? "accept" : "reject";
    jd["forced"] = d.forced;
    if (d.q_accept)
      jd["q_accept"] = *d.q_accept ? Json(**d.q_accept) : Json(nullptr);
    if (d.q_reject)
      jd["q_reject"] = *d.q_reject ? Json(**d.q_reject) : Json(nullptr);
    if (!d.votes.empty()) jd["votes"] = d.votes;
    jd["wall_times_s"] = d.wall_times_s;
    decisions.push_back(std::move(jd));
  }
  Json route;
  Json visits = Json::array();
  for (size_t h = 1; h < episode.final_route.segment_visits.size(); ++h)
    visits.push_back(episode.final_route.segment_visits[h]);
  Json times = Json::array();
  for (size_t h = 1; h < episode.final_route.departure_times.size(); ++h)
    times.push_back(episode.final_route.departure_times[h]);
  route["segment_visits"] = std::move(visits);
  route["departure_times_s"] = std::move(times);
  route["total_cost"] = episode.final_route.total_cost;

  return Json{{"decisions", std::move(decisions)},
              {"accepted", episode.accepted_ids},
              {"final_route", std::move(route)},
              {"profit", episode.profit},
              {"served", episode.served},
              {"total_requests", episode.total_requests},
              {"served_fraction", episode.served_fraction},
              {"serial_time_s", episode.serial_time_s},
              {"parallel_time_lb_s", episode.parallel_time_lb_s}};
}

}  // namespace das
