#include <algorithm>
#include <cmath>
#include <set>

#include "das/routing.hpp"
#include "das/rng.hpp"
#include "doctest.h"
#include "oracle.hpp"
#include "testutil.hpp"

using namespace das;
using testutil::net_from;
using testutil::req;

namespace {

// 1 segment, two optional stops, explicit metric-ish numbers.
Network one_segment_net() {
  return net_from(
      {{"f1", {0, 0}, StopKind::compulsory, 1},
       {"f2", {1000, 0}, StopKind::compulsory, 2},
       {"v", {400, 300}, StopKind::optional_stop, 1},
       {"w", {700, -300}, StopKind::optional_stop, 1}},
      {{"f1", "f2", 1000.0, 135.0},
       {"f1", "v", 500.0, 75.0},
       {"v", "f2", 670.0, 95.0},
       {"f1", "w", 760.0, 105.0},
       {"w", "f2", 420.0, 65.0},
       {"v", "w", 670.0, 95.0},
       {"w", "v", 670.0, 95.0}},
      {{11000, 11100}, {11150, 11400}});
}

// Literal checks of the plan contract: coverage per request, elementary
// visits, chained times, and window membership.
void check_plan(const Network& net, std::span<const Request> accepted,
                const RoutePlan& plan) {
  const int n = net.segment_count();
  REQUIRE(plan.segment_visits.size() == static_cast<size_t>(n + 1));
  REQUIRE(plan.departure_times.size() == static_cast<size_t>(n + 2));

  std::set<std::string> visited;
  for (int h = 1; h <= n + 1; ++h) visited.insert("f" + std::to_string(h));
  for (int h = 1; h <= n; ++h) {
    std::set<std::string> in_segment;
    for (const auto& sid : plan.segment_visits[h]) {
      int idx = net.stop_index(sid);
      REQUIRE(idx >= 0);
      CHECK(net.stops()[idx].segment == h);
      CHECK(!net.is_compulsory(idx));
      CHECK(in_segment.insert(sid).second);  // elementary: no repeats
      visited.insert(sid);
    }
  }
  for (const Request& r : accepted) {
    bool pick = std::any_of(r.pickup_stops.begin(), r.pickup_stops.end(),
                            [&](const std::string& s) { return visited.count(s); });
    bool drop = std::any_of(r.dropoff_stops.begin(), r.dropoff_stops.end(),
                            [&](const std::string& s) { return visited.count(s); });
    CHECK(pick);
    CHECK(drop);
  }

  double cost = 0.0;
  for (int h = 1; h <= n; ++h) {
    int prev = net.compulsory(h);
    double duration = 0.0;
    for (const auto& sid : plan.segment_visits[h]) {
      int idx = net.stop_index(sid);
      REQUIRE(net.has_arc(prev, idx));
      cost += net.arc_cost(prev, idx);
      duration += net.arc_time(prev, idx);
      prev = idx;
    }
    REQUIRE(net.has_arc(prev, net.compulsory(h + 1)));
    cost += net.arc_cost(prev, net.compulsory(h + 1));
    duration += net.arc_time(prev, net.compulsory(h + 1));
    CHECK(plan.departure_times[h] + duration <= plan.departure_times[h + 1] + 1e-9);
  }
  for (int h = 1; h <= n + 1; ++h) {
    CHECK(plan.departure_times[h] >= net.window(h).open_s - 1e-9);
    CHECK(plan.departure_times[h] <= net.window(h).close_s + 1e-9);
  }
  CHECK(plan.total_cost == doctest::Approx(cost).epsilon(1e-12));
}

Network random_full_segment(uint64_t seed, int optionals) {
  // One segment, complete arc set, arbitrary positive costs and times
  // (not necessarily metric).
  Rng rng(seed);
  std::vector<Stop> stops = {{"f1", {0, 0}, StopKind::compulsory, 1},
                             {"f2", {1000, 0}, StopKind::compulsory, 2}};
  for (int i = 0; i < optionals; ++i)
    stops.push_back({"o" + std::to_string(i + 1), {0, 0}, StopKind::optional_stop, 1});
  std::vector<std::tuple<std::string, std::string, double, double>> arcs;
  auto add = [&](const std::string& a, const std::string& b) {
    arcs.emplace_back(a, b, std::round(rng.uniform(1.0, 100.0) * 10) / 10,
                      std::round(rng.uniform(1.0, 100.0) * 10) / 10);
  };
  add("f1", "f2");
  for (int i = 0; i < optionals; ++i) {
    std::string v = "o" + std::to_string(i + 1);
    add("f1", v);
    add(v, "f2");
    for (int j = 0; j < optionals; ++j)
      if (i != j) add(v, "o" + std::to_string(j + 1));
  }
  return net_from(stops, arcs, {{0, 1e7}, {0, 1e7}});
}

}  // namespace

TEST_SUITE("routing") {

TEST_CASE("segment labels: no candidates means the direct arc only") {
  Network net = one_segment_net();
  auto labels = segment_labels(net, 1, {});
  REQUIRE(labels.size() == 1);
  CHECK(labels[0].visited.empty());
  CHECK(labels[0].cost == doctest::Approx(1000.0));
  CHECK(labels[0].duration_s == doctest::Approx(135.0));
}

TEST_CASE("segment labels: single optional stop") {
  Network net = one_segment_net();
  int v = net.stop_index("v");
  auto labels = segment_labels(net, 1, {v});
  REQUIRE(labels.size() == 2);
  const SegmentLabel* with_v = nullptr;
  for (const auto& l : labels)
    if (!l.visited.empty()) with_v = &l;
  REQUIRE(with_v != nullptr);
  CHECK(with_v->cost == doctest::Approx(500.0 + 670.0));
  CHECK(with_v->duration_s == doctest::Approx(75.0 + 95.0));
  CHECK(with_v->order == std::vector<int>{v});
}

TEST_CASE("segment labels match the exhaustive frontier on random data") {
  for (uint64_t seed = 1; seed <= 50; ++seed) {
    Network net = random_full_segment(seed, 3);
    std::vector<int> cand = {net.stop_index("o1"), net.stop_index("o2"),
                             net.stop_index("o3")};
    auto labels = segment_labels(net, 1, cand);
    auto paths = oracle::enumerate_segment_paths(net, 1, cand);

    // Group oracle paths by visited subset and reduce to the Pareto set.
    std::map<std::vector<int>, std::vector<std::pair<double, double>>> frontier;
    for (const auto& p : paths) {
      auto key = p.order;
      std::sort(key.begin(), key.end());
      auto& front = frontier[key];
      bool dominated = false;
      for (auto [c, d] : front)
        if (c <= p.cost && d <= p.duration) dominated = true;
      if (dominated) continue;
      std::erase_if(front, [&](auto e) {
        return p.cost <= e.first && p.duration <= e.second;
      });
      front.emplace_back(p.cost, p.duration);
    }

    std::map<std::vector<int>, std::vector<std::pair<double, double>>> got;
    for (const auto& l : labels) got[l.visited].emplace_back(l.cost, l.duration_s);

    REQUIRE(got.size() == frontier.size());
    for (auto& [subset, expect] : frontier) {
      REQUIRE(got.count(subset));
      auto have = got[subset];
      std::sort(expect.begin(), expect.end());
      std::sort(have.begin(), have.end());
      REQUIRE(have.size() == expect.size());
      for (size_t i = 0; i < have.size(); ++i) {
        CHECK(have[i].first == doctest::Approx(expect[i].first).epsilon(1e-12));
        CHECK(have[i].second == doctest::Approx(expect[i].second).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("optimal route with nothing accepted is the earliest direct chain") {
  auto instance = testutil::random_micro_instance(11);
  const Network& net = instance.network;
  auto plan = optimal_route(net, {});
  REQUIRE(plan.has_value());
  double direct = 0.0;
  double t = net.window(1).open_s;
  CHECK(plan->departure_times[1] == doctest::Approx(t));
  for (int h = 1; h <= net.segment_count(); ++h) {
    CHECK(plan->segment_visits[h].empty());
    direct += net.arc_cost(net.compulsory(h), net.compulsory(h + 1));
    t = std::max(net.window(h + 1).open_s, t + net.direct_time(h));
    CHECK(plan->departure_times[h + 1] == doctest::Approx(t));
  }
  CHECK(plan->total_cost == doctest::Approx(direct));
}

TEST_CASE("single optional pickup detour prices as direct minus leg plus detour") {
  Network net = one_segment_net();
  Request r = req("r0", {"v"}, {"f2"}, 750, 0);
  std::vector<Request> accepted = {r};
  auto plan = optimal_route(net, accepted);
  REQUIRE(plan.has_value());
  CHECK(plan->total_cost ==
        doctest::Approx(1000.0 - 1000.0 + 500.0 + 670.0));
  CHECK(plan->segment_visits[1] == std::vector<std::string>{"v"});
  check_plan(net, accepted, *plan);
}

TEST_CASE("optimal route equals exhaustive enumeration on random micro instances") {
  testutil::MicroOptions opt;
  opt.min_segments = 3;
  opt.max_segments = 3;
  opt.min_requests = 4;
  opt.max_requests = 4;
  int feasible_count = 0;
  for (uint64_t seed = 1; seed <= 50; ++seed) {
    auto instance = testutil::random_micro_instance(seed, opt);
    auto expect = oracle::best_route(instance.network, instance.requests);
    auto got = optimal_route(instance.network, instance.requests);
    INFO("seed ", seed);
    REQUIRE(got.has_value() == expect.feasible);
    if (expect.feasible) {
      ++feasible_count;
      CHECK(got->total_cost == doctest::Approx(expect.cost).epsilon(1e-12));
      check_plan(instance.network, instance.requests, *got);
    }
  }
  CHECK(feasible_count > 10);
}

TEST_CASE("feasibility: empty set always, oversized detour never") {
  Network net = net_from(
      {{"f1", {0, 0}, StopKind::compulsory, 1},
       {"f2", {1000, 0}, StopKind::compulsory, 2},
       {"far", {500, 4000}, StopKind::optional_stop, 1}},
      {{"f1", "f2", 1000.0, 135.0},
       {"f1", "far", 4030.0, 500.0},
       {"far", "f2", 4030.0, 500.0}},
      {{11000, 11100}, {11150, 11400}});
  CHECK(is_feasible(net, {}));
  std::vector<Request> accepted = {req("r0", {"far"}, {"f2"}, 750, 0)};
  // 500 + 500 = 1000s through the detour but the last window closes 400s
  // after the first opens.
  CHECK_FALSE(is_feasible(net, accepted));

  for (uint64_t seed = 100; seed < 140; ++seed) {
    auto instance = testutil::random_micro_instance(seed);
    CHECK(is_feasible(instance.network, instance.requests) ==
          oracle::best_route(instance.network, instance.requests).feasible);
  }
}

TEST_CASE("full information solve: no requests yields minus the direct cost") {
  auto instance = testutil::random_micro_instance(3);
  auto solution = full_info_solve(instance.network, {});
  CHECK(solution.accepted.empty());
  CHECK(solution.objective == doctest::Approx(-instance.network.direct_cost()));
}

TEST_CASE("full information solve: utility 750 versus detour cost 200") {
  Network net = net_from(
      {{"f1", {0, 0}, StopKind::compulsory, 1},
       {"f2", {1000, 0}, StopKind::compulsory, 2},
       {"v", {500, 100}, StopKind::optional_stop, 1}},
      {{"f1", "f2", 1000.0, 135.0},
       {"f1", "v", 550.0, 80.0},
       {"v", "f2", 650.0, 95.0}},
      {{11000, 11100}, {11150, 11400}});
  std::vector<Request> requests = {req("r0", {"v"}, {"f2"}, 750, 0)};
  auto solution = full_info_solve(net, requests);
  CHECK(solution.accepted == std::vector<std::string>{"r0"});
  CHECK(solution.objective == doctest::Approx(750.0 - (1000.0 + 200.0)));
}

TEST_CASE("full information solve equals the exhaustive oracle") {
  for (uint64_t seed = 1; seed <= 100; ++seed) {
    auto instance = testutil::random_micro_instance(seed);
    auto expect = oracle::best_full_info(instance.network, instance.requests);
    auto got = full_info_solve(instance.network, instance.requests);
    REQUIRE(expect.has_value());
    INFO("seed ", seed);
    CHECK(std::abs(got.objective - expect->objective) <= 1e-9);
    CHECK(got.accepted == expect->accepted);
    std::vector<Request> accepted;
    for (const auto& r : instance.requests)
      if (std::binary_search(got.accepted.begin(), got.accepted.end(), r.id))
        accepted.push_back(r);
    check_plan(instance.network, accepted, got.route);
  }
}

TEST_CASE("fixed decisions pin acceptance") {
  Network net = one_segment_net();
  std::vector<Request> requests = {req("ra", {"v"}, {"f2"}, 750, 0),
                                   req("rb", {"w"}, {"f2"}, 40, 10)};
  FixedDecisions fixed{{"rb", true}};
  SolveOptions options;
  options.fixed = &fixed;
  auto solution = full_info_solve_with(net, requests, options);
  REQUIRE(solution.has_value());
  CHECK(std::binary_search(solution->accepted.begin(), solution->accepted.end(),
                           "rb"));
  FixedDecisions reject{{"ra", false}};
  options.fixed = &reject;
  auto rejected = full_info_solve_with(net, requests, options);
  REQUIRE(rejected.has_value());
  CHECK_FALSE(std::binary_search(rejected->accepted.begin(),
                                 rejected->accepted.end(), "ra"));
}

TEST_CASE("ties break toward fewer accepted, then smaller id set") {
  // v and w sit on opposite sides; each single detour fits the window but
  // both together do not. Utilities equal detour + 5, so {ra} and {rb} tie.
  Network net = net_from(
      {{"f1", {0, 0}, StopKind::compulsory, 1},
       {"f2", {1000, 0}, StopKind::compulsory, 2},
       {"v", {400, 300}, StopKind::optional_stop, 1},
       {"w", {600, -300}, StopKind::optional_stop, 1}},
      {{"f1", "f2", 1000.0, 120.0},
       {"f1", "v", 500.0, 75.0},
       {"v", "f2", 670.0, 95.0},
       {"f1", "w", 670.0, 95.0},
       {"w", "f2", 500.0, 75.0},
       {"v", "w", 640.0, 90.0},
       {"w", "v", 640.0, 90.0}},
      {{11000, 11010}, {11170, 11180}});
  // Direct: 120s fits (11000 + 120 <= 11180). Single detour: 170s fits
  // barely (11000 + 170 = 11170). Both: f1->v->w->f2 = 240s misses.
  double detour = 500.0 + 670.0 - 1000.0;
  std::vector<Request> requests = {req("ra", {"v"}, {"f2"}, detour + 5, 0),
                                   req("rb", {"w"}, {"f2"}, detour + 5, 10)};
  auto solution = full_info_solve(net, requests);
  CHECK(solution.accepted == std::vector<std::string>{"ra"});
  CHECK(solution.objective == doctest::Approx(-1000.0 + 5.0));

  // With utilities exactly at the detour cost every choice ties at the
  // direct cost; the empty set has the fewest accepted.
  std::vector<Request> exact = {req("ra", {"v"}, {"f2"}, detour, 0),
                                req("rb", {"w"}, {"f2"}, detour, 10)};
  auto empty = full_info_solve(net, exact);
  CHECK(empty.accepted.empty());
}

TEST_CASE("coverage relaxation: dropping a request never raises the cost") {
  for (uint64_t seed = 200; seed < 240; ++seed) {
    auto instance = testutil::random_micro_instance(seed);
    auto full = optimal_route(instance.network, instance.requests);
    if (!full) continue;
    for (size_t drop = 0; drop < instance.requests.size(); ++drop) {
      std::vector<Request> fewer;
      for (size_t i = 0; i < instance.requests.size(); ++i)
        if (i != drop) fewer.push_back(instance.requests[i]);
      auto plan = optimal_route(instance.network, fewer);
      REQUIRE(plan.has_value());
      CHECK(plan->total_cost <= full->total_cost + 1e-9);
    }
  }
}

TEST_CASE("full information dominates the myopic acceptance sequence") {
  for (uint64_t seed = 300; seed < 340; ++seed) {
    auto instance = testutil::random_micro_instance(seed);
    const Network& net = instance.network;
    std::vector<Request> taken;
    double utility = 0.0;
    auto objective = [&](const std::vector<Request>& s) {
      auto plan = optimal_route(net, s);
      return plan ? std::optional<double>(utility - plan->total_cost) : std::nullopt;
    };
    double current = -net.direct_cost();
    for (const Request& r : instance.requests) {
      taken.push_back(r);
      utility += r.utility;
      auto with = objective(taken);
      if (with && *with > current + 1e-9) {
        current = *with;
      } else {
        taken.pop_back();
        utility -= r.utility;
      }
    }
    auto best = full_info_solve(net, instance.requests);
    CHECK(best.objective >= current - 1e-9);
  }
}

}  // TEST_SUITE
