#pragma once

#include <string>
#include <tuple>
#include <vector>

#include "das/core.hpp"
#include "das/rng.hpp"

namespace testutil {

// Hand-built network from id-based arcs: (from, to, cost, time_s).
inline das::Network net_from(
    std::vector<das::Stop> stops,
    const std::vector<std::tuple<std::string, std::string, double, double>>& arcs,
    std::vector<das::TimeWindow> windows) {
  std::vector<das::Arc> built;
  auto index = [&](const std::string& id) {
    for (size_t i = 0; i < stops.size(); ++i)
      if (stops[i].id == id) return static_cast<int>(i);
    throw std::invalid_argument("net_from: unknown stop " + id);
  };
  for (const auto& [from, to, cost, time] : arcs)
    built.push_back({index(from), index(to), cost, time});
  return das::Network(std::move(stops), std::move(built), std::move(windows));
}

inline das::Request req(std::string id, std::vector<std::string> pickup,
                        std::vector<std::string> dropoff, double utility,
                        double time = 0.0) {
  das::Request r;
  r.id = std::move(id);
  r.pickup_stops = das::sorted_unique(std::move(pickup));
  r.dropoff_stops = das::sorted_unique(std::move(dropoff));
  r.utility = utility;
  r.request_time_s = time;
  return r;
}

struct MicroOptions {
  int min_segments = 1;
  int max_segments = 3;
  int max_optionals_per_segment = 2;
  int min_requests = 0;
  int max_requests = 6;
  bool uniform_utility = false;  // true -> every utility is 750
};

// Random tiny instance: Euclidean (hence metric) arc data, windows with
// random slack so that some detours are infeasible, requests honoring the
// segment-order invariant. Validates clean by construction.
das::Instance random_micro_instance(uint64_t seed, const MicroOptions& opt = {});

}  // namespace testutil
