#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"

namespace das {

using Json = nlohmann::ordered_json;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(const Point& a, const Point& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

enum class StopKind : uint8_t { compulsory, optional_stop };

// Segment indices h are 1-based throughout: compulsory stops carry
// h = 1..n+1, optional stops the index of the segment they belong to
// (h = 1..n). This mirrors the instance schema.
struct Stop {
  std::string id;
  Point pos;
  StopKind kind = StopKind::optional_stop;
  int segment = 0;
};

struct Arc {
  int from = -1;  // stop index
  int to = -1;
  double cost = 0.0;    // currency units
  double time_s = 0.0;  // seconds, service time at the tail folded in
};

struct TimeWindow {
  double open_s = 0.0;
  double close_s = 0.0;
};

// A bus line as a directed graph: a chain of compulsory stops with time
// windows, and per-segment optional stops connected by arcs that never cross
// segment boundaries except through the shared compulsory endpoints.
class Network {
 public:
  Network() = default;
  Network(std::vector<Stop> stops, std::vector<Arc> arcs,
          std::vector<TimeWindow> windows);

  const std::vector<Stop>& stops() const { return stops_; }
  const std::vector<Arc>& arcs() const { return arcs_; }

  // Number of segments n; compulsory stops are h = 1..n+1.
  int segment_count() const { return segment_count_; }

  // Stop index of compulsory stop f_h, or -1 if missing.
  int compulsory(int h) const {
    return (h >= 1 && h < static_cast<int>(compulsory_.size())) ? compulsory_[h]
                                                                : -1;
  }

  const std::vector<int>& optionals_in_segment(int h) const {
    return segment_optionals_[h];
  }

  // Window for compulsory stop h. Valid for h = 1..n+1.
  const TimeWindow& window(int h) const { return windows_[h]; }

  int stop_index(const std::string& id) const {
    auto it = index_.find(id);
    return it == index_.end() ? -1 : it->second;
  }

  // Arc index for (from,to), or -1 when absent.
  int arc_index(int from, int to) const;
  bool has_arc(int from, int to) const { return arc_index(from, to) >= 0; }
  double arc_cost(int from, int to) const { return arcs_[arc_index(from, to)].cost; }
  double arc_time(int from, int to) const { return arcs_[arc_index(from, to)].time_s; }

  bool is_compulsory(int stop) const {
    return stops_[stop].kind == StopKind::compulsory;
  }

  // Cost / duration of the compulsory-only chain f_1 -> ... -> f_{n+1}.
  // Requires the direct arcs to exist (a validated invariant).
  double direct_cost() const;
  double direct_time(int h) const {  // f_h -> f_{h+1}
    return arc_time(compulsory(h), compulsory(h + 1));
  }

 private:
  std::vector<Stop> stops_;
  std::vector<Arc> arcs_;
  std::vector<TimeWindow> windows_;               // [1..n+1], slot 0 unused
  std::vector<int> compulsory_;                   // [1..n+1] -> stop index
  std::vector<std::vector<int>> segment_optionals_;  // [1..n] -> stop indices
  std::unordered_map<std::string, int> index_;
  std::unordered_map<uint64_t, int> arc_lookup_;
  int segment_count_ = 0;
};

struct Request {
  std::string id;
  std::vector<std::string> pickup_stops;   // s(r), sorted, unique
  std::vector<std::string> dropoff_stops;  // d(r), sorted, unique
  double utility = 0.0;                    // u(r) > 0
  double request_time_s = 0.0;
};

struct Instance {
  Network network;
  std::vector<Request> requests;  // sorted by request_time
  double horizon_end_s = 0.0;     // strictly before the first window opens
  Json demand_model;              // opaque generator block, may be null
};

// One decision epoch of the request stream: what has been accepted so far and
// the request now awaiting a decision.
struct SystemState {
  std::vector<Request> accepted;
  Request pending;
  int decision_index = 0;  // theta
};

// Per-segment visit orders plus departure times from the compulsory stops.
struct RoutePlan {
  std::vector<std::vector<std::string>> segment_visits;  // [1..n], slot 0 empty
  std::vector<double> departure_times;                   // [1..n+1], slot 0 = 0
  double total_cost = 0.0;
};

struct Violation {
  std::string code;
  std::string entity;
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

// Checks every structural invariant; violations are data, not failures.
ValidationReport validate(const Instance& instance);

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public std::runtime_error {
 public:
  ValidationError(const std::string& msg, ValidationReport report)
      : std::runtime_error(msg), report(std::move(report)) {}
  ValidationReport report;
};

// Sorted copy helpers used when constructing requests.
std::vector<std::string> sorted_unique(std::vector<std::string> ids);

}  // namespace das
