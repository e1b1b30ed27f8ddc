#include "das/core.hpp"

#include <algorithm>
#include <sstream>

namespace das {

namespace {

uint64_t arc_key(int from, int to) {
  return (static_cast<uint64_t>(static_cast<uint32_t>(from)) << 32) |
         static_cast<uint32_t>(to);
}

}  // namespace

Network::Network(std::vector<Stop> stops, std::vector<Arc> arcs,
                 std::vector<TimeWindow> windows)
    : stops_(std::move(stops)), arcs_(std::move(arcs)) {
  int max_h = 0;
  for (const auto& s : stops_) {
    if (s.kind == StopKind::compulsory) max_h = std::max(max_h, s.segment);
  }
  segment_count_ = std::max(0, max_h - 1);

  compulsory_.assign(static_cast<size_t>(max_h) + 1, -1);
  segment_optionals_.assign(static_cast<size_t>(segment_count_) + 1, {});
  for (int i = 0; i < static_cast<int>(stops_.size()); ++i) {
    const Stop& s = stops_[i];
    index_.emplace(s.id, i);
    if (s.kind == StopKind::compulsory) {
      if (s.segment >= 1 && s.segment <= max_h && compulsory_[s.segment] < 0)
        compulsory_[s.segment] = i;
    } else if (s.segment >= 1 && s.segment <= segment_count_) {
      segment_optionals_[s.segment].push_back(i);
    }
  }

  for (int i = 0; i < static_cast<int>(arcs_.size()); ++i)
    arc_lookup_.emplace(arc_key(arcs_[i].from, arcs_[i].to), i);

  // Windows indexed by h; tolerate short input (validation reports it).
  windows_.assign(static_cast<size_t>(max_h) + 1, TimeWindow{});
  for (size_t h = 0; h < windows.size() && h + 1 < windows_.size(); ++h)
    windows_[h + 1] = windows[h];
}

int Network::arc_index(int from, int to) const {
  auto it = arc_lookup_.find(arc_key(from, to));
  return it == arc_lookup_.end() ? -1 : it->second;
}

double Network::direct_cost() const {
  double c = 0.0;
  for (int h = 1; h <= segment_count_; ++h)
    c += arc_cost(compulsory(h), compulsory(h + 1));
  return c;
}

std::vector<std::string> sorted_unique(std::vector<std::string> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  for (const auto& v : violations)
    os << v.code << " [" << v.entity << "]: " << v.detail << "\n";
  return os.str();
}

namespace {

void add(ValidationReport& r, std::string code, std::string entity,
         std::string detail) {
  r.violations.push_back({std::move(code), std::move(entity), std::move(detail)});
}

}  // namespace

ValidationReport validate(const Instance& instance) {
  ValidationReport report;
  const Network& net = instance.network;
  const auto& stops = net.stops();

  // Unique ids.
  {
    std::unordered_map<std::string, int> seen;
    for (const auto& s : stops) {
      if (!seen.emplace(s.id, 1).second)
        add(report, "duplicate-stop-id", s.id, "stop id appears more than once");
    }
  }

  // Compulsory stops must form the contiguous chain 1..n+1.
  int max_h = 0;
  std::unordered_map<int, int> comp_count;
  for (const auto& s : stops) {
    if (s.kind == StopKind::compulsory) {
      comp_count[s.segment]++;
      max_h = std::max(max_h, s.segment);
    }
  }
  if (max_h < 2) {
    add(report, "compulsory-chain", "network",
        "need at least two compulsory stops (h = 1..n+1)");
  } else {
    for (int h = 1; h <= max_h; ++h) {
      auto it = comp_count.find(h);
      if (it == comp_count.end())
        add(report, "compulsory-chain", "h=" + std::to_string(h),
            "missing compulsory stop in chain 1..n+1");
      else if (it->second > 1)
        add(report, "compulsory-chain", "h=" + std::to_string(h),
            "more than one compulsory stop with this index");
    }
  }
  const int n = max_h - 1;

  for (const auto& s : stops) {
    if (s.kind == StopKind::optional_stop && (s.segment < 1 || s.segment > n))
      add(report, "optional-segment-range", s.id,
          "optional stop segment index outside 1..n");
  }

  // Arcs: endpoints exist implicitly (indices), strictly positive weights,
  // and segment-local structure (out of f_h into segment h, into f_{h+1}).
  for (const auto& a : net.arcs()) {
    if (a.from < 0 || a.from >= static_cast<int>(stops.size()) || a.to < 0 ||
        a.to >= static_cast<int>(stops.size())) {
      add(report, "arc-endpoint", "arc", "arc references unknown stop");
      continue;
    }
    const Stop& from = stops[a.from];
    const Stop& to = stops[a.to];
    std::string ent = from.id + "->" + to.id;
    if (!(a.cost > 0.0))
      add(report, "arc-cost-positive", ent, "arc costs strictly positive");
    if (!(a.time_s > 0.0))
      add(report, "arc-time-positive", ent, "arc times strictly positive");
    if (a.from == a.to) {
      add(report, "arc-self-loop", ent, "self loops are not allowed");
      continue;
    }
    // Hosting segment: tail is f_h or in F_h, head in F_h or f_{h+1}. Arcs out
    // of f_h belong to segment h, arcs into f_h to segment h-1.
    int h_tail = from.segment;
    int h_head = to.kind == StopKind::compulsory ? to.segment - 1 : to.segment;
    if (h_tail != h_head)
      add(report, "arc-crosses-segments", ent,
          "arc must stay within one segment (compulsory endpoints shared)");
  }

  // Windows ordered, direct arcs present, chained direct schedule feasible.
  bool windows_ok = report.ok();
  for (int h = 1; h <= max_h && n >= 1; ++h) {
    const auto& w = net.window(h);
    if (w.open_s > w.close_s)
      add(report, "window-order", "h=" + std::to_string(h),
          "window must satisfy a_h <= b_h");
  }
  bool direct_ok = true;
  for (int h = 1; h <= n; ++h) {
    int fh = net.compulsory(h);
    int fh1 = net.compulsory(h + 1);
    if (fh < 0 || fh1 < 0 || !net.has_arc(fh, fh1)) {
      add(report, "direct-arc-missing", "h=" + std::to_string(h),
          "direct compulsory arc f_h -> f_{h+1} must exist");
      direct_ok = false;
    }
  }
  if (direct_ok && windows_ok && n >= 1) {
    // Earliest departure chain of the compulsory-only route; serving nobody
    // must always be feasible.
    double t = net.window(1).open_s;
    for (int h = 1; h <= max_h; ++h) {
      t = std::max(t, net.window(h).open_s);
      if (t > net.window(h).close_s + 1e-9) {
        add(report, "window-chain-infeasible", "h=" + std::to_string(h),
            "direct route cannot meet this window from the earliest schedule");
        break;
      }
      if (h <= n) t += net.direct_time(h);
    }
  }

  // Requests.
  if (!(instance.horizon_end_s < net.window(1).open_s) && n >= 1 && windows_ok)
    add(report, "horizon-before-start", "instance",
        "horizon_end_s must be strictly before a_1");
  double prev_time = -1.0;
  for (const auto& r : instance.requests) {
    auto check_side = [&](const std::vector<std::string>& side, const char* name) {
      if (side.empty())
        add(report, "request-stops-empty", r.id,
            std::string(name) + " stop set must be non-empty");
      for (const auto& sid : side)
        if (net.stop_index(sid) < 0)
          add(report, "request-unknown-stop", r.id,
              std::string(name) + " references unknown stop " + sid);
    };
    check_side(r.pickup_stops, "pickup");
    check_side(r.dropoff_stops, "dropoff");
    if (!(r.utility > 0.0))
      add(report, "request-utility-positive", r.id, "utility must be > 0");
    if (r.request_time_s < 0.0 || r.request_time_s >= instance.horizon_end_s)
      add(report, "request-time-range", r.id,
          "request time must lie in [0, horizon_end)");
    if (r.request_time_s < prev_time)
      add(report, "requests-unsorted", r.id,
          "requests must be sorted by request time");
    prev_time = std::max(prev_time, r.request_time_s);

    // Optional pickup segments strictly precede optional dropoff segments.
    int max_pick = 0, min_drop = n + 1;
    bool have_opt_pick = false, have_opt_drop = false;
    for (const auto& sid : r.pickup_stops) {
      int idx = net.stop_index(sid);
      if (idx >= 0 && !net.is_compulsory(idx)) {
        have_opt_pick = true;
        max_pick = std::max(max_pick, stops[idx].segment);
      }
    }
    for (const auto& sid : r.dropoff_stops) {
      int idx = net.stop_index(sid);
      if (idx >= 0 && !net.is_compulsory(idx)) {
        have_opt_drop = true;
        min_drop = std::min(min_drop, stops[idx].segment);
      }
    }
    if (have_opt_pick && have_opt_drop && !(max_pick < min_drop))
      add(report, "request-segment-order", r.id,
          "optional pickup segment must precede optional dropoff segment");
  }

  return report;
}

}  // namespace das
