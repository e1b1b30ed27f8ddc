#include "das/scenario_gen.hpp"

#include <algorithm>
#include <cmath>

namespace das {

namespace {

// json field helpers with defaults.
double jnum(const Json& doc, const char* key, double fallback) {
  return doc.contains(key) && doc[key].is_number() ? doc[key].get<double>()
                                                   : fallback;
}

Point disc_point(const Point& center, double radius, Rng& rng) {
  // Rejection from the bounding square.
  for (;;) {
    double x = rng.uniform(-radius, radius);
    double y = rng.uniform(-radius, radius);
    if (x * x + y * y <= radius * radius) return {center.x + x, center.y + y};
  }
}

// Distance from p to the polyline through `points`, and the arclength of the
// closest projection (used for line-order sweeps).
struct Projection {
  double distance = 0.0;
  double arclength = 0.0;
  int chord = 0;  // index of the polyline segment containing the projection
};

Projection project_polyline(const Point& p, const std::vector<Point>& points) {
  Projection best{std::numeric_limits<double>::infinity(), 0.0, 0};
  double offset = 0.0;
  for (size_t i = 0; i + 1 < points.size(); ++i) {
    const Point& a = points[i];
    const Point& b = points[i + 1];
    double dx = b.x - a.x, dy = b.y - a.y;
    double len2 = dx * dx + dy * dy;
    double t = len2 > 0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    Point q{a.x + t * dx, a.y + t * dy};
    double d = distance(p, q);
    if (d < best.distance) {
      best.distance = d;
      best.arclength = offset + t * std::sqrt(len2);
      best.chord = static_cast<int>(i);
    }
    offset += std::sqrt(len2);
  }
  return best;
}

}  // namespace

Json GenConfig::to_json() const {
  return Json{{"seed", seed},
              {"csf", csf},
              {"walk_radius_m", walk_radius_m},
              {"map_radius_m", map_radius_m},
              {"optional_candidate_radius_m", optional_candidate_radius_m},
              {"merge_radius_m", merge_radius_m},
              {"horizon_s", horizon_s},
              {"utility", utility},
              {"line_stops", line_stops},
              {"stop_spacing_m", stop_spacing_m},
              {"corridor_jitter_m", corridor_jitter_m},
              {"intersections", intersections},
              {"total_demand", total_demand},
              {"speed_mps", speed_mps},
              {"service_time_s", service_time_s},
              {"cost_per_m", cost_per_m},
              {"window_width_s", window_width_s},
              {"slack_fraction", slack_fraction},
              {"start_lag_s", start_lag_s}};
}

GenConfig GenConfig::from_json(const Json& doc) {
  GenConfig c;
  if (doc.contains("seed")) c.seed = doc["seed"].get<uint64_t>();
  c.csf = jnum(doc, "csf", c.csf);
  c.walk_radius_m = jnum(doc, "walk_radius_m", c.walk_radius_m);
  c.map_radius_m = jnum(doc, "map_radius_m", c.map_radius_m);
  c.optional_candidate_radius_m =
      jnum(doc, "optional_candidate_radius_m", c.optional_candidate_radius_m);
  c.merge_radius_m = jnum(doc, "merge_radius_m", c.merge_radius_m);
  c.horizon_s = jnum(doc, "horizon_s", c.horizon_s);
  c.utility = jnum(doc, "utility", c.utility);
  c.line_stops = static_cast<int>(jnum(doc, "line_stops", c.line_stops));
  c.stop_spacing_m = jnum(doc, "stop_spacing_m", c.stop_spacing_m);
  c.corridor_jitter_m = jnum(doc, "corridor_jitter_m", c.corridor_jitter_m);
  c.intersections = static_cast<int>(jnum(doc, "intersections", c.intersections));
  c.total_demand = jnum(doc, "total_demand", c.total_demand);
  c.speed_mps = jnum(doc, "speed_mps", c.speed_mps);
  c.service_time_s = jnum(doc, "service_time_s", c.service_time_s);
  c.cost_per_m = jnum(doc, "cost_per_m", c.cost_per_m);
  c.window_width_s = jnum(doc, "window_width_s", c.window_width_s);
  c.slack_fraction = jnum(doc, "slack_fraction", c.slack_fraction);
  c.start_lag_s = jnum(doc, "start_lag_s", c.start_lag_s);
  return c;
}

Json GenReport::to_json() const {
  return Json{{"requests_emitted", requests_emitted},
              {"dropped_empty_side", dropped_empty_side},
              {"dropped_segment_order", dropped_segment_order},
              {"optional_candidates", optional_candidates},
              {"optional_merged_away", optional_merged_away},
              {"optional_stops", optional_stops},
              {"ipf_deviation", ipf_deviation}};
}

IpfResult ipf_fit(const std::vector<std::vector<double>>& seed,
                  const std::vector<double>& row_marginals,
                  const std::vector<double>& col_marginals, double tol,
                  int max_iter) {
  const size_t nr = row_marginals.size();
  const size_t nc = col_marginals.size();
  if (seed.size() != nr)
    throw std::invalid_argument("ipf_fit: seed row count does not match marginals");
  for (const auto& row : seed)
    if (row.size() != nc)
      throw std::invalid_argument("ipf_fit: seed column count does not match marginals");

  double row_total = 0.0, col_total = 0.0;
  for (double v : row_marginals) row_total += v;
  for (double v : col_marginals) col_total += v;
  if (std::abs(row_total - col_total) > std::max(tol, 1e-9 * std::abs(row_total)))
    throw IpfError("ipf_fit: marginal totals differ (" + std::to_string(row_total) +
                       " vs " + std::to_string(col_total) + ")",
                   std::abs(row_total - col_total));

  IpfResult result;
  result.matrix = seed;
  auto& m = result.matrix;

  auto deviation = [&]() {
    double dev = 0.0;
    for (size_t i = 0; i < nr; ++i) {
      double s = 0.0;
      for (size_t j = 0; j < nc; ++j) s += m[i][j];
      dev = std::max(dev, std::abs(s - row_marginals[i]));
    }
    for (size_t j = 0; j < nc; ++j) {
      double s = 0.0;
      for (size_t i = 0; i < nr; ++i) s += m[i][j];
      dev = std::max(dev, std::abs(s - col_marginals[j]));
    }
    return dev;
  };

  for (int it = 0; it <= max_iter; ++it) {
    result.deviation = deviation();
    if (result.deviation < tol) {
      result.iterations = it;
      return result;
    }
    if (it == max_iter) break;
    for (size_t i = 0; i < nr; ++i) {
      double s = 0.0;
      for (size_t j = 0; j < nc; ++j) s += m[i][j];
      if (s > 0.0) {
        double f = row_marginals[i] / s;
        for (size_t j = 0; j < nc; ++j) m[i][j] *= f;
      }
    }
    for (size_t j = 0; j < nc; ++j) {
      double s = 0.0;
      for (size_t i = 0; i < nr; ++i) s += m[i][j];
      if (s > 0.0) {
        double f = col_marginals[j] / s;
        for (size_t i = 0; i < nr; ++i) m[i][j] *= f;
      }
    }
    result.iterations = it + 1;
  }
  throw IpfError("ipf_fit: marginals unreachable after " + std::to_string(max_iter) +
                     " iterations (deviation " + std::to_string(result.deviation) + ")",
                 result.deviation);
}

FixedLine synth_line(const GenConfig& config, Rng rng) {
  FixedLine line;
  for (int i = 0; i < config.line_stops; ++i) {
    LineStop stop;
    stop.id = "L" + std::to_string(i + 1);
    stop.pos.x = i * config.stop_spacing_m +
                 rng.uniform(-0.15, 0.15) * config.stop_spacing_m;
    stop.pos.y = rng.uniform(-config.corridor_jitter_m, config.corridor_jitter_m);
    line.stops.push_back(stop);
  }
  double length = (config.line_stops - 1) * config.stop_spacing_m;
  for (int i = 0; i < config.intersections; ++i) {
    double along = rng.uniform(0.0, length);
    double radius = config.optional_candidate_radius_m;
    Point base{along, 0.0};
    line.candidate_intersections.push_back(disc_point(base, radius, rng));
  }
  return line;
}

Network derive_network(const FixedLine& line, const GenConfig& config,
                       GenReport* report) {
  const int m = static_cast<int>(line.stops.size());
  if (m < 2) throw std::invalid_argument("derive_network: need at least 2 line stops");

  // Endpoints compulsory; middle stops ranked by demand volume (ties keep
  // line order), top ceil(csf * (m-2)) compulsory.
  std::vector<int> middle;
  for (int i = 1; i + 1 < m; ++i) middle.push_back(i);
  std::stable_sort(middle.begin(), middle.end(), [&](int a, int b) {
    return line.stops[a].boarding + line.stops[a].alighting >
           line.stops[b].boarding + line.stops[b].alighting;
  });
  int take = static_cast<int>(std::ceil(config.csf * (m - 2)));
  take = std::clamp(take, 0, m - 2);
  std::vector<bool> compulsory(m, false);
  compulsory[0] = compulsory[m - 1] = true;
  for (int i = 0; i < take; ++i) compulsory[middle[i]] = true;

  std::vector<Point> line_points;
  for (const auto& s : line.stops) line_points.push_back(s.pos);
  std::vector<Point> chain_points;
  for (int i = 0; i < m; ++i)
    if (compulsory[i]) chain_points.push_back(line.stops[i].pos);
  const int n = static_cast<int>(chain_points.size()) - 1;

  // Optional candidates: unselected line stops plus intersections within the
  // candidate radius of the original line.
  std::vector<Point> candidates;
  for (int i = 0; i < m; ++i)
    if (!compulsory[i]) candidates.push_back(line.stops[i].pos);
  for (const Point& p : line.candidate_intersections)
    if (project_polyline(p, line_points).distance <= config.optional_candidate_radius_m)
      candidates.push_back(p);
  if (report) report->optional_candidates = static_cast<int>(candidates.size());

  // Greedy merge in line order; survivor is the running centroid.
  std::stable_sort(candidates.begin(), candidates.end(), [&](const Point& a, const Point& b) {
    return project_polyline(a, line_points).arclength <
           project_polyline(b, line_points).arclength;
  });
  std::vector<Point> merged;
  std::vector<int> cluster_size;
  for (const Point& p : candidates) {
    if (!merged.empty() && distance(merged.back(), p) <= config.merge_radius_m) {
      int c = cluster_size.back();
      merged.back().x = (merged.back().x * c + p.x) / (c + 1);
      merged.back().y = (merged.back().y * c + p.y) / (c + 1);
      cluster_size.back() = c + 1;
    } else {
      merged.push_back(p);
      cluster_size.push_back(1);
    }
  }
  if (report) {
    report->optional_merged_away =
        static_cast<int>(candidates.size() - merged.size());
    report->optional_stops = static_cast<int>(merged.size());
  }

  // Stops: compulsory chain f1..f{n+1}, then optionals by (segment, order
  // along the chain).
  std::vector<Stop> stops;
  for (int h = 0; h <= n; ++h)
    stops.push_back({"f" + std::to_string(h + 1), chain_points[h],
                     StopKind::compulsory, h + 1});
  struct OptCandidate {
    Point pos;
    int segment;
    double along;
  };
  std::vector<OptCandidate> optionals;
  for (const Point& p : merged) {
    Projection proj = project_polyline(p, chain_points);
    optionals.push_back({p, proj.chord + 1, proj.arclength});
  }
  std::stable_sort(optionals.begin(), optionals.end(),
                   [](const OptCandidate& a, const OptCandidate& b) {
                     if (a.segment != b.segment) return a.segment < b.segment;
                     return a.along < b.along;
                   });
  for (size_t i = 0; i < optionals.size(); ++i)
    stops.push_back({"o" + std::to_string(i + 1), optionals[i].pos,
                     StopKind::optional_stop, optionals[i].segment});

  // Complete arcs within each segment, from {f_h} + F_h to F_h + {f_{h+1}}.
  std::vector<Arc> arcs;
  auto push_arc = [&](int from, int to) {
    double d = std::max(1.0, distance(stops[from].pos, stops[to].pos));
    arcs.push_back({from, to, d * config.cost_per_m,
                    d / config.speed_mps + config.service_time_s});
  };
  for (int h = 1; h <= n; ++h) {
    std::vector<int> seg_nodes;
    for (int i = 0; i < static_cast<int>(stops.size()); ++i)
      if (stops[i].kind == StopKind::optional_stop && stops[i].segment == h)
        seg_nodes.push_back(i);
    int fh = h - 1;      // compulsory stop indices are 0..n in `stops`
    int fh1 = h;
    push_arc(fh, fh1);
    for (int v : seg_nodes) {
      push_arc(fh, v);
      push_arc(v, fh1);
      for (int w : seg_nodes)
        if (v != w) push_arc(v, w);
    }
  }

  // Windows: direct schedule plus per-segment slack proportional to the
  // largest single-stop detour.
  Network probe(stops, arcs, std::vector<TimeWindow>(n + 1, TimeWindow{}));
  std::vector<TimeWindow> windows(n + 1);
  double a = config.horizon_s + config.start_lag_s;
  for (int h = 1; h <= n + 1; ++h) {
    windows[h - 1] = {a, a + config.window_width_s};
    if (h <= n) {
      double direct = probe.arc_time(probe.compulsory(h), probe.compulsory(h + 1));
      double max_detour = 0.0;
      for (int v : probe.optionals_in_segment(h)) {
        double detour = probe.arc_time(probe.compulsory(h), v) +
                        probe.arc_time(v, probe.compulsory(h + 1)) - direct;
        max_detour = std::max(max_detour, detour);
      }
      a += direct + config.slack_fraction * max_detour;
    }
  }
  return Network(std::move(stops), std::move(arcs), std::move(windows));
}

namespace {

// Stop sets within walk radius of a point; splits out whether the set
// contains a compulsory stop and the optional segment range.
struct SideSets {
  std::vector<std::string> ids;
  bool has_compulsory = false;
  int min_opt_segment = std::numeric_limits<int>::max();
  int max_opt_segment = std::numeric_limits<int>::min();
};

SideSets stops_near(const Network& net, const Point& p, double radius) {
  SideSets side;
  for (const auto& s : net.stops()) {
    if (distance(s.pos, p) > radius) continue;
    side.ids.push_back(s.id);
    if (s.kind == StopKind::compulsory) {
      side.has_compulsory = true;
    } else {
      side.min_opt_segment = std::min(side.min_opt_segment, s.segment);
      side.max_opt_segment = std::max(side.max_opt_segment, s.segment);
    }
  }
  return side;
}

std::vector<Request> sample_stream(const std::vector<LineStop>& line_stops,
                                   const ODMatrix& od, const Network& network,
                                   double map_radius, double walk_radius,
                                   double horizon, double utility,
                                   const char* id_prefix, Rng& rng,
                                   GenReport* report) {
  std::vector<Request> requests;
  int seq = 0;
  for (size_t i = 0; i < od.size(); ++i) {
    for (size_t j = 0; j < od.values[i].size(); ++j) {
      double units_d = od.values[i][j];
      int units = static_cast<int>(std::floor(units_d));
      if (rng.bernoulli(units_d - units)) units++;
      for (int u = 0; u < units; ++u) {
        // All draws happen unconditionally so streams with different radii
        // stay aligned on the same seed.
        Point pick = disc_point(line_stops[i].pos, map_radius, rng);
        Point drop = disc_point(line_stops[j].pos, map_radius, rng);
        double time = rng.uniform(0.0, horizon);
        SideSets s = stops_near(network, pick, walk_radius);
        SideSets d = stops_near(network, drop, walk_radius);
        if (s.ids.empty() || d.ids.empty()) {
          if (report) report->dropped_empty_side++;
          continue;
        }
        bool has_opt_pick = s.max_opt_segment >= s.min_opt_segment;
        bool has_opt_drop = d.max_opt_segment >= d.min_opt_segment;
        if (has_opt_pick && has_opt_drop && !(s.max_opt_segment < d.min_opt_segment)) {
          if (report) report->dropped_segment_order++;
          continue;
        }
        char buf[24];
        std::snprintf(buf, sizeof buf, "%s%04d", id_prefix, seq++);
        Request r;
        r.id = buf;
        r.pickup_stops = sorted_unique(std::move(s.ids));
        r.dropoff_stops = sorted_unique(std::move(d.ids));
        r.utility = utility;
        r.request_time_s = time;
        requests.push_back(std::move(r));
        if (report) report->requests_emitted++;
      }
    }
  }
  std::sort(requests.begin(), requests.end(), [](const Request& a, const Request& b) {
    if (a.request_time_s != b.request_time_s) return a.request_time_s < b.request_time_s;
    return a.id < b.id;
  });
  return requests;
}

}  // namespace

std::vector<Request> sample_requests(const FixedLine& line, const ODMatrix& od,
                                     const Network& network, const GenConfig& config,
                                     Rng rng, GenReport* report) {
  return sample_stream(line.stops, od, network, config.map_radius_m,
                       config.walk_radius_m, config.horizon_s, config.utility, "r",
                       rng, report);
}

Json DemandModel::to_json() const {
  Json stops = Json::array();
  for (const auto& s : line_stops)
    stops.push_back({{"id", s.id}, {"x_m", s.pos.x}, {"y_m", s.pos.y}});
  Json od_rows = Json::array();
  for (const auto& row : od.values) od_rows.push_back(row);
  return Json{{"line", std::move(stops)},
              {"od", std::move(od_rows)},
              {"map_radius_m", map_radius_m},
              {"walk_radius_m", walk_radius_m},
              {"horizon_s", horizon_s},
              {"utility", utility}};
}

DemandModel DemandModel::from_json(const Json& doc) {
  if (!doc.is_object() || !doc.contains("line") || !doc.contains("od"))
    throw ParseError("demand_model block missing line/od fields");
  DemandModel dm;
  for (const auto& js : doc["line"]) {
    LineStop s;
    s.id = js.value("id", "");
    s.pos = {js.value("x_m", 0.0), js.value("y_m", 0.0)};
    dm.line_stops.push_back(std::move(s));
  }
  for (const auto& row : doc["od"])
    dm.od.values.push_back(row.get<std::vector<double>>());
  dm.map_radius_m = jnum(doc, "map_radius_m", dm.map_radius_m);
  dm.walk_radius_m = jnum(doc, "walk_radius_m", dm.walk_radius_m);
  dm.horizon_s = jnum(doc, "horizon_s", dm.horizon_s);
  dm.utility = jnum(doc, "utility", dm.utility);
  return dm;
}

std::vector<Request> sample_future(const Instance& instance, const DemandModel& model,
                                   double after_time, Rng rng) {
  std::vector<Request> stream =
      sample_stream(model.line_stops, model.od, instance.network,
                    model.map_radius_m, model.walk_radius_m, model.horizon_s,
                    model.utility, "q", rng, nullptr);
  std::erase_if(stream, [&](const Request& r) {
    return !(r.request_time_s > after_time && r.request_time_s < model.horizon_s);
  });
  return stream;
}

ScenarioSet build_scenarios(const SystemState& state, const Instance& instance,
                            const DemandModel& model, int k, const Rng& rng) {
  if (k < 1) throw std::invalid_argument("build_scenarios: k must be >= 1");
  ScenarioSet set;
  Rng epoch = rng.child(0x5ce0u).child(static_cast<uint64_t>(state.decision_index));
  for (int i = 0; i < k; ++i) {
    Scenario scenario;
    scenario.probability = 1.0 / k;
    scenario.requests = state.accepted;
    scenario.requests.push_back(state.pending);
    auto futures = sample_future(instance, model, state.pending.request_time_s,
                                 epoch.child(static_cast<uint64_t>(i)));
    scenario.requests.insert(scenario.requests.end(), futures.begin(), futures.end());
    set.scenarios.push_back(std::move(scenario));
  }
  return set;
}

GeneratedInstance generate_instance(const GenConfig& config) {
  if (!(config.csf > 0.0 && config.csf <= 1.0))
    throw std::invalid_argument("csf must lie in (0, 1]");
  Rng root(config.seed);
  GeneratedInstance out;

  FixedLine line = synth_line(config, root.child("line"));

  // Ground-truth OD draw fixes consistent marginals; IPF then recovers a
  // matrix from an independent random seed on the same pattern.
  const int m = static_cast<int>(line.stops.size());
  Rng od_rng = root.child("od");
  std::vector<std::vector<double>> truth(m, std::vector<double>(m, 0.0));
  double weight_sum = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      truth[i][j] = od_rng.uniform(0.2, 1.0);
      weight_sum += truth[i][j];
    }
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      truth[i][j] *= config.total_demand / weight_sum;
  std::vector<double> boarding(m, 0.0), alighting(m, 0.0);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      boarding[i] += truth[i][j];
      alighting[j] += truth[i][j];
    }
  for (int i = 0; i < m; ++i) {
    line.stops[i].boarding = boarding[i];
    line.stops[i].alighting = alighting[i];
  }

  Rng seed_rng = root.child("odseed");
  std::vector<std::vector<double>> seed(m, std::vector<double>(m, 0.0));
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) seed[i][j] = seed_rng.uniform(0.5, 1.5);
  IpfResult fit = ipf_fit(seed, boarding, alighting, 1e-9, 500);
  out.report.ipf_deviation = fit.deviation;
  ODMatrix od;
  od.values = std::move(fit.matrix);

  Network network = derive_network(line, config, &out.report);
  std::vector<Request> requests = sample_requests(
      line, od, network, config, root.child("requests"), &out.report);

  DemandModel dm;
  dm.line_stops = line.stops;
  dm.od = od;
  dm.map_radius_m = config.map_radius_m;
  dm.walk_radius_m = config.walk_radius_m;
  dm.horizon_s = config.horizon_s;
  dm.utility = config.utility;

  out.instance.network = std::move(network);
  out.instance.requests = std::move(requests);
  out.instance.horizon_end_s = config.horizon_s;
  out.instance.demand_model = dm.to_json();
  return out;
}

}  // namespace das
