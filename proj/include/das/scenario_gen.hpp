#pragma once

#include <vector>

#include "das/core.hpp"
#include "das/policies.hpp"
#include "das/rng.hpp"

namespace das {

// An original fixed bus line: ordered stops with daily boarding/alighting
// volumes, plus nearby intersections that may become optional stops.
struct LineStop {
  std::string id;
  Point pos;
  double boarding = 0.0;
  double alighting = 0.0;
};

struct FixedLine {
  std::vector<LineStop> stops;
  std::vector<Point> candidate_intersections;
};

struct ODMatrix {
  std::vector<std::vector<double>> values;  // [origin][destination]
  size_t size() const { return values.size(); }
};

struct GenConfig {
  uint64_t seed = 1;
  double csf = 0.6;  // compulsory stop factor, in (0, 1]
  double walk_radius_m = 250.0;
  double map_radius_m = 300.0;
  double optional_candidate_radius_m = 600.0;
  double merge_radius_m = 200.0;
  double horizon_s = 10800.0;
  double utility = 750.0;

  // Synthetic line shape.
  int line_stops = 8;
  double stop_spacing_m = 500.0;
  double corridor_jitter_m = 120.0;
  int intersections = 16;
  double total_demand = 28.0;

  // Network derivation.
  double speed_mps = 8.3;
  double service_time_s = 15.0;
  double cost_per_m = 1.0;
  double window_width_s = 120.0;
  double slack_fraction = 0.4;  // of the segment's largest single detour
  double start_lag_s = 60.0;    // a_1 - horizon_end

  Json to_json() const;
  static GenConfig from_json(const Json& doc);
};

struct IpfResult {
  std::vector<std::vector<double>> matrix;
  double deviation = 0.0;
  int iterations = 0;
};

class IpfError : public std::runtime_error {
 public:
  IpfError(const std::string& msg, double deviation)
      : std::runtime_error(msg), deviation(deviation) {}
  double deviation;
};

// Alternating row/column scaling toward the marginals; stops when the
// largest marginal deviation drops below tol. Throws IpfError when the
// marginal totals disagree or a structural zero pattern makes the marginals
// unreachable within max_iter.
IpfResult ipf_fit(const std::vector<std::vector<double>>& seed,
                  const std::vector<double>& row_marginals,
                  const std::vector<double>& col_marginals, double tol,
                  int max_iter);

struct GenReport {
  int requests_emitted = 0;
  int dropped_empty_side = 0;
  int dropped_segment_order = 0;
  int optional_candidates = 0;
  int optional_merged_away = 0;
  int optional_stops = 0;
  double ipf_deviation = 0.0;
  Json to_json() const;
};

FixedLine synth_line(const GenConfig& config, Rng rng);

// Endpoints compulsory; remaining stops ranked by volume with the top
// ceil(csf * (m-2)) compulsory; unselected stops and intersections within
// the candidate radius become optional, merged within merge_radius_m
// (line-order sweep, survivor = centroid); complete arcs per segment with
// Euclidean costs; windows from the direct schedule plus per-segment slack.
Network derive_network(const FixedLine& line, const GenConfig& config,
                       GenReport* report = nullptr);

// One request per integer OD unit (fractional remainders Bernoulli), mapped
// to a uniform point in the map_radius disc around its stop; stop sets are
// the network stops within walk_radius. Requests with an empty side or an
// optional pickup segment not preceding an optional dropoff segment are
// dropped and counted.
std::vector<Request> sample_requests(const FixedLine& line, const ODMatrix& od,
                                     const Network& network, const GenConfig& config,
                                     Rng rng, GenReport* report = nullptr);

// The generative demand process an instance was drawn from; rides along in
// the instance document so futures can be resampled conditionally.
struct DemandModel {
  std::vector<LineStop> line_stops;
  ODMatrix od;
  double map_radius_m = 300.0;
  double walk_radius_m = 250.0;
  double horizon_s = 10800.0;
  double utility = 750.0;

  Json to_json() const;
  static DemandModel from_json(const Json& doc);
};

// Fresh request stream from the same OD process restricted to request times
// in (after_time, horizon); deterministic in rng.
std::vector<Request> sample_future(const Instance& instance, const DemandModel& model,
                                   double after_time, Rng rng);

// k scenarios, each the accepted set + pending request + sampled futures,
// with uniform probability 1/k. Scenario i draws from a child stream of
// (rng, decision index, i), independent of call order.
ScenarioSet build_scenarios(const SystemState& state, const Instance& instance,
                            const DemandModel& model, int k, const Rng& rng);

struct GeneratedInstance {
  Instance instance;
  GenReport report;
};

// Full pipeline: synthetic line, demand marginals, IPF-fitted OD, derived
// network, sampled requests, embedded demand model. Deterministic in
// config.seed.
GeneratedInstance generate_instance(const GenConfig& config);

}  // namespace das
