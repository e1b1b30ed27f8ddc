#include "das/io.hpp"

#include <fstream>
#include <sstream>

namespace das {

namespace {

double get_number(const Json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key) || !obj[key].is_number())
    throw ParseError("missing or non-numeric field: " + where + "." + key);
  return obj[key].get<double>();
}

std::string get_string(const Json& obj, const std::string& key,
                       const std::string& where) {
  if (!obj.contains(key) || !obj[key].is_string())
    throw ParseError("missing or non-string field: " + where + "." + key);
  return obj[key].get<std::string>();
}

const Json& get_array(const Json& obj, const std::string& key,
                      const std::string& where) {
  if (!obj.contains(key) || !obj[key].is_array())
    throw ParseError("missing or non-array field: " + where + "." + key);
  return obj[key];
}

}  // namespace

Json instance_to_json(const Instance& instance) {
  const Network& net = instance.network;
  Json doc;
  Json stops = Json::array();
  for (const auto& s : net.stops()) {
    stops.push_back({{"id", s.id},
                     {"x_m", s.pos.x},
                     {"y_m", s.pos.y},
                     {"kind", s.kind == StopKind::compulsory ? "compulsory"
                                                             : "optional"},
                     {"segment", s.segment}});
  }
  Json arcs = Json::array();
  for (const auto& a : net.arcs()) {
    arcs.push_back({{"from", net.stops()[a.from].id},
                    {"to", net.stops()[a.to].id},
                    {"cost", a.cost},
                    {"time_s", a.time_s}});
  }
  Json windows = Json::array();
  for (int h = 1; h <= net.segment_count() + 1; ++h) {
    windows.push_back(
        {{"h", h}, {"a_s", net.window(h).open_s}, {"b_s", net.window(h).close_s}});
  }
  doc["network"] = {{"stops", std::move(stops)},
                    {"arcs", std::move(arcs)},
                    {"windows", std::move(windows)}};
  Json requests = Json::array();
  for (const auto& r : instance.requests) {
    requests.push_back({{"id", r.id},
                        {"pickup", r.pickup_stops},
                        {"dropoff", r.dropoff_stops},
                        {"utility", r.utility},
                        {"request_time_s", r.request_time_s}});
  }
  doc["requests"] = std::move(requests);
  doc["horizon_end_s"] = instance.horizon_end_s;
  if (!instance.demand_model.is_null()) doc["demand_model"] = instance.demand_model;
  return doc;
}

Instance instance_from_json(const Json& doc) {
  if (!doc.is_object()) throw ParseError("document root must be an object");
  if (!doc.contains("network") || !doc["network"].is_object())
    throw ParseError("missing or non-object field: network");

  const Json& jnet = doc["network"];
  std::vector<Stop> stops;
  std::unordered_map<std::string, int> index;
  size_t i = 0;
  for (const auto& js : get_array(jnet, "stops", "network")) {
    std::string where = "network.stops[" + std::to_string(i++) + "]";
    Stop s;
    s.id = get_string(js, "id", where);
    s.pos.x = get_number(js, "x_m", where);
    s.pos.y = get_number(js, "y_m", where);
    std::string kind = get_string(js, "kind", where);
    if (kind == "compulsory")
      s.kind = StopKind::compulsory;
    else if (kind == "optional")
      s.kind = StopKind::optional_stop;
    else
      throw ParseError("invalid value for " + where + ".kind: " + kind);
    s.segment = static_cast<int>(get_number(js, "segment", where));
    index.emplace(s.id, static_cast<int>(stops.size()));
    stops.push_back(std::move(s));
  }

  std::vector<Arc> arcs;
  i = 0;
  for (const auto& ja : get_array(jnet, "arcs", "network")) {
    std::string where = "network.arcs[" + std::to_string(i++) + "]";
    Arc a;
    auto from = get_string(ja, "from", where);
    auto to = get_string(ja, "to", where);
    auto fit = index.find(from);
    auto tit = index.find(to);
    if (fit == index.end())
      throw ParseError(where + ".from references unknown stop " + from);
    if (tit == index.end())
      throw ParseError(where + ".to references unknown stop " + to);
    a.from = fit->second;
    a.to = tit->second;
    a.cost = get_number(ja, "cost", where);
    a.time_s = get_number(ja, "time_s", where);
    arcs.push_back(a);
  }

  std::vector<TimeWindow> windows;
  i = 0;
  for (const auto& jw : get_array(jnet, "windows", "network")) {
    std::string where = "network.windows[" + std::to_string(i++) + "]";
    int h = static_cast<int>(get_number(jw, "h", where));
    if (h != static_cast<int>(windows.size()) + 1)
      throw ParseError(where + ".h must be the contiguous sequence 1,2,...");
    windows.push_back({get_number(jw, "a_s", where), get_number(jw, "b_s", where)});
  }

  Instance instance;
  instance.network = Network(std::move(stops), std::move(arcs), std::move(windows));

  i = 0;
  for (const auto& jr : get_array(doc, "requests", "document")) {
    std::string where = "requests[" + std::to_string(i++) + "]";
    Request r;
    r.id = get_string(jr, "id", where);
    if (!jr.contains("pickup") || !jr["pickup"].is_array())
      throw ParseError("missing or non-array field: " + where + ".pickup");
    if (!jr.contains("dropoff") || !jr["dropoff"].is_array())
      throw ParseError("missing or non-array field: " + where + ".dropoff");
    for (const auto& sid : jr["pickup"]) {
      if (!sid.is_string()) throw ParseError(where + ".pickup entries must be strings");
      r.pickup_stops.push_back(sid.get<std::string>());
    }
    for (const auto& sid : jr["dropoff"]) {
      if (!sid.is_string()) throw ParseError(where + ".dropoff entries must be strings");
      r.dropoff_stops.push_back(sid.get<std::string>());
    }
    r.pickup_stops = sorted_unique(std::move(r.pickup_stops));
    r.dropoff_stops = sorted_unique(std::move(r.dropoff_stops));
    r.utility = get_number(jr, "utility", where);
    r.request_time_s = get_number(jr, "request_time_s", where);
    instance.requests.push_back(std::move(r));
  }

  if (!doc.contains("horizon_end_s") || !doc["horizon_end_s"].is_number())
    throw ParseError("missing or non-numeric field: horizon_end_s");
  instance.horizon_end_s = doc["horizon_end_s"].get<double>();
  if (doc.contains("demand_model")) instance.demand_model = doc["demand_model"];

  ValidationReport report = validate(instance);
  if (!report.ok())
    throw ValidationError("instance violates invariants:\n" + report.to_string(),
                          std::move(report));
  return instance;
}

Instance load_instance(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid document: ") + e.what());
  }
  return instance_from_json(doc);
}

Instance load_instance_file(const std::string& path) {
  return load_instance(read_text_file(path));
}

std::string save_instance(const Instance& instance) {
  return instance_to_json(instance).dump(2) + "\n";
}

void save_instance_file(const Instance& instance, const std::string& path) {
  write_text_file(path, save_instance(instance));
}

bool instances_equal(const Instance& a, const Instance& b) {
  return instance_to_json(a) == instance_to_json(b);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file for reading: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open file for writing: " + path);
  out << text;
  if (!out) throw IoError("failed writing file: " + path);
}

}  // namespace das
