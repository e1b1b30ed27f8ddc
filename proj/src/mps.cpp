#include "das/mps.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>

#include "das/io.hpp"

namespace das {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string pad(const std::string& s, size_t width) {
  return s.size() >= width ? s + " " : s + std::string(width - s.size(), ' ');
}

struct Row {
  char type;  // 'L', 'E'
  std::string name;
  double rhs = 0.0;
};

struct ColumnEntry {
  std::string row;
  double coeff;
};

// (from,to) index pairs per cut set Q, expanded to existing arcs.
using CutArcs = std::vector<std::pair<int, int>>;

std::string build_mps(const Network& net, std::span<const Request> requests,
                      const FixedDecisions& fixed,
                      const std::vector<CutArcs>& cuts) {
  const auto& stops = net.stops();
  const int n = net.segment_count();

  auto xname = [&](const Arc& a) {
    return "X_" + stops[a.from].id + "_" + stops[a.to].id;
  };

  std::vector<Row> rows;
  for (const auto& r : requests) rows.push_back({'L', "PICK_" + r.id, 0.0});
  for (const auto& r : requests) rows.push_back({'L', "DROP_" + r.id, 0.0});
  for (const auto& s : stops) {
    double d = 0.0;
    if (s.kind == StopKind::compulsory && s.segment == 1) d = 1.0;
    if (s.kind == StopKind::compulsory && s.segment == n + 1) d = -1.0;
    rows.push_back({'E', "FLOW_" + s.id, d});
  }
  for (int h = 1; h <= n; ++h)
    rows.push_back({'L', "CHAIN_" + std::to_string(h), 0.0});
  for (size_t k = 0; k < cuts.size(); ++k) {
    // Q visits bounded by |Q| - 1; recover |Q| from the arc pairs.
    std::set<int> q;
    for (auto [i, j] : cuts[k]) {
      q.insert(i);
      q.insert(j);
    }
    rows.push_back({'L', "CUT_" + std::to_string(k + 1),
                    static_cast<double>(q.size()) - 1.0});
  }

  // Column entries in a stable order: arcs, then requests, then times.
  std::vector<std::pair<std::string, std::vector<ColumnEntry>>> bin_cols, cont_cols;

  std::map<std::pair<int, int>, size_t> arc_col;
  std::vector<std::set<int>> pick_sets(requests.size()), drop_sets(requests.size());
  for (size_t ri = 0; ri < requests.size(); ++ri) {
    for (const auto& sid : requests[ri].pickup_stops)
      pick_sets[ri].insert(net.stop_index(sid));
    for (const auto& sid : requests[ri].dropoff_stops)
      drop_sets[ri].insert(net.stop_index(sid));
  }

  for (const Arc& a : net.arcs()) {
    std::vector<ColumnEntry> entries;
    entries.push_back({"OBJ", -a.cost});
    for (size_t ri = 0; ri < requests.size(); ++ri) {
      if (pick_sets[ri].count(a.from))
        entries.push_back({"PICK_" + requests[ri].id, -1.0});
      if (drop_sets[ri].count(a.to))
        entries.push_back({"DROP_" + requests[ri].id, -1.0});
    }
    entries.push_back({"FLOW_" + stops[a.from].id, 1.0});
    entries.push_back({"FLOW_" + stops[a.to].id, -1.0});
    entries.push_back({"CHAIN_" + std::to_string(stops[a.from].segment), a.time_s});
    arc_col.emplace(std::make_pair(a.from, a.to), bin_cols.size());
    bin_cols.emplace_back(xname(a), std::move(entries));
  }
  for (size_t k = 0; k < cuts.size(); ++k) {
    for (auto [i, j] : cuts[k]) {
      auto it = arc_col.find({i, j});
      if (it == arc_col.end()) continue;
      bin_cols[it->second].second.push_back({"CUT_" + std::to_string(k + 1), 1.0});
    }
  }
  for (const auto& r : requests) {
    std::vector<ColumnEntry> entries;
    entries.push_back({"OBJ", r.utility});
    entries.push_back({"PICK_" + r.id, 1.0});
    entries.push_back({"DROP_" + r.id, 1.0});
    bin_cols.emplace_back("Y_" + r.id, std::move(entries));
  }
  for (int h = 1; h <= n + 1; ++h) {
    std::vector<ColumnEntry> entries;
    if (h <= n) entries.push_back({"CHAIN_" + std::to_string(h), 1.0});
    if (h >= 2) entries.push_back({"CHAIN_" + std::to_string(h - 1), -1.0});
    cont_cols.emplace_back("T_" + std::to_string(h), std::move(entries));
  }

  std::ostringstream os;
  os << "NAME          DASROUTE\n";
  os << "OBJSENSE\n    MAX\n";
  os << "ROWS\n";
  os << " N  OBJ\n";
  for (const auto& row : rows) os << " " << row.type << "  " << row.name << "\n";
  os << "COLUMNS\n";
  os << "    MARKER                 'MARKER'                 'INTORG'\n";
  for (const auto& [name, entries] : bin_cols)
    for (const auto& e : entries)
      os << "    " << pad(name, 20) << pad(e.row, 20) << num(e.coeff) << "\n";
  os << "    MARKER                 'MARKER'                 'INTEND'\n";
  for (const auto& [name, entries] : cont_cols)
    for (const auto& e : entries)
      os << "    " << pad(name, 20) << pad(e.row, 20) << num(e.coeff) << "\n";
  os << "RHS\n";
  for (const auto& row : rows)
    if (row.rhs != 0.0)
      os << "    " << pad("RHS", 20) << pad(row.name, 20) << num(row.rhs) << "\n";
  os << "BOUNDS\n";
  for (const auto& [name, entries] : bin_cols) {
    (void)entries;
    if (name.rfind("Y_", 0) == 0) {
      auto it = fixed.find(name.substr(2));
      if (it != fixed.end()) {
        os << " FX " << pad("BND", 17) << pad(name, 20)
           << (it->second ? "1" : "0") << "\n";
        continue;
      }
    }
    os << " UP " << pad("BND", 17) << pad(name, 20) << "1\n";
  }
  for (int h = 1; h <= n + 1; ++h) {
    os << " LO " << pad("BND", 17) << pad("T_" + std::to_string(h), 20)
       << num(net.window(h).open_s) << "\n";
    os << " UP " << pad("BND", 17) << pad("T_" + std::to_string(h), 20)
       << num(net.window(h).close_s) << "\n";
  }
  os << "ENDATA\n";
  return os.str();
}

}  // namespace

std::string export_mps(const Network& network, std::span<const Request> requests,
                       const FixedDecisions& fixed) {
  return build_mps(network, requests, fixed, {});
}

namespace {

std::map<std::string, double> parse_solution_file(const std::string& path) {
  std::map<std::string, double> values;
  std::istringstream in(read_text_file(path));
  std::string name;
  double value;
  while (in >> name >> value) values[name] = value;
  return values;
}

}  // namespace

FullInfoSolution subtour_cut_loop(const Network& network,
                                  std::span<const Request> requests,
                                  const std::string& solver_command,
                                  int max_rounds, const std::string& work_dir,
                                  const FixedDecisions& fixed,
                                  CutLoopStats* stats) {
  const auto& stops = network.stops();
  const int n = network.segment_count();
  std::vector<CutArcs> cuts;

  for (int round = 1; round <= max_rounds; ++round) {
    const std::string mps_path = work_dir + "/model_r" + std::to_string(round) + ".mps";
    const std::string sol_path = work_dir + "/solution_r" + std::to_string(round) + ".txt";
    const std::string err_path = work_dir + "/solver_r" + std::to_string(round) + ".log";
    write_text_file(mps_path, build_mps(network, requests, fixed, cuts));

    const std::string cmd =
        solver_command + " " + mps_path + " " + sol_path + " 2>" + err_path;
    int rc = std::system(cmd.c_str());
    if (rc != 0) {
      std::string diag;
      try {
        diag = read_text_file(err_path);
      } catch (const IoError&) {
      }
      throw SolverError("external solver failed (exit " + std::to_string(rc) +
                        ") for " + mps_path + (diag.empty() ? "" : ":\n" + diag));
    }

    std::map<std::string, double> values;
    try {
      values = parse_solution_file(sol_path);
    } catch (const IoError& e) {
      throw SolverError(std::string("external solver wrote no solution: ") + e.what());
    }

    // Successor map of used arcs.
    std::map<int, std::vector<int>> succ;
    double used_cost = 0.0;
    for (const Arc& a : network.arcs()) {
      auto it = values.find("X_" + stops[a.from].id + "_" + stops[a.to].id);
      if (it != values.end() && it->second > 0.5) {
        succ[a.from].push_back(a.to);
        used_cost += a.cost;
      }
    }

    // Main path + per-segment visit orders.
    FullInfoSolution incumbent;
    incumbent.route.segment_visits.assign(n + 1, {});
    incumbent.route.departure_times.assign(n + 2, 0.0);
    std::set<int> on_path;
    bool path_ok = true;
    for (int h = 1; h <= n && path_ok; ++h) {
      int node = network.compulsory(h);
      int sink = network.compulsory(h + 1);
      on_path.insert(node);
      int guard = static_cast<int>(stops.size()) + 1;
      while (node != sink && guard-- > 0) {
        auto it = succ.find(node);
        if (it == succ.end() || it->second.empty()) {
          path_ok = false;
          break;
        }
        node = it->second.front();
        on_path.insert(node);
        if (node != sink)
          incumbent.route.segment_visits[h].push_back(stops[node].id);
      }
      if (node != sink) path_ok = false;
    }
    if (!path_ok)
      throw SolverError("external solver returned arcs without an f_1 -> f_{n+1} path");
    for (int h = 1; h <= n + 1; ++h) {
      auto it = values.find("T_" + std::to_string(h));
      if (it != values.end()) incumbent.route.departure_times[h] = it->second;
    }
    incumbent.route.total_cost = used_cost;
    double utility = 0.0;
    for (const auto& r : requests) {
      auto it = values.find("Y_" + r.id);
      if (it != values.end() && it->second > 0.5) {
        incumbent.accepted.push_back(r.id);
        utility += r.utility;
      }
    }
    std::sort(incumbent.accepted.begin(), incumbent.accepted.end());
    incumbent.objective = utility - used_cost;

    // Cycles among optional stops not on the main path violate the
    // subtour family; one cut per detected vertex set.
    std::set<int> seen(on_path);
    std::vector<std::set<int>> violated;
    for (const auto& [from, tos] : succ) {
      (void)tos;
      if (seen.count(from)) continue;
      std::set<int> cycle;
      int node = from;
      while (!seen.count(node)) {
        seen.insert(node);
        cycle.insert(node);
        auto it = succ.find(node);
        if (it == succ.end() || it->second.empty()) break;
        node = it->second.front();
      }
      if (cycle.count(node)) violated.push_back(std::move(cycle));
    }

    if (stats) stats->rounds = round;
    if (violated.empty()) return incumbent;

    for (const auto& q : violated) {
      CutArcs arcs;
      for (int i : q)
        for (int j : q)
          if (i != j && network.has_arc(i, j)) arcs.emplace_back(i, j);
      cuts.push_back(std::move(arcs));
      if (stats) stats->cuts_added++;
    }
    if (round == max_rounds)
      throw CutLoopExhausted(
          "subtour cuts still violated after " + std::to_string(max_rounds) + " rounds",
          incumbent);
  }
  throw SolverError("subtour_cut_loop: max_rounds must be >= 1");
}

}  // namespace das
