// Tiny enumerative MIP solver for the model class emitted by export_mps:
// binary variables plus continuous variables whose rows reduce to difference
// constraints. Reads an MPS file, writes `<variable> <value>` lines.
//
// Usage: das-mps-solve <model.mps> <solution.txt>
//
// Exact by construction: enumerates all free binary assignments (refuses
// more than 26) and solves the continuous part as a shortest-path system.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr double kEps = 1e-6;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Row {
  char type = 'N';
  std::string name;
  double rhs = 0.0;
};

struct Variable {
  std::string name;
  bool integral = false;
  double lo = 0.0;
  double up = kInf;
  std::vector<std::pair<int, double>> coeffs;  // (row index, coefficient)
  double obj = 0.0;
};

struct Model {
  bool maximize = false;
  std::vector<Row> rows;  // constraint rows only
  std::vector<Variable> vars;
};

[[noreturn]] void fail(const std::string& msg) {
  std::cerr << "das-mps-solve: " << msg << "\n";
  std::exit(1);
}

std::vector<std::string> tokens(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  std::string t;
  while (in >> t) out.push_back(t);
  return out;
}

Model parse_mps(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open " + path);

  Model model;
  std::map<std::string, int> row_index;
  std::map<std::string, size_t> var_index;
  std::string obj_row;
  std::string line, section;
  bool integral = false;

  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '*') continue;
    if (line[0] != ' ' && line[0] != '\t') {
      auto toks = tokens(line);
      section = toks.empty() ? "" : toks[0];
      if (section == "ENDATA") break;
      if (section == "RANGES") fail("RANGES not supported");
      continue;
    }
    auto toks = tokens(line);
    if (toks.empty()) continue;

    if (section == "OBJSENSE") {
      model.maximize = (toks[0] == "MAX" || toks[0] == "MAXIMIZE");
    } else if (section == "ROWS") {
      if (toks.size() < 2) fail("bad ROWS line: " + line);
      if (toks[0][0] == 'N') {
        if (obj_row.empty()) obj_row = toks[1];
      } else {
        row_index.emplace(toks[1], static_cast<int>(model.rows.size()));
        model.rows.push_back({toks[0][0], toks[1], 0.0});
      }
    } else if (section == "COLUMNS") {
      if (toks.size() >= 3 && toks[1] == "'MARKER'") {
        integral = (toks[2] == "'INTORG'");
        continue;
      }
      if (toks.size() < 3) fail("bad COLUMNS line: " + line);
      auto it = var_index.find(toks[0]);
      if (it == var_index.end()) {
        it = var_index.emplace(toks[0], model.vars.size()).first;
        model.vars.push_back({toks[0], integral, 0.0, kInf, {}, 0.0});
      }
      Variable& v = model.vars[it->second];
      for (size_t i = 1; i + 1 < toks.size(); i += 2) {
        double coeff = std::stod(toks[i + 1]);
        if (toks[i] == obj_row) {
          v.obj += coeff;
        } else {
          auto rit = row_index.find(toks[i]);
          if (rit == row_index.end()) fail("unknown row " + toks[i]);
          v.coeffs.emplace_back(rit->second, coeff);
        }
      }
    } else if (section == "RHS") {
      for (size_t i = 1; i + 1 < toks.size(); i += 2) {
        auto rit = row_index.find(toks[i]);
        if (rit == row_index.end()) {
          if (toks[i] == obj_row) continue;
          fail("RHS for unknown row " + toks[i]);
        }
        model.rows[rit->second].rhs = std::stod(toks[i + 1]);
      }
    } else if (section == "BOUNDS") {
      if (toks.size() < 3) fail("bad BOUNDS line: " + line);
      auto it = var_index.find(toks[2]);
      if (it == var_index.end()) fail("bound on unknown column " + toks[2]);
      Variable& v = model.vars[it->second];
      double val = toks.size() > 3 ? std::stod(toks[3]) : 0.0;
      if (toks[0] == "UP")
        v.up = val;
      else if (toks[0] == "LO")
        v.lo = val;
      else if (toks[0] == "FX")
        v.lo = v.up = val;
      else if (toks[0] == "BV") {
        v.lo = 0.0;
        v.up = 1.0;
        v.integral = true;
      } else
        fail("unsupported bound type " + toks[0]);
    }
  }
  if (obj_row.empty()) fail("no objective row");
  return model;
}

// Feasibility of the continuous part via Bellman-Ford over difference
// constraints plus box bounds; root node 0 represents the constant zero.
std::optional<std::vector<double>> solve_continuous(
    const std::vector<size_t>& cont_vars, const Model& model,
    const std::vector<double>& residual, const std::vector<char>& row_has_cont) {
  const size_t m = cont_vars.size();
  std::vector<size_t> node_of(model.vars.size(), 0);
  for (size_t i = 0; i < m; ++i) node_of[cont_vars[i]] = i + 1;

  struct Edge {
    size_t from, to;
    double w;
  };
  std::vector<Edge> edges;
  for (size_t i = 0; i < m; ++i) {
    const Variable& v = model.vars[cont_vars[i]];
    if (v.up < kInf) edges.push_back({0, i + 1, v.up});
    edges.push_back({i + 1, 0, -v.lo});
  }

  bool infeasible_row = false;
  for (size_t r = 0; r < model.rows.size() && !infeasible_row; ++r) {
    if (!row_has_cont[r]) continue;
    std::vector<std::pair<size_t, double>> terms;
    for (size_t vi : cont_vars)
      for (const auto& [row, c] : model.vars[vi].coeffs)
        if (static_cast<size_t>(row) == r && c != 0.0)
          terms.emplace_back(node_of[vi], c);
    double bound = model.rows[r].rhs - residual[r];
    auto add_le = [&](std::vector<std::pair<size_t, double>> t, double b) {
      if (t.empty()) {
        if (b < -kEps) infeasible_row = true;
        return;
      }
      if (t.size() == 1) {
        if (t[0].second == 1.0)
          edges.push_back({0, t[0].first, b});
        else if (t[0].second == -1.0)
          edges.push_back({t[0].first, 0, b});
        else
          fail("unsupported continuous coefficient in row " + model.rows[r].name);
        return;
      }
      if (t.size() == 2) {
        auto [a, ca] = t[0];
        auto [c, cc] = t[1];
        if (ca == 1.0 && cc == -1.0)
          edges.push_back({c, a, b});
        else if (ca == -1.0 && cc == 1.0)
          edges.push_back({a, c, b});
        else
          fail("unsupported continuous pair in row " + model.rows[r].name);
        return;
      }
      fail("row with more than two continuous variables: " + model.rows[r].name);
    };
    std::vector<std::pair<size_t, double>> neg;
    for (auto [node, c] : terms) neg.emplace_back(node, -c);
    if (model.rows[r].type == 'L') {
      add_le(terms, bound);
    } else if (model.rows[r].type == 'G') {
      add_le(neg, -bound);
    } else if (model.rows[r].type == 'E') {
      add_le(terms, bound);
      add_le(neg, -bound);
    }
  }
  if (infeasible_row) return std::nullopt;

  std::vector<double> dist(m + 1, kInf);
  dist[0] = 0.0;
  for (size_t pass = 0; pass <= m + 1; ++pass) {
    bool changed = false;
    for (const Edge& e : edges) {
      if (dist[e.from] < kInf && dist[e.from] + e.w < dist[e.to] - 1e-12) {
        dist[e.to] = dist[e.from] + e.w;
        changed = true;
        if (pass == m + 1) return std::nullopt;  // negative cycle
      }
    }
    if (!changed) break;
  }
  // Potentials are relative to the root; normalize so the root is zero.
  std::vector<double> out(m);
  for (size_t i = 0; i < m; ++i) {
    double v = dist[i + 1];
    out[i] = (v == kInf) ? model.vars[cont_vars[i]].lo : v - dist[0];
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 3) {
    std::cerr << "usage: das-mps-solve <model.mps> <solution.txt>\n";
    return 1;
  }
  Model model = parse_mps(argv[1]);

  std::vector<size_t> free_bins, fixed_bins, cont_vars;
  for (size_t i = 0; i < model.vars.size(); ++i) {
    const Variable& v = model.vars[i];
    if (v.integral) {
      if (v.lo < -kEps || v.up > 1.0 + kEps) fail("non-binary integer " + v.name);
      if (v.up - v.lo < 0.5)
        fixed_bins.push_back(i);
      else
        free_bins.push_back(i);
    } else {
      cont_vars.push_back(i);
    }
  }
  if (free_bins.size() > 26) fail("more than 26 free binaries; model too large");

  std::vector<char> row_has_cont(model.rows.size(), 0);
  for (size_t vi : cont_vars)
    for (const auto& [row, c] : model.vars[vi].coeffs)
      if (c != 0.0) row_has_cont[row] = 1;

  std::vector<double> value(model.vars.size(), 0.0);
  std::vector<double> base_residual(model.rows.size(), 0.0);
  double base_obj = 0.0;
  for (size_t i : fixed_bins) {
    value[i] = model.vars[i].lo;
    if (value[i] != 0.0) {
      base_obj += model.vars[i].obj * value[i];
      for (const auto& [row, c] : model.vars[i].coeffs)
        base_residual[row] += c * value[i];
    }
  }

  bool have_best = false;
  double best_obj = 0.0;
  std::vector<double> best;

  std::vector<double> residual(model.rows.size());
  const uint64_t combos = 1ULL << free_bins.size();
  for (uint64_t bits = 0; bits < combos; ++bits) {
    residual = base_residual;
    double obj = base_obj;
    for (size_t k = 0; k < free_bins.size(); ++k) {
      double v = (bits >> k) & 1 ? 1.0 : 0.0;
      value[free_bins[k]] = v;
      if (v != 0.0) {
        const Variable& var = model.vars[free_bins[k]];
        obj += var.obj;
        for (const auto& [row, c] : var.coeffs) residual[row] += c;
      }
    }

    bool ok = true;
    for (size_t r = 0; r < model.rows.size(); ++r) {
      if (row_has_cont[r]) continue;
      const Row& row = model.rows[r];
      if (row.type == 'L' && residual[r] > row.rhs + kEps) ok = false;
      if (row.type == 'G' && residual[r] < row.rhs - kEps) ok = false;
      if (row.type == 'E' && std::abs(residual[r] - row.rhs) > kEps) ok = false;
      if (!ok) break;
    }
    if (!ok) continue;

    auto cont = solve_continuous(cont_vars, model, residual, row_has_cont);
    if (!cont) continue;
    for (size_t k = 0; k < cont_vars.size(); ++k) {
      value[cont_vars[k]] = (*cont)[k];
      obj += model.vars[cont_vars[k]].obj * (*cont)[k];
    }

    bool better = !have_best ||
                  (model.maximize ? obj > best_obj + 1e-9 : obj < best_obj - 1e-9);
    if (better) {
      have_best = true;
      best_obj = obj;
      best = value;
    }
  }

  if (!have_best) fail("model is infeasible");

  std::ofstream out(argv[2]);
  if (!out) fail(std::string("cannot write ") + argv[2]);
  for (size_t i = 0; i < model.vars.size(); ++i) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", best[i]);
    out << model.vars[i].name << " " << buf << "\n";
  }
  return 0;
}
