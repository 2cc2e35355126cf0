#include "entcap/flowcheck.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace entcap {

using nlohmann::json;

namespace {

std::string arc_location(const std::string& i, const std::string& j) {
  return "(" + i + "," + j + ")";
}

std::string triple_location(const std::string& i, const std::string& j, const std::string& k) {
  return "(" + i + "," + j + "," + k + ")";
}

void check_domain(const DirectedSnapshot& g, const FlowAssignment& a) {
  auto arc_exists = [&](const std::string& i, const std::string& j) {
    auto u = g.find_node(i);
    auto v = g.find_node(j);
    return u && v && g.has_arc(*u, *v);
  };
  for (const auto& [key, value] : a.flow) {
    if (!arc_exists(key.first, key.second))
      throw ValidationError("flows" + arc_location(key.first, key.second), "no such arc in snapshot");
  }
  for (const auto& [key, value] : a.match) {
    const auto& [i, j, k] = key;
    const auto loc = triple_location(i, j, k);
    if (!arc_exists(i, j) || !arc_exists(j, k))
      throw ValidationError("matchings" + loc, "triple arcs not in snapshot");
    if (i == k) throw ValidationError("matchings" + loc, "triple must have i != k");
    if (j == g.id(g.source()) || j == g.id(g.sink()))
      throw ValidationError("matchings" + loc, "middle node must be internal");
  }
}

}  // namespace

double FlowAssignment::F(const std::string& i, const std::string& j) const {
  auto it = flow.find({i, j});
  return it == flow.end() ? 0.0 : it->second;
}

int FlowAssignment::x(const std::string& i, const std::string& j, const std::string& k) const {
  auto it = match.find({i, j, k});
  return it == match.end() ? 0 : it->second;
}

const ConstraintSet& all_constraints() {
  static const ConstraintSet all{Constraint::bounds, Constraint::exclusivity,
                                 Constraint::matched_gain, Constraint::coverage,
                                 Constraint::conservation};
  return all;
}

std::string_view constraint_tag(Constraint c) {
  switch (c) {
    case Constraint::bounds: return "BOUNDS";
    case Constraint::exclusivity: return "C6";
    case Constraint::matched_gain: return "C7";
    case Constraint::coverage: return "C8";
    case Constraint::conservation: return "C9";
  }
  return "?";
}

ConstraintSet parse_constraints(std::string_view csv) {
  ConstraintSet out;
  while (!csv.empty()) {
    const auto comma = csv.find(',');
    std::string item(csv.substr(0, comma));
    csv = comma == std::string_view::npos ? std::string_view{} : csv.substr(comma + 1);
    item.erase(std::remove_if(item.begin(), item.end(), [](unsigned char ch) { return std::isspace(ch); }),
               item.end());
    std::transform(item.begin(), item.end(), item.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::toupper(ch)); });
    if (item.empty()) continue;
    if (item == "ALL") {
      out.insert(all_constraints().begin(), all_constraints().end());
      continue;
    }
    bool found = false;
    for (Constraint c : all_constraints()) {
      if (constraint_tag(c) == item) {
        out.insert(c);
        found = true;
      }
    }
    if (!found) throw ValidationError("constraints", "unknown constraint tag '" + item + "'");
  }
  return out;
}

bool ConstraintReport::violates(Constraint c) const {
  return std::any_of(violations.begin(), violations.end(),
                     [&](const Violation& v) { return v.constraint == c; });
}

bool ConstraintReport::violates_at(Constraint c, std::string_view location) const {
  return std::any_of(violations.begin(), violations.end(), [&](const Violation& v) {
    return v.constraint == c && v.location == location;
  });
}

double objective_value(const DirectedSnapshot& g, const FlowAssignment& a) {
  double total = 0.0;
  const auto& sink = g.id(g.sink());
  for (const auto& arc : g.arcs())
    if (arc.to == g.sink()) total += a.F(g.id(arc.from), sink);
  return total;
}

ConstraintReport check_assignment(const DirectedSnapshot& g, const FlowAssignment& a,
                                  const ConstraintSet& active) {
  check_domain(g, a);
  ConstraintReport report;
  report.objective = objective_value(g, a);
  const double tol = kFeasibilityTolerance;
  auto on = [&](Constraint c) { return active.contains(c); };
  auto add = [&](Constraint c, std::string loc, double residual) {
    report.violations.push_back({c, std::move(loc), residual});
  };

  if (on(Constraint::bounds)) {
    for (const auto& [key, value] : a.flow) {
      if (!(value >= -tol && value <= 1.0 + tol))
        add(Constraint::bounds, arc_location(key.first, key.second), value);
    }
    for (const auto& [key, value] : a.match) {
      if (value != 0 && value != 1)
        add(Constraint::bounds, triple_location(std::get<0>(key), std::get<1>(key), std::get<2>(key)),
            value);
    }
  }

  if (on(Constraint::exclusivity)) {
    for (const auto& arc : g.arcs()) {
      const auto& i = g.id(arc.from);
      const auto& j = g.id(arc.to);
      int sum = 0;
      for (const auto& [key, value] : a.match) {
        const auto& [x1, x2, x3] = key;
        if ((x1 == i && x2 == j) || (x2 == j && x3 == i)) sum += value;
      }
      if (sum > 1) add(Constraint::exclusivity, arc_location(i, j), sum);
    }
  }

  if (on(Constraint::matched_gain)) {
    for (const auto& [key, value] : a.match) {
      if (value == 0) continue;
      const auto& [i, j, k] = key;
      const double residual = value * (a.F(i, j) * g.gain(g.node_index(j)) - a.F(j, k));
      if (std::abs(residual) > tol) add(Constraint::matched_gain, triple_location(i, j, k), residual);
    }
  }

  if (on(Constraint::coverage)) {
    for (const auto& arc : g.arcs()) {
      if (arc.to == g.sink()) continue;
      const auto& i = g.id(arc.from);
      const auto& j = g.id(arc.to);
      int sum = 0;
      for (const auto& [key, value] : a.match)
        if (std::get<0>(key) == i && std::get<1>(key) == j) sum += value;
      const double deficit = a.F(i, j) - sum;
      if (deficit > tol) add(Constraint::coverage, arc_location(i, j), deficit);
    }
  }

  if (on(Constraint::conservation)) {
    for (std::size_t node = 0; node < g.num_nodes(); ++node) {
      if (node == g.source() || node == g.sink()) continue;
      const auto& i = g.id(node);
      double out = 0.0;
      double in = 0.0;
      for (const auto& arc : g.arcs()) {
        if (arc.from == node) out += a.F(i, g.id(arc.to));
        if (arc.to == node) in += a.F(g.id(arc.from), i);
      }
      const double residual = out - in * g.gain(node);
      if (std::abs(residual) > tol) add(Constraint::conservation, i, residual);
    }
  }
  return report;
}

std::vector<DeliveredPath> extract_paths(const DirectedSnapshot& g, const FlowAssignment& a) {
  const auto report = check_assignment(g, a, all_constraints());
  if (!report.feasible())
    throw ValidationError("assignment", "infeasible assignment: " +
                                            std::string(constraint_tag(report.violations[0].constraint)) +
                                            " at " + report.violations[0].location);
  const double tol = kFeasibilityTolerance;
  const auto& source = g.id(g.source());
  const auto& sink = g.id(g.sink());
  std::vector<DeliveredPath> paths;
  for (const auto& arc : g.arcs()) {
    if (arc.from != g.source()) continue;
    const auto& first = g.id(arc.to);
    if (a.F(source, first) <= tol) continue;
    DeliveredPath path;
    path.nodes = {source, first};
    std::size_t steps = 0;
    while (path.nodes.back() != sink) {
      const auto& prev = path.nodes[path.nodes.size() - 2];
      const auto& here = path.nodes.back();
      const std::string* next = nullptr;
      for (const auto& [key, value] : a.match) {
        const auto& [i, j, k] = key;
        if (value == 1 && i == prev && j == here && a.F(j, k) > tol) {
          next = &k;
          break;
        }
      }
      if (!next || ++steps > g.arcs().size())
        throw ValidationError("assignment", "flow from " + source + " does not reach " + sink);
      path.nodes.push_back(*next);
    }
    path.delivered = a.F(path.nodes[path.nodes.size() - 2], sink);
    paths.push_back(std::move(path));
  }
  return paths;
}

FlowAssignment assignment_from_paths(const DirectedSnapshot& g,
                                     const std::vector<std::vector<std::string>>& paths) {
  FlowAssignment a;
  for (const auto& p : paths) {
    double value = 1.0;
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
      if (i > 0) {
        value *= g.gain(g.node_index(p[i]));
        a.match[{p[i - 1], p[i], p[i + 1]}] = 1;
      }
      a.flow[{p[i], p[i + 1]}] = value;
    }
  }
  return a;
}

FlowAssignment load_assignment(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ValidationError("", std::string("parse error: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("", "assignment document must be an object");
  std::vector<Diagnostic> diagnostics;
  FlowAssignment a;
  auto read_string = [&](const json& entry, const std::string& path, const char* key) {
    auto it = entry.find(key);
    if (it == entry.end() || !it->is_string()) {
      diagnostics.push_back({path + "." + key, "expected a string"});
      return std::string{};
    }
    return it->get<std::string>();
  };
  auto read_number = [&](const json& entry, const std::string& path) -> std::optional<double> {
    auto it = entry.find("value");
    if (it == entry.end() || !it->is_number()) {
      diagnostics.push_back({path + ".value", "expected a number"});
      return std::nullopt;
    }
    return it->get<double>();
  };

  if (auto it = doc.find("flows"); it != doc.end()) {
    if (!it->is_array()) {
      diagnostics.push_back({"flows", "expected a list"});
    } else {
      for (std::size_t n = 0; n < it->size(); ++n) {
        const auto path = "flows[" + std::to_string(n) + "]";
        const auto& entry = (*it)[n];
        if (!entry.is_object()) {
          diagnostics.push_back({path, "expected an object"});
          continue;
        }
        auto from = read_string(entry, path, "from");
        auto to = read_string(entry, path, "to");
        auto value = read_number(entry, path);
        if (value) a.flow[{from, to}] = *value;
      }
    }
  }
  if (auto it = doc.find("matchings"); it != doc.end()) {
    if (!it->is_array()) {
      diagnostics.push_back({"matchings", "expected a list"});
    } else {
      for (std::size_t n = 0; n < it->size(); ++n) {
        const auto path = "matchings[" + std::to_string(n) + "]";
        const auto& entry = (*it)[n];
        if (!entry.is_object()) {
          diagnostics.push_back({path, "expected an object"});
          continue;
        }
        auto i = read_string(entry, path, "i");
        auto j = read_string(entry, path, "j");
        auto k = read_string(entry, path, "k");
        auto value = read_number(entry, path);
        if (!value) continue;
        if (*value != 0.0 && *value != 1.0) {
          diagnostics.push_back({path + ".value", "matching values must be 0 or 1"});
          continue;
        }
        a.match[{i, j, k}] = static_cast<int>(*value);
      }
    }
  }
  if (!diagnostics.empty()) throw ValidationError(std::move(diagnostics));
  return a;
}

FlowAssignment load_assignment_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path, "cannot open assignment file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_assignment(buffer.str());
}

std::string serialize_assignment(const FlowAssignment& a) {
  json flows = json::array();
  for (const auto& [key, value] : a.flow)
    flows.push_back({{"from", key.first}, {"to", key.second}, {"value", value}});
  json matchings = json::array();
  for (const auto& [key, value] : a.match)
    matchings.push_back(
        {{"i", std::get<0>(key)}, {"j", std::get<1>(key)}, {"k", std::get<2>(key)}, {"value", value}});
  return json{{"flows", flows}, {"matchings", matchings}}.dump(2) + "\n";
}

}  // namespace entcap
