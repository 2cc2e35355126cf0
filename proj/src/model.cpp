#include "entcap/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include <json.hpp>

namespace entcap {

using nlohmann::json;

namespace {

std::pair<std::string_view, std::string_view> ordered(std::string_view a, std::string_view b) {
  return a <= b ? std::pair{a, b} : std::pair{b, a};
}

bool link_less(const LinkSpec& a, const LinkSpec& b) {
  return ordered(a.u, a.v) < ordered(b.u, b.v);
}

class SchemaReader {
 public:
  std::vector<Diagnostic> diagnostics;

  void error(std::string path, std::string message) {
    diagnostics.push_back({std::move(path), std::move(message)});
  }

  void check_keys(const json& object, const std::string& path,
                  std::initializer_list<std::string_view> allowed) {
    for (const auto& [key, value] : object.items()) {
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
        error(path.empty() ? key : path + "." + key, "unknown key");
    }
  }

  std::optional<std::string> string_field(const json& object, const std::string& path,
                                          const char* key, bool required) {
    auto it = object.find(key);
    if (it == object.end()) {
      if (required) error(path + "." + key, "missing required field");
      return std::nullopt;
    }
    if (!it->is_string()) {
      error(path + "." + key, "expected a string");
      return std::nullopt;
    }
    return it->get<std::string>();
  }

  std::optional<double> number_field(const json& object, const std::string& path,
                                     const char* key) {
    auto it = object.find(key);
    if (it == object.end()) return std::nullopt;
    if (!it->is_number()) {
      error(path + "." + key, "expected a number");
      return std::nullopt;
    }
    return it->get<double>();
  }

  std::optional<int> integer_field(const json& object, const std::string& path,
                                   const char* key) {
    auto it = object.find(key);
    if (it == object.end()) return std::nullopt;
    if (!it->is_number_integer()) {
      error(path + "." + key, "expected an integer");
      return std::nullopt;
    }
    return it->get<int>();
  }
};

}  // namespace

std::optional<std::size_t> Topology::find_node(std::string_view id) const {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].id == id) return i;
  return std::nullopt;
}

std::optional<std::size_t> Topology::find_link(std::string_view a, std::string_view b) const {
  for (std::size_t i = 0; i < links.size(); ++i)
    if (links[i].connects(a, b)) return i;
  return std::nullopt;
}

const NodeSpec& Topology::node(std::string_view id) const {
  auto index = find_node(id);
  if (!index) throw ValidationError("nodes", "unknown node '" + std::string(id) + "'");
  return nodes[*index];
}

void Topology::canonicalize() {
  std::stable_sort(nodes.begin(), nodes.end(),
                   [](const NodeSpec& a, const NodeSpec& b) { return a.id < b.id; });
  for (auto& l : links) {
    if (l.v < l.u) std::swap(l.u, l.v);
  }
  std::stable_sort(links.begin(), links.end(), link_less);
  for (auto& n : nodes) {
    if (n.id == source) {
      n.role = NodeRole::source;
    } else if (n.id == sink) {
      n.role = NodeRole::sink;
    } else {
      n.role = NodeRole::internal;
    }
  }
}

Topology Topology::with_endpoints_swapped() const {
  Topology swapped = *this;
  std::swap(swapped.source, swapped.sink);
  swapped.canonicalize();
  return swapped;
}

double derive_link_probability(double length_km, const LossConstants& constants) {
  if (!std::isfinite(length_km) || length_km < 0.0)
    throw ValidationError("length_km", "length must be a finite nonnegative number");
  const double transmissivity = std::pow(10.0, -0.1 * constants.beta * length_km);
  return std::clamp(constants.c_eff * transmissivity, 0.0, 1.0);
}

std::vector<Diagnostic> validate_topology(const Topology& t) {
  std::vector<Diagnostic> out;
  auto add = [&](std::string path, std::string message) {
    out.push_back({std::move(path), std::move(message)});
  };

  std::set<std::string_view> ids;
  for (std::size_t i = 0; i < t.nodes.size(); ++i) {
    const auto& n = t.nodes[i];
    const std::string path = "nodes[" + std::to_string(i) + "]";
    if (n.id.empty()) add(path + ".id", "empty node id");
    if (!ids.insert(n.id).second) add(path + ".id", "duplicate node id '" + n.id + "'");
    const bool endpoint = n.id == t.source || n.id == t.sink;
    if (endpoint) {
      if (n.q != 1.0) add(path + ".q", "q must be absent or 1 for source and sink");
    } else if (!(n.q > 0.0 && n.q <= 1.0)) {
      add(path + ".q", "q out of (0,1]");
    }
  }

  if (t.source.empty()) add("endpoints.source", "missing source");
  if (t.sink.empty()) add("endpoints.sink", "missing sink");
  if (!t.source.empty() && t.source == t.sink)
    add("endpoints", "source and sink must differ");
  if (!t.source.empty() && !ids.contains(t.source))
    add("endpoints.source", "source '" + t.source + "' is not a node");
  if (!t.sink.empty() && !ids.contains(t.sink))
    add("endpoints.sink", "sink '" + t.sink + "' is not a node");

  std::set<std::pair<std::string_view, std::string_view>> pairs;
  for (std::size_t i = 0; i < t.links.size(); ++i) {
    const auto& l = t.links[i];
    const std::string path = "links[" + std::to_string(i) + "]";
    if (l.u == l.v) add(path, "self-loop on '" + l.u + "'");
    if (!ids.contains(l.u)) add(path + ".u", "unknown endpoint '" + l.u + "'");
    if (!ids.contains(l.v)) add(path + ".v", "unknown endpoint '" + l.v + "'");
    if (l.u != l.v && !pairs.insert(ordered(l.u, l.v)).second)
      add(path, "duplicate link {" + l.u + "," + l.v + "}");
    if (!(l.p >= 0.0 && l.p <= 1.0)) add(path + ".p", "p out of [0,1]");
    if (l.c < 1) add(path + ".c", "capacity must be at least 1");
    if (l.length_km && !(std::isfinite(*l.length_km) && *l.length_km >= 0.0))
      add(path + ".length_km", "length must be a finite nonnegative number");
  }

  if (!(t.constants.c_eff > 0.0 && t.constants.c_eff <= 1.0))
    add("constants.c_eff", "c_eff out of (0,1]");
  if (!(t.constants.beta >= 0.0)) add("constants.beta", "beta must be nonnegative");
  return out;
}

Topology load_topology(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ValidationError("", std::string("parse error: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("", "topology document must be an object");

  SchemaReader r;
  r.check_keys(doc, "", {"name", "description", "nodes", "links", "endpoints", "constants"});
  Topology t;
  t.name = r.string_field(doc, "", "name", false).value_or("");
  t.description = r.string_field(doc, "", "description", false).value_or("");

  if (auto it = doc.find("constants"); it != doc.end()) {
    if (!it->is_object()) {
      r.error("constants", "expected an object");
    } else {
      r.check_keys(*it, "constants", {"c_eff", "beta"});
      if (auto v = r.number_field(*it, "constants", "c_eff")) t.constants.c_eff = *v;
      if (auto v = r.number_field(*it, "constants", "beta")) t.constants.beta = *v;
    }
  }

  if (auto it = doc.find("endpoints"); it == doc.end() || !it->is_object()) {
    r.error("endpoints", it == doc.end() ? "missing required field" : "expected an object");
  } else {
    r.check_keys(*it, "endpoints", {"source", "sink"});
    t.source = r.string_field(*it, "endpoints", "source", true).value_or("");
    t.sink = r.string_field(*it, "endpoints", "sink", true).value_or("");
  }

  if (auto it = doc.find("nodes"); it == doc.end() || !it->is_array()) {
    r.error("nodes", it == doc.end() ? "missing required field" : "expected a list");
  } else {
    for (std::size_t i = 0; i < it->size(); ++i) {
      const auto& entry = (*it)[i];
      const std::string path = "nodes[" + std::to_string(i) + "]";
      if (!entry.is_object()) {
        r.error(path, "expected an object");
        continue;
      }
      r.check_keys(entry, path, {"id", "q", "label"});
      NodeSpec n;
      n.id = r.string_field(entry, path, "id", true).value_or("");
      n.label = r.string_field(entry, path, "label", false).value_or("");
      n.q = r.number_field(entry, path, "q").value_or(1.0);
      t.nodes.push_back(std::move(n));
    }
  }

  if (auto it = doc.find("links"); it == doc.end() || !it->is_array()) {
    r.error("links", it == doc.end() ? "missing required field" : "expected a list");
  } else {
    for (std::size_t i = 0; i < it->size(); ++i) {
      const auto& entry = (*it)[i];
      const std::string path = "links[" + std::to_string(i) + "]";
      if (!entry.is_object()) {
        r.error(path, "expected an object");
        continue;
      }
      r.check_keys(entry, path, {"u", "v", "length_km", "p", "c"});
      LinkSpec l;
      l.u = r.string_field(entry, path, "u", true).value_or("");
      l.v = r.string_field(entry, path, "v", true).value_or("");
      l.length_km = r.number_field(entry, path, "length_km");
      auto p = r.number_field(entry, path, "p");
      if (!l.length_km && !p) r.error(path, "one of length_km and p is required");
      if (p) l.p = *p;
      l.derived_p = l.length_km && !p;
      l.c = r.integer_field(entry, path, "c").value_or(1);
      t.links.push_back(std::move(l));
    }
  }

  // Derive probabilities before validation so that range checks see them.
  // A link may carry both a length and a tabulated p; the tabulated value is
  // used and must match the derived one to table precision.
  for (std::size_t i = 0; i < t.links.size(); ++i) {
    auto& l = t.links[i];
    if (!l.length_km || !std::isfinite(*l.length_km) || *l.length_km < 0.0) continue;
    const double derived = derive_link_probability(*l.length_km, t.constants);
    if (l.derived_p) {
      l.p = derived;
    } else if (std::abs(derived - l.p) > kTabulatedProbabilityTolerance) {
      r.error("links[" + std::to_string(i) + "].p",
              "does not match the probability derived from length_km");
    }
  }

  auto diagnostics = std::move(r.diagnostics);
  auto semantic = validate_topology(t);
  diagnostics.insert(diagnostics.end(), semantic.begin(), semantic.end());
  if (!diagnostics.empty()) throw ValidationError(std::move(diagnostics));

  t.canonicalize();
  return t;
}

Topology load_topology_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path, "cannot open topology file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_topology(buffer.str());
}

std::string serialize_topology(const Topology& t) {
  json doc = json::object();
  if (!t.name.empty()) doc["name"] = t.name;
  if (!t.description.empty()) doc["description"] = t.description;
  json nodes = json::array();
  for (const auto& n : t.nodes) {
    json entry = {{"id", n.id}};
    if (n.role == NodeRole::internal) entry["q"] = n.q;
    if (!n.label.empty()) entry["label"] = n.label;
    nodes.push_back(std::move(entry));
  }
  json links = json::array();
  for (const auto& l : t.links) {
    json entry = {{"u", l.u}, {"v", l.v}};
    if (l.length_km) entry["length_km"] = *l.length_km;
    if (!l.derived_p) entry["p"] = l.p;
    if (l.c != 1) entry["c"] = l.c;
    links.push_back(std::move(entry));
  }
  doc["nodes"] = std::move(nodes);
  doc["links"] = std::move(links);
  doc["endpoints"] = {{"source", t.source}, {"sink", t.sink}};
  doc["constants"] = {{"c_eff", t.constants.c_eff}, {"beta", t.constants.beta}};
  return doc.dump(2) + "\n";
}

std::string topology_digest(const Topology& t) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char ch : serialize_topology(t)) {
    hash ^= ch;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

}  // namespace entcap
