#include "entcap/report.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <sstream>

#include <json.hpp>

#ifndef ENTCAP_VERSION
#define ENTCAP_VERSION "0.0.0"
#endif

namespace entcap {

using nlohmann::json;

namespace {

std::string iso_timestamp() {
  std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch && *epoch) {
    char* end = nullptr;
    const long long v = std::strtoll(epoch, &end, 10);
    if (end && *end == '\0' && v >= 0) now = static_cast<std::time_t>(v);
  }
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json manifest_json(const RunManifest& m) {
  json j = {{"command", m.command},
            {"topology", m.topology},
            {"topology_digest", m.topology_digest},
            {"parameters", m.parameters},
            {"tool_version", m.tool_version},
            {"timestamp", m.timestamp}};
  j["seed"] = m.seed ? json(*m.seed) : json(nullptr);
  return j;
}

template <typename T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

json paths_json(const std::vector<DeliveredPath>& paths) {
  json out = json::array();
  for (const auto& p : paths) out.push_back({{"nodes", p.nodes}, {"delivered", p.delivered}});
  return out;
}

}  // namespace

std::string_view tool_version() { return ENTCAP_VERSION; }

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

RunManifest make_manifest(std::string command, const Topology& t, std::string topology_name,
                          std::map<std::string, std::string> parameters,
                          std::optional<std::uint64_t> seed) {
  RunManifest m;
  m.command = std::move(command);
  m.topology = std::move(topology_name);
  m.topology_digest = topology_digest(t);
  m.parameters = std::move(parameters);
  m.tool_version = std::string(tool_version());
  m.timestamp = iso_timestamp();
  m.seed = seed;
  return m;
}

std::string capacity_report_json(const RunManifest& m, const CapacityReport& r) {
  json j = {{"manifest", manifest_json(m)},
            {"mode", std::string(mode_name(r.mode))},
            {"value", r.value},
            {"lower", opt(r.lower)},
            {"upper", opt(r.upper)},
            {"covered_probability", opt(r.covered_probability)},
            {"full_state_capacity", r.full_state_capacity},
            {"states_evaluated", r.states_evaluated},
            {"state_space_size", r.state_space_size},
            {"stderr", opt(r.standard_error)},
            {"seed", opt(r.seed)}};
  return j.dump(2) + "\n";
}

std::string snapshot_report_json(const RunManifest& m, const DirectedSnapshot& g,
                                 const SnapshotSolution& s, const std::string& solver,
                                 std::optional<double> oracle_value) {
  json j = {{"manifest", manifest_json(m)},
            {"solver", solver},
            {"objective", s.objective},
            {"oracle_objective", opt(oracle_value)},
            {"max_disjoint_paths", max_disjoint_paths(g)},
            {"paths", paths_json(s.paths)},
            {"assignment", json::parse(serialize_assignment(s.assignment))}};
  return j.dump(2) + "\n";
}

std::string verify_report_json(const RunManifest& m, const ConstraintSet& active,
                               const ConstraintReport& r) {
  json checks = json::object();
  for (auto c : active) checks[std::string(constraint_tag(c))] = r.violates(c) ? "FAIL" : "PASS";
  json violations = json::array();
  for (const auto& v : r.violations) {
    violations.push_back({{"constraint", std::string(constraint_tag(v.constraint))},
                          {"location", v.location},
                          {"residual", v.residual}});
  }
  json j = {{"manifest", manifest_json(m)},
            {"feasible", r.feasible()},
            {"objective", r.objective},
            {"constraints", checks},
            {"violations", violations}};
  return j.dump(2) + "\n";
}

std::string simulate_report_json(const RunManifest& m, const SimResult& r) {
  json j = {{"manifest", manifest_json(m)},
            {"mean", r.mean},
            {"stderr", r.standard_error},
            {"samples", r.samples}};
  return j.dump(2) + "\n";
}

std::string capacity_report_text(const CapacityReport& r) {
  std::ostringstream out;
  out << "mode                 " << mode_name(r.mode) << "\n";
  out << "capacity             " << format_number(r.value) << "\n";
  if (r.mode == CapacityMode::truncated) {
    out << "lower                " << format_number(*r.lower) << "\n";
    out << "upper                " << format_number(*r.upper) << "\n";
  }
  if (r.covered_probability) {
    out << "covered probability  " << format_number(*r.covered_probability) << "\n";
  }
  if (r.standard_error) out << "stderr               " << format_number(*r.standard_error) << "\n";
  if (r.seed) out << "seed                 " << *r.seed << "\n";
  out << "full-state capacity  " << format_number(r.full_state_capacity) << "\n";
  out << "states evaluated     " << r.states_evaluated << " of " << r.state_space_size << "\n";
  return out.str();
}

std::string verify_report_text(const ConstraintSet& active, const ConstraintReport& r) {
  std::ostringstream out;
  for (auto c : active) {
    out << constraint_tag(c) << "\t" << (r.violates(c) ? "FAIL" : "PASS") << "\n";
  }
  for (const auto& v : r.violations) {
    out << "  " << constraint_tag(v.constraint) << " violated at " << v.location
        << " (residual " << format_number(v.residual) << ")\n";
  }
  out << "objective\t" << format_number(r.objective) << "\n";
  out << (r.feasible() ? "PASS" : "FAIL") << "\n";
  return out.str();
}

}  // namespace entcap
