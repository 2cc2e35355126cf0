#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "entcap/capacity.hpp"
#include "entcap/flowcheck.hpp"
#include "entcap/model.hpp"
#include "entcap/montecarlo.hpp"
#include "entcap/solver.hpp"

namespace entcap {

std::string_view tool_version();

struct RunManifest {
  std::string command;
  std::string topology;         // name as given
  std::string topology_digest;  // 16 hex digits
  std::map<std::string, std::string> parameters;
  std::string tool_version;
  std::string timestamp;  // UTC, ISO 8601
  std::optional<std::uint64_t> seed;
};

/// Manifest stamped with the current time, or with SOURCE_DATE_EPOCH when
/// that variable is set (for byte-reproducible reports).
RunManifest make_manifest(std::string command, const Topology& t, std::string topology_name,
                          std::map<std::string, std::string> parameters,
                          std::optional<std::uint64_t> seed = std::nullopt);

// Structured (JSON) reports. Wall-clock timings are deliberately left out
// so reruns produce identical bytes.
std::string capacity_report_json(const RunManifest& m, const CapacityReport& r);
std::string snapshot_report_json(const RunManifest& m, const DirectedSnapshot& g,
                                 const SnapshotSolution& s, const std::string& solver,
                                 std::optional<double> oracle_value);
std::string verify_report_json(const RunManifest& m, const ConstraintSet& active,
                               const ConstraintReport& r);
std::string simulate_report_json(const RunManifest& m, const SimResult& r);

// Human-readable renderings.
std::string capacity_report_text(const CapacityReport& r);
std::string verify_report_text(const ConstraintSet& active, const ConstraintReport& r);
std::string format_number(double x);  // %.10g

}  // namespace entcap
