#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "entcap/snapshot.hpp"

namespace entcap {

// Explicit variable assignment of the leaky-flow program, keyed by node id.
// Unlisted flows and matchings are zero.
struct FlowAssignment {
  using ArcKey = std::pair<std::string, std::string>;
  using TripleKey = std::tuple<std::string, std::string, std::string>;

  std::map<ArcKey, double> flow;    // F_ij
  std::map<TripleKey, int> match;   // x_ijk in {0, 1}

  double F(const std::string& i, const std::string& j) const;
  int x(const std::string& i, const std::string& j, const std::string& k) const;

  friend bool operator==(const FlowAssignment&, const FlowAssignment&) = default;
};

enum class Constraint {
  bounds,       // 0 <= F_ij <= 1
  exclusivity,  // C6: sum_k (x_ijk + x_kji) <= 1 per arc
  matched_gain, // C7: x_ijk (F_ij q_j - F_jk) = 0 per triple
  coverage,     // C8: sum_k x_ijk >= F_ij per arc not entering the sink
  conservation, // C9: sum_j (F_ij - F_ji q_i) = 0 per internal node
};

using ConstraintSet = std::set<Constraint>;

const ConstraintSet& all_constraints();
std::string_view constraint_tag(Constraint c);  // "BOUNDS", "C6", ...
// Accepts "bounds,c6,c7" style lists (case-insensitive) or "all".
ConstraintSet parse_constraints(std::string_view csv);

struct Violation {
  Constraint constraint;
  std::string location;  // "(2,3)", "(1,3,t)" or "2"
  double residual;
};

struct ConstraintReport {
  std::vector<Violation> violations;
  double objective = 0.0;

  bool feasible() const { return violations.empty(); }
  bool violates(Constraint c) const;
  bool violates_at(Constraint c, std::string_view location) const;
};

// Equality constraints C7/C9 are checked to this absolute tolerance.
inline constexpr double kFeasibilityTolerance = 1e-9;

/// Evaluates each active constraint. Throws ValidationError when the
/// assignment references an arc or triple that is not in the snapshot's
/// variable domain.
ConstraintReport check_assignment(const DirectedSnapshot& g, const FlowAssignment& a,
                                  const ConstraintSet& active = all_constraints());

/// Sum of F_jt over arcs into the sink.
double objective_value(const DirectedSnapshot& g, const FlowAssignment& a);

struct DeliveredPath {
  std::vector<std::string> nodes;  // s ... t
  double delivered = 0.0;          // flow on the final arc

  friend bool operator==(const DeliveredPath&, const DeliveredPath&) = default;
};

/// Follows positive flow from the source through the matching variables.
/// Throws ValidationError if the assignment is not feasible under every
/// constraint.
std::vector<DeliveredPath> extract_paths(const DirectedSnapshot& g, const FlowAssignment& a);

/// Assignment realizing the given node paths: unit flow leaves the source
/// and is scaled by each internal gain along the way.
FlowAssignment assignment_from_paths(const DirectedSnapshot& g,
                                     const std::vector<std::vector<std::string>>& paths);

/// Assignment file: {"flows": [{from, to, value}], "matchings": [{i, j, k, value}]}.
FlowAssignment load_assignment(std::string_view document);
FlowAssignment load_assignment_file(const std::string& path);
std::string serialize_assignment(const FlowAssignment& a);

}  // namespace entcap
