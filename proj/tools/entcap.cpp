// entcap: command-line front end for the capacity library.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "entcap/capacity.hpp"
#include "entcap/datasets.hpp"
#include "entcap/errors.hpp"
#include "entcap/flowcheck.hpp"
#include "entcap/montecarlo.hpp"
#include "entcap/oracle.hpp"
#include "entcap/report.hpp"
#include "entcap/snapshot.hpp"
#include "entcap/solver.hpp"

using namespace entcap;

namespace {

// Exit codes: 0 success, 1 check failed (verify infeasible, solver
// disagreement), 2 validation or guard error.
constexpr int kCheckFailed = 1;
constexpr int kError = 2;

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
}

std::string paths_text(const std::vector<DeliveredPath>& paths) {
  std::ostringstream out;
  for (const auto& p : paths) {
    out << "  ";
    for (std::size_t i = 0; i < p.nodes.size(); ++i) out << (i ? " -> " : "") << p.nodes[i];
    out << "  (" << format_number(p.delivered) << ")\n";
  }
  return out.str();
}

std::string assignment_text(const FlowAssignment& a) {
  std::ostringstream out;
  for (const auto& [arc, v] : a.flow) {
    if (v != 0.0) out << "  F(" << arc.first << "," << arc.second << ") = " << format_number(v) << "\n";
  }
  for (const auto& [key, v] : a.match) {
    if (v != 0) {
      out << "  x(" << std::get<0>(key) << "," << std::get<1>(key) << "," << std::get<2>(key)
          << ") = " << v << "\n";
    }
  }
  return out.str();
}

struct CapacityArgs {
  std::string topology;
  std::string mode = "exact";
  std::uint64_t top_k = 0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::uint64_t budget = 1ULL << 22;
  std::string out, per_state;
  bool swap = false;
};

int cmd_capacity(const CapacityArgs& a) {
  Topology t = resolve_topology(a.topology);
  if (a.swap) t = t.with_endpoints_swapped();
  const CapacityMode mode = parse_mode(a.mode);

  CapacityOptions options;
  options.threads = a.threads;
  options.state_budget = a.budget;
  std::ofstream csv;
  if (!a.per_state.empty()) {
    csv.open(a.per_state, std::ios::binary);
    if (!csv) throw Error("cannot write '" + a.per_state + "'");
    write_state_csv_header(csv);
    options.per_state = [&](std::uint64_t i, const std::vector<int>& c, double p, double cap) {
      write_state_csv_row(csv, i, c, p, cap);
    };
  }

  std::map<std::string, std::string> params{{"mode", a.mode},
                                            {"swap_endpoints", a.swap ? "true" : "false"}};
  std::optional<std::uint64_t> seed;
  CapacityReport report;
  switch (mode) {
    case CapacityMode::exact:
      params["budget"] = std::to_string(a.budget);
      report = exact_capacity(t, options);
      break;
    case CapacityMode::truncated:
      if (a.top_k == 0) throw ValidationError("--top-k", "truncated mode needs --top-k N with N >= 1");
      params["top_k"] = std::to_string(a.top_k);
      report = truncated_capacity(t, a.top_k, options);
      break;
    case CapacityMode::sampled:
      if (a.samples == 0) throw ValidationError("--samples", "sampled mode needs --samples N with N >= 1");
      params["samples"] = std::to_string(a.samples);
      seed = a.seed;
      report = sampled_capacity(t, a.samples, a.seed, options);
      break;
  }
  if (!a.out.empty()) {
    write_file(a.out, capacity_report_json(make_manifest("capacity", t, a.topology, params, seed), report));
  }
  std::cout << "topology             " << a.topology << "\n" << capacity_report_text(report);
  return 0;
}

struct SnapshotArgs {
  std::string topology;
  std::string state;
  std::string solver = "bnb";
  std::size_t oracle_limit = OracleOptions{}.max_links;
  std::string out;
};

int cmd_snapshot(const SnapshotArgs& a) {
  const Topology t = resolve_topology(a.topology);
  const SnapshotState state = parse_state(t, a.state);
  const DirectedSnapshot g = directed_snapshot(t, state);
  OracleOptions oracle;
  oracle.max_links = a.oracle_limit;

  SnapshotSolution solution;
  std::optional<double> oracle_value;
  if (a.solver == "oracle") {
    const PathSet best = best_path_set(g, oracle);
    std::vector<std::vector<std::string>> paths;
    for (const auto& p : best.paths) {
      std::vector<std::string> ids;
      for (auto v : p) ids.push_back(g.id(v));
      paths.push_back(std::move(ids));
    }
    solution.assignment = assignment_from_paths(g, paths);
    solution.paths = extract_paths(g, solution.assignment);
    solution.objective = best.value;
    oracle_value = best.value;
  } else {
    solution = solve_snapshot(g);
    if (a.solver == "both") oracle_value = brute_force_capacity(g, oracle);
  }

  std::cout << "state                " << format_state(state) << "\n";
  std::cout << "probability          " << format_number(state_probability(t, state)) << "\n";
  std::cout << "objective            " << format_number(solution.objective) << "\n";
  std::cout << "paths                " << solution.paths.size() << "\n" << paths_text(solution.paths);
  std::cout << "assignment\n" << assignment_text(solution.assignment);

  int status = 0;
  if (a.solver == "both") {
    const bool agree = std::abs(*oracle_value - solution.objective) <= 1e-9;
    std::cout << "oracle               " << format_number(*oracle_value) << "\n";
    std::cout << (agree ? "agreement            yes\n" : "agreement            NO\n");
    if (!agree) status = kCheckFailed;
  }
  if (!a.out.empty()) {
    const auto m = make_manifest("snapshot", t, a.topology,
                                 {{"state", format_state(state)}, {"solver", a.solver}});
    write_file(a.out, snapshot_report_json(m, g, solution, a.solver, oracle_value));
  }
  return status;
}

struct VerifyArgs {
  std::string assignment;
  std::string topology;
  std::string state = "full";
  std::string constraints = "all";
  std::string out;
};

int cmd_verify(const VerifyArgs& a) {
  const std::string doc = resolve_document(a.assignment);
  std::string topology = a.topology;
  if (topology.empty()) {
    // Assignment documents may name the network they were written for.
    const auto j = nlohmann::json::parse(doc, nullptr, false);
    if (j.is_object() && j.contains("snapshot") && j["snapshot"].is_string()) {
      topology = j["snapshot"].get<std::string>();
    } else {
      throw ValidationError("--topology", "assignment names no network; pass --topology");
    }
  }
  const Topology t = resolve_topology(topology);
  const DirectedSnapshot g = directed_snapshot(t, parse_state(t, a.state));
  const FlowAssignment assignment = load_assignment(doc);
  const ConstraintSet active = parse_constraints(a.constraints);
  const ConstraintReport report = check_assignment(g, assignment, active);

  std::cout << verify_report_text(active, report);
  if (!a.out.empty()) {
    const auto m = make_manifest("verify", t, topology,
                                 {{"assignment", a.assignment}, {"constraints", a.constraints},
                                  {"state", a.state}});
    write_file(a.out, verify_report_json(m, active, report));
  }
  return report.feasible() ? 0 : kCheckFailed;
}

struct SimulateArgs {
  std::string topology;
  std::uint64_t samples = 100000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::string out, per_trial;
};

int cmd_simulate(const SimulateArgs& a) {
  if (a.samples < 1) throw ValidationError("--samples", "sample count must be at least 1");
  const Topology t = resolve_topology(a.topology);
  SimConfig cfg;
  cfg.samples = a.samples;
  cfg.seed = a.seed;
  cfg.threads = a.threads;
  std::ofstream csv;
  if (!a.per_trial.empty()) {
    csv.open(a.per_trial, std::ios::binary);
    if (!csv) throw Error("cannot write '" + a.per_trial + "'");
    csv << "trial,delivered\n";
    cfg.per_trial = [&](std::uint64_t i, int d) { csv << i << ',' << d << '\n'; };
  }
  const SimResult r = simulate_local_knowledge(t, cfg);
  std::cout << "mean                 " << format_number(r.mean) << "\n";
  std::cout << "stderr               " << format_number(r.standard_error) << "\n";
  std::cout << "samples              " << r.samples << "\n";
  if (!a.out.empty()) {
    const auto m = make_manifest("simulate", t, a.topology,
                                 {{"samples", std::to_string(a.samples)}}, a.seed);
    write_file(a.out, simulate_report_json(m, r));
  }
  return 0;
}

int cmd_datasets_list() {
  for (const auto& d : list_datasets()) std::cout << d.name << "\t" << d.description << "\n";
  return 0;
}

int cmd_datasets_export(const std::string& name, const std::string& out) {
  const std::string_view doc = bundled_document(name);
  if (out.empty()) {
    std::cout << doc;
  } else {
    write_file(out, std::string(doc));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact bipartite entanglement capacity of quantum repeater networks"};
  app.set_version_flag("--version", std::string(tool_version()));
  app.require_subcommand(1);

  CapacityArgs cap;
  auto* capacity = app.add_subcommand("capacity", "Network capacity over all link states");
  capacity->add_option("--topology", cap.topology, "Bundled dataset name or topology file")->required();
  capacity->add_option("--mode", cap.mode, "exact, truncated or sampled")
      ->check(CLI::IsMember({"exact", "truncated", "sampled"}));
  capacity->add_option("--top-k", cap.top_k, "States evaluated in truncated mode");
  capacity->add_option("--samples", cap.samples, "States drawn in sampled mode");
  capacity->add_option("--seed", cap.seed, "RNG seed for sampled mode");
  capacity->add_option("--threads", cap.threads, "Worker threads (0 = auto)");
  capacity->add_option("--budget", cap.budget, "Largest state space accepted by exact mode");
  capacity->add_option("--out", cap.out, "Write the structured report to this path");
  capacity->add_option("--per-state", cap.per_state, "Write per-state CSV to this path");
  capacity->add_flag("--swap-endpoints", cap.swap, "Exchange source and sink first");

  SnapshotArgs snap;
  auto* snapshot = app.add_subcommand("snapshot", "Capacity of a single link state");
  snapshot->add_option("--topology", snap.topology, "Bundled dataset name or topology file")->required();
  snapshot->add_option("--state", snap.state, "link=count,... (omitted links are 0), or 'full'");
  snapshot->add_option("--solver", snap.solver, "bnb, oracle or both")
      ->check(CLI::IsMember({"bnb", "oracle", "both"}));
  snapshot->add_option("--oracle-limit", snap.oracle_limit, "Largest instance the oracle accepts");
  snapshot->add_option("--out", snap.out, "Write the structured report to this path");

  VerifyArgs ver;
  auto* verify = app.add_subcommand("verify", "Check a flow assignment against the constraints");
  verify->add_option("--assignment", ver.assignment, "Bundled fixture name or assignment file")->required();
  verify->add_option("--topology", ver.topology, "Network (default: the one named in the assignment)");
  verify->add_option("--state", ver.state, "Link state of the network (default: full)");
  verify->add_option("--constraints", ver.constraints, "Comma-separated tags (bounds,c6,c7,c8,c9) or all");
  verify->add_option("--out", ver.out, "Write the structured report to this path");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Local-knowledge greedy swapping baseline");
  simulate->add_option("--topology", sim.topology, "Bundled dataset name or topology file")->required();
  simulate->add_option("--samples", sim.samples, "Number of trials");
  simulate->add_option("--seed", sim.seed, "RNG seed");
  simulate->add_option("--threads", sim.threads, "Worker threads (0 = auto)");
  simulate->add_option("--out", sim.out, "Write the structured report to this path");
  simulate->add_option("--per-trial", sim.per_trial, "Write per-trial CSV to this path");

  auto* datasets = app.add_subcommand("datasets", "Bundled study networks");
  datasets->require_subcommand(1);
  auto* list = datasets->add_subcommand("list", "List bundled datasets");
  std::string export_name, export_out;
  auto* exp = datasets->add_subcommand("export", "Print or save a bundled dataset or fixture");
  exp->add_option("name", export_name, "Dataset name")->required();
  exp->add_option("--out", export_out, "Write to this path instead of standard output");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*capacity) return cmd_capacity(cap);
    if (*snapshot) return cmd_snapshot(snap);
    if (*verify) return cmd_verify(ver);
    if (*simulate) return cmd_simulate(sim);
    if (*list) return cmd_datasets_list();
    if (*exp) return cmd_datasets_export(export_name, export_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
  return 0;
}
