#include "entcap/snapshot.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>

namespace entcap {

namespace {

double binomial_pmf(int n, int k, double p) {
  double coefficient = 1.0;
  for (int i = 1; i <= k; ++i) coefficient = coefficient * (n - k + i) / i;
  return coefficient * std::pow(p, k) * std::pow(1.0 - p, n - k);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::optional<std::size_t> resolve_link_name(const Topology& t, std::string_view name) {
  for (std::size_t i = 0; i < t.links.size(); ++i) {
    const auto& l = t.links[i];
    if (name == l.u + "-" + l.v || name == l.v + "-" + l.u) return i;
  }
  return std::nullopt;
}

void check_state_shape(const Topology& t, const SnapshotState& s) {
  if (s.counts.size() != t.links.size())
    throw ValidationError("state", "state has " + std::to_string(s.counts.size()) +
                                       " counts for " + std::to_string(t.links.size()) + " links");
  for (std::size_t i = 0; i < s.counts.size(); ++i) {
    if (s.counts[i] < 0 || s.counts[i] > t.links[i].c)
      throw ValidationError("state." + t.links[i].name(),
                            "count " + std::to_string(s.counts[i]) + " outside [0, " +
                                std::to_string(t.links[i].c) + "]");
  }
}

}  // namespace

SnapshotState empty_state(const Topology& t) { return {std::vector<int>(t.links.size(), 0)}; }

SnapshotState full_state(const Topology& t) {
  SnapshotState s;
  for (const auto& l : t.links) s.counts.push_back(l.c);
  return s;
}

SnapshotState parse_state(const Topology& t, std::string_view spec) {
  spec = trim(spec);
  if (spec == "full") return full_state(t);
  SnapshotState s = empty_state(t);
  while (!spec.empty()) {
    const auto comma = spec.find(',');
    std::string_view item = trim(spec.substr(0, comma));
    spec = comma == std::string_view::npos ? std::string_view{} : spec.substr(comma + 1);
    if (item.empty()) continue;
    int count = 1;
    std::string_view name = item;
    if (const auto eq = item.find('='); eq != std::string_view::npos) {
      name = trim(item.substr(0, eq));
      const auto value = trim(item.substr(eq + 1));
      auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), count);
      if (ec != std::errc{} || ptr != value.data() + value.size())
        throw ValidationError("state." + std::string(name), "count is not an integer");
    }
    auto link = resolve_link_name(t, name);
    if (!link) throw ValidationError("state." + std::string(name), "no such link");
    s.counts[*link] = count;
  }
  check_state_shape(t, s);
  return s;
}

std::string format_state(const SnapshotState& state) {
  std::string out;
  for (std::size_t i = 0; i < state.counts.size(); ++i) {
    if (i) out += ';';
    out += std::to_string(state.counts[i]);
  }
  return out;
}

double state_probability(const Topology& t, const SnapshotState& s) {
  check_state_shape(t, s);
  double p = 1.0;
  for (std::size_t i = 0; i < s.counts.size(); ++i)
    p *= binomial_pmf(t.links[i].c, s.counts[i], t.links[i].p);
  return p;
}

StateSpace::StateSpace(const Topology& t) {
  for (const auto& l : t.links) {
    radix_.push_back(l.c + 1);
    std::vector<double> table;
    for (int k = 0; k <= l.c; ++k) table.push_back(binomial_pmf(l.c, k, l.p));
    pmf_.push_back(std::move(table));
    const auto r = static_cast<std::uint64_t>(l.c) + 1;
    if (size_ > std::numeric_limits<std::uint64_t>::max() / r) {
      overflow_ = true;
      size_ = std::numeric_limits<std::uint64_t>::max();
    } else if (!overflow_) {
      size_ *= r;
    }
  }
}

SnapshotState StateSpace::decode(std::uint64_t index) const {
  SnapshotState s;
  s.counts.resize(radix_.size());
  for (std::size_t i = 0; i < radix_.size(); ++i) {
    const auto r = static_cast<std::uint64_t>(radix_[i]);
    s.counts[i] = static_cast<int>(index % r);
    index /= r;
  }
  return s;
}

std::uint64_t StateSpace::encode(const SnapshotState& state) const {
  std::uint64_t index = 0;
  for (std::size_t i = radix_.size(); i-- > 0;)
    index = index * static_cast<std::uint64_t>(radix_[i]) + static_cast<std::uint64_t>(state.counts[i]);
  return index;
}

double StateSpace::probability(const std::vector<int>& counts) const {
  double p = 1.0;
  for (std::size_t i = 0; i < counts.size(); ++i) p *= pmf_[i][counts[i]];
  return p;
}

StateSpace::Cursor StateSpace::cursor(std::uint64_t begin, std::uint64_t end) const {
  Cursor c;
  c.space_ = this;
  c.index_ = begin;
  c.end_ = std::min(end, size_);
  c.counts_ = decode(begin).counts;
  return c;
}

void StateSpace::Cursor::advance() {
  ++index_;
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    if (++counts_[i] < space_->radix_[i]) return;
    counts_[i] = 0;
  }
}

std::string splitter_id(const LinkSpec& link, int k) {
  return link.u + "__" + link.v + "__" + std::to_string(k);
}

std::pair<Topology, SnapshotState> to_unit_capacity(const Topology& t, const SnapshotState& s) {
  check_state_shape(t, s);
  Topology out = t;
  out.links.clear();
  SnapshotState out_state;
  std::vector<std::pair<LinkSpec, int>> staged;
  for (std::size_t i = 0; i < t.links.size(); ++i) {
    const auto& l = t.links[i];
    const int count = s.counts[i];
    if (count <= 1) {
      staged.emplace_back(l, count);
      continue;
    }
    for (int k = 1; k <= count; ++k) {
      NodeSpec splitter{splitter_id(l, k), 1.0, NodeRole::internal, {}};
      out.nodes.push_back(splitter);
      LinkSpec first{l.u, splitter.id, std::nullopt, l.p, 1};
      LinkSpec second{splitter.id, l.v, std::nullopt, l.p, 1};
      staged.emplace_back(first, 1);
      staged.emplace_back(second, 1);
    }
  }
  for (auto& [link, count] : staged) out.links.push_back(link);
  out.canonicalize();
  // canonicalize() reorders links; recover each count by endpoint pair.
  out_state.counts.assign(out.links.size(), 0);
  for (const auto& [link, count] : staged) out_state.counts[*out.find_link(link.u, link.v)] = count;
  return {std::move(out), std::move(out_state)};
}

DirectedSnapshot::DirectedSnapshot(std::vector<std::string> ids, std::vector<double> gains,
                                   std::vector<Arc> arcs, std::string_view source,
                                   std::string_view sink)
    : ids_(std::move(ids)), gains_(std::move(gains)), arcs_(std::move(arcs)) {
  if (gains_.size() != ids_.size())
    throw ValidationError("snapshot", "gain vector does not match node list");
  auto s = find_node(source);
  auto d = find_node(sink);
  if (!s) throw ValidationError("snapshot.source", "source missing from snapshot");
  if (!d) throw ValidationError("snapshot.sink", "sink missing from snapshot");
  source_ = *s;
  sink_ = *d;
  for (const auto& a : arcs_) {
    if (a.from >= ids_.size() || a.to >= ids_.size() || a.from == a.to)
      throw ValidationError("snapshot.arcs", "arc endpoint out of range");
  }
  std::sort(arcs_.begin(), arcs_.end());
  arcs_.erase(std::unique(arcs_.begin(), arcs_.end()), arcs_.end());
}

std::optional<std::size_t> DirectedSnapshot::find_node(std::string_view id) const {
  for (std::size_t i = 0; i < ids_.size(); ++i)
    if (ids_[i] == id) return i;
  return std::nullopt;
}

std::size_t DirectedSnapshot::node_index(std::string_view id) const {
  auto i = find_node(id);
  if (!i) throw ValidationError("snapshot", "unknown node '" + std::string(id) + "'");
  return *i;
}

bool DirectedSnapshot::has_arc(std::size_t from, std::size_t to) const {
  return std::binary_search(arcs_.begin(), arcs_.end(), Arc{from, to});
}

std::size_t DirectedSnapshot::num_adjacencies() const {
  std::size_t n = 0;
  for (const auto& a : arcs_) {
    if (a.from < a.to || !has_arc(a.to, a.from)) ++n;
  }
  return n;
}

DirectedSnapshot to_directed(const Topology& t, const SnapshotState& s) {
  check_state_shape(t, s);
  std::vector<std::string> ids;
  std::vector<double> gains;
  for (const auto& n : t.nodes) {
    ids.push_back(n.id);
    gains.push_back(n.role == NodeRole::internal ? n.q : 1.0);
  }
  auto index_of = [&](const std::string& id) {
    return static_cast<std::size_t>(std::find(ids.begin(), ids.end(), id) - ids.begin());
  };
  std::vector<Arc> arcs;
  for (std::size_t i = 0; i < t.links.size(); ++i) {
    if (s.counts[i] == 0) continue;
    if (s.counts[i] > 1)
      throw ValidationError("state." + t.links[i].name(),
                            "non-unit count; apply to_unit_capacity first");
    const auto& l = t.links[i];
    const std::size_t u = index_of(l.u);
    const std::size_t v = index_of(l.v);
    const bool u_end = l.u == t.source || l.u == t.sink;
    const bool v_end = l.v == t.source || l.v == t.sink;
    if (!u_end && !v_end) {
      arcs.push_back({u, v});
      arcs.push_back({v, u});
      continue;
    }
    // At least one endpoint is s or t: orient away from s and into t.
    if (l.u == t.source || l.v == t.sink) {
      arcs.push_back({u, v});
    } else {
      arcs.push_back({v, u});
    }
  }
  return DirectedSnapshot(std::move(ids), std::move(gains), std::move(arcs), t.source, t.sink);
}

DirectedSnapshot directed_snapshot(const Topology& t, const SnapshotState& s) {
  auto [unit, unit_state] = to_unit_capacity(t, s);
  return to_directed(unit, unit_state);
}

void write_state_csv_header(std::ostream& out) {
  out << "state_index,state_counts,probability,capacity\n";
}

void write_state_csv_row(std::ostream& out, std::uint64_t index, const std::vector<int>& counts,
                         double probability, double capacity) {
  out << index << ',';
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (i) out << ';';
    out << counts[i];
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, ",%.17g,%.17g\n", probability, capacity);
  out << buf;
}

}  // namespace entcap
