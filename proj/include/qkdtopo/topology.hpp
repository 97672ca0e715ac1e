#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "qkdtopo/common.hpp"

namespace qkdtopo {

/// Physical fibre link between two distinct nodes. Stored canonically with
/// u < v (node order is the order of Topology::nodes).
struct Edge {
  int u = -1;
  int v = -1;
  double length_km = 0.0;
};

/// Client-server-client placement option: clients u,v attached to server p
/// over the physical edges (u,p) and (p,v). Canonical form has u < v; the
/// server may be any common neighbour of u and v.
struct CscEdge {
  int u = -1;  // client
  int p = -1;  // server (untrusted relay candidate)
  int v = -1;  // client
  double len_up_km = 0.0;
  double len_pv_km = 0.0;
};

/// One directed key demand: source s wants demand_kbps of secret key to t.
struct Demand {
  int s = -1;
  int t = -1;
  double demand_kbps = 0.0;
};

class Topology {
public:
  Topology() = default;

  /// Adds a node and returns its index. Ids must match [A-Za-z0-9.-]+ —
  /// underscores are reserved as separators in derived variable names.
  int add_node(const std::string& id);

  /// Adds an undirected edge (canonicalised to u < v). Rejects self-loops,
  /// duplicates, and non-positive lengths.
  void add_edge(int u, int v, double length_km);

  int node_index(const std::string& id) const;  // -1 when absent
  int require_node(const std::string& id) const;  // throws ValidationError

  int node_count() const { return static_cast<int>(nodes_.size()); }
  int edge_count() const { return static_cast<int>(edges_.size()); }

  const std::string& node_id(int i) const { return nodes_.at(static_cast<std::size_t>(i)); }
  const std::vector<std::string>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }

  bool has_edge(int u, int v) const;
  double edge_length(int u, int v) const;  // throws if absent

  /// Neighbours of node i, ascending by index.
  const std::vector<int>& neighbors(int i) const;

  bool is_connected() const;

  /// All CSC placements: for every unordered client pair (u,v), every common
  /// neighbour p with p != u, p != v. Sorted by (u, p, v).
  std::vector<CscEdge> enumerate_csc_edges() const;

  /// True when `id` is a valid node identifier.
  static bool valid_node_id(const std::string& id);

private:
  std::vector<std::string> nodes_;
  std::unordered_map<std::string, int> index_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> adj_;
  std::unordered_map<std::uint64_t, int> edge_lookup_;  // key(u,v) -> edge idx

  static std::uint64_t edge_key(int u, int v);
};

/// Demand matrix: ordered (s, t) pairs with positive demand. beta is the
/// global key-consumption factor applied uniformly.
class DemandMatrix {
public:
  void add(int s, int t, double demand_kbps);

  const std::vector<Demand>& demands() const { return demands_; }
  int pair_count() const { return static_cast<int>(demands_.size()); }
  bool empty() const { return demands_.empty(); }

  double beta = 1.0;

private:
  std::vector<Demand> demands_;
};

/// Full problem instance as read from disk or generated.
struct Instance {
  Topology topology;
  DemandMatrix demands;
  std::optional<std::uint64_t> seed;  // present for generated instances
};

/// JSON instance I/O. Unknown top-level or per-object fields are rejected
/// so that typos fail loudly.
Instance load_instance(const std::string& path);
Instance parse_instance_json(const std::string& text, const std::string& origin);
std::string serialize_instance(const Instance& inst);
void save_instance(const Instance& inst, const std::string& path);

/// Demand CSV: header `source,target,demand_kbps` then one row per ordered
/// pair. Errors carry 1-based line numbers.
DemandMatrix parse_demand_csv(const std::string& text, const Topology& topo,
                              const std::string& origin);

/// Built-in 14-node NSFNET fixture with repository-chosen metro-scale edge
/// lengths and a 3-user demand set.
Instance nsfnet_instance();

}  // namespace qkdtopo
