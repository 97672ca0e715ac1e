#include "qkdtopo/topology.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <queue>
#include <sstream>

#include <nlohmann/json.hpp>

namespace qkdtopo {

namespace {

using nlohmann::json;

void reject_unknown_fields(const json& obj, std::initializer_list<const char*> allowed,
                           const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* key : allowed) {
      if (it.key() == key) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      throw ParseError(where + ": unknown field \"" + it.key() + "\"");
    }
  }
}

}  // namespace

bool Topology::valid_node_id(const std::string& id) {
  if (id.empty()) return false;
  for (char c : id) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-';
    if (!ok) return false;
  }
  return true;
}

std::uint64_t Topology::edge_key(int u, int v) {
  if (u > v) std::swap(u, v);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(u)) << 32) |
         static_cast<std::uint32_t>(v);
}

int Topology::add_node(const std::string& id) {
  if (!valid_node_id(id)) {
    throw ValidationError("invalid node id \"" + id +
                          "\" (expected [A-Za-z0-9.-]+, underscores are reserved)");
  }
  if (index_.count(id)) {
    throw ValidationError("duplicate node id \"" + id + "\"");
  }
  const int idx = static_cast<int>(nodes_.size());
  nodes_.push_back(id);
  index_.emplace(id, idx);
  adj_.emplace_back();
  return idx;
}

void Topology::add_edge(int u, int v, double length_km) {
  if (u < 0 || u >= node_count() || v < 0 || v >= node_count()) {
    throw ValidationError("edge endpoint out of range");
  }
  if (u == v) {
    throw ValidationError("self-loop at node \"" + node_id(u) + "\"");
  }
  if (!(length_km > 0.0) || !std::isfinite(length_km)) {
    throw ValidationError("edge (" + node_id(u) + "," + node_id(v) +
                          ") has non-positive length");
  }
  if (u > v) std::swap(u, v);
  const std::uint64_t key = edge_key(u, v);
  if (edge_lookup_.count(key)) {
    throw ValidationError("duplicate edge (" + node_id(u) + "," + node_id(v) + ")");
  }
  edge_lookup_.emplace(key, static_cast<int>(edges_.size()));
  edges_.push_back(Edge{u, v, length_km});
  adj_[static_cast<std::size_t>(u)].push_back(v);
  adj_[static_cast<std::size_t>(v)].push_back(u);
  std::sort(adj_[static_cast<std::size_t>(u)].begin(), adj_[static_cast<std::size_t>(u)].end());
  std::sort(adj_[static_cast<std::size_t>(v)].begin(), adj_[static_cast<std::size_t>(v)].end());
}

int Topology::node_index(const std::string& id) const {
  auto it = index_.find(id);
  return it == index_.end() ? -1 : it->second;
}

int Topology::require_node(const std::string& id) const {
  const int idx = node_index(id);
  if (idx < 0) throw ValidationError("unknown node id \"" + id + "\"");
  return idx;
}

bool Topology::has_edge(int u, int v) const {
  return edge_lookup_.count(edge_key(u, v)) != 0;
}

double Topology::edge_length(int u, int v) const {
  auto it = edge_lookup_.find(edge_key(u, v));
  if (it == edge_lookup_.end()) {
    throw ValidationError("no edge (" + node_id(u) + "," + node_id(v) + ")");
  }
  return edges_[static_cast<std::size_t>(it->second)].length_km;
}

const std::vector<int>& Topology::neighbors(int i) const {
  return adj_.at(static_cast<std::size_t>(i));
}

bool Topology::is_connected() const {
  if (nodes_.empty()) return true;
  std::vector<char> seen(nodes_.size(), 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  int reached = 1;
  while (!q.empty()) {
    const int x = q.front();
    q.pop();
    for (int y : adj_[static_cast<std::size_t>(x)]) {
      if (!seen[static_cast<std::size_t>(y)]) {
        seen[static_cast<std::size_t>(y)] = 1;
        ++reached;
        q.push(y);
      }
    }
  }
  return reached == node_count();
}

std::vector<CscEdge> Topology::enumerate_csc_edges() const {
  std::vector<CscEdge> out;
  const int n = node_count();
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      // Common neighbours of u and v; adjacency lists are sorted.
      const auto& a = adj_[static_cast<std::size_t>(u)];
      const auto& b = adj_[static_cast<std::size_t>(v)];
      std::size_t i = 0, j = 0;
      while (i < a.size() && j < b.size()) {
        if (a[i] < b[j]) {
          ++i;
        } else if (a[i] > b[j]) {
          ++j;
        } else {
          const int p = a[i];
          if (p != u && p != v) {
            out.push_back(CscEdge{u, p, v, edge_length(u, p), edge_length(p, v)});
          }
          ++i;
          ++j;
        }
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const CscEdge& x, const CscEdge& y) {
    if (x.u != y.u) return x.u < y.u;
    if (x.p != y.p) return x.p < y.p;
    return x.v < y.v;
  });
  return out;
}

void DemandMatrix::add(int s, int t, double demand_kbps) {
  if (s == t) throw ValidationError("demand pair with identical endpoints");
  if (!(demand_kbps > 0.0) || !std::isfinite(demand_kbps)) {
    throw ValidationError("demand must be positive and finite");
  }
  for (const Demand& d : demands_) {
    if (d.s == s && d.t == t) throw ValidationError("duplicate demand pair");
  }
  demands_.push_back(Demand{s, t, demand_kbps});
}

Instance parse_instance_json(const std::string& text, const std::string& origin) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(origin + ": " + e.what());
  }
  if (!root.is_object()) throw ParseError(origin + ": top level must be an object");
  reject_unknown_fields(root, {"nodes", "edges", "demands", "beta", "seed"}, origin);
  if (!root.contains("nodes") || !root.contains("edges")) {
    throw ParseError(origin + ": missing \"nodes\" or \"edges\"");
  }

  Instance inst;
  const json& nodes = root["nodes"];
  if (!nodes.is_array()) throw ParseError(origin + ": \"nodes\" must be an array");
  for (const json& nd : nodes) {
    if (!nd.is_string()) throw ParseError(origin + ": node entries must be strings");
    try {
      inst.topology.add_node(nd.get<std::string>());
    } catch (const ValidationError& e) {
      throw ParseError(origin + ": " + e.what());
    }
  }

  const json& edges = root["edges"];
  if (!edges.is_array()) throw ParseError(origin + ": \"edges\" must be an array");
  for (const json& ed : edges) {
    if (!ed.is_object()) throw ParseError(origin + ": edge entries must be objects");
    reject_unknown_fields(ed, {"u", "v", "length_km"}, origin + " edge");
    if (!ed.contains("u") || !ed.contains("v") || !ed.contains("length_km")) {
      throw ParseError(origin + ": edge needs \"u\", \"v\", \"length_km\"");
    }
    if (!ed["u"].is_string() || !ed["v"].is_string() || !ed["length_km"].is_number()) {
      throw ParseError(origin + ": edge field types must be (string, string, number)");
    }
    try {
      const int u = inst.topology.require_node(ed["u"].get<std::string>());
      const int v = inst.topology.require_node(ed["v"].get<std::string>());
      inst.topology.add_edge(u, v, ed["length_km"].get<double>());
    } catch (const ValidationError& e) {
      throw ParseError(origin + ": " + e.what());
    }
  }

  if (root.contains("beta")) {
    if (!root["beta"].is_number()) throw ParseError(origin + ": \"beta\" must be a number");
    inst.demands.beta = root["beta"].get<double>();
    if (!(inst.demands.beta > 0.0)) throw ParseError(origin + ": \"beta\" must be > 0");
  }
  if (root.contains("demands")) {
    const json& dm = root["demands"];
    if (!dm.is_array()) throw ParseError(origin + ": \"demands\" must be an array");
    for (const json& d : dm) {
      if (!d.is_object()) throw ParseError(origin + ": demand entries must be objects");
      reject_unknown_fields(d, {"s", "t", "demand_kbps"}, origin + " demand");
      if (!d.contains("s") || !d.contains("t") || !d.contains("demand_kbps")) {
        throw ParseError(origin + ": demand needs \"s\", \"t\", \"demand_kbps\"");
      }
      if (!d["s"].is_string() || !d["t"].is_string() || !d["demand_kbps"].is_number()) {
        throw ParseError(origin + ": demand field types must be (string, string, number)");
      }
      try {
        inst.demands.add(inst.topology.require_node(d["s"].get<std::string>()),
                         inst.topology.require_node(d["t"].get<std::string>()),
                         d["demand_kbps"].get<double>());
      } catch (const ValidationError& e) {
        throw ParseError(origin + ": " + e.what());
      }
    }
  }
  if (root.contains("seed")) {
    if (!root["seed"].is_number_unsigned()) {
      throw ParseError(origin + ": \"seed\" must be a non-negative integer");
    }
    inst.seed = root["seed"].get<std::uint64_t>();
  }
  return inst;
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open instance file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_instance_json(ss.str(), path);
}

std::string serialize_instance(const Instance& inst) {
  json root;
  root["nodes"] = json::array();
  for (const std::string& id : inst.topology.nodes()) root["nodes"].push_back(id);
  root["edges"] = json::array();
  for (const Edge& e : inst.topology.edges()) {
    root["edges"].push_back({{"u", inst.topology.node_id(e.u)},
                             {"v", inst.topology.node_id(e.v)},
                             {"length_km", e.length_km}});
  }
  root["beta"] = inst.demands.beta;
  root["demands"] = json::array();
  for (const Demand& d : inst.demands.demands()) {
    root["demands"].push_back({{"s", inst.topology.node_id(d.s)},
                               {"t", inst.topology.node_id(d.t)},
                               {"demand_kbps", d.demand_kbps}});
  }
  if (inst.seed) root["seed"] = *inst.seed;
  return root.dump(2) + "\n";
}

void save_instance(const Instance& inst, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write instance file: " + path);
  out << serialize_instance(inst);
  if (!out) throw IoError("failed writing instance file: " + path);
}

DemandMatrix parse_demand_csv(const std::string& text, const Topology& topo,
                              const std::string& origin) {
  DemandMatrix dm;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!header_seen) {
      if (cells.size() != 3 || cells[0] != "source" || cells[1] != "target" ||
          cells[2] != "demand_kbps") {
        throw ParseError(origin + ":" + std::to_string(lineno) +
                         ": expected header \"source,target,demand_kbps\"");
      }
      header_seen = true;
      continue;
    }
    if (cells.size() != 3) {
      throw ParseError(origin + ":" + std::to_string(lineno) + ": expected 3 fields, got " +
                       std::to_string(cells.size()));
    }
    double value = 0.0;
    try {
      std::size_t pos = 0;
      value = std::stod(cells[2], &pos);
      if (pos != cells[2].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ParseError(origin + ":" + std::to_string(lineno) + ": bad demand value \"" +
                       cells[2] + "\"");
    }
    try {
      dm.add(topo.require_node(cells[0]), topo.require_node(cells[1]), value);
    } catch (const ValidationError& e) {
      throw ParseError(origin + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!header_seen) throw ParseError(origin + ": empty demand file");
  return dm;
}

}  // namespace qkdtopo
