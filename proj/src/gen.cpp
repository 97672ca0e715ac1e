#include "qkdtopo/gen.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "qkdtopo/rng.hpp"

namespace qkdtopo {

namespace {

constexpr int kConnectRetries = 10000;

std::string node_name(int i) { return "n" + std::to_string(i); }

}  // namespace

void GenSpec::validate() const {
  if (n_nodes < 2) throw ValidationError("n_nodes must be >= 2");
  if (instances < 1) throw ValidationError("instances must be >= 1");
  if (!(avg_degree > 0.0)) throw ValidationError("avg_degree must be positive");
  if (!(length_lo_km > 0.0) || length_lo_km > length_hi_km) {
    throw ValidationError("length range must satisfy 0 < lo <= hi");
  }
  if (!(demand_lo_kbps > 0.0) || demand_lo_kbps > demand_hi_kbps) {
    throw ValidationError("demand range must satisfy 0 < lo <= hi");
  }
  if (!(user_fraction > 0.0) || user_fraction > 1.0) {
    throw ValidationError("user_fraction must be in (0, 1]");
  }
  const long long pairs =
      static_cast<long long>(n_nodes) * (n_nodes - 1) / 2;
  if (edge_target() > pairs) {
    throw ValidationError("edge target " + std::to_string(edge_target()) +
                          " exceeds the " + std::to_string(pairs) + " possible pairs");
  }
  if (edge_target() < n_nodes - 1) {
    throw ValidationError("edge target " + std::to_string(edge_target()) +
                          " cannot connect " + std::to_string(n_nodes) + " nodes");
  }
  if (user_count() < 2) {
    throw ValidationError("user_fraction yields fewer than 2 users");
  }
}

int GenSpec::edge_target() const {
  return static_cast<int>(std::llround(avg_degree * n_nodes / 2.0));
}

int GenSpec::user_count() const {
  return static_cast<int>(std::ceil(user_fraction * n_nodes));
}

Instance gen_instance(const GenSpec& spec, std::uint64_t instance_seed) {
  Rng rng(instance_seed);
  const int n = spec.n_nodes;
  const int m = spec.edge_target();

  // All unordered pairs in lexicographic order; a partial shuffle picks m of
  // them uniformly. Resample the whole set until the graph is connected.
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) pairs.emplace_back(u, v);

  Instance inst;
  inst.seed = instance_seed;
  for (int attempt = 0;; ++attempt) {
    if (attempt >= kConnectRetries) {
      throw Error("no connected graph after " + std::to_string(kConnectRetries) +
                  " resamples (n=" + std::to_string(n) + ", m=" + std::to_string(m) + ")");
    }
    std::vector<std::pair<int, int>> deck = pairs;
    // Partial Fisher-Yates: draw m distinct pairs.
    for (int i = 0; i < m; ++i) {
      const std::size_t j =
          static_cast<std::size_t>(i) +
          static_cast<std::size_t>(rng.next_below(deck.size() - static_cast<std::size_t>(i)));
      std::swap(deck[static_cast<std::size_t>(i)], deck[j]);
    }
    deck.resize(static_cast<std::size_t>(m));
    std::sort(deck.begin(), deck.end());

    Topology topo;
    for (int i = 0; i < n; ++i) topo.add_node(node_name(i));
    for (const auto& [u, v] : deck) {
      topo.add_edge(u, v, rng.uniform_real(spec.length_lo_km, spec.length_hi_km));
    }
    if (topo.is_connected()) {
      inst.topology = std::move(topo);
      break;
    }
  }

  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  rng.shuffle(order);
  std::vector<int> users(order.begin(), order.begin() + spec.user_count());
  std::sort(users.begin(), users.end());

  for (int s : users) {
    for (int t : users) {
      if (s == t) continue;
      inst.demands.add(s, t, rng.uniform_real(spec.demand_lo_kbps, spec.demand_hi_kbps));
    }
  }
  inst.demands.beta = 1.0;
  return inst;
}

InstanceFamily gen_family(const GenSpec& spec) {
  spec.validate();
  InstanceFamily fam;
  fam.spec = spec;
  Rng root(spec.seed);
  fam.instances.reserve(static_cast<std::size_t>(spec.instances));
  for (int i = 0; i < spec.instances; ++i) {
    fam.instances.push_back(gen_instance(spec, root.derive(static_cast<std::uint64_t>(i))));
  }
  return fam;
}

std::string family_manifest(const InstanceFamily& fam) {
  nlohmann::json j;
  j["spec"] = {
      {"n_nodes", fam.spec.n_nodes},
      {"instances", fam.spec.instances},
      {"avg_degree", fam.spec.avg_degree},
      {"length_range_km", {fam.spec.length_lo_km, fam.spec.length_hi_km}},
      {"demand_range_kbps", {fam.spec.demand_lo_kbps, fam.spec.demand_hi_kbps}},
      {"user_fraction", fam.spec.user_fraction},
      {"seed", fam.spec.seed},
  };
  nlohmann::json files = nlohmann::json::array();
  for (std::size_t i = 0; i < fam.instances.size(); ++i) {
    files.push_back({{"file", "instance_" + std::to_string(i) + ".json"},
                     {"seed", fam.instances[i].seed.value_or(0)}});
  }
  j["instances"] = std::move(files);
  return j.dump(2) + "\n";
}

void save_family(const InstanceFamily& fam, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path base(dir);
  for (std::size_t i = 0; i < fam.instances.size(); ++i) {
    save_instance(fam.instances[i], (base / ("instance_" + std::to_string(i) + ".json")).string());
  }
  std::ofstream out(base / "manifest.json", std::ios::binary);
  if (!out) throw IoError("cannot write manifest under " + dir);
  out << family_manifest(fam);
}

}  // namespace qkdtopo
