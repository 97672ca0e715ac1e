#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qkdtopo/topology.hpp"

namespace qkdtopo {

/// Random-family recipe: fixed edge count G(n,m) graphs, uniform lengths,
/// demands between all ordered pairs of a designated user subset.
struct GenSpec {
  int n_nodes = 10;
  int instances = 10;
  double avg_degree = 3.0;
  double length_lo_km = 10.0;
  double length_hi_km = 500.0;
  double demand_lo_kbps = 100.0;
  double demand_hi_kbps = 500.0;
  double user_fraction = 0.2;
  std::uint64_t seed = 0;

  void validate() const;
  int edge_target() const;  // m = round(avg_degree * n / 2)
  int user_count() const;   // ceil(user_fraction * n)
};

struct InstanceFamily {
  GenSpec spec;
  std::vector<Instance> instances;  // each carries its derived seed
};

/// Deterministic family generation: a pure function of the spec. Each
/// instance resamples its edge set until connected (bounded retries).
InstanceFamily gen_family(const GenSpec& spec);

/// One instance from a single derived seed (the unit gen_family loops over).
Instance gen_instance(const GenSpec& spec, std::uint64_t instance_seed);

/// JSON manifest recording the spec and the per-instance seeds.
std::string family_manifest(const InstanceFamily& fam);

/// Writes instance_<i>.json files plus manifest.json under dir.
void save_family(const InstanceFamily& fam, const std::string& dir);

}  // namespace qkdtopo
