#include "qkdtopo/topology.hpp"

namespace qkdtopo {

// 14-node NSFNET. The adjacency is the standard 21-link backbone; the edge
// lengths are repository-chosen metro-scale values (the historical
// inter-state distances exceed any practical QKD reach, so the fixture is
// scaled to keep every link inside the default attenuation cutoffs).
Instance nsfnet_instance() {
  Instance inst;
  Topology& t = inst.topology;
  static const char* kNames[] = {"WA", "CA1", "CA2", "UT", "CO", "TX", "NE",
                                 "IL", "MI", "PA",  "GA", "MD", "NY", "NJ"};
  for (const char* name : kNames) t.add_node(name);

  struct Link {
    int u, v;  // 1-indexed
    double km;
  };
  static const Link kLinks[] = {
      {1, 2, 85},  {1, 3, 30},   {1, 8, 165},  {2, 3, 25},   {2, 4, 40},
      {3, 6, 40},  {4, 5, 50},   {4, 11, 135}, {5, 6, 120},  {5, 7, 40},
      {6, 10, 90}, {6, 13, 50},  {7, 8, 60},   {8, 9, 35},   {9, 10, 35},
      {9, 12, 40}, {9, 14, 65},  {11, 12, 70}, {11, 13, 90}, {12, 14, 20},
      {13, 14, 20},
  };
  for (const Link& l : kLinks) t.add_edge(l.u - 1, l.v - 1, l.km);

  // Three users, six ordered demands.
  const int wa = t.require_node("WA");
  const int tx = t.require_node("TX");
  const int ny = t.require_node("NY");
  inst.demands.add(wa, tx, 120.0);
  inst.demands.add(tx, wa, 100.0);
  inst.demands.add(wa, ny, 150.0);
  inst.demands.add(ny, wa, 130.0);
  inst.demands.add(tx, ny, 90.0);
  inst.demands.add(ny, tx, 70.0);
  inst.demands.beta = 1.0;
  return inst;
}

}  // namespace qkdtopo
