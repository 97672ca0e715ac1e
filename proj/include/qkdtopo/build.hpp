#pragma once

#include <array>
#include <string>
#include <unordered_map>
#include <vector>

#include "qkdtopo/model.hpp"
#include "qkdtopo/rates.hpp"
#include "qkdtopo/topology.hpp"

namespace qkdtopo {

enum class Mode { Hybrid, PureC2c, PureCsc };

std::string mode_name(Mode m);
Mode parse_mode(const std::string& s);

struct BuildConfig {
  double budget = 10000.0;  // C
  double q1 = 1.0;          // CSC device price multiplier
  double q2 = 100.0;        // trust-control price multiplier
  Mode mode = Mode::Hybrid;
  bool relay_selection = true;
  double big_m = 0.0;  // <= 0 selects the auto rule 1 + 2*C/min(1,q1)
  bool tighten_trust = true;

  double effective_big_m() const;
  void validate() const;
};

/// Per-edge rates, precomputed once so the builder never re-evaluates the
/// physical model.
struct EdgeRates {
  std::vector<double> c2c;  // by Topology edge index
  std::vector<double> csc;  // by CSC edge index (enumerate_csc_edges order)
};

EdgeRates compute_rates(const Topology& topo, const std::vector<CscEdge>& csc,
                        const RateParams& params);

/// Typed index map from deployment decisions to model columns, so downstream
/// consumers never parse variable names.
struct ModelMap {
  int b = -1;            // objective variable B
  std::vector<int> s;     // per edge
  std::vector<int> shat;  // per CSC edge
  std::vector<int> t;     // per node
  std::vector<int> tp;    // per node; empty without relay selection
  std::vector<int> tpp;   // per node; empty without relay selection
  // flow[p][e][d]: pair p, edge e, direction d (0: u->v, 1: v->u)
  std::vector<std::vector<std::array<int, 2>>> flow;
  std::vector<std::vector<std::array<int, 2>>> flow_hat;  // CSC analogue
};

struct BuiltModel {
  Model model;
  ModelMap map;
  Topology topo;
  DemandMatrix demands;
  std::vector<CscEdge> csc_edges;
  EdgeRates rates;
  RateParams rate_params;
  BuildConfig config;
};

/// Translates an instance into the MILP (objective max B; capacity, flow
/// conservation, sink balance, demand coupling, budget, trust linearization,
/// mode restrictions via bounds).
BuiltModel build_model(const Topology& topo, const DemandMatrix& demands,
                       const RateParams& rates, const BuildConfig& cfg);

/// The build-nothing deployment: every device count 0, all flows 0, B = 0,
/// trust at its forced lower bound. Feasible whenever the model is (used as
/// an MIP start so limit-terminated solves still carry an incumbent).
std::unordered_map<std::string, double> trivial_start(const BuiltModel& bm);

/// CPLEX-style textual LP format; byte-deterministic for identical models.
std::string export_lp(const Model& m);
void export_lp_file(const Model& m, const std::string& path);

}  // namespace qkdtopo
