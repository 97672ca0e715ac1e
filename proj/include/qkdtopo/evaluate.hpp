#pragma once

#include <array>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "qkdtopo/build.hpp"
#include "qkdtopo/milp.hpp"

namespace qkdtopo {

/// A solved placement in network terms rather than model columns. Device
/// counts and trust are rounded to their integer values; flows keep the raw
/// solver values (they are continuous).
struct Deployment {
  std::vector<long long> s;     // C2C device pairs per edge
  std::vector<long long> shat;  // CSC device triples per CSC edge
  std::vector<int> trust;       // 0/1 per node (canonicalized in selection mode)
  // flow[p][e][d]: demand pair p, edge e, direction d (0: u->v, 1: v->u)
  std::vector<std::vector<std::array<double, 2>>> flow;
  std::vector<std::vector<std::array<double, 2>>> flow_hat;  // CSC analogue
  double objective_b = 0.0;

  // provenance
  BuildConfig config;
  std::optional<std::uint64_t> seed;
  SolveStatus status = SolveStatus::Optimal;
  SolveStats stats;

  double cost() const;  // Σ S + q1·Σ Ŝ + q2·Σ T
};

/// Reads a solved assignment back into network terms. Devices and trust are
/// rounded; in selection mode trust is canonicalized to T(v) = [I(v) != 0].
/// Throws ValidationError when the rounded deployment breaks the budget
/// (that would be a solver defect, not an input problem).
Deployment extract_deployment(const BuiltModel& bm,
                              const std::unordered_map<std::string, double>& assignment);

/// Delivered key rate A^{s,t}: net flow leaving the source over both kinds
/// of channels.
double delivered_rate(const BuiltModel& bm, const Deployment& dep, int pair);

/// SoD for one demand pair: A^{s,t} / (D^{s,t} · β).
double compute_sod(const BuiltModel& bm, const Deployment& dep, int pair);

/// G-SoD: minimum SoD over all demand pairs.
double compute_gsod(const BuiltModel& bm, const Deployment& dep);

/// One cell of the six-way mode comparison.
struct CompareCell {
  Mode mode = Mode::Hybrid;
  bool selection = true;
  SolveStatus status = SolveStatus::Infeasible;
  bool has_value = false;    // an incumbent exists
  bool limit_hit = false;    // stopped on time/solution limit
  double mgsod = 0.0;        // raw MG-SoD (incumbent objective)
  double standardized = 0.0; // percent of the hybrid+selection cell
  double wall_s = 0.0;
  long long nodes = 0;
};

/// The six cells in row-major order: selection row first, columns
/// hybrid / pure-C2C / pure-CSC.
struct CompareTable {
  std::array<CompareCell, 6> cells;

  const CompareCell& cell(Mode m, bool selection) const;
  std::string to_text() const;   // aligned table for humans
  std::string to_csv() const;    // plot data, one row per cell
};

/// Solves the six mode/selection combinations of one instance. Budget, q1,
/// q2, big-M and tightening come from `base`; mode and relay_selection are
/// overridden per cell. Solver limits are recorded in the cell, never fatal.
CompareTable compare_modes(const Topology& topo, const DemandMatrix& demands,
                           const RateParams& rates, const BuildConfig& base,
                           const SolverConfig& scfg);

/// Family aggregation: per-cell mean of raw MG-SoDs over the instances where
/// the cell produced a value, normalized so the hybrid+selection mean is
/// 100%. `solved` counts contributing instances per cell (partial data shows
/// up as solved < instances).
struct FamilyCompare {
  std::array<CompareCell, 6> cells;  // mgsod = mean raw value
  std::array<int, 6> solved{};
  int instances = 0;

  std::string to_text() const;
  std::string to_csv() const;
};

FamilyCompare average_compares(const std::vector<CompareTable>& tables);

}  // namespace qkdtopo
