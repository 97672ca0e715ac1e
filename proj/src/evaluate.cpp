#include "qkdtopo/evaluate.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace qkdtopo {

namespace {

double lookup(const Model& m, const std::unordered_map<std::string, double>& a, int col) {
  if (col < 0) return 0.0;
  const auto it = a.find(m.var(col).name);
  return it == a.end() ? 0.0 : it->second;
}

int cell_index(Mode m, bool selection) {
  const int col = m == Mode::Hybrid ? 0 : m == Mode::PureC2c ? 1 : 2;
  return (selection ? 0 : 3) + col;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

}  // namespace

double Deployment::cost() const {
  double c = 0.0;
  for (long long v : s) c += static_cast<double>(v);
  for (long long v : shat) c += config.q1 * static_cast<double>(v);
  for (int v : trust) c += config.q2 * v;
  return c;
}

Deployment extract_deployment(const BuiltModel& bm,
                              const std::unordered_map<std::string, double>& assignment) {
  const Model& m = bm.model;
  Deployment dep;
  dep.config = bm.config;
  dep.objective_b = lookup(m, assignment, bm.map.b);

  const int ne = bm.topo.edge_count();
  const int nk = static_cast<int>(bm.csc_edges.size());
  const int nn = bm.topo.node_count();
  const int np = static_cast<int>(bm.demands.demands().size());

  dep.s.resize(static_cast<std::size_t>(ne));
  for (int e = 0; e < ne; ++e) {
    dep.s[static_cast<std::size_t>(e)] =
        std::llround(lookup(m, assignment, bm.map.s[static_cast<std::size_t>(e)]));
  }
  dep.shat.resize(static_cast<std::size_t>(nk));
  for (int k = 0; k < nk; ++k) {
    dep.shat[static_cast<std::size_t>(k)] =
        std::llround(lookup(m, assignment, bm.map.shat[static_cast<std::size_t>(k)]));
  }
  dep.trust.resize(static_cast<std::size_t>(nn));
  for (int v = 0; v < nn; ++v) {
    dep.trust[static_cast<std::size_t>(v)] =
        lookup(m, assignment, bm.map.t[static_cast<std::size_t>(v)]) > 0.5 ? 1 : 0;
  }

  if (bm.config.relay_selection) {
    // Canonical trust: exactly the nodes that actually carry devices.
    std::vector<long long> incidence(static_cast<std::size_t>(nn), 0);
    for (int e = 0; e < ne; ++e) {
      const Edge& ed = bm.topo.edges()[static_cast<std::size_t>(e)];
      incidence[static_cast<std::size_t>(ed.u)] += dep.s[static_cast<std::size_t>(e)];
      incidence[static_cast<std::size_t>(ed.v)] += dep.s[static_cast<std::size_t>(e)];
    }
    for (int k = 0; k < nk; ++k) {
      const CscEdge& ck = bm.csc_edges[static_cast<std::size_t>(k)];
      incidence[static_cast<std::size_t>(ck.u)] += dep.shat[static_cast<std::size_t>(k)];
      incidence[static_cast<std::size_t>(ck.v)] += dep.shat[static_cast<std::size_t>(k)];
    }
    for (int v = 0; v < nn; ++v) {
      dep.trust[static_cast<std::size_t>(v)] = incidence[static_cast<std::size_t>(v)] != 0 ? 1 : 0;
    }
  }

  dep.flow.resize(static_cast<std::size_t>(np));
  dep.flow_hat.resize(static_cast<std::size_t>(np));
  for (int p = 0; p < np; ++p) {
    auto& fp = dep.flow[static_cast<std::size_t>(p)];
    fp.resize(static_cast<std::size_t>(ne));
    for (int e = 0; e < ne; ++e) {
      for (int d = 0; d < 2; ++d) {
        fp[static_cast<std::size_t>(e)][static_cast<std::size_t>(d)] = lookup(
            m, assignment,
            bm.map.flow[static_cast<std::size_t>(p)][static_cast<std::size_t>(e)]
                       [static_cast<std::size_t>(d)]);
      }
    }
    auto& fph = dep.flow_hat[static_cast<std::size_t>(p)];
    fph.resize(static_cast<std::size_t>(nk));
    for (int k = 0; k < nk; ++k) {
      for (int d = 0; d < 2; ++d) {
        fph[static_cast<std::size_t>(k)][static_cast<std::size_t>(d)] = lookup(
            m, assignment,
            bm.map.flow_hat[static_cast<std::size_t>(p)][static_cast<std::size_t>(k)]
                           [static_cast<std::size_t>(d)]);
      }
    }
  }

  const double budget_tol = 1e-6 * std::max(1.0, bm.config.budget);
  if (dep.cost() > bm.config.budget + budget_tol) {
    throw ValidationError("deployment cost " + format_double(dep.cost()) +
                          " exceeds budget " + format_double(bm.config.budget));
  }
  return dep;
}

double delivered_rate(const BuiltModel& bm, const Deployment& dep, int pair) {
  if (pair < 0 || pair >= static_cast<int>(bm.demands.demands().size())) {
    throw ValidationError("demand pair index out of range");
  }
  const int s = bm.demands.demands()[static_cast<std::size_t>(pair)].s;
  double net = 0.0;
  const auto& fp = dep.flow[static_cast<std::size_t>(pair)];
  for (int e = 0; e < bm.topo.edge_count(); ++e) {
    const Edge& ed = bm.topo.edges()[static_cast<std::size_t>(e)];
    const auto& f = fp[static_cast<std::size_t>(e)];
    if (ed.u == s) net += f[0] - f[1];
    if (ed.v == s) net += f[1] - f[0];
  }
  const auto& fph = dep.flow_hat[static_cast<std::size_t>(pair)];
  for (int k = 0; k < static_cast<int>(bm.csc_edges.size()); ++k) {
    const CscEdge& ck = bm.csc_edges[static_cast<std::size_t>(k)];
    const auto& f = fph[static_cast<std::size_t>(k)];
    if (ck.u == s) net += f[0] - f[1];
    if (ck.v == s) net += f[1] - f[0];
  }
  return net;
}

double compute_sod(const BuiltModel& bm, const Deployment& dep, int pair) {
  if (pair < 0 || pair >= static_cast<int>(bm.demands.demands().size())) {
    throw ValidationError("demand pair index out of range");
  }
  const Demand& d = bm.demands.demands()[static_cast<std::size_t>(pair)];
  const double denom = d.demand_kbps * bm.demands.beta;
  if (!(denom > 0.0)) throw ValidationError("zero key demand for pair");
  return delivered_rate(bm, dep, pair) / denom;
}

double compute_gsod(const BuiltModel& bm, const Deployment& dep) {
  const int np = static_cast<int>(bm.demands.demands().size());
  if (np == 0) throw ValidationError("no demand pairs");
  double g = kInfinity;
  for (int p = 0; p < np; ++p) g = std::min(g, compute_sod(bm, dep, p));
  return g;
}

const CompareCell& CompareTable::cell(Mode m, bool selection) const {
  return cells[static_cast<std::size_t>(cell_index(m, selection))];
}

CompareTable compare_modes(const Topology& topo, const DemandMatrix& demands,
                           const RateParams& rates, const BuildConfig& base,
                           const SolverConfig& scfg) {
  CompareTable table;
  for (bool selection : {true, false}) {
    for (Mode mode : {Mode::Hybrid, Mode::PureC2c, Mode::PureCsc}) {
      BuildConfig cfg = base;
      cfg.mode = mode;
      cfg.relay_selection = selection;
      const BuiltModel bm = build_model(topo, demands, rates, cfg);
      SolverConfig sc = scfg;
      if (sc.warm_start.empty()) sc.warm_start = trivial_start(bm);
      const SolveResult r = solve_milp(bm.model, sc);
      CompareCell& c = table.cells[static_cast<std::size_t>(cell_index(mode, selection))];
      c.mode = mode;
      c.selection = selection;
      c.status = r.status;
      c.has_value = r.has_assignment;
      c.limit_hit =
          r.status == SolveStatus::TimeLimit || r.status == SolveStatus::SolutionLimit;
      c.mgsod = r.has_assignment ? r.objective : 0.0;
      c.wall_s = r.stats.wall_s;
      c.nodes = r.stats.nodes;
    }
  }
  // Standardize against hybrid+selection (that cell reads 100%).
  const CompareCell& ref = table.cell(Mode::Hybrid, true);
  for (CompareCell& c : table.cells) {
    if (!c.has_value || !ref.has_value || !(ref.mgsod > 0.0)) {
      c.standardized = 0.0;
    } else {
      c.standardized = 100.0 * c.mgsod / ref.mgsod;
    }
  }
  if (ref.has_value && ref.mgsod > 0.0) {
    table.cells[static_cast<std::size_t>(cell_index(Mode::Hybrid, true))].standardized = 100.0;
  }
  return table;
}

std::string CompareTable::to_text() const {
  std::ostringstream os;
  os << "MG-SoD by mode (standardized, hybrid+selection = 100%)\n";
  os << "                  hybrid              pure-c2c            pure-csc\n";
  for (bool selection : {true, false}) {
    os << (selection ? "selection      " : "no-selection   ");
    for (Mode m : {Mode::Hybrid, Mode::PureC2c, Mode::PureCsc}) {
      const CompareCell& c = cells[static_cast<std::size_t>(cell_index(m, selection))];
      if (!c.has_value) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "  %-18s", status_name(c.status).c_str());
        os << buf;
      } else {
        char buf[48];
        std::snprintf(buf, sizeof(buf), "  %10.4f %5.1f%%%s", c.mgsod, c.standardized,
                      c.limit_hit ? "*" : " ");
        os << buf;
      }
    }
    os << "\n";
  }
  bool any_limit = false;
  for (const CompareCell& c : cells) any_limit = any_limit || c.limit_hit;
  if (any_limit) os << "  * incumbent at solver limit, not proven optimal\n";
  return os.str();
}

std::string CompareTable::to_csv() const {
  std::ostringstream os;
  os << "mode,selection,status,mgsod,standardized_pct,wall_s,nodes,limit_hit\n";
  for (const CompareCell& c : cells) {
    os << mode_name(c.mode) << ',' << (c.selection ? 1 : 0) << ',' << status_name(c.status)
       << ',' << fmt("%.10g", c.mgsod) << ',' << fmt("%.6g", c.standardized) << ','
       << fmt("%.6g", c.wall_s) << ',' << c.nodes << ',' << (c.limit_hit ? 1 : 0) << "\n";
  }
  return os.str();
}

FamilyCompare average_compares(const std::vector<CompareTable>& tables) {
  FamilyCompare fam;
  fam.instances = static_cast<int>(tables.size());
  for (int i = 0; i < 6; ++i) {
    const std::size_t is = static_cast<std::size_t>(i);
    CompareCell& c = fam.cells[is];
    c = tables.empty() ? CompareCell{} : tables.front().cells[is];
    c.has_value = false;
    c.mgsod = 0.0;
    c.wall_s = 0.0;
    c.nodes = 0;
    c.limit_hit = false;
    int n = 0;
    for (const CompareTable& t : tables) {
      const CompareCell& tc = t.cells[is];
      c.wall_s += tc.wall_s;
      c.nodes += tc.nodes;
      c.limit_hit = c.limit_hit || tc.limit_hit;
      if (tc.has_value) {
        c.mgsod += tc.mgsod;
        ++n;
      }
    }
    fam.solved[is] = n;
    if (n > 0) {
      c.mgsod /= n;
      c.has_value = true;
    }
    if (!tables.empty()) {
      c.wall_s /= static_cast<double>(tables.size());
    }
  }
  const CompareCell& ref = fam.cells[static_cast<std::size_t>(cell_index(Mode::Hybrid, true))];
  for (CompareCell& c : fam.cells) {
    c.standardized = (c.has_value && ref.has_value && ref.mgsod > 0.0)
                         ? 100.0 * c.mgsod / ref.mgsod
                         : 0.0;
  }
  if (ref.has_value && ref.mgsod > 0.0) {
    fam.cells[static_cast<std::size_t>(cell_index(Mode::Hybrid, true))].standardized = 100.0;
  }
  return fam;
}

std::string FamilyCompare::to_text() const {
  std::ostringstream os;
  os << "family mean MG-SoD over " << instances
     << " instance(s) (standardized, hybrid+selection = 100%)\n";
  os << "                  hybrid              pure-c2c            pure-csc\n";
  for (bool selection : {true, false}) {
    os << (selection ? "selection      " : "no-selection   ");
    for (Mode m : {Mode::Hybrid, Mode::PureC2c, Mode::PureCsc}) {
      const std::size_t is = static_cast<std::size_t>(cell_index(m, selection));
      const CompareCell& c = cells[is];
      char buf[64];
      if (!c.has_value) {
        std::snprintf(buf, sizeof(buf), "  %-18s", "no data");
      } else if (solved[is] < instances) {
        std::snprintf(buf, sizeof(buf), "  %10.4f %5.1f%%p", c.mgsod, c.standardized);
      } else {
        std::snprintf(buf, sizeof(buf), "  %10.4f %5.1f%% ", c.mgsod, c.standardized);
      }
      os << buf;
    }
    os << "\n";
  }
  bool partial = false;
  for (int i = 0; i < 6; ++i) partial = partial || (solved[static_cast<std::size_t>(i)] < instances);
  if (partial) os << "  p: partial data (some instances produced no value for that cell)\n";
  return os.str();
}

std::string FamilyCompare::to_csv() const {
  std::ostringstream os;
  os << "mode,selection,solved,instances,mean_mgsod,standardized_pct,mean_wall_s,limit_hit\n";
  for (int i = 0; i < 6; ++i) {
    const std::size_t is = static_cast<std::size_t>(i);
    const CompareCell& c = cells[is];
    os << mode_name(c.mode) << ',' << (c.selection ? 1 : 0) << ',' << solved[is] << ','
       << instances << ',' << fmt("%.10g", c.mgsod) << ',' << fmt("%.6g", c.standardized) << ','
       << fmt("%.6g", c.wall_s) << ',' << (c.limit_hit ? 1 : 0) << "\n";
  }
  return os.str();
}

}  // namespace qkdtopo
