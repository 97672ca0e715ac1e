#include "qkdtopo/build.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace qkdtopo {

std::string mode_name(Mode m) {
  switch (m) {
    case Mode::Hybrid: return "hybrid";
    case Mode::PureC2c: return "pure-c2c";
    case Mode::PureCsc: return "pure-csc";
  }
  return "?";
}

Mode parse_mode(const std::string& s) {
  if (s == "hybrid") return Mode::Hybrid;
  if (s == "pure-c2c") return Mode::PureC2c;
  if (s == "pure-csc") return Mode::PureCsc;
  throw ValidationError("unknown mode \"" + s + "\" (hybrid, pure-c2c, pure-csc)");
}

double BuildConfig::effective_big_m() const {
  if (big_m > 0.0) return big_m;
  return 1.0 + 2.0 * budget / std::min(1.0, q1);
}

void BuildConfig::validate() const {
  if (!(budget >= 0.0) || !std::isfinite(budget)) {
    throw ValidationError("budget must be a nonnegative finite value");
  }
  if (!(q1 > 0.0)) throw ValidationError("q1 must be positive");
  if (!(q2 >= 0.0)) throw ValidationError("q2 must be nonnegative");
}

EdgeRates compute_rates(const Topology& topo, const std::vector<CscEdge>& csc,
                        const RateParams& params) {
  EdgeRates out;
  out.c2c.reserve(topo.edges().size());
  for (const Edge& e : topo.edges()) out.c2c.push_back(c2c_rate(params, e.length_km));
  out.csc.reserve(csc.size());
  for (const CscEdge& c : csc) out.csc.push_back(csc_rate(params, c.len_up_km, c.len_pv_km));
  return out;
}

namespace {

// Net-outflow expression of `node` for pair `pi`: +1 on flows leaving it,
// -1 on flows entering it, over both C2C and CSC edges where it is a client.
void append_net_outflow(std::vector<RowEntry>& terms, const BuiltModel& bm, int pi,
                        int node, double scale = 1.0) {
  const auto& edges = bm.topo.edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto& f = bm.map.flow[static_cast<std::size_t>(pi)][e];
    if (edges[e].u == node) {
      terms.push_back({f[0], scale});
      terms.push_back({f[1], -scale});
    } else if (edges[e].v == node) {
      terms.push_back({f[1], scale});
      terms.push_back({f[0], -scale});
    }
  }
  for (std::size_t k = 0; k < bm.csc_edges.size(); ++k) {
    const auto& fh = bm.map.flow_hat[static_cast<std::size_t>(pi)][k];
    if (bm.csc_edges[k].u == node) {
      terms.push_back({fh[0], scale});
      terms.push_back({fh[1], -scale});
    } else if (bm.csc_edges[k].v == node) {
      terms.push_back({fh[1], scale});
      terms.push_back({fh[0], -scale});
    }
  }
}

// Device incidence I(v): C2C devices on incident edges plus CSC devices
// where v is a client (the server role is untrusted by construction).
void append_incidence(std::vector<RowEntry>& terms, const BuiltModel& bm, int node,
                      double scale = 1.0) {
  const auto& edges = bm.topo.edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (edges[e].u == node || edges[e].v == node) {
      terms.push_back({bm.map.s[e], scale});
    }
  }
  for (std::size_t k = 0; k < bm.csc_edges.size(); ++k) {
    if (bm.csc_edges[k].u == node || bm.csc_edges[k].v == node) {
      terms.push_back({bm.map.shat[k], scale});
    }
  }
}

}  // namespace

BuiltModel build_model(const Topology& topo, const DemandMatrix& demands,
                       const RateParams& rate_params, const BuildConfig& cfg) {
  cfg.validate();

  BuiltModel bm;
  bm.topo = topo;
  bm.csc_edges = topo.enumerate_csc_edges();
  bm.rates = compute_rates(topo, bm.csc_edges, rate_params);
  bm.rate_params = rate_params;
  bm.config = cfg;

  // Pairs with zero requested key demand get no variables at all.
  for (const Demand& d : demands.demands()) {
    if (d.demand_kbps * demands.beta > 0.0) {
      bm.demands.add(d.s, d.t, d.demand_kbps);
    }
  }
  bm.demands.beta = demands.beta;
  if (bm.demands.empty()) {
    throw ValidationError("no demand pairs (the objective would be unbounded)");
  }

  Model& m = bm.model;
  m.set_maximize(true);
  const int n = topo.node_count();
  const std::size_t ecount = topo.edges().size();
  const std::size_t kcount = bm.csc_edges.size();
  const int pcount = bm.demands.pair_count();
  const auto& pairs = bm.demands.demands();

  auto nm = [&](int v) -> const std::string& { return topo.node_id(v); };

  bm.map.b = m.add_var("B", 0.0, kInfinity, VarDomain::Continuous, 1.0);

  bm.map.flow.resize(static_cast<std::size_t>(pcount));
  bm.map.flow_hat.resize(static_cast<std::size_t>(pcount));
  for (int pi = 0; pi < pcount; ++pi) {
    const std::string st = nm(pairs[static_cast<std::size_t>(pi)].s) + "_" +
                           nm(pairs[static_cast<std::size_t>(pi)].t);
    auto& fl = bm.map.flow[static_cast<std::size_t>(pi)];
    fl.resize(ecount);
    for (std::size_t e = 0; e < ecount; ++e) {
      const Edge& ed = topo.edges()[e];
      fl[e][0] = m.add_var("F_" + st + "_" + nm(ed.u) + "_" + nm(ed.v), 0.0, kInfinity,
                           VarDomain::Continuous);
      fl[e][1] = m.add_var("F_" + st + "_" + nm(ed.v) + "_" + nm(ed.u), 0.0, kInfinity,
                           VarDomain::Continuous);
    }
    auto& fh = bm.map.flow_hat[static_cast<std::size_t>(pi)];
    fh.resize(kcount);
    for (std::size_t k = 0; k < kcount; ++k) {
      const CscEdge& ck = bm.csc_edges[k];
      fh[k][0] = m.add_var("Fhat_" + st + "_" + nm(ck.u) + "_" + nm(ck.p) + "_" + nm(ck.v),
                           0.0, kInfinity, VarDomain::Continuous);
      fh[k][1] = m.add_var("Fhat_" + st + "_" + nm(ck.v) + "_" + nm(ck.p) + "_" + nm(ck.u),
                           0.0, kInfinity, VarDomain::Continuous);
    }
  }

  // Device counts; modes are enforced purely through bounds.
  const double s_ub = cfg.mode == Mode::PureCsc ? 0.0 : std::floor(cfg.budget);
  const double shat_ub = cfg.mode == Mode::PureC2c ? 0.0 : std::floor(cfg.budget / cfg.q1);
  bm.map.s.reserve(ecount);
  for (std::size_t e = 0; e < ecount; ++e) {
    const Edge& ed = topo.edges()[e];
    bm.map.s.push_back(
        m.add_var("S_" + nm(ed.u) + "_" + nm(ed.v), 0.0, s_ub, VarDomain::Integer));
  }
  bm.map.shat.reserve(kcount);
  for (std::size_t k = 0; k < kcount; ++k) {
    const CscEdge& ck = bm.csc_edges[k];
    bm.map.shat.push_back(m.add_var("Shat_" + nm(ck.u) + "_" + nm(ck.p) + "_" + nm(ck.v),
                                    0.0, shat_ub, VarDomain::Integer));
  }

  // Trust: free binaries under relay selection, pinned to 1 otherwise (the
  // traditional all-trusted baseline).
  const double t_lb = cfg.relay_selection ? 0.0 : 1.0;
  bm.map.t.reserve(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) {
    bm.map.t.push_back(m.add_var("T_" + nm(v), t_lb, 1.0, VarDomain::Binary));
  }
  if (cfg.relay_selection) {
    for (int v = 0; v < n; ++v) {
      bm.map.tp.push_back(m.add_var("Tp_" + nm(v), 0.0, 1.0, VarDomain::Binary));
    }
    for (int v = 0; v < n; ++v) {
      bm.map.tpp.push_back(m.add_var("Tpp_" + nm(v), 0.0, kInfinity, VarDomain::Continuous));
    }
  }

  // Capacity per unordered edge, both orientations pooled against S*R.
  for (std::size_t e = 0; e < ecount; ++e) {
    const Edge& ed = topo.edges()[e];
    std::vector<RowEntry> terms;
    for (int pi = 0; pi < pcount; ++pi) {
      const auto& f = bm.map.flow[static_cast<std::size_t>(pi)][e];
      terms.push_back({f[0], 1.0});
      terms.push_back({f[1], 1.0});
    }
    terms.push_back({bm.map.s[e], -bm.rates.c2c[e]});
    m.add_row("cap_" + nm(ed.u) + "_" + nm(ed.v), Sense::LE, 0.0, std::move(terms));
  }
  for (std::size_t k = 0; k < kcount; ++k) {
    const CscEdge& ck = bm.csc_edges[k];
    std::vector<RowEntry> terms;
    for (int pi = 0; pi < pcount; ++pi) {
      const auto& fh = bm.map.flow_hat[static_cast<std::size_t>(pi)][k];
      terms.push_back({fh[0], 1.0});
      terms.push_back({fh[1], 1.0});
    }
    terms.push_back({bm.map.shat[k], -bm.rates.csc[k]});
    m.add_row("caphat_" + nm(ck.u) + "_" + nm(ck.p) + "_" + nm(ck.v), Sense::LE, 0.0,
              std::move(terms));
  }

  // Flow conservation at every non-source-sink node; CSC flow is conserved
  // at its clients (the server is transparent to routing).
  for (int pi = 0; pi < pcount; ++pi) {
    const Demand& d = pairs[static_cast<std::size_t>(pi)];
    const std::string st = nm(d.s) + "_" + nm(d.t);
    for (int w = 0; w < n; ++w) {
      if (w == d.s || w == d.t) continue;
      std::vector<RowEntry> terms;
      append_net_outflow(terms, bm, pi, w);
      m.add_row("cons_" + st + "_" + nm(w), Sense::EQ, 0.0, std::move(terms));
    }
    // Sink balance: net outflow at t equals -(net outflow at s). A^{s,t} is
    // substituted, never materialized.
    std::vector<RowEntry> sink;
    append_net_outflow(sink, bm, pi, d.t);
    append_net_outflow(sink, bm, pi, d.s);
    m.add_row("sink_" + st, Sense::EQ, 0.0, std::move(sink));
    // Demand coupling: A^{s,t} - B*D*beta >= 0.
    std::vector<RowEntry> dem;
    append_net_outflow(dem, bm, pi, d.s);
    dem.push_back({bm.map.b, -d.demand_kbps * bm.demands.beta});
    m.add_row("dem_" + st, Sense::GE, 0.0, std::move(dem));
  }

  // Budget.
  {
    std::vector<RowEntry> terms;
    for (std::size_t e = 0; e < ecount; ++e) terms.push_back({bm.map.s[e], 1.0});
    for (std::size_t k = 0; k < kcount; ++k) terms.push_back({bm.map.shat[k], cfg.q1});
    for (int v = 0; v < n; ++v) terms.push_back({bm.map.t[static_cast<std::size_t>(v)], cfg.q2});
    m.add_row("budget", Sense::LE, cfg.budget, std::move(terms));
  }

  // Trust linearization (selection mode only; without selection T is pinned
  // and the indicator machinery would be vacuous or contradictory).
  if (cfg.relay_selection) {
    const double big_m = cfg.effective_big_m();
    for (int v = 0; v < n; ++v) {
      const std::size_t vi = static_cast<std::size_t>(v);
      m.add_row("trustsum_" + nm(v), Sense::EQ, 1.0,
                {{bm.map.tp[vi], 1.0}, {bm.map.tpp[vi], 1.0}});
      std::vector<RowEntry> big;
      append_incidence(big, bm, v);
      big.push_back({bm.map.t[vi], -big_m});
      m.add_row("trustbig_" + nm(v), Sense::LE, 0.0, std::move(big));
      std::vector<RowEntry> ind;
      append_incidence(ind, bm, v);
      ind.push_back({bm.map.tp[vi], 1.0});
      ind.push_back({bm.map.tpp[vi], -1.0});
      m.add_row("trustind_" + nm(v), Sense::GE, 0.0, std::move(ind));
    }
    if (cfg.tighten_trust) {
      for (int v = 0; v < n; ++v) {
        std::vector<RowEntry> tight;
        tight.push_back({bm.map.t[static_cast<std::size_t>(v)], 1.0});
        append_incidence(tight, bm, v, -1.0);
        m.add_row("trusttight_" + nm(v), Sense::LE, 0.0, std::move(tight));
      }
    }
  }
  return bm;
}

std::unordered_map<std::string, double> trivial_start(const BuiltModel& bm) {
  std::unordered_map<std::string, double> start;
  const Model& m = bm.model;
  for (int j = 0; j < m.var_count(); ++j) {
    const Var& v = m.var(j);
    start[v.name] = v.lb;  // all zero except pinned trust
  }
  for (int tp : bm.map.tp) start[m.var(tp).name] = 1.0;
  for (int tpp : bm.map.tpp) start[m.var(tpp).name] = 0.0;
  return start;
}

namespace {

void append_wrapped(std::string& out, std::string& line, const std::string& piece) {
  if (line.size() + piece.size() > 200) {
    out += line;
    out += '\n';
    line = "   ";
  }
  line += piece;
}

void write_terms(std::string& out, std::string& line, const std::vector<RowEntry>& terms,
                 const Model& m) {
  bool first = true;
  for (const RowEntry& t : terms) {
    std::string piece;
    const double a = t.coef;
    if (first) {
      piece = (a < 0.0 ? "- " : "") + format_double(std::fabs(a)) + " " + m.var(t.col).name;
      first = false;
    } else {
      piece = (a < 0.0 ? " - " : " + ") + format_double(std::fabs(a)) + " " + m.var(t.col).name;
    }
    append_wrapped(out, line, piece);
  }
  if (first) append_wrapped(out, line, "0 ");  // empty expression
}

}  // namespace

std::string export_lp(const Model& m) {
  std::string out;
  out += m.maximize() ? "Maximize\n" : "Minimize\n";
  {
    std::string line = " obj:";
    std::vector<RowEntry> obj;
    for (int j = 0; j < m.var_count(); ++j) {
      if (m.var(j).obj != 0.0) obj.push_back({j, m.var(j).obj});
    }
    line += " ";
    write_terms(out, line, obj, m);
    out += line;
    out += '\n';
  }
  out += "Subject To\n";
  for (int i = 0; i < m.row_count(); ++i) {
    const Row& r = m.row(i);
    std::string line = " " + r.name + ": ";
    write_terms(out, line, r.terms, m);
    const char* rel = r.sense == Sense::LE ? " <= " : r.sense == Sense::GE ? " >= " : " = ";
    append_wrapped(out, line, rel + format_double(r.rhs));
    out += line;
    out += '\n';
  }
  out += "Bounds\n";
  for (int j = 0; j < m.var_count(); ++j) {
    const Var& v = m.var(j);
    const bool lb_zero = v.lb == 0.0;
    const bool ub_inf = v.ub == kInfinity;
    if (v.lb == -kInfinity) {
      if (!ub_inf) throw ValidationError("unsupported bound pattern for LP export: " + v.name);
      out += " " + v.name + " free\n";
    } else if (lb_zero && ub_inf) {
      continue;  // LP-format default
    } else if (v.lb == v.ub) {
      out += " " + v.name + " = " + format_double(v.lb) + "\n";
    } else if (lb_zero) {
      out += " " + v.name + " <= " + format_double(v.ub) + "\n";
    } else if (ub_inf) {
      out += " " + v.name + " >= " + format_double(v.lb) + "\n";
    } else {
      out += " " + v.name + " >= " + format_double(v.lb) + "\n";
      out += " " + v.name + " <= " + format_double(v.ub) + "\n";
    }
  }
  auto write_name_section = [&](const char* title, VarDomain dom) {
    bool any = false;
    for (int j = 0; j < m.var_count(); ++j) {
      if (m.var(j).domain == dom) {
        any = true;
        break;
      }
    }
    if (!any) return;
    out += title;
    out += '\n';
    std::string line = " ";
    for (int j = 0; j < m.var_count(); ++j) {
      if (m.var(j).domain != dom) continue;
      append_wrapped(out, line, m.var(j).name + " ");
    }
    out += line;
    out += '\n';
  };
  write_name_section("Generals", VarDomain::Integer);
  write_name_section("Binaries", VarDomain::Binary);
  out += "End\n";
  return out;
}

void export_lp_file(const Model& m, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write LP file: " + path);
  f << export_lp(m);
  if (!f) throw IoError("failed writing LP file: " + path);
}

}  // namespace qkdtopo
