#pragma once

// Brute-force oracles for solver validation.
//
// 1. Random all-integer box MILPs small enough to enumerate exhaustively.
// 2. Tiny QKD instances whose optimal G-SoD is computed by enumerating every
//    trust pattern and every device placement within budget, LP-solving the
//    residual flow problem for each. The flow LP is assembled here from
//    first principles, independent of build_model.

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qkdtopo/build.hpp"
#include "qkdtopo/milp.hpp"
#include "qkdtopo/model.hpp"
#include "qkdtopo/rates.hpp"
#include "qkdtopo/rng.hpp"
#include "qkdtopo/topology.hpp"

namespace qkdtest {

// ---------------------------------------------------------------------------
// Random box MILPs: every variable integer with a small box, so the global
// optimum is an exhaustive scan.

inline qkdtopo::Model random_box_milp(qkdtopo::Rng& rng) {
  using namespace qkdtopo;
  Model m;
  m.set_maximize(rng.next_below(2) == 0);
  const int nvars = static_cast<int>(2 + rng.next_below(3));  // 2..4
  std::vector<int> xs;
  for (int j = 0; j < nvars; ++j) {
    const double ub = static_cast<double>(2 + rng.next_below(3));  // 2..4
    double obj = static_cast<double>(rng.uniform_int(-5, 5));
    xs.push_back(m.add_var("x" + std::to_string(j), 0.0, ub, VarDomain::Integer, obj));
  }
  const int nrows = static_cast<int>(1 + rng.next_below(3));  // 1..3
  for (int i = 0; i < nrows; ++i) {
    std::vector<RowEntry> terms;
    for (int j = 0; j < nvars; ++j) {
      const double a = static_cast<double>(rng.uniform_int(-5, 5));
      if (a != 0.0) terms.push_back({xs[static_cast<std::size_t>(j)], a});
    }
    const Sense sense = static_cast<Sense>(rng.next_below(3));
    const double rhs = static_cast<double>(rng.uniform_int(-6, 18));
    m.add_row("r" + std::to_string(i), sense, rhs, std::move(terms));
  }
  return m;
}

struct BoxOracle {
  bool feasible = false;
  double objective = 0.0;
  std::vector<double> x;
};

inline BoxOracle enumerate_box(const qkdtopo::Model& m) {
  using namespace qkdtopo;
  BoxOracle best;
  const int n = m.var_count();
  std::vector<double> x(static_cast<std::size_t>(n));
  std::vector<long long> cur(static_cast<std::size_t>(n), 0);
  std::vector<long long> top(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    top[static_cast<std::size_t>(j)] = static_cast<long long>(m.var(j).ub);
  }
  for (;;) {
    for (int j = 0; j < n; ++j) {
      x[static_cast<std::size_t>(j)] = static_cast<double>(cur[static_cast<std::size_t>(j)]);
    }
    bool ok = true;
    for (int i = 0; i < m.row_count() && ok; ++i) {
      const Row& r = m.row(i);
      const double act = m.row_activity(i, x);
      const double tol = 1e-9 * std::max(1.0, std::fabs(r.rhs));
      switch (r.sense) {
        case Sense::LE: ok = act <= r.rhs + tol; break;
        case Sense::GE: ok = act >= r.rhs - tol; break;
        case Sense::EQ: ok = std::fabs(act - r.rhs) <= tol; break;
      }
    }
    if (ok) {
      const double obj = m.objective_value(x);
      const bool better = m.maximize() ? obj > best.objective : obj < best.objective;
      if (!best.feasible || better) {
        best.feasible = true;
        best.objective = obj;
        best.x = x;
      }
    }
    int j = 0;
    while (j < n && ++cur[static_cast<std::size_t>(j)] > top[static_cast<std::size_t>(j)]) {
      cur[static_cast<std::size_t>(j)] = 0;
      ++j;
    }
    if (j == n) break;
  }
  return best;
}

// ---------------------------------------------------------------------------
// Tiny QKD instances.

struct TinyCase {
  qkdtopo::Topology topo;
  qkdtopo::DemandMatrix demands;
  qkdtopo::RateParams rates;
  qkdtopo::BuildConfig cfg;
};

// Length giving an (almost exactly) integer C2C rate r at the default rate
// parameters: r0 * 10^(-alpha L / 10) = r  =>  L = 50 log10(1000 / r).
inline double length_for_rate(int r) { return 50.0 * std::log10(1000.0 / r); }

namespace detail {

inline double comb(long long a, long long b) {
  double out = 1.0;
  for (long long i = 1; i <= b; ++i) out *= static_cast<double>(a - b + i) / static_cast<double>(i);
  return out;
}

}  // namespace detail

// Deterministic sampler for oracle-sized instances: <= 4 nodes, <= 5 edges,
// integer C2C rates <= 5, q1 = 1, q2 in {0, 2, 5}, budget capped so the full
// enumeration stays around 30k flow LPs.
inline TinyCase random_tiny_case(std::uint64_t seed) {
  using namespace qkdtopo;
  Rng rng(seed);
  TinyCase tc;

  const int n = static_cast<int>(2 + rng.next_below(3));  // 2..4
  for (int v = 0; v < n; ++v) tc.topo.add_node("n" + std::to_string(v));

  auto add_edge = [&](int u, int v) {
    tc.topo.add_edge(u, v, length_for_rate(static_cast<int>(1 + rng.next_below(5))));
  };
  for (int v = 1; v < n; ++v) add_edge(static_cast<int>(rng.next_below(static_cast<std::uint64_t>(v))), v);
  std::vector<std::pair<int, int>> pool;
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      if (!tc.topo.has_edge(u, v)) pool.push_back({u, v});
    }
  }
  rng.shuffle(pool);
  const int extra_cap = std::min<int>(static_cast<int>(pool.size()), 5 - (n - 1));
  const int extra = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(extra_cap) + 1));
  for (int i = 0; i < extra; ++i) add_edge(pool[static_cast<std::size_t>(i)].first,
                                           pool[static_cast<std::size_t>(i)].second);

  const int pcount = static_cast<int>(1 + rng.next_below(2));
  std::vector<std::pair<int, int>> chosen;
  while (static_cast<int>(chosen.size()) < pcount) {
    const int s = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
    const int t = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
    if (s == t) continue;
    bool dup = false;
    for (const auto& p : chosen) dup = dup || (p.first == s && p.second == t);
    if (dup) continue;
    chosen.push_back({s, t});
    tc.demands.add(s, t, static_cast<double>(1 + rng.next_below(4)));
  }
  tc.demands.beta = rng.next_below(2) == 0 ? 1.0 : 0.5;

  tc.cfg.q1 = 1.0;
  const double q2s[] = {0.0, 2.0, 5.0};
  tc.cfg.q2 = q2s[rng.next_below(3)];
  const Mode modes[] = {Mode::Hybrid, Mode::PureC2c, Mode::PureCsc};
  tc.cfg.mode = modes[rng.next_below(3)];
  tc.cfg.relay_selection = rng.next_below(2) == 0;

  const std::size_t kcount = tc.topo.enumerate_csc_edges().size();
  long long bins = 0;
  if (tc.cfg.mode != Mode::PureCsc) bins += tc.topo.edge_count();
  if (tc.cfg.mode != Mode::PureC2c) bins += static_cast<long long>(kcount);
  const double patterns = tc.cfg.relay_selection ? std::pow(2.0, n) : 1.0;
  int budget = static_cast<int>(2 + rng.next_below(19));  // 2..20
  while (budget > 2 && detail::comb(budget + bins, bins) * patterns > 30000.0) --budget;
  tc.cfg.budget = static_cast<double>(budget);
  return tc;
}

struct OracleResult {
  bool feasible = false;  // the MILP itself has a feasible point
  double best_b = 0.0;
  long long lp_count = 0;
};

namespace detail {

// Residual flow LP for fixed per-edge capacities: max B subject to flow
// conservation (CSC edges connect their clients directly; the server is
// transparent) and per-pair delivery of B * D * beta.
inline double flow_lp_best_b(const qkdtopo::Topology& topo,
                             const std::vector<qkdtopo::CscEdge>& csc,
                             const qkdtopo::DemandMatrix& dm,
                             const std::vector<double>& cap_c2c,
                             const std::vector<double>& cap_csc) {
  using namespace qkdtopo;
  Model m;
  m.set_maximize(true);
  const int b = m.add_var("B", 0.0, kInfinity, VarDomain::Continuous, 1.0);
  const int pcount = dm.pair_count();
  const std::size_t ecount = topo.edges().size();
  const std::size_t kcount = csc.size();

  std::vector<std::vector<std::array<int, 2>>> f(static_cast<std::size_t>(pcount)),
      g(static_cast<std::size_t>(pcount));
  for (int p = 0; p < pcount; ++p) {
    auto& fp = f[static_cast<std::size_t>(p)];
    auto& gp = g[static_cast<std::size_t>(p)];
    fp.resize(ecount);
    gp.resize(kcount);
    for (std::size_t e = 0; e < ecount; ++e) {
      const double cap = cap_c2c[e];
      for (int d = 0; d < 2; ++d) {
        fp[e][static_cast<std::size_t>(d)] =
            m.add_var("f" + std::to_string(p) + "_" + std::to_string(e) + "_" + std::to_string(d),
                      0.0, cap > 0.0 ? kInfinity : 0.0, VarDomain::Continuous);
      }
    }
    for (std::size_t k = 0; k < kcount; ++k) {
      const double cap = cap_csc[k];
      for (int d = 0; d < 2; ++d) {
        gp[k][static_cast<std::size_t>(d)] =
            m.add_var("g" + std::to_string(p) + "_" + std::to_string(k) + "_" + std::to_string(d),
                      0.0, cap > 0.0 ? kInfinity : 0.0, VarDomain::Continuous);
      }
    }
  }

  for (std::size_t e = 0; e < ecount; ++e) {
    if (cap_c2c[e] <= 0.0) continue;
    std::vector<RowEntry> terms;
    for (int p = 0; p < pcount; ++p) {
      terms.push_back({f[static_cast<std::size_t>(p)][e][0], 1.0});
      terms.push_back({f[static_cast<std::size_t>(p)][e][1], 1.0});
    }
    m.add_row("cap" + std::to_string(e), Sense::LE, cap_c2c[e], std::move(terms));
  }
  for (std::size_t k = 0; k < kcount; ++k) {
    if (cap_csc[k] <= 0.0) continue;
    std::vector<RowEntry> terms;
    for (int p = 0; p < pcount; ++p) {
      terms.push_back({g[static_cast<std::size_t>(p)][k][0], 1.0});
      terms.push_back({g[static_cast<std::size_t>(p)][k][1], 1.0});
    }
    m.add_row("chat" + std::to_string(k), Sense::LE, cap_csc[k], std::move(terms));
  }

  // Net outflow of `node` for pair p, appended with +1 leaving / -1 entering.
  auto net_outflow = [&](std::vector<RowEntry>& terms, int p, int node) {
    for (std::size_t e = 0; e < ecount; ++e) {
      const Edge& ed = topo.edges()[e];
      if (ed.u == node) {
        terms.push_back({f[static_cast<std::size_t>(p)][e][0], 1.0});
        terms.push_back({f[static_cast<std::size_t>(p)][e][1], -1.0});
      } else if (ed.v == node) {
        terms.push_back({f[static_cast<std::size_t>(p)][e][1], 1.0});
        terms.push_back({f[static_cast<std::size_t>(p)][e][0], -1.0});
      }
    }
    for (std::size_t k = 0; k < kcount; ++k) {
      if (csc[k].u == node) {
        terms.push_back({g[static_cast<std::size_t>(p)][k][0], 1.0});
        terms.push_back({g[static_cast<std::size_t>(p)][k][1], -1.0});
      } else if (csc[k].v == node) {
        terms.push_back({g[static_cast<std::size_t>(p)][k][1], 1.0});
        terms.push_back({g[static_cast<std::size_t>(p)][k][0], -1.0});
      }
    }
  };

  for (int p = 0; p < pcount; ++p) {
    const Demand& d = dm.demands()[static_cast<std::size_t>(p)];
    for (int w = 0; w < topo.node_count(); ++w) {
      if (w == d.s || w == d.t) continue;
      std::vector<RowEntry> terms;
      net_outflow(terms, p, w);
      if (!terms.empty()) {
        m.add_row("con" + std::to_string(p) + "_" + std::to_string(w), Sense::EQ, 0.0,
                  std::move(terms));
      }
    }
    std::vector<RowEntry> terms;
    net_outflow(terms, p, d.s);
    terms.push_back({b, -d.demand_kbps * dm.beta});
    m.add_row("dem" + std::to_string(p), Sense::GE, 0.0, std::move(terms));
  }

  SolverConfig sc;
  sc.time_limit_s = 60.0;
  const SolveResult r = solve_lp(m, sc);
  if (r.status != SolveStatus::Optimal) {
    throw NumericalError("oracle flow LP did not solve to optimality");
  }
  return r.objective;
}

}  // namespace detail

// Exact MILP optimum by exhaustive enumeration. Requires q1 == 1 (device
// budget splits are then integer compositions).
inline OracleResult oracle_best_b(const TinyCase& tc) {
  using namespace qkdtopo;
  if (tc.cfg.q1 != 1.0) throw ValidationError("oracle requires q1 == 1");
  OracleResult out;

  const std::vector<CscEdge> csc = tc.topo.enumerate_csc_edges();
  const std::size_t ecount = tc.topo.edges().size();
  const std::size_t kcount = csc.size();
  std::vector<double> rate_c2c(ecount), rate_csc(kcount);
  for (std::size_t e = 0; e < ecount; ++e) {
    rate_c2c[e] = c2c_rate(tc.rates, tc.topo.edges()[e].length_km);
  }
  for (std::size_t k = 0; k < kcount; ++k) {
    rate_csc[k] = csc_rate(tc.rates, csc[k].len_up_km, csc[k].len_pv_km);
  }

  const int n = tc.topo.node_count();
  const long long full = (1LL << n) - 1;
  for (long long mask = 0; mask <= full; ++mask) {
    if (!tc.cfg.relay_selection && mask != full) continue;
    const int trusted = static_cast<int>(std::popcount(static_cast<std::uint64_t>(mask)));
    const double trust_cost = tc.cfg.q2 * trusted;
    if (trust_cost > tc.cfg.budget + 1e-9) continue;
    out.feasible = true;  // zero devices under this pattern is a MILP point
    const long long cdev = static_cast<long long>(std::floor(tc.cfg.budget - trust_cost + 1e-9));

    // Bins usable under this trust pattern: C2C needs both endpoints
    // trusted, CSC needs both clients trusted (the server stays untrusted).
    struct Bin {
      bool is_csc;
      std::size_t idx;
    };
    std::vector<Bin> bins;
    if (tc.cfg.mode != Mode::PureCsc) {
      for (std::size_t e = 0; e < ecount; ++e) {
        const Edge& ed = tc.topo.edges()[e];
        if ((mask >> ed.u & 1) && (mask >> ed.v & 1) && rate_c2c[e] > 0.0) {
          bins.push_back({false, e});
        }
      }
    }
    if (tc.cfg.mode != Mode::PureC2c) {
      for (std::size_t k = 0; k < kcount; ++k) {
        if ((mask >> csc[k].u & 1) && (mask >> csc[k].v & 1) && rate_csc[k] > 0.0) {
          bins.push_back({true, k});
        }
      }
    }

    std::vector<double> cap_c2c(ecount, 0.0), cap_csc(kcount, 0.0);
    std::vector<long long> counts(bins.size(), 0);
    auto evaluate = [&]() {
      for (std::size_t i = 0; i < bins.size(); ++i) {
        const double c = static_cast<double>(counts[i]);
        if (bins[i].is_csc) {
          cap_csc[bins[i].idx] = c * rate_csc[bins[i].idx];
        } else {
          cap_c2c[bins[i].idx] = c * rate_c2c[bins[i].idx];
        }
      }
      ++out.lp_count;
      const double b = detail::flow_lp_best_b(tc.topo, csc, tc.demands, cap_c2c, cap_csc);
      if (b > out.best_b) out.best_b = b;
    };

    // All compositions with sum <= cdev over the allowed bins.
    auto rec = [&](auto&& self, std::size_t i, long long left) -> void {
      if (i == bins.size()) {
        evaluate();
        return;
      }
      for (long long c = 0; c <= left; ++c) {
        counts[i] = c;
        self(self, i + 1, left - c);
      }
      counts[i] = 0;
    };
    rec(rec, 0, cdev);
  }
  return out;
}

}  // namespace qkdtest
