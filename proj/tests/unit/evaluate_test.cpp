#include <doctest.h>

#include <cmath>
#include <sstream>

#include "qkdtopo/evaluate.hpp"

using namespace qkdtopo;

namespace {

// Two-node fixture with exactly computable numbers: one 150 km edge
// (1 kbps per device pair), one demand of 1 kbps.
struct TwoNode {
  BuiltModel bm;
  explicit TwoNode(double budget = 202.0) {
    Topology t;
    t.add_node("u");
    t.add_node("v");
    t.add_edge(0, 1, 150.0);
    DemandMatrix dm;
    dm.add(0, 1, 1.0);
    BuildConfig cfg;
    cfg.budget = budget;
    bm = build_model(t, dm, RateParams{}, cfg);
  }
};

SolverConfig exact() {
  SolverConfig sc;
  sc.mip_gap = 0.0;
  sc.time_limit_s = 120.0;
  return sc;
}

}  // namespace

TEST_CASE("deployment extraction rounds devices and canonicalizes trust") {
  TwoNode f;
  const SolveResult r = solve_milp(f.bm.model, exact());
  REQUIRE(r.status == SolveStatus::Optimal);
  const Deployment dep = extract_deployment(f.bm, r.assignment);
  CHECK(dep.s == std::vector<long long>{2});
  CHECK(dep.shat.empty());
  CHECK(dep.trust == std::vector<int>{1, 1});
  CHECK(dep.objective_b == doctest::Approx(2.0));
  CHECK(dep.cost() == doctest::Approx(202.0));  // 2 devices + 2 * 100 trust
  CHECK(dep.status == SolveStatus::Optimal);
}

TEST_CASE("deployment cost respects q1 and q2") {
  Topology t;
  t.add_node("u");
  t.add_node("p");
  t.add_node("v");
  t.add_edge(0, 1, 50.0);
  t.add_edge(1, 2, 50.0);
  DemandMatrix dm;
  dm.add(0, 2, 100.0);
  BuildConfig cfg;
  cfg.mode = Mode::PureCsc;
  cfg.budget = 500.0;
  cfg.q1 = 2.0;
  cfg.q2 = 50.0;
  const BuiltModel bm = build_model(t, dm, RateParams{}, cfg);
  const SolveResult r = solve_milp(bm.model, exact());
  REQUIRE(r.status == SolveStatus::Optimal);
  const Deployment dep = extract_deployment(bm, r.assignment);
  // 500 = 2 * 50 trust + 2 * 200 devices: all 200 CSC devices affordable.
  CHECK(dep.shat == std::vector<long long>{200});
  CHECK(dep.trust == std::vector<int>{1, 0, 1});
  CHECK(dep.cost() == doctest::Approx(500.0));
  CHECK(compute_gsod(bm, dep) == doctest::Approx(r.objective));
}

TEST_CASE("delivered rate, SoD and G-SoD from a hand-built assignment") {
  TwoNode f;
  std::unordered_map<std::string, double> a = trivial_start(f.bm);
  a["S_u_v"] = 2.0;
  a["T_u"] = 1.0;
  a["T_v"] = 1.0;
  a["Tp_u"] = 0.0;
  a["Tpp_u"] = 1.0;
  a["Tp_v"] = 0.0;
  a["Tpp_v"] = 1.0;
  a["F_u_v_u_v"] = 1.5;
  a["B"] = 1.5;
  REQUIRE(verify(f.bm.model, a).ok());
  const Deployment dep = extract_deployment(f.bm, a);
  CHECK(delivered_rate(f.bm, dep, 0) == doctest::Approx(1.5));
  CHECK(compute_sod(f.bm, dep, 0) == doctest::Approx(1.5));  // D * beta = 1
  CHECK(compute_gsod(f.bm, dep) == doctest::Approx(1.5));
}

TEST_CASE("G-SoD is the minimum over pairs") {
  Topology t;
  t.add_node("a");
  t.add_node("b");
  t.add_edge(0, 1, 150.0);
  DemandMatrix dm;
  dm.add(0, 1, 1.0);
  dm.add(1, 0, 4.0);  // same pipe, four times the demand
  BuildConfig cfg;
  cfg.budget = 210.0;
  const BuiltModel bm = build_model(t, dm, RateParams{}, cfg);
  const SolveResult r = solve_milp(bm.model, exact());
  REQUIRE(r.status == SolveStatus::Optimal);
  const Deployment dep = extract_deployment(bm, r.assignment);
  // 10 devices share one pooled 1 kbps/device edge: B maximizes
  // min(f1/1, f2/4) under f1 + f2 <= 10, so B = 2.
  CHECK(r.objective == doctest::Approx(2.0));
  CHECK(compute_sod(bm, dep, 0) >= 2.0 - 1e-9);
  CHECK(compute_sod(bm, dep, 1) >= 2.0 - 1e-9);
  CHECK(compute_gsod(bm, dep) == doctest::Approx(2.0));
}

TEST_CASE("extraction rejects an over-budget assignment") {
  TwoNode f;
  auto a = trivial_start(f.bm);
  a["S_u_v"] = 150.0;  // way past what the budget row allows
  a["T_u"] = 1.0;
  a["T_v"] = 1.0;
  CHECK_THROWS_AS(extract_deployment(f.bm, a), ValidationError);
}

TEST_CASE("compare_modes fills the six-cell table") {
  Topology t;
  t.add_node("a");
  t.add_node("b");
  t.add_node("c");
  t.add_edge(0, 1, 60.0);
  t.add_edge(1, 2, 60.0);
  DemandMatrix dm;
  dm.add(0, 2, 100.0);
  BuildConfig base;
  base.budget = 2000.0;
  SolverConfig sc = exact();
  sc.mip_gap = 0.001;

  const CompareTable table = compare_modes(t, dm, RateParams{}, base, sc);
  const CompareCell& hs = table.cell(Mode::Hybrid, true);
  REQUIRE(hs.has_value);
  CHECK(hs.standardized == doctest::Approx(100.0));
  for (Mode m : {Mode::Hybrid, Mode::PureC2c, Mode::PureCsc}) {
    for (bool sel : {true, false}) {
      const CompareCell& c = table.cell(m, sel);
      CHECK(c.mode == m);
      CHECK(c.selection == sel);
      CHECK(c.has_value);
      CHECK(c.mgsod <= hs.mgsod * (1.0 + sc.mip_gap) + 1e-9);
    }
  }

  const std::string text = table.to_text();
  CHECK(text.find("hybrid") != std::string::npos);
  CHECK(text.find("selection") != std::string::npos);
  CHECK(text.find("100.0%") != std::string::npos);

  const std::string csv = table.to_csv();
  std::istringstream is(csv);
  std::string line;
  int lines = 0;
  while (std::getline(is, line)) ++lines;
  CHECK(lines == 7);  // header + six cells
  CHECK(csv.find("mode,selection,status,") == 0);
}

TEST_CASE("family averaging normalizes against hybrid+selection") {
  Topology t;
  t.add_node("a");
  t.add_node("b");
  t.add_edge(0, 1, 100.0);
  DemandMatrix dm;
  dm.add(0, 1, 10.0);
  BuildConfig base;
  base.budget = 1000.0;
  const CompareTable one = compare_modes(t, dm, RateParams{}, base, exact());

  const FamilyCompare fam = average_compares({one, one});
  CHECK(fam.instances == 2);
  for (int i = 0; i < 6; ++i) {
    CHECK(fam.solved[i] == (one.cells[i].has_value ? 2 : 0));
    if (one.cells[i].has_value) {
      CHECK(fam.cells[i].mgsod == doctest::Approx(one.cells[i].mgsod));
    }
  }
  const CompareCell& hs = fam.cells[static_cast<std::size_t>(0)];
  CHECK(hs.standardized == doctest::Approx(100.0).epsilon(1e-6));
  CHECK(fam.to_csv().find("mode,selection,solved,instances,") == 0);
}
