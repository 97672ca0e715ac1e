#include <doctest.h>

#include <cmath>
#include <string>

#include "oracle.hpp"
#include "qkdtopo/milp.hpp"
#include "qkdtopo/rng.hpp"

using namespace qkdtopo;

namespace {

SolverConfig exact() {
  SolverConfig sc;
  sc.mip_gap = 0.0;
  sc.time_limit_s = 120.0;
  return sc;
}

}  // namespace

TEST_CASE("integrality rounds the relaxation down") {
  Model m;
  m.set_maximize(true);
  const int x = m.add_var("x", 0.0, 10.0, VarDomain::Integer, 1.0);
  m.add_row("r", Sense::LE, 2.5, {{x, 1.0}});
  const SolveResult r = solve_milp(m, exact());
  REQUIRE(r.status == SolveStatus::Optimal);
  CHECK(r.objective == doctest::Approx(2.0));
}

TEST_CASE("0/1 knapsack") {
  // values 8,11,6,4, weights 5,7,4,3, capacity 14; checked against the
  // exhaustive enumeration rather than a hand-computed constant.
  Model m;
  m.set_maximize(true);
  const double val[] = {8, 11, 6, 4};
  const double wt[] = {5, 7, 4, 3};
  std::vector<RowEntry> cap;
  for (int i = 0; i < 4; ++i) {
    const int x = m.add_var("x" + std::to_string(i), 0.0, 1.0, VarDomain::Binary, val[i]);
    cap.push_back({x, wt[i]});
  }
  m.add_row("cap", Sense::LE, 14.0, std::move(cap));
  const SolveResult r = solve_milp(m, exact());
  REQUIRE(r.status == SolveStatus::Optimal);
  const qkdtest::BoxOracle truth = qkdtest::enumerate_box(m);
  CHECK(r.objective == doctest::Approx(truth.objective));
}

TEST_CASE("integer-infeasible equality is recognized") {
  Model m;
  m.set_maximize(true);
  const int x = m.add_var("x", 0.0, 10.0, VarDomain::Integer, 1.0);
  m.add_row("r", Sense::EQ, 3.0, {{x, 2.0}});  // x = 1.5 has no integer point
  const SolveResult r = solve_milp(m, exact());
  CHECK(r.status == SolveStatus::Infeasible);
}

TEST_CASE("unbounded integer model") {
  Model m;
  m.set_maximize(true);
  m.add_var("x", 0.0, kInfinity, VarDomain::Integer, 1.0);
  const SolveResult r = solve_milp(m, exact());
  CHECK(r.status == SolveStatus::Unbounded);
}

TEST_CASE("randomized box MILPs agree with exhaustive enumeration") {
  int solved = 0;
  for (std::uint64_t seed = 1; seed <= 300; ++seed) {
    CAPTURE(seed);
    Rng rng(seed * 0x9E3779B97F4A7C15ULL);
    const Model m = qkdtest::random_box_milp(rng);
    const qkdtest::BoxOracle truth = qkdtest::enumerate_box(m);
    const SolveResult r = solve_milp(m, exact());
    if (truth.feasible) {
      REQUIRE(r.status == SolveStatus::Optimal);
      CHECK(std::fabs(r.objective - truth.objective) <= 1e-9);
      CHECK(verify(m, r.assignment).ok());
      ++solved;
    } else {
      REQUIRE(r.status == SolveStatus::Infeasible);
    }
  }
  // The sampler has to exercise both outcomes in bulk.
  CHECK(solved > 75);
  CHECK(300 - solved > 75);
}

TEST_CASE("deterministic replay") {
  Rng rng(0xABCDEF);
  const Model m = qkdtest::random_box_milp(rng);
  const SolveResult a = solve_milp(m, exact());
  const SolveResult b = solve_milp(m, exact());
  CHECK(a.status == b.status);
  CHECK(a.objective == b.objective);
  CHECK(a.stats.nodes == b.stats.nodes);
  CHECK(a.assignment == b.assignment);
}

TEST_CASE("feasible integral warm start becomes the first incumbent") {
  Model m;
  m.set_maximize(true);
  const int x = m.add_var("x", 0.0, 10.0, VarDomain::Integer, 1.0);
  m.add_row("r", Sense::LE, 7.0, {{x, 1.0}});

  SolverConfig sc = exact();
  sc.warm_start = {{"x", 5.0}};
  sc.solution_limit = 1;  // stop on the first improvement over the start
  const SolveResult r = solve_milp(m, sc);
  // Any run must report at least the warm-start quality.
  CHECK(r.has_assignment);
  CHECK(r.objective >= 5.0 - 1e-9);

  SUBCASE("fractional or infeasible starts are ignored") {
    SolverConfig bad = exact();
    bad.warm_start = {{"x", 8.5}};
    const SolveResult r2 = solve_milp(m, bad);
    REQUIRE(r2.status == SolveStatus::Optimal);
    CHECK(r2.objective == doctest::Approx(7.0));
  }
}

TEST_CASE("time limit returns the warm incumbent cleanly") {
  Model m;
  m.set_maximize(true);
  const int x = m.add_var("x", 0.0, 10.0, VarDomain::Integer, 1.0);
  m.add_row("r", Sense::LE, 7.0, {{x, 1.0}});
  SolverConfig sc;
  sc.time_limit_s = 1e-9;  // expires before the first simplex iteration
  sc.warm_start = {{"x", 3.0}};
  const SolveResult r = solve_milp(m, sc);
  CHECK(r.status == SolveStatus::TimeLimit);
  CHECK(r.has_assignment);
  CHECK(r.objective == doctest::Approx(3.0));
}

TEST_CASE("gap limit accepts a provably close incumbent") {
  Model m;
  m.set_maximize(true);
  const int x = m.add_var("x", 0.0, 100.0, VarDomain::Integer, 1.0);
  m.add_row("r", Sense::LE, 99.5, {{x, 1.0}});
  SolverConfig sc = exact();
  sc.mip_gap = 0.5;
  const SolveResult r = solve_milp(m, sc);
  REQUIRE(r.has_assignment);
  CHECK((r.status == SolveStatus::Optimal || r.status == SolveStatus::GapLimit));
  CHECK(r.objective >= 99.0 * (1.0 - 0.5) - 1e-9);
  CHECK(r.gap <= 0.5 + 1e-9);
}

TEST_CASE("solver config validation") {
  SolverConfig sc;
  sc.mip_gap = -0.1;
  CHECK_THROWS_AS(sc.validate(), ValidationError);
  sc = SolverConfig{};
  sc.workers = 0;
  CHECK_THROWS_AS(sc.validate(), ValidationError);
  sc = SolverConfig{};
  sc.time_limit_s = -5.0;
  CHECK_THROWS_AS(sc.validate(), ValidationError);
}

TEST_CASE("solution text parsing") {
  const auto sol = parse_solution_text(
      "# solver: external\n"
      "x = 1.5\n"
      "y 2\n"            // bare `name value` form
      "x = 2.5\n"        // later assignment wins
      "\n",
      "inline");
  CHECK(sol.at("x") == 2.5);
  CHECK(sol.at("y") == 2.0);
  CHECK_THROWS_AS(parse_solution_text("x = not-a-number\n", "inline"), ParseError);
  CHECK_THROWS_AS(parse_solution_text("justoneword\n", "inline"), ParseError);
}

TEST_CASE("format_solve_result round trips through the parser") {
  Model m;
  m.set_maximize(true);
  const int x = m.add_var("x", 0.0, 10.0, VarDomain::Integer, 1.0);
  m.add_row("r", Sense::LE, 7.2, {{x, 1.0}});
  const SolveResult r = solve_milp(m, exact());
  REQUIRE(r.status == SolveStatus::Optimal);

  const std::string text = format_solve_result(m, r);
  CHECK(text.find("# status = optimal") != std::string::npos);
  CHECK(text.find("# objective =") != std::string::npos);
  const auto parsed = parse_solution_text(text, "roundtrip");
  CHECK(parsed.at("x") == doctest::Approx(7.0));
  CHECK(verify(m, parsed).ok());
}

TEST_CASE("verify reports each violation class") {
  Model m;
  m.set_maximize(true);
  const int x = m.add_var("x", 0.0, 5.0, VarDomain::Integer, 1.0);
  const int y = m.add_var("y", 0.0, 5.0, VarDomain::Continuous, 0.0);
  m.add_row("r", Sense::LE, 6.0, {{x, 1.0}, {y, 1.0}});

  CHECK(verify(m, {{"x", 3.0}, {"y", 2.0}}).ok());

  auto kinds = [](const VerifyReport& rep) {
    std::string out;
    for (const Violation& v : rep.violations) out += v.kind + ";";
    return out;
  };
  CHECK(kinds(verify(m, {{"x", 9.0}})) == "bound;row;");          // ub and row break
  CHECK(kinds(verify(m, {{"x", 2.5}})) == "integrality;");
  CHECK(kinds(verify(m, {{"x", 1.0}, {"zz", 1.0}})) == "unknown-variable;");
  // Missing variables count as zero, which is feasible here.
  CHECK(verify(m, {}).ok());
}

TEST_CASE("verify tolerance scales with the row rhs") {
  Model m;
  m.add_var("x", 0.0, 2e9, VarDomain::Continuous, 1.0);
  m.add_row("r", Sense::LE, 1e9, {{0, 1.0}});
  // 0.5 over a 1e9 rhs is inside 1e-6 relative tolerance.
  CHECK(verify(m, {{"x", 1e9 + 0.5}}).ok());
  CHECK_FALSE(verify(m, {{"x", 1e9 + 1e5}}).ok());
}
