#include <doctest.h>

#include <cmath>

#include "lp_battery.hpp"
#include "qkdtopo/milp.hpp"

using namespace qkdtopo;

namespace {

SolverConfig quick() {
  SolverConfig sc;
  sc.time_limit_s = 60.0;
  return sc;
}

}  // namespace

TEST_CASE("textbook LP battery solves to known optima") {
  for (const qkdtest::LpCase& c : qkdtest::textbook_lps()) {
    CAPTURE(c.name);
    const SolveResult r = solve_lp(c.model, quick());
    CHECK(r.status == c.expect);
    if (c.expect == SolveStatus::Optimal) {
      REQUIRE(r.has_assignment);
      const double tol = 1e-9 * std::max(1.0, std::fabs(c.objective));
      CHECK(std::fabs(r.objective - c.objective) <= tol);
      CHECK(verify(c.model, r.assignment).ok());
    }
  }
}

TEST_CASE("Beale's cycling example terminates") {
  const Model m = qkdtest::beale_lp();
  const SolveResult r = solve_lp(m, quick());
  REQUIRE(r.status == SolveStatus::Optimal);
  CHECK(r.objective == doctest::Approx(-0.05).epsilon(1e-10));
  // Anti-cycling must keep this tiny: the classic failure mode is an
  // infinite loop of degenerate pivots.
  CHECK(r.stats.simplex_iters < 100);
}

TEST_CASE("Klee-Minty n=8 reaches the far vertex") {
  const Model m = qkdtest::klee_minty(8);
  const SolveResult r = solve_lp(m, quick());
  REQUIRE(r.status == SolveStatus::Optimal);
  CHECK(r.objective == doctest::Approx(1e14).epsilon(1e-9));
  CHECK(verify(m, r.assignment).ok());
}

TEST_CASE("integrality is ignored by the relaxation") {
  Model m;
  m.set_maximize(true);
  const int x = m.add_var("x", 0.0, 10.0, VarDomain::Integer, 1.0);
  m.add_row("r", Sense::LE, 2.5, {{x, 1.0}});
  const SolveResult r = solve_lp(m, quick());
  REQUIRE(r.status == SolveStatus::Optimal);
  CHECK(r.objective == doctest::Approx(2.5));
}

TEST_CASE("equal lower and upper bounds pin a variable") {
  Model m;
  m.set_maximize(true);
  const int x = m.add_var("x", 3.0, 3.0, VarDomain::Continuous, 1.0);
  const int y = m.add_var("y", 0.0, kInfinity, VarDomain::Continuous, 1.0);
  m.add_row("r", Sense::LE, 5.0, {{x, 1.0}, {y, 1.0}});
  const SolveResult r = solve_lp(m, quick());
  REQUIRE(r.status == SolveStatus::Optimal);
  CHECK(r.objective == doctest::Approx(5.0));
  CHECK(r.assignment.at("x") == doctest::Approx(3.0));
}

TEST_CASE("infeasible equality system is detected in phase I") {
  Model m;
  m.set_maximize(true);
  const int x = m.add_var("x", 0.0, 1.0, VarDomain::Continuous, 1.0);
  const int y = m.add_var("y", 0.0, 1.0, VarDomain::Continuous);
  m.add_row("r0", Sense::EQ, 3.0, {{x, 1.0}, {y, 1.0}});
  const SolveResult r = solve_lp(m, quick());
  CHECK(r.status == SolveStatus::Infeasible);
}
