#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "qkdtopo/model.hpp"

namespace qkdtopo {

enum class SolveStatus { Optimal, GapLimit, TimeLimit, SolutionLimit, Infeasible, Unbounded };

std::string status_name(SolveStatus s);

struct SolverConfig {
  double time_limit_s = 7200.0;
  double mip_gap = 0.01;
  int solution_limit = 200;
  double feas_tol = 1e-6;
  double opt_tol = 1e-7;
  std::uint64_t seed = 0;
  int workers = 1;
  // Optional MIP start. Ignored unless it checks out feasible and integral.
  std::unordered_map<std::string, double> warm_start;

  void validate() const;
};

struct SolveStats {
  long long nodes = 0;
  long long simplex_iters = 0;
  double wall_s = 0.0;
};

struct SolveResult {
  SolveStatus status = SolveStatus::Infeasible;
  bool has_assignment = false;
  double objective = 0.0;  // incumbent objective (model sense)
  double bound = 0.0;      // best proven dual bound (model sense)
  double gap = 0.0;        // (bound - objective) / max(|objective|, 1e-10)
  std::unordered_map<std::string, double> assignment;
  SolveStats stats;
};

/// Solves the continuous relaxation (integrality ignored).
SolveResult solve_lp(const Model& m, const SolverConfig& cfg);

/// Best-bound branch & bound over dual-simplex-warm-started LP relaxations.
/// Deterministic for fixed config with workers = 1.
SolveResult solve_milp(const Model& m, const SolverConfig& cfg);

struct Violation {
  std::string kind;  // "row", "bound", "integrality", "unknown-variable"
  std::string name;
  double amount = 0.0;
};

struct VerifyReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

/// Re-checks an assignment against the model, independent of any solve path.
/// Variables absent from the assignment count as 0. Row tolerance is
/// feas_tol scaled by max(1, |rhs|); integrality tolerance is 1e-6.
VerifyReport verify(const Model& m, const std::unordered_map<std::string, double>& assignment,
                    double feas_tol = 1e-6);

/// `name = value` lines (external solvers often emit `name value`; both are
/// accepted). '#' starts a comment.
std::unordered_map<std::string, double> parse_solution_text(const std::string& text,
                                                            const std::string& origin);
std::unordered_map<std::string, double> load_solution_file(const std::string& path);

/// Structured text emission of a result (stable ordering; `name = value`).
std::string format_solve_result(const Model& m, const SolveResult& r);

}  // namespace qkdtopo
