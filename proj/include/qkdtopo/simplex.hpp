#pragma once

#include <chrono>
#include <cstdint>
#include <vector>

#include "qkdtopo/model.hpp"

namespace qkdtopo {

enum class LpStatus { Optimal, Infeasible, Unbounded, TimeLimit, IterLimit, Numerical };

enum class VarStatus : std::uint8_t { Basic, AtLower, AtUpper, FreeZero };

/// Basis snapshot: the m basic column indices plus a status byte per column
/// (structurals, slacks and artificials). Immutable once stored, so branch &
/// bound children can share their parent's snapshot.
struct Basis {
  std::vector<int> basic;
  std::vector<VarStatus> status;
  bool valid() const { return !basic.empty(); }
};

struct LpControls {
  double feas_tol = 1e-6;
  double opt_tol = 1e-7;
  double pivot_tol = 1e-9;
  long long max_iters = -1;  // -1: scaled to problem size
  bool has_deadline = false;
  std::chrono::steady_clock::time_point deadline{};
};

struct LpSolution {
  LpStatus status = LpStatus::Numerical;
  double obj = 0.0;              // in the model's objective sense
  std::vector<double> x;         // structural variable values
  Basis basis;
  long long iters = 0;
};

/// Revised simplex over the bounded-variable form: structural columns from
/// the model, one slack per row (LE: [0,inf), GE: (-inf,0], EQ: [0,0]) and
/// one artificial per row used by phase I. The constraint matrix is stored
/// column-wise; the basis inverse is a dense LU with product-form eta
/// updates and periodic refactorization. Engine state is immutable after
/// construction; every solve owns its workspace, so one engine can serve
/// concurrent solves.
class LpEngine {
public:
  explicit LpEngine(const Model& m);

  int rows() const { return m_; }
  int struct_count() const { return nstruct_; }
  int total_cols() const { return nstruct_ + 2 * m_; }

  /// Cold start: phase I with artificials, then phase II.
  /// `lb`/`ub` give structural bounds (callers may tighten the model's).
  LpSolution solve_primal(const std::vector<double>& lb, const std::vector<double>& ub,
                          const LpControls& ctl) const;

  /// Warm start from a dual-feasible basis after bound changes (the branch &
  /// bound case). Falls back with LpStatus::Numerical when the warm basis is
  /// unusable; callers should then re-solve cold.
  LpSolution solve_dual(const std::vector<double>& lb, const std::vector<double>& ub,
                        const Basis& warm, const LpControls& ctl) const;

  // Per-solve workspace; defined in the implementation file.
  struct Work;

private:
  void init_columns(const Model& m);
  LpSolution finish(Work& w, LpStatus st) const;

  int m_ = 0;        // rows
  int nstruct_ = 0;  // structural columns
  bool model_max_ = true;
  // column-wise structural matrix
  std::vector<int> col_start_;
  std::vector<int> col_row_;
  std::vector<double> col_val_;
  std::vector<double> obj_;       // model-sense objective (structurals)
  std::vector<double> cost_min_;  // internal minimization costs (structurals)
  std::vector<double> rhs_;
  std::vector<double> slack_lb_, slack_ub_;
};

}  // namespace qkdtopo
