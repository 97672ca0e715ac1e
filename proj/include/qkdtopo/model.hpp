#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "qkdtopo/common.hpp"

namespace qkdtopo {

enum class VarDomain { Continuous, Integer, Binary };
enum class Sense { LE, EQ, GE };

struct Var {
  std::string name;
  double lb = 0.0;
  double ub = kInfinity;
  VarDomain domain = VarDomain::Continuous;
  double obj = 0.0;
};

struct RowEntry {
  int col = -1;
  double coef = 0.0;
};

struct Row {
  std::string name;
  Sense sense = Sense::LE;
  double rhs = 0.0;
  std::vector<RowEntry> terms;  // sorted by col, no duplicates, no zeros
};

/// Solver-agnostic MILP. Variables and rows keep their insertion order, so a
/// model built twice from the same inputs is identical (names included).
class Model {
public:
  int add_var(const std::string& name, double lb, double ub, VarDomain domain,
              double obj = 0.0);
  int add_row(const std::string& name, Sense sense, double rhs,
              std::vector<RowEntry> terms);

  void set_objective(int var, double coef);
  void set_maximize(bool maximize) { maximize_ = maximize; }
  bool maximize() const { return maximize_; }

  int var_count() const { return static_cast<int>(vars_.size()); }
  int row_count() const { return static_cast<int>(rows_.size()); }
  const Var& var(int i) const { return vars_.at(static_cast<std::size_t>(i)); }
  const Row& row(int i) const { return rows_.at(static_cast<std::size_t>(i)); }
  const std::vector<Var>& vars() const { return vars_; }
  const std::vector<Row>& rows() const { return rows_; }

  /// -1 when the name is unknown.
  int var_index(const std::string& name) const;

  bool has_integers() const;

  /// Row activity under a dense assignment.
  double row_activity(int row, const std::vector<double>& x) const;
  double objective_value(const std::vector<double>& x) const;

private:
  std::vector<Var> vars_;
  std::vector<Row> rows_;
  std::unordered_map<std::string, int> var_index_;
  std::unordered_map<std::string, int> row_index_;
  bool maximize_ = true;
};

}  // namespace qkdtopo
