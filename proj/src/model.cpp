#include "qkdtopo/model.hpp"

#include <algorithm>
#include <cmath>

namespace qkdtopo {

int Model::add_var(const std::string& name, double lb, double ub, VarDomain domain,
                   double obj) {
  if (name.empty()) throw ValidationError("variable name must not be empty");
  if (var_index_.count(name)) throw ValidationError("duplicate variable name: " + name);
  if (std::isnan(lb) || std::isnan(ub) || lb > ub) {
    throw ValidationError("variable " + name + " has empty bound interval");
  }
  const int idx = static_cast<int>(vars_.size());
  vars_.push_back(Var{name, lb, ub, domain, obj});
  var_index_.emplace(name, idx);
  return idx;
}

int Model::add_row(const std::string& name, Sense sense, double rhs,
                   std::vector<RowEntry> terms) {
  if (name.empty()) throw ValidationError("row name must not be empty");
  if (row_index_.count(name)) throw ValidationError("duplicate row name: " + name);
  std::sort(terms.begin(), terms.end(),
            [](const RowEntry& a, const RowEntry& b) { return a.col < b.col; });
  std::vector<RowEntry> merged;
  merged.reserve(terms.size());
  for (const RowEntry& t : terms) {
    if (t.col < 0 || t.col >= var_count()) {
      throw ValidationError("row " + name + " references undeclared variable");
    }
    if (!std::isfinite(t.coef)) throw ValidationError("row " + name + " has non-finite coefficient");
    if (t.coef == 0.0) continue;
    if (!merged.empty() && merged.back().col == t.col) {
      merged.back().coef += t.coef;
      if (merged.back().coef == 0.0) merged.pop_back();
    } else {
      merged.push_back(t);
    }
  }
  const int idx = static_cast<int>(rows_.size());
  rows_.push_back(Row{name, sense, rhs, std::move(merged)});
  row_index_.emplace(name, idx);
  return idx;
}

void Model::set_objective(int var, double coef) {
  vars_.at(static_cast<std::size_t>(var)).obj = coef;
}

int Model::var_index(const std::string& name) const {
  auto it = var_index_.find(name);
  return it == var_index_.end() ? -1 : it->second;
}

bool Model::has_integers() const {
  for (const Var& v : vars_) {
    if (v.domain != VarDomain::Continuous) return true;
  }
  return false;
}

double Model::row_activity(int row, const std::vector<double>& x) const {
  const Row& r = rows_.at(static_cast<std::size_t>(row));
  double acc = 0.0;
  for (const RowEntry& t : r.terms) acc += t.coef * x[static_cast<std::size_t>(t.col)];
  return acc;
}

double Model::objective_value(const std::vector<double>& x) const {
  double acc = 0.0;
  for (std::size_t j = 0; j < vars_.size(); ++j) acc += vars_[j].obj * x[j];
  return acc;
}

}  // namespace qkdtopo
