#include "qkdtopo/milp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <exception>
#include <fstream>
#include <memory>
#include <mutex>
#include <queue>
#include <set>
#include <sstream>
#include <thread>

#include "qkdtopo/simplex.hpp"

namespace qkdtopo {

namespace {

constexpr double kIntTol = 1e-6;

using Clock = std::chrono::steady_clock;

double integral_dist(double x) { return std::fabs(x - std::round(x)); }

LpControls make_controls(const SolverConfig& cfg, Clock::time_point deadline) {
  LpControls ctl;
  ctl.feas_tol = cfg.feas_tol;
  ctl.opt_tol = cfg.opt_tol;
  ctl.has_deadline = true;
  ctl.deadline = deadline;
  return ctl;
}

std::unordered_map<std::string, double> to_assignment(const Model& m,
                                                      const std::vector<double>& x) {
  std::unordered_map<std::string, double> out;
  out.reserve(x.size());
  for (int j = 0; j < m.var_count(); ++j) {
    out.emplace(m.var(j).name, x[static_cast<std::size_t>(j)]);
  }
  return out;
}

}  // namespace

std::string status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::GapLimit: return "gap-limit";
    case SolveStatus::TimeLimit: return "time-limit";
    case SolveStatus::SolutionLimit: return "solution-limit";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
  }
  return "?";
}

void SolverConfig::validate() const {
  if (!(time_limit_s > 0.0)) throw ValidationError("time_limit_s must be positive");
  if (!(mip_gap >= 0.0 && mip_gap < 1.0)) throw ValidationError("mip_gap must be in [0,1)");
  if (solution_limit < 1) throw ValidationError("solution_limit must be >= 1");
  if (!(feas_tol > 0.0) || !(opt_tol > 0.0)) throw ValidationError("tolerances must be positive");
  if (workers < 1) throw ValidationError("workers must be >= 1");
}

SolveResult solve_lp(const Model& m, const SolverConfig& cfg) {
  cfg.validate();
  const auto t0 = Clock::now();
  const auto deadline = t0 + std::chrono::duration_cast<Clock::duration>(
                                 std::chrono::duration<double>(cfg.time_limit_s));
  LpEngine engine(m);
  std::vector<double> lb(static_cast<std::size_t>(m.var_count()));
  std::vector<double> ub(lb.size());
  for (int j = 0; j < m.var_count(); ++j) {
    lb[static_cast<std::size_t>(j)] = m.var(j).lb;
    ub[static_cast<std::size_t>(j)] = m.var(j).ub;
  }
  const LpSolution sol = engine.solve_primal(lb, ub, make_controls(cfg, deadline));
  SolveResult out;
  out.stats.simplex_iters = sol.iters;
  out.stats.wall_s = std::chrono::duration<double>(Clock::now() - t0).count();
  const double worst = m.maximize() ? -kInfinity : kInfinity;
  const double best = -worst;
  switch (sol.status) {
    case LpStatus::Optimal:
      out.status = SolveStatus::Optimal;
      out.objective = sol.obj;
      out.bound = sol.obj;
      out.gap = 0.0;
      out.assignment = to_assignment(m, sol.x);
      out.has_assignment = true;
      break;
    case LpStatus::Infeasible:
      out.status = SolveStatus::Infeasible;
      out.bound = worst;
      break;
    case LpStatus::Unbounded:
      out.status = SolveStatus::Unbounded;
      out.bound = best;
      break;
    case LpStatus::TimeLimit:
      out.status = SolveStatus::TimeLimit;
      out.bound = best;
      out.gap = kInfinity;
      break;
    case LpStatus::IterLimit:
      throw NumericalError("simplex iteration cap exceeded");
    case LpStatus::Numerical:
      throw NumericalError("numerical breakdown in LP solve");
  }
  return out;
}

namespace {

// Branch decisions live on a parent chain so a node costs O(depth), not O(n).
struct BnbNode {
  std::shared_ptr<const BnbNode> parent;
  std::shared_ptr<const Basis> warm;  // parent's optimal basis
  double estimate = 0.0;              // inherited bound, normalized (max) sense
  int depth = 0;
  long long id = 0;
  int branch_var = -1;
  double blb = 0.0, bub = 0.0;
};

struct HeapEnt {
  double estimate;
  int depth;
  long long id;
  std::shared_ptr<const BnbNode> node;
};

// Best bound first; ties: deeper first, then earlier-created.
struct HeapCmp {
  bool operator()(const HeapEnt& a, const HeapEnt& b) const {
    if (a.estimate != b.estimate) return a.estimate < b.estimate;
    if (a.depth != b.depth) return a.depth < b.depth;
    return a.id > b.id;
  }
};

struct Shared {
  std::mutex mu;
  std::condition_variable cv;
  std::priority_queue<HeapEnt, std::vector<HeapEnt>, HeapCmp> heap;
  // Estimates of every unresolved node (queued or in flight), so the global
  // bound stays valid while workers hold nodes.
  std::multiset<double> open;
  double pruned_max = -kInfinity;  // best estimate discarded by the gap cut
  double inc_norm = -kInfinity;
  std::vector<double> inc_x;
  bool has_inc = false;
  int improvements = 0;
  long long nodes = 0;
  long long simplex_iters = 0;
  long long next_id = 1;
  int active = 0;
  bool stop = false;
  SolveStatus stop_reason = SolveStatus::TimeLimit;
  std::exception_ptr error;
};

class BnbSolver {
public:
  BnbSolver(const Model& m, const SolverConfig& cfg)
      : model_(m), cfg_(cfg), engine_(m), t0_(Clock::now()) {
    deadline_ = t0_ + std::chrono::duration_cast<Clock::duration>(
                          std::chrono::duration<double>(cfg.time_limit_s));
    ctl_ = make_controls(cfg, deadline_);
    const int n = m.var_count();
    lb0_.resize(static_cast<std::size_t>(n));
    ub0_.resize(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
      const Var& v = m.var(j);
      double lo = v.lb, hi = v.ub;
      if (v.domain != VarDomain::Continuous) {
        lo = std::ceil(lo - kIntTol);
        hi = std::floor(hi + kIntTol);
        int_vars_.push_back(j);
      }
      lb0_[static_cast<std::size_t>(j)] = lo;
      ub0_[static_cast<std::size_t>(j)] = hi;
      if (lo > hi) empty_domain_ = true;
    }
  }

  SolveResult solve();

private:
  double norm(double model_obj) const { return model_.maximize() ? model_obj : -model_obj; }
  double denorm(double v) const { return model_.maximize() ? v : -v; }
  double prune_cut(double inc_norm) const {
    return inc_norm + cfg_.mip_gap * std::max(std::fabs(inc_norm), 1e-10) + 1e-9;
  }

  bool start_feasible(const std::vector<double>& x) const;
  void node_bounds(const BnbNode& node, std::vector<double>& lb, std::vector<double>& ub) const;
  int pick_branch_var(const std::vector<double>& x) const;
  LpSolution warm_lp(const std::vector<double>& lb, const std::vector<double>& ub,
                     const Basis& warm) const;
  void offer_incumbent(Shared& sh, double bn, std::vector<double>&& x);
  void fix_and_resolve(Shared& sh, const std::vector<double>& lb, const std::vector<double>& ub,
                       const LpSolution& relax);
  void worker(Shared& sh);
  std::shared_ptr<const BnbNode> process_solution(Shared& sh,
                                                  const std::shared_ptr<const BnbNode>& node,
                                                  LpSolution&& sol, bool allow_plunge);

  const Model& model_;
  const SolverConfig& cfg_;
  LpEngine engine_;
  Clock::time_point t0_, deadline_;
  LpControls ctl_;
  std::vector<double> lb0_, ub0_;
  std::vector<int> int_vars_;
  bool empty_domain_ = false;
};

bool BnbSolver::start_feasible(const std::vector<double>& x) const {
  for (int j = 0; j < model_.var_count(); ++j) {
    const std::size_t js = static_cast<std::size_t>(j);
    const double lo = lb0_[js], hi = ub0_[js];
    if (std::isfinite(lo) && x[js] < lo - cfg_.feas_tol * std::max(1.0, std::fabs(lo))) return false;
    if (std::isfinite(hi) && x[js] > hi + cfg_.feas_tol * std::max(1.0, std::fabs(hi))) return false;
    if (model_.var(j).domain != VarDomain::Continuous && integral_dist(x[js]) > kIntTol) {
      return false;
    }
  }
  for (int i = 0; i < model_.row_count(); ++i) {
    const Row& r = model_.row(i);
    const double act = model_.row_activity(i, x);
    const double tol = cfg_.feas_tol * std::max(1.0, std::fabs(r.rhs));
    if (r.sense == Sense::LE && act > r.rhs + tol) return false;
    if (r.sense == Sense::GE && act < r.rhs - tol) return false;
    if (r.sense == Sense::EQ && std::fabs(act - r.rhs) > tol) return false;
  }
  return true;
}

void BnbSolver::node_bounds(const BnbNode& node, std::vector<double>& lb,
                            std::vector<double>& ub) const {
  lb = lb0_;
  ub = ub0_;
  for (const BnbNode* p = &node; p != nullptr; p = p->parent.get()) {
    if (p->branch_var < 0) continue;
    const std::size_t v = static_cast<std::size_t>(p->branch_var);
    // Deeper decisions on a variable are at least as tight, so intersecting
    // in any order gives the same box.
    lb[v] = std::max(lb[v], p->blb);
    ub[v] = std::min(ub[v], p->bub);
  }
}

int BnbSolver::pick_branch_var(const std::vector<double>& x) const {
  int best = -1;
  bool best_binary = false;
  double best_score = -1.0;
  for (int j : int_vars_) {
    const double xj = x[static_cast<std::size_t>(j)];
    const double f = xj - std::floor(xj);
    const double score = std::min(f, 1.0 - f);
    if (score <= kIntTol) continue;
    const bool binary = model_.var(j).domain == VarDomain::Binary;
    bool take = false;
    if (best < 0) {
      take = true;
    } else if (binary != best_binary) {
      take = binary;  // fractional binaries outrank general integers
    } else if (score > best_score + 1e-12) {
      take = true;  // most fractional
    } else if (score >= best_score - 1e-12 &&
               model_.var(j).name < model_.var(best).name) {
      take = true;  // name order breaks exact ties deterministically
    }
    if (take) {
      best = j;
      best_binary = binary;
      best_score = std::max(best_score, score);
    }
  }
  return best;
}

// Caller must hold sh.mu.
void BnbSolver::offer_incumbent(Shared& sh, double bn, std::vector<double>&& x) {
  if (sh.has_inc && bn <= sh.inc_norm) return;
  sh.inc_norm = bn;
  sh.inc_x = std::move(x);
  sh.has_inc = true;
  sh.improvements++;
  if (sh.improvements >= cfg_.solution_limit) {
    sh.stop = true;
    sh.stop_reason = SolveStatus::SolutionLimit;
  }
}

LpSolution BnbSolver::warm_lp(const std::vector<double>& lb, const std::vector<double>& ub,
                              const Basis& warm) const {
  LpSolution sol;
  try {
    sol = engine_.solve_dual(lb, ub, warm, ctl_);
  } catch (const NumericalError&) {
    sol.status = LpStatus::Numerical;
  }
  if (sol.status == LpStatus::Numerical || sol.status == LpStatus::IterLimit) {
    try {
      sol = engine_.solve_primal(lb, ub, ctl_);  // cold restart from scratch
    } catch (const NumericalError&) {
      sol.status = LpStatus::Numerical;
    }
  }
  return sol;
}

void BnbSolver::fix_and_resolve(Shared& sh, const std::vector<double>& lb,
                                const std::vector<double>& ub, const LpSolution& relax) {
  // Rounding heuristic. Branching alone crawls on capacity models whose
  // integers sit in the hundreds: each down branch shaves one unit and the
  // relaxation lands on the next fraction. Instead, freeze the integers at
  // rounded relaxation values and re-optimize the continuous variables.
  // Binaries act as switches (a big-M constraint leaves them at tiny
  // fractions), so any fractional binary is switched on first and the
  // quantity integers are floored against the resulting LP. Failures just
  // discard the attempt.
  bool any_frac = false;
  for (int j : int_vars_) {
    if (integral_dist(relax.x[static_cast<std::size_t>(j)]) > kIntTol) {
      any_frac = true;
      break;
    }
  }
  if (!any_frac) return;

  std::vector<double> flb = lb, fub = ub;
  bool bin_frac = false;
  for (int j : int_vars_) {
    if (model_.var(j).domain != VarDomain::Binary) continue;
    const std::size_t js = static_cast<std::size_t>(j);
    double v;
    if (integral_dist(relax.x[js]) > kIntTol) {
      bin_frac = true;
      v = std::ceil(relax.x[js] - kIntTol);
    } else {
      v = std::floor(relax.x[js] + 0.5);
    }
    v = std::min(std::max(v, lb[js]), ub[js]);
    flb[js] = v;
    fub[js] = v;
  }

  long long iters = 0;
  const LpSolution* base = &relax;
  LpSolution stage;
  if (bin_frac) {
    stage = warm_lp(flb, fub, relax.basis);
    iters += stage.iters;
    if (stage.status != LpStatus::Optimal) {
      std::lock_guard<std::mutex> lk(sh.mu);
      sh.simplex_iters += iters;
      return;
    }
    base = &stage;
  }
  for (int j : int_vars_) {
    if (model_.var(j).domain == VarDomain::Binary) continue;
    const std::size_t js = static_cast<std::size_t>(j);
    double v = std::floor(base->x[js] + kIntTol);
    v = std::min(std::max(v, lb[js]), ub[js]);
    flb[js] = v;
    fub[js] = v;
  }
  LpSolution fix = warm_lp(flb, fub, base->basis);
  iters += fix.iters;

  std::unique_lock<std::mutex> lk(sh.mu);
  sh.simplex_iters += iters;
  if (fix.status != LpStatus::Optimal || sh.stop) return;
  offer_incumbent(sh, norm(fix.obj), std::move(fix.x));
  lk.unlock();
  sh.cv.notify_all();
}

std::shared_ptr<const BnbNode> BnbSolver::process_solution(
    Shared& sh, const std::shared_ptr<const BnbNode>& node, LpSolution&& sol, bool allow_plunge) {
  std::unique_lock<std::mutex> lk(sh.mu);
  if (sh.stop) return nullptr;  // discard; the estimate stays in `open` as unresolved
  sh.nodes++;
  sh.simplex_iters += sol.iters;
  auto resolve_estimate = [&] {
    auto it = sh.open.find(node->estimate);
    if (it != sh.open.end()) sh.open.erase(it);
  };
  std::shared_ptr<const BnbNode> plunge;
  switch (sol.status) {
    case LpStatus::Infeasible:
      resolve_estimate();
      break;
    case LpStatus::TimeLimit:
      // Unresolved: the estimate stays in `open` and keeps capping the tree.
      sh.stop = true;
      sh.stop_reason = SolveStatus::TimeLimit;
      break;
    case LpStatus::Optimal: {
      resolve_estimate();
      const double bn = norm(sol.obj);
      if (sh.has_inc && bn <= prune_cut(sh.inc_norm)) {
        sh.pruned_max = std::max(sh.pruned_max, bn);
        break;
      }
      const int bv = pick_branch_var(sol.x);
      if (bv < 0) {
        offer_incumbent(sh, bn, std::move(sol.x));  // integer feasible
        break;
      }
      auto warm = std::make_shared<const Basis>(std::move(sol.basis));
      const double fl = std::floor(sol.x[static_cast<std::size_t>(bv)]);
      auto make_child = [&](double blb, double bub) {
        auto child = std::make_shared<BnbNode>();
        child->parent = node;
        child->warm = warm;
        child->estimate = bn;
        child->depth = node->depth + 1;
        child->id = sh.next_id++;
        child->branch_var = bv;
        child->blb = blb;
        child->bub = bub;
        sh.open.insert(bn);
        return child;
      };
      auto queue_child = [&](std::shared_ptr<BnbNode> child) {
        sh.heap.push(HeapEnt{bn, child->depth, child->id, std::move(child)});
      };
      // Preferred side: build the device for binaries, round counts down for
      // general integers.
      const bool up_first = model_.var(bv).domain == VarDomain::Binary;
      auto first = make_child(up_first ? fl + 1.0 : -kInfinity, up_first ? kInfinity : fl);
      auto second = make_child(up_first ? -kInfinity : fl + 1.0, up_first ? fl : kInfinity);
      if (allow_plunge) {
        // Dive straight into the preferred child; best-bound exploration on a
        // near-flat tree otherwise wanders for ages before the first
        // incumbent. The sibling goes to the heap for later.
        queue_child(std::move(second));
        plunge = std::move(first);
      } else {
        queue_child(std::move(first));
        queue_child(std::move(second));
      }
      break;
    }
    case LpStatus::Unbounded:
      // Impossible once the root is bounded; treat as a solver defect.
      if (!sh.error) {
        sh.error = std::make_exception_ptr(NumericalError(
            "node " + std::to_string(node->id) + ": relaxation reported unbounded"));
      }
      sh.stop = true;
      break;
    case LpStatus::IterLimit:
    case LpStatus::Numerical:
      if (!sh.error) {
        const char* why =
            sol.status == LpStatus::IterLimit ? "hit the iteration limit" : "lost feasibility";
        sh.error = std::make_exception_ptr(NumericalError(
            "node " + std::to_string(node->id) + ": LP " + why));
      }
      sh.stop = true;
      break;
  }
  lk.unlock();
  sh.cv.notify_all();
  return plunge;
}

void BnbSolver::worker(Shared& sh) {
  std::vector<double> lb, ub;
  while (true) {
    std::shared_ptr<const BnbNode> node;
    {
      std::unique_lock<std::mutex> lk(sh.mu);
      const bool ok = sh.cv.wait_until(lk, deadline_, [&] {
        return sh.stop || !sh.heap.empty() || sh.active == 0;
      });
      if (!ok) {
        sh.stop = true;
        sh.stop_reason = SolveStatus::TimeLimit;
        lk.unlock();
        sh.cv.notify_all();
        return;
      }
      if (sh.stop) return;
      if (sh.heap.empty()) return;  // active == 0: tree exhausted
      HeapEnt top = sh.heap.top();
      sh.heap.pop();
      if (sh.has_inc && top.estimate <= prune_cut(sh.inc_norm)) {
        sh.pruned_max = std::max(sh.pruned_max, top.estimate);
        auto it = sh.open.find(top.estimate);
        if (it != sh.open.end()) sh.open.erase(it);
        lk.unlock();
        sh.cv.notify_all();
        continue;
      }
      node = std::move(top.node);
      sh.active++;
    }
    bool dive_head = true;
    while (node) {
      node_bounds(*node, lb, ub);
      LpSolution sol = warm_lp(lb, ub, *node->warm);
      if (dive_head && sol.status == LpStatus::Optimal) {
        fix_and_resolve(sh, lb, ub, sol);  // one rounding attempt per dive
        dive_head = false;
      }
      node = process_solution(sh, node, std::move(sol), /*allow_plunge=*/true);
    }
    {
      std::unique_lock<std::mutex> lk(sh.mu);
      sh.active--;
    }
    sh.cv.notify_all();
  }
}

SolveResult BnbSolver::solve() {
  SolveResult out;
  if (empty_domain_) {
    out.status = SolveStatus::Infeasible;
    out.bound = denorm(-kInfinity);
    return out;
  }

  Shared sh;

  if (!cfg_.warm_start.empty()) {
    std::vector<double> x(static_cast<std::size_t>(model_.var_count()), 0.0);
    for (int j = 0; j < model_.var_count(); ++j) {
      const std::size_t js = static_cast<std::size_t>(j);
      const auto it = cfg_.warm_start.find(model_.var(j).name);
      x[js] = it != cfg_.warm_start.end()
                  ? it->second
                  : std::min(std::max(0.0, lb0_[js]), ub0_[js]);
    }
    if (start_feasible(x)) {
      sh.inc_x = std::move(x);
      sh.inc_norm = norm(model_.objective_value(sh.inc_x));
      sh.has_inc = true;
    }
  }

  auto finish = [&](bool stopped) {
    out.stats.nodes = sh.nodes;
    out.stats.simplex_iters = sh.simplex_iters;
    out.stats.wall_s = std::chrono::duration<double>(Clock::now() - t0_).count();
    double bound_norm = sh.has_inc ? sh.inc_norm : -kInfinity;
    bound_norm = std::max(bound_norm, sh.pruned_max);
    if (!sh.open.empty()) bound_norm = std::max(bound_norm, *sh.open.rbegin());
    if (!sh.has_inc) {
      if (stopped) {
        out.status = sh.stop_reason;
        out.bound = denorm(bound_norm);
        out.gap = kInfinity;
      } else {
        out.status = SolveStatus::Infeasible;
        out.bound = denorm(-kInfinity);
      }
      return out;
    }
    out.has_assignment = true;
    out.assignment = to_assignment(model_, sh.inc_x);
    out.objective = denorm(sh.inc_norm);
    const double abs_gap = std::max(0.0, bound_norm - sh.inc_norm);
    out.bound = denorm(sh.inc_norm + abs_gap);
    out.gap = abs_gap / std::max(std::fabs(sh.inc_norm), 1e-10);
    if (stopped && (sh.stop_reason == SolveStatus::TimeLimit ||
                    sh.stop_reason == SolveStatus::SolutionLimit)) {
      out.status = sh.stop_reason;
    } else if (abs_gap <= 1e-9 * std::max(1.0, std::fabs(sh.inc_norm))) {
      out.status = SolveStatus::Optimal;
      out.bound = out.objective;
      out.gap = 0.0;
    } else {
      out.status = SolveStatus::GapLimit;
    }
    return out;
  };

  const LpSolution root = engine_.solve_primal(lb0_, ub0_, ctl_);
  switch (root.status) {
    case LpStatus::Infeasible:
      sh.simplex_iters = root.iters;
      sh.nodes = 1;
      return finish(false);
    case LpStatus::Unbounded:
      sh.simplex_iters = root.iters;
      sh.nodes = 1;
      out = finish(false);
      out.status = SolveStatus::Unbounded;
      out.bound = denorm(kInfinity);
      return out;
    case LpStatus::TimeLimit:
      sh.simplex_iters = root.iters;
      sh.open.insert(kInfinity);  // nothing proven yet
      sh.stop = true;
      sh.stop_reason = SolveStatus::TimeLimit;
      return finish(true);
    case LpStatus::IterLimit:
      throw NumericalError("root LP iteration cap exceeded");
    case LpStatus::Numerical:
      throw NumericalError("numerical breakdown in root LP");
    case LpStatus::Optimal:
      break;
  }

  auto root_node = std::make_shared<const BnbNode>(
      BnbNode{nullptr, nullptr, norm(root.obj), 0, 0, -1, 0.0, 0.0});
  sh.open.insert(root_node->estimate);
  fix_and_resolve(sh, lb0_, ub0_, root);
  {
    LpSolution rootcopy = root;
    process_solution(sh, root_node, std::move(rootcopy), /*allow_plunge=*/false);
  }

  if (!sh.stop && !sh.heap.empty()) {
    if (cfg_.workers == 1) {
      worker(sh);
    } else {
      std::vector<std::thread> threads;
      threads.reserve(static_cast<std::size_t>(cfg_.workers));
      for (int i = 0; i < cfg_.workers; ++i) threads.emplace_back([&] { worker(sh); });
      for (auto& t : threads) t.join();
    }
  }
  if (sh.error) std::rethrow_exception(sh.error);
  return finish(sh.stop);
}

}  // namespace

SolveResult solve_milp(const Model& m, const SolverConfig& cfg) {
  cfg.validate();
  BnbSolver solver(m, cfg);
  return solver.solve();
}

VerifyReport verify(const Model& m, const std::unordered_map<std::string, double>& assignment,
                    double feas_tol) {
  VerifyReport rep;
  std::vector<double> x(static_cast<std::size_t>(m.var_count()), 0.0);
  for (const auto& [name, value] : assignment) {
    const int j = m.var_index(name);
    if (j < 0) {
      rep.violations.push_back({"unknown-variable", name, value});
      continue;
    }
    x[static_cast<std::size_t>(j)] = value;
  }
  for (int j = 0; j < m.var_count(); ++j) {
    const Var& v = m.var(j);
    const double xj = x[static_cast<std::size_t>(j)];
    if (std::isfinite(v.lb) && xj < v.lb - feas_tol * std::max(1.0, std::fabs(v.lb))) {
      rep.violations.push_back({"bound", v.name, v.lb - xj});
    }
    if (std::isfinite(v.ub) && xj > v.ub + feas_tol * std::max(1.0, std::fabs(v.ub))) {
      rep.violations.push_back({"bound", v.name, xj - v.ub});
    }
    if (v.domain != VarDomain::Continuous && integral_dist(xj) > kIntTol) {
      rep.violations.push_back({"integrality", v.name, integral_dist(xj)});
    }
  }
  for (int i = 0; i < m.row_count(); ++i) {
    const Row& r = m.row(i);
    const double act = m.row_activity(i, x);
    const double tol = feas_tol * std::max(1.0, std::fabs(r.rhs));
    double viol = 0.0;
    switch (r.sense) {
      case Sense::LE: viol = act - r.rhs; break;
      case Sense::GE: viol = r.rhs - act; break;
      case Sense::EQ: viol = std::fabs(act - r.rhs); break;
    }
    if (viol > tol) rep.violations.push_back({"row", r.name, viol});
  }
  return rep;
}

std::string VerifyReport::to_string() const {
  if (violations.empty()) return "ok: 0 violations\n";
  std::ostringstream os;
  os << violations.size() << " violation(s)\n";
  for (const Violation& v : violations) {
    os << "  " << v.kind << " " << v.name << " by " << format_double(v.amount) << "\n";
  }
  return os.str();
}

std::unordered_map<std::string, double> parse_solution_text(const std::string& text,
                                                            const std::string& origin) {
  std::unordered_map<std::string, double> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    for (char& c : line) {
      if (c == '=' || c == '\t' || c == '\r') c = ' ';
    }
    std::istringstream ls(line);
    std::string name, value, extra;
    if (!(ls >> name)) continue;
    if (!(ls >> value) || (ls >> extra)) {
      throw ParseError(origin + ":" + std::to_string(lineno) +
                       ": expected `name = value`, got \"" + line + "\"");
    }
    double v = 0.0;
    try {
      std::size_t pos = 0;
      v = std::stod(value, &pos);
      if (pos != value.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ParseError(origin + ":" + std::to_string(lineno) + ": bad value \"" + value + "\"");
    }
    out[name] = v;  // later lines win
  }
  return out;
}

std::unordered_map<std::string, double> load_solution_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open solution file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_solution_text(ss.str(), path);
}

std::string format_solve_result(const Model& m, const SolveResult& r) {
  std::ostringstream os;
  os << "# status = " << status_name(r.status) << "\n";
  os << "# objective = " << format_double(r.objective) << "\n";
  os << "# bound = " << format_double(r.bound) << "\n";
  os << "# gap = " << format_double(r.gap) << "\n";
  os << "# nodes = " << r.stats.nodes << "\n";
  os << "# simplex_iters = " << r.stats.simplex_iters << "\n";
  os << "# wall_s = " << format_double(r.stats.wall_s) << "\n";
  if (r.has_assignment) {
    for (int j = 0; j < m.var_count(); ++j) {
      const auto it = r.assignment.find(m.var(j).name);
      const double v = it == r.assignment.end() ? 0.0 : it->second;
      os << m.var(j).name << " = " << format_double(v) << "\n";
    }
  }
  return os.str();
}

}  // namespace qkdtopo
