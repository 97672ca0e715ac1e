#include "qkdtopo/simplex.hpp"

#include <algorithm>
#include <cmath>

namespace qkdtopo {

namespace {

constexpr double kInf = kInfinity;

// Internal control-flow signal for deadline expiry deep inside linear algebra.
struct DeadlineHit {};

bool past_deadline(const LpControls& ctl) {
  return ctl.has_deadline && std::chrono::steady_clock::now() >= ctl.deadline;
}

}  // namespace

struct LpEngine::Work {
  int m = 0, nstruct = 0, ncols = 0;
  std::vector<double> lb, ub, x, cost, d;
  std::vector<VarStatus> stat;
  std::vector<int> basic;  // size m
  std::vector<int> pos;    // column -> basic position (or -1)
  // dense LU of the basis (row-major), with row permutation
  std::vector<double> lu;
  std::vector<int> perm;
  struct Eta {
    int r;
    std::vector<double> w;
  };
  std::vector<Eta> etas;
  long long iters = 0;
  long long max_iters = 0;
  int degen_streak = 0;
  bool bland = false;
  std::vector<double> ybuf, wbuf, acc;
};

LpEngine::LpEngine(const Model& m) {
  m_ = m.row_count();
  nstruct_ = m.var_count();
  model_max_ = m.maximize();
  init_columns(m);
}

void LpEngine::init_columns(const Model& m) {
  // Transpose the row-wise model into column-major storage.
  std::vector<int> counts(static_cast<std::size_t>(nstruct_), 0);
  for (int i = 0; i < m_; ++i) {
    for (const RowEntry& t : m.row(i).terms) counts[static_cast<std::size_t>(t.col)]++;
  }
  col_start_.assign(static_cast<std::size_t>(nstruct_) + 1, 0);
  for (int j = 0; j < nstruct_; ++j) {
    col_start_[static_cast<std::size_t>(j) + 1] =
        col_start_[static_cast<std::size_t>(j)] + counts[static_cast<std::size_t>(j)];
  }
  col_row_.resize(static_cast<std::size_t>(col_start_.back()));
  col_val_.resize(col_row_.size());
  std::vector<int> fill(col_start_.begin(), col_start_.end() - 1);
  for (int i = 0; i < m_; ++i) {
    for (const RowEntry& t : m.row(i).terms) {
      const int at = fill[static_cast<std::size_t>(t.col)]++;
      col_row_[static_cast<std::size_t>(at)] = i;
      col_val_[static_cast<std::size_t>(at)] = t.coef;
    }
  }
  obj_.resize(static_cast<std::size_t>(nstruct_));
  cost_min_.resize(static_cast<std::size_t>(nstruct_));
  for (int j = 0; j < nstruct_; ++j) {
    obj_[static_cast<std::size_t>(j)] = m.var(j).obj;
    cost_min_[static_cast<std::size_t>(j)] = model_max_ ? -m.var(j).obj : m.var(j).obj;
  }
  rhs_.resize(static_cast<std::size_t>(m_));
  slack_lb_.resize(static_cast<std::size_t>(m_));
  slack_ub_.resize(static_cast<std::size_t>(m_));
  for (int i = 0; i < m_; ++i) {
    rhs_[static_cast<std::size_t>(i)] = m.row(i).rhs;
    switch (m.row(i).sense) {
      case Sense::LE:
        slack_lb_[static_cast<std::size_t>(i)] = 0.0;
        slack_ub_[static_cast<std::size_t>(i)] = kInf;
        break;
      case Sense::GE:
        slack_lb_[static_cast<std::size_t>(i)] = -kInf;
        slack_ub_[static_cast<std::size_t>(i)] = 0.0;
        break;
      case Sense::EQ:
        slack_lb_[static_cast<std::size_t>(i)] = 0.0;
        slack_ub_[static_cast<std::size_t>(i)] = 0.0;
        break;
    }
  }
}

namespace {

// Column kinds: [0,nstruct) structural, [nstruct,nstruct+m) slack e_i,
// [nstruct+m, nstruct+2m) artificial e_i.
struct Cols {
  const LpEngine* eng;
  int nstruct, m;
  const std::vector<int>* start;
  const std::vector<int>* rows;
  const std::vector<double>* vals;
};

}  // namespace

// --- column helpers (free functions over engine internals) ---

namespace detail {

inline double col_dot(const std::vector<int>& start, const std::vector<int>& rows,
                      const std::vector<double>& vals, int nstruct, int m, int j,
                      const std::vector<double>& y) {
  if (j < nstruct) {
    double s = 0.0;
    for (int k = start[static_cast<std::size_t>(j)]; k < start[static_cast<std::size_t>(j) + 1];
         ++k) {
      s += vals[static_cast<std::size_t>(k)] * y[static_cast<std::size_t>(rows[static_cast<std::size_t>(k)])];
    }
    return s;
  }
  const int r = j < nstruct + m ? j - nstruct : j - nstruct - m;
  return y[static_cast<std::size_t>(r)];
}

inline void col_axpy(const std::vector<int>& start, const std::vector<int>& rows,
                     const std::vector<double>& vals, int nstruct, int m, int j, double a,
                     std::vector<double>& v) {
  if (a == 0.0) return;
  if (j < nstruct) {
    for (int k = start[static_cast<std::size_t>(j)]; k < start[static_cast<std::size_t>(j) + 1];
         ++k) {
      v[static_cast<std::size_t>(rows[static_cast<std::size_t>(k)])] +=
          a * vals[static_cast<std::size_t>(k)];
    }
    return;
  }
  const int r = j < nstruct + m ? j - nstruct : j - nstruct - m;
  v[static_cast<std::size_t>(r)] += a;
}

}  // namespace detail

namespace {

class SimplexRun {
public:
  SimplexRun(const LpEngine& eng, LpEngine::Work& w, const LpControls& ctl,
             const std::vector<int>& cstart, const std::vector<int>& crow,
             const std::vector<double>& cval)
      : w_(w), ctl_(ctl), cstart_(cstart), crow_(crow), cval_(cval) {
    (void)eng;
  }

  double col_dot(int j, const std::vector<double>& y) const {
    return detail::col_dot(cstart_, crow_, cval_, w_.nstruct, w_.m, j, y);
  }
  void col_axpy(int j, double a, std::vector<double>& v) const {
    detail::col_axpy(cstart_, crow_, cval_, w_.nstruct, w_.m, j, a, v);
  }
  void col_scatter(int j, std::vector<double>& v) const {
    std::fill(v.begin(), v.end(), 0.0);
    col_axpy(j, 1.0, v);
  }

  void factorize() {
    const int m = w_.m;
    w_.lu.assign(static_cast<std::size_t>(m) * static_cast<std::size_t>(m), 0.0);
    for (int i = 0; i < m; ++i) {
      const int j = w_.basic[static_cast<std::size_t>(i)];
      if (j < w_.nstruct) {
        for (int k = cstart_[static_cast<std::size_t>(j)];
             k < cstart_[static_cast<std::size_t>(j) + 1]; ++k) {
          w_.lu[static_cast<std::size_t>(crow_[static_cast<std::size_t>(k)]) *
                    static_cast<std::size_t>(m) +
                static_cast<std::size_t>(i)] = cval_[static_cast<std::size_t>(k)];
        }
      } else {
        const int r = j < w_.nstruct + m ? j - w_.nstruct : j - w_.nstruct - m;
        w_.lu[static_cast<std::size_t>(r) * static_cast<std::size_t>(m) +
              static_cast<std::size_t>(i)] = 1.0;
      }
    }
    w_.perm.resize(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) w_.perm[static_cast<std::size_t>(i)] = i;
    double* lu = w_.lu.data();
    for (int k = 0; k < m; ++k) {
      if ((k & 31) == 0 && past_deadline(ctl_)) throw DeadlineHit{};
      int p = k;
      double best = std::fabs(lu[static_cast<std::size_t>(k) * m + k]);
      for (int i = k + 1; i < m; ++i) {
        const double a = std::fabs(lu[static_cast<std::size_t>(i) * m + k]);
        if (a > best) {
          best = a;
          p = i;
        }
      }
      if (best < 1e-12) throw NumericalError("singular basis during refactorization");
      if (p != k) {
        for (int c = 0; c < m; ++c) {
          std::swap(lu[static_cast<std::size_t>(k) * m + c], lu[static_cast<std::size_t>(p) * m + c]);
        }
        std::swap(w_.perm[static_cast<std::size_t>(k)], w_.perm[static_cast<std::size_t>(p)]);
      }
      const double piv = lu[static_cast<std::size_t>(k) * m + k];
      for (int i = k + 1; i < m; ++i) {
        double& l = lu[static_cast<std::size_t>(i) * m + k];
        if (l == 0.0) continue;
        l /= piv;
        const double li = l;
        const double* rk = lu + static_cast<std::size_t>(k) * m;
        double* ri = lu + static_cast<std::size_t>(i) * m;
        for (int c = k + 1; c < m; ++c) ri[c] -= li * rk[c];
      }
    }
    w_.etas.clear();
  }

  void ftran(std::vector<double>& v) const {
    const int m = w_.m;
    const double* lu = w_.lu.data();
    auto& tmp = scratch_;
    tmp.resize(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) tmp[static_cast<std::size_t>(i)] = v[static_cast<std::size_t>(w_.perm[static_cast<std::size_t>(i)])];
    v.swap(tmp);
    for (int k = 0; k < m; ++k) {
      const double vk = v[static_cast<std::size_t>(k)];
      if (vk == 0.0) continue;
      for (int i = k + 1; i < m; ++i) v[static_cast<std::size_t>(i)] -= lu[static_cast<std::size_t>(i) * m + k] * vk;
    }
    for (int k = m - 1; k >= 0; --k) {
      v[static_cast<std::size_t>(k)] /= lu[static_cast<std::size_t>(k) * m + k];
      const double vk = v[static_cast<std::size_t>(k)];
      if (vk == 0.0) continue;
      for (int i = 0; i < k; ++i) v[static_cast<std::size_t>(i)] -= lu[static_cast<std::size_t>(i) * m + k] * vk;
    }
    for (const auto& e : w_.etas) {
      const double t = v[static_cast<std::size_t>(e.r)] / e.w[static_cast<std::size_t>(e.r)];
      if (t != 0.0) {
        for (int i = 0; i < m; ++i) v[static_cast<std::size_t>(i)] -= e.w[static_cast<std::size_t>(i)] * t;
      }
      v[static_cast<std::size_t>(e.r)] = t;
    }
  }

  void btran(std::vector<double>& v) const {
    const int m = w_.m;
    const double* lu = w_.lu.data();
    for (auto it = w_.etas.rbegin(); it != w_.etas.rend(); ++it) {
      double s = v[static_cast<std::size_t>(it->r)];
      for (int i = 0; i < m; ++i) {
        if (i != it->r) s -= it->w[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i)];
      }
      v[static_cast<std::size_t>(it->r)] = s / it->w[static_cast<std::size_t>(it->r)];
    }
    for (int k = 0; k < m; ++k) {
      double s = v[static_cast<std::size_t>(k)];
      for (int i = 0; i < k; ++i) s -= lu[static_cast<std::size_t>(i) * m + k] * v[static_cast<std::size_t>(i)];
      v[static_cast<std::size_t>(k)] = s / lu[static_cast<std::size_t>(k) * m + k];
    }
    for (int k = m - 1; k >= 0; --k) {
      double s = v[static_cast<std::size_t>(k)];
      for (int i = k + 1; i < m; ++i) s -= lu[static_cast<std::size_t>(i) * m + k] * v[static_cast<std::size_t>(i)];
      v[static_cast<std::size_t>(k)] = s;
    }
    auto& tmp = scratch_;
    tmp.resize(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) tmp[static_cast<std::size_t>(w_.perm[static_cast<std::size_t>(i)])] = v[static_cast<std::size_t>(i)];
    v.swap(tmp);
  }

  void compute_x_basic(const std::vector<double>& rhs) {
    auto& acc = w_.acc;
    acc = rhs;
    for (int j = 0; j < w_.ncols; ++j) {
      if (w_.pos[static_cast<std::size_t>(j)] >= 0) continue;
      const double xj = w_.x[static_cast<std::size_t>(j)];
      if (xj != 0.0) col_axpy(j, -xj, acc);
    }
    ftran(acc);
    for (int i = 0; i < w_.m; ++i) {
      w_.x[static_cast<std::size_t>(w_.basic[static_cast<std::size_t>(i)])] =
          acc[static_cast<std::size_t>(i)];
    }
  }

  void refactor(const std::vector<double>& rhs) {
    factorize();
    compute_x_basic(rhs);
  }

  mutable std::vector<double> scratch_;
  LpEngine::Work& w_;
  const LpControls& ctl_;
  const std::vector<int>& cstart_;
  const std::vector<int>& crow_;
  const std::vector<double>& cval_;
};

}  // namespace

LpSolution LpEngine::finish(Work& w, LpStatus st) const {
  LpSolution out;
  out.status = st;
  out.iters = w.iters;
  out.x.assign(w.x.begin(), w.x.begin() + nstruct_);
  double obj = 0.0;
  for (int j = 0; j < nstruct_; ++j) obj += obj_[static_cast<std::size_t>(j)] * out.x[static_cast<std::size_t>(j)];
  out.obj = obj;
  out.basis.basic = w.basic;
  out.basis.status = w.stat;
  return out;
}

// Primal simplex main loop over the current phase costs. Returns the reason
// the loop stopped; numerical trouble escapes as NumericalError.
namespace {

LpStatus primal_loop(SimplexRun& run, LpEngine::Work& w, const LpControls& ctl,
                     const std::vector<double>& rhs) {
  const int m = w.m;
  const int ncols = w.ncols;
  const double inf = kInfinity;
  int since_refactor = 0;
  while (true) {
    if (w.iters >= w.max_iters) return LpStatus::IterLimit;
    if ((w.iters & 15) == 0 && past_deadline(ctl)) return LpStatus::TimeLimit;
    ++w.iters;

    if (static_cast<int>(w.etas.size()) > 64 || since_refactor > 512) {
      run.refactor(rhs);
      since_refactor = 0;
    }
    ++since_refactor;

    // BTRAN + pricing
    auto& y = w.ybuf;
    y.resize(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) y[static_cast<std::size_t>(i)] = w.cost[static_cast<std::size_t>(w.basic[static_cast<std::size_t>(i)])];
    run.btran(y);
    int q = -1;
    double best = ctl.opt_tol;
    double dq = 0.0;
    for (int j = 0; j < ncols; ++j) {
      const std::size_t js = static_cast<std::size_t>(j);
      if (w.pos[js] >= 0) continue;
      if (w.lb[js] == w.ub[js]) continue;  // fixed
      const double d = w.cost[js] - run.col_dot(j, y);
      double viol = 0.0;
      switch (w.stat[js]) {
        case VarStatus::AtLower: viol = -d; break;
        case VarStatus::AtUpper: viol = d; break;
        case VarStatus::FreeZero: viol = std::fabs(d); break;
        case VarStatus::Basic: continue;
      }
      if (viol > best) {
        q = j;
        dq = d;
        best = viol;
        if (w.bland) break;  // smallest index wins
      }
    }
    if (q < 0) return LpStatus::Optimal;
    const std::size_t qs = static_cast<std::size_t>(q);
    const double sigma =
        w.stat[qs] == VarStatus::AtLower ? 1.0 : w.stat[qs] == VarStatus::AtUpper ? -1.0 : (dq < 0.0 ? 1.0 : -1.0);

    auto& wc = w.wbuf;
    wc.resize(static_cast<std::size_t>(m));
    run.col_scatter(q, wc);
    run.ftran(wc);

    double tbound = inf;
    if (w.stat[qs] != VarStatus::FreeZero && w.lb[qs] > -inf && w.ub[qs] < inf) {
      tbound = w.ub[qs] - w.lb[qs];
    }

    // Ratio test (two passes: a tolerance pass for the max step, then the
    // largest eligible pivot; Bland mode uses exact ratios and index order).
    double tstar = tbound;
    int leave = -1;       // basic position; -1 = bound flip
    bool leave_up = false;  // leaving variable ends at its upper bound
    if (!w.bland) {
      double tmax = tbound;
      for (int i = 0; i < m; ++i) {
        const double wi = wc[static_cast<std::size_t>(i)];
        if (std::fabs(wi) <= ctl.pivot_tol) continue;
        const std::size_t bi = static_cast<std::size_t>(w.basic[static_cast<std::size_t>(i)]);
        const double delta = -sigma * wi;
        double lim = inf;
        // Tiny padding only: it breaks exact degenerate ties toward larger
        // pivots without accumulating real bound violations.
        if (delta < 0.0 && w.lb[bi] > -inf) {
          lim = (w.x[bi] - w.lb[bi] + 1e-9) / (-delta);
        } else if (delta > 0.0 && w.ub[bi] < inf) {
          lim = (w.ub[bi] - w.x[bi] + 1e-9) / delta;
        }
        if (lim < tmax) tmax = lim;
      }
      if (tmax == inf) return LpStatus::Unbounded;
      double bestpiv = 0.0;
      for (int i = 0; i < m; ++i) {
        const double wi = wc[static_cast<std::size_t>(i)];
        if (std::fabs(wi) <= ctl.pivot_tol) continue;
        const std::size_t bi = static_cast<std::size_t>(w.basic[static_cast<std::size_t>(i)]);
        const double delta = -sigma * wi;
        double lim = inf;
        bool up = false;
        if (delta < 0.0 && w.lb[bi] > -inf) {
          lim = (w.x[bi] - w.lb[bi]) / (-delta);
        } else if (delta > 0.0 && w.ub[bi] < inf) {
          lim = (w.ub[bi] - w.x[bi]) / delta;
          up = true;
        } else {
          continue;
        }
        if (lim <= tmax && std::fabs(wi) > bestpiv) {
          bestpiv = std::fabs(wi);
          leave = i;
          leave_up = up;
          tstar = lim;
        }
      }
      if (leave < 0) {
        tstar = tbound;  // pure bound flip
      } else if (tbound <= tstar) {
        leave = -1;
        tstar = tbound;
      }
    } else {
      tstar = tbound;
      int leave_var = -1;
      for (int i = 0; i < m; ++i) {
        const double wi = wc[static_cast<std::size_t>(i)];
        if (std::fabs(wi) <= ctl.pivot_tol) continue;
        const std::size_t bi = static_cast<std::size_t>(w.basic[static_cast<std::size_t>(i)]);
        const double delta = -sigma * wi;
        double lim = inf;
        bool up = false;
        if (delta < 0.0 && w.lb[bi] > -inf) {
          lim = (w.x[bi] - w.lb[bi]) / (-delta);
        } else if (delta > 0.0 && w.ub[bi] < inf) {
          lim = (w.ub[bi] - w.x[bi]) / delta;
          up = true;
        } else {
          continue;
        }
        if (lim < tstar - 1e-12 ||
            (lim < tstar + 1e-12 && leave >= 0 && w.basic[static_cast<std::size_t>(i)] < leave_var)) {
          tstar = lim;
          leave = i;
          leave_up = up;
          leave_var = w.basic[static_cast<std::size_t>(i)];
        }
      }
      if (tstar == inf) return LpStatus::Unbounded;
      if (leave >= 0 && tbound <= tstar) leave = -1;  // flip wins ties toward flip
      if (leave < 0) tstar = tbound;
    }
    if (tstar < 0.0) tstar = 0.0;

    if (leave < 0) {
      // Bound flip: q jumps to its opposite bound, the basis is unchanged.
      if (tstar == inf) return LpStatus::Unbounded;
      for (int i = 0; i < m; ++i) {
        const double wi = wc[static_cast<std::size_t>(i)];
        if (wi != 0.0) w.x[static_cast<std::size_t>(w.basic[static_cast<std::size_t>(i)])] -= sigma * tstar * wi;
      }
      w.x[qs] = w.stat[qs] == VarStatus::AtLower ? w.ub[qs] : w.lb[qs];
      w.stat[qs] = w.stat[qs] == VarStatus::AtLower ? VarStatus::AtUpper : VarStatus::AtLower;
      continue;
    }

    const double piv = wc[static_cast<std::size_t>(leave)];
    if (std::fabs(piv) <= ctl.pivot_tol) {
      run.refactor(rhs);
      continue;  // retry the iteration with a fresh factorization
    }
    // Entering value and basic update.
    const double start_x = w.stat[qs] == VarStatus::AtLower ? w.lb[qs]
                           : w.stat[qs] == VarStatus::AtUpper ? w.ub[qs]
                                                              : 0.0;
    for (int i = 0; i < m; ++i) {
      const double wi = wc[static_cast<std::size_t>(i)];
      if (wi != 0.0) w.x[static_cast<std::size_t>(w.basic[static_cast<std::size_t>(i)])] -= sigma * tstar * wi;
    }
    const int out_var = w.basic[static_cast<std::size_t>(leave)];
    const std::size_t os = static_cast<std::size_t>(out_var);
    w.x[os] = leave_up ? w.ub[os] : w.lb[os];
    w.stat[os] = leave_up ? VarStatus::AtUpper : VarStatus::AtLower;
    w.pos[os] = -1;
    w.basic[static_cast<std::size_t>(leave)] = q;
    w.pos[qs] = leave;
    w.stat[qs] = VarStatus::Basic;
    w.x[qs] = start_x + sigma * tstar;
    w.etas.push_back({leave, wc});

    if (tstar <= 1e-12) {
      if (++w.degen_streak > 200) w.bland = true;
    } else {
      w.degen_streak = 0;
    }
  }
}

// Bounded-variable dual simplex. Assumes w.d holds dual-feasible reduced
// costs for the starting basis; used to reoptimize after bound changes.
LpStatus dual_loop(SimplexRun& run, LpEngine::Work& w, const LpControls& ctl,
                   const std::vector<double>& rhs) {
  const int m = w.m;
  const int ncols = w.ncols;
  std::vector<double> alpha(static_cast<std::size_t>(ncols), 0.0);

  auto refresh_d = [&]() {
    auto& y = w.ybuf;
    y.resize(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
      y[static_cast<std::size_t>(i)] = w.cost[static_cast<std::size_t>(w.basic[static_cast<std::size_t>(i)])];
    }
    run.btran(y);
    for (int j = 0; j < ncols; ++j) {
      const std::size_t js = static_cast<std::size_t>(j);
      w.d[js] = w.pos[js] >= 0 ? 0.0 : w.cost[js] - run.col_dot(j, y);
    }
  };

  int since_full = 0;
  while (true) {
    if (w.iters >= w.max_iters) return LpStatus::IterLimit;
    if ((w.iters & 15) == 0 && past_deadline(ctl)) return LpStatus::TimeLimit;
    ++w.iters;
    if (static_cast<int>(w.etas.size()) > 64 || since_full > 512) {
      run.refactor(rhs);
      refresh_d();
      since_full = 0;
    }
    ++since_full;

    // Leaving: the basic variable most outside its bounds.
    int r = -1;
    bool below = false;
    double worst = ctl.feas_tol;
    int bland_var = -1;
    for (int i = 0; i < m; ++i) {
      const std::size_t bi = static_cast<std::size_t>(w.basic[static_cast<std::size_t>(i)]);
      double v = 0.0;
      bool b = false;
      if (w.x[bi] < w.lb[bi] - 0.0) {
        v = w.lb[bi] - w.x[bi];
        b = true;
      } else if (w.x[bi] > w.ub[bi]) {
        v = w.x[bi] - w.ub[bi];
      }
      if (v <= ctl.feas_tol) continue;
      if (!w.bland) {
        if (v > worst) {
          worst = v;
          r = i;
          below = b;
        }
      } else if (bland_var < 0 || w.basic[static_cast<std::size_t>(i)] < bland_var) {
        bland_var = w.basic[static_cast<std::size_t>(i)];
        r = i;
        below = b;
      }
    }
    if (r < 0) return LpStatus::Optimal;

    // Row r of the tableau.
    auto& rho = w.ybuf;
    rho.assign(static_cast<std::size_t>(m), 0.0);
    rho[static_cast<std::size_t>(r)] = 1.0;
    run.btran(rho);

    int q = -1;
    double bestratio = kInfinity;
    double bestalpha = 0.0;
    for (int j = 0; j < ncols; ++j) {
      const std::size_t js = static_cast<std::size_t>(j);
      alpha[js] = 0.0;
      if (w.pos[js] >= 0 || w.lb[js] == w.ub[js]) continue;
      const double a = run.col_dot(j, rho);
      alpha[js] = a;
      if (std::fabs(a) <= ctl.pivot_tol) continue;
      bool elig;
      if (below) {
        elig = (w.stat[js] == VarStatus::AtLower && a < 0.0) ||
               (w.stat[js] == VarStatus::AtUpper && a > 0.0) ||
               w.stat[js] == VarStatus::FreeZero;
      } else {
        elig = (w.stat[js] == VarStatus::AtLower && a > 0.0) ||
               (w.stat[js] == VarStatus::AtUpper && a < 0.0) ||
               w.stat[js] == VarStatus::FreeZero;
      }
      if (!elig) continue;
      const double ratio = std::fabs(w.d[js]) / std::fabs(a);
      if (w.bland) {
        // Bland mode still needs the ratio test: theta must not push any
        // other reduced cost past zero, or the iteration stops being a dual
        // simplex and loses its termination guarantee. Exact comparison so
        // the smallest index among the minimizers wins.
        if (ratio < bestratio) {
          bestratio = ratio;
          q = j;
        }
        continue;
      }
      if (ratio < bestratio - 1e-12 ||
          (ratio < bestratio + 1e-12 && std::fabs(a) > bestalpha)) {
        bestratio = ratio;
        bestalpha = std::fabs(a);
        q = j;
      }
    }
    if (q < 0) return LpStatus::Infeasible;
    const std::size_t qs = static_cast<std::size_t>(q);

    auto& wc = w.wbuf;
    wc.resize(static_cast<std::size_t>(m));
    run.col_scatter(q, wc);
    run.ftran(wc);
    const double piv = wc[static_cast<std::size_t>(r)];
    if (std::fabs(piv) <= ctl.pivot_tol) {
      run.refactor(rhs);
      refresh_d();
      since_full = 0;
      continue;
    }

    const int out = w.basic[static_cast<std::size_t>(r)];
    const std::size_t os = static_cast<std::size_t>(out);
    const double target = below ? w.lb[os] : w.ub[os];
    const double t = (w.x[os] - target) / piv;
    for (int i = 0; i < m; ++i) {
      const double wi = wc[static_cast<std::size_t>(i)];
      if (wi != 0.0) w.x[static_cast<std::size_t>(w.basic[static_cast<std::size_t>(i)])] -= t * wi;
    }
    w.x[os] = target;
    w.stat[os] = below ? VarStatus::AtLower : VarStatus::AtUpper;
    w.pos[os] = -1;
    w.x[qs] += t;
    w.basic[static_cast<std::size_t>(r)] = q;
    w.pos[qs] = r;
    w.stat[qs] = VarStatus::Basic;

    const double theta = w.d[qs] / alpha[qs];
    for (int j = 0; j < ncols; ++j) {
      const std::size_t js = static_cast<std::size_t>(j);
      if (w.pos[js] >= 0 || j == out) continue;
      if (alpha[js] != 0.0) w.d[js] -= theta * alpha[js];
    }
    w.d[os] = -theta;
    w.d[qs] = 0.0;
    w.etas.push_back({r, wc});

    if (std::fabs(theta) <= 1e-12) {
      if (++w.degen_streak > 200) w.bland = true;
    } else {
      w.degen_streak = 0;
    }
  }
}

}  // namespace

LpSolution LpEngine::solve_primal(const std::vector<double>& lb, const std::vector<double>& ub,
                                  const LpControls& ctl) const {
  if (static_cast<int>(lb.size()) != nstruct_ || static_cast<int>(ub.size()) != nstruct_) {
    throw ValidationError("solve_primal: bound vector size mismatch");
  }
  Work w;
  w.m = m_;
  w.nstruct = nstruct_;
  w.ncols = nstruct_ + 2 * m_;
  w.max_iters = ctl.max_iters > 0 ? ctl.max_iters
                                  : 2000 + 200LL * (static_cast<long long>(m_) + w.ncols);
  const std::size_t nc = static_cast<std::size_t>(w.ncols);
  w.lb.resize(nc);
  w.ub.resize(nc);
  w.x.assign(nc, 0.0);
  w.cost.assign(nc, 0.0);
  w.stat.assign(nc, VarStatus::AtLower);
  w.pos.assign(nc, -1);
  w.basic.resize(static_cast<std::size_t>(m_));
  for (int j = 0; j < nstruct_; ++j) {
    w.lb[static_cast<std::size_t>(j)] = lb[static_cast<std::size_t>(j)];
    w.ub[static_cast<std::size_t>(j)] = ub[static_cast<std::size_t>(j)];
  }
  for (int i = 0; i < m_; ++i) {
    w.lb[static_cast<std::size_t>(nstruct_ + i)] = slack_lb_[static_cast<std::size_t>(i)];
    w.ub[static_cast<std::size_t>(nstruct_ + i)] = slack_ub_[static_cast<std::size_t>(i)];
    w.lb[static_cast<std::size_t>(nstruct_ + m_ + i)] = 0.0;
    w.ub[static_cast<std::size_t>(nstruct_ + m_ + i)] = 0.0;
  }

  // Nonbasic placement for structurals.
  for (int j = 0; j < w.ncols; ++j) {
    const std::size_t js = static_cast<std::size_t>(j);
    if (w.lb[js] > -kInfinity) {
      w.stat[js] = VarStatus::AtLower;
      w.x[js] = w.lb[js];
    } else if (w.ub[js] < kInfinity) {
      w.stat[js] = VarStatus::AtUpper;
      w.x[js] = w.ub[js];
    } else {
      w.stat[js] = VarStatus::FreeZero;
      w.x[js] = 0.0;
    }
  }

  // Row activities of the nonbasic structurals decide the starting basis:
  // the slack where it already fits its bounds, a signed artificial else.
  std::vector<double> act(static_cast<std::size_t>(m_), 0.0);
  for (int j = 0; j < nstruct_; ++j) {
    const double xj = w.x[static_cast<std::size_t>(j)];
    if (xj != 0.0) detail::col_axpy(col_start_, col_row_, col_val_, nstruct_, m_, j, xj, act);
  }
  bool any_artificial = false;
  for (int i = 0; i < m_; ++i) {
    const std::size_t is = static_cast<std::size_t>(i);
    const int sj = nstruct_ + i;
    const int aj = nstruct_ + m_ + i;
    const double sval = rhs_[is] - act[is];
    if (sval >= slack_lb_[is] && sval <= slack_ub_[is]) {
      w.basic[is] = sj;
      w.pos[static_cast<std::size_t>(sj)] = i;
      w.stat[static_cast<std::size_t>(sj)] = VarStatus::Basic;
      w.x[static_cast<std::size_t>(sj)] = sval;
    } else {
      const double tau = std::clamp(sval, slack_lb_[is], slack_ub_[is]);
      w.stat[static_cast<std::size_t>(sj)] = tau == slack_lb_[is] ? VarStatus::AtLower : VarStatus::AtUpper;
      w.x[static_cast<std::size_t>(sj)] = tau;
      const double resid = sval - tau;
      const std::size_t as = static_cast<std::size_t>(aj);
      if (resid > 0.0) {
        w.lb[as] = 0.0;
        w.ub[as] = kInfinity;
        w.cost[as] = 1.0;
      } else {
        w.lb[as] = -kInfinity;
        w.ub[as] = 0.0;
        w.cost[as] = -1.0;
      }
      w.basic[is] = aj;
      w.pos[as] = i;
      w.stat[as] = VarStatus::Basic;
      w.x[as] = resid;
      any_artificial = true;
    }
  }

  SimplexRun run(*this, w, ctl, col_start_, col_row_, col_val_);
  try {
    run.factorize();
    if (any_artificial) {
      const LpStatus st = primal_loop(run, w, ctl, rhs_);
      if (st == LpStatus::TimeLimit || st == LpStatus::IterLimit) return finish(w, st);
      if (st == LpStatus::Unbounded) {
        throw NumericalError("phase I reported unbounded (objective is bounded by 0)");
      }
      double p1 = 0.0;
      for (int i = 0; i < m_; ++i) {
        const std::size_t as = static_cast<std::size_t>(nstruct_ + m_ + i);
        p1 += w.cost[as] * w.x[as];
      }
      double bscale = 1.0;
      for (double b : rhs_) bscale = std::max(bscale, std::fabs(b));
      if (p1 > ctl.feas_tol * bscale) return finish(w, LpStatus::Infeasible);
      // Lock artificials at zero and try to pivot basic ones out.
      for (int i = 0; i < m_; ++i) {
        const std::size_t as = static_cast<std::size_t>(nstruct_ + m_ + i);
        w.lb[as] = 0.0;
        w.ub[as] = 0.0;
        w.cost[as] = 0.0;
        if (w.pos[as] < 0) w.x[as] = 0.0;
      }
      for (int i = 0; i < m_; ++i) {
        const int bv = w.basic[static_cast<std::size_t>(i)];
        if (bv < nstruct_ + m_) continue;  // not artificial
        auto& rho = w.ybuf;
        rho.assign(static_cast<std::size_t>(m_), 0.0);
        rho[static_cast<std::size_t>(i)] = 1.0;
        run.btran(rho);
        int enter = -1;
        double bestp = 1e-7;
        for (int j = 0; j < nstruct_ + m_; ++j) {
          const std::size_t js = static_cast<std::size_t>(j);
          if (w.pos[js] >= 0 || w.lb[js] == w.ub[js]) continue;
          const double alpha = run.col_dot(j, rho);
          if (std::fabs(alpha) > bestp) {
            bestp = std::fabs(alpha);
            enter = j;
          }
        }
        if (enter < 0) continue;  // redundant row; artificial stays at 0
        auto& wc = w.wbuf;
        wc.resize(static_cast<std::size_t>(m_));
        run.col_scatter(enter, wc);
        run.ftran(wc);
        if (std::fabs(wc[static_cast<std::size_t>(i)]) <= ctl.pivot_tol) continue;
        const std::size_t es = static_cast<std::size_t>(enter);
        const std::size_t bs = static_cast<std::size_t>(bv);
        // Degenerate swap: the artificial sits at ~0, values are unchanged.
        w.pos[bs] = -1;
        w.stat[bs] = VarStatus::AtLower;
        w.x[bs] = 0.0;
        w.basic[static_cast<std::size_t>(i)] = enter;
        w.pos[es] = i;
        const double old_xe = w.x[es];
        w.stat[es] = VarStatus::Basic;
        w.x[es] = old_xe;
        w.etas.push_back({i, wc});
      }
      run.compute_x_basic(rhs_);
    }
    for (int j = 0; j < nstruct_; ++j) w.cost[static_cast<std::size_t>(j)] = cost_min_[static_cast<std::size_t>(j)];
    for (int j = nstruct_; j < w.ncols; ++j) w.cost[static_cast<std::size_t>(j)] = 0.0;
    w.degen_streak = 0;
    const LpStatus st = primal_loop(run, w, ctl, rhs_);
    return finish(w, st);
  } catch (const DeadlineHit&) {
    return finish(w, LpStatus::TimeLimit);
  }
}

LpSolution LpEngine::solve_dual(const std::vector<double>& lb, const std::vector<double>& ub,
                                const Basis& warm, const LpControls& ctl) const {
  Work w;
  w.m = m_;
  w.nstruct = nstruct_;
  w.ncols = nstruct_ + 2 * m_;
  w.max_iters = ctl.max_iters > 0 ? ctl.max_iters
                                  : 2000 + 200LL * (static_cast<long long>(m_) + w.ncols);
  const std::size_t nc = static_cast<std::size_t>(w.ncols);
  if (static_cast<int>(warm.basic.size()) != m_ || warm.status.size() != nc) {
    LpSolution bad;
    bad.status = LpStatus::Numerical;
    return bad;
  }
  w.lb.resize(nc);
  w.ub.resize(nc);
  w.x.assign(nc, 0.0);
  w.cost.assign(nc, 0.0);
  w.stat = warm.status;
  w.pos.assign(nc, -1);
  w.basic = warm.basic;
  for (int j = 0; j < nstruct_; ++j) {
    w.lb[static_cast<std::size_t>(j)] = lb[static_cast<std::size_t>(j)];
    w.ub[static_cast<std::size_t>(j)] = ub[static_cast<std::size_t>(j)];
    w.cost[static_cast<std::size_t>(j)] = cost_min_[static_cast<std::size_t>(j)];
  }
  for (int i = 0; i < m_; ++i) {
    w.lb[static_cast<std::size_t>(nstruct_ + i)] = slack_lb_[static_cast<std::size_t>(i)];
    w.ub[static_cast<std::size_t>(nstruct_ + i)] = slack_ub_[static_cast<std::size_t>(i)];
    w.lb[static_cast<std::size_t>(nstruct_ + m_ + i)] = 0.0;
    w.ub[static_cast<std::size_t>(nstruct_ + m_ + i)] = 0.0;
  }
  for (int i = 0; i < m_; ++i) w.pos[static_cast<std::size_t>(w.basic[static_cast<std::size_t>(i)])] = i;
  // Nonbasic values from status; statuses pointing at vanished bounds are
  // normalized first.
  for (int j = 0; j < w.ncols; ++j) {
    const std::size_t js = static_cast<std::size_t>(j);
    if (w.pos[js] >= 0) {
      w.stat[js] = VarStatus::Basic;
      continue;
    }
    switch (w.stat[js]) {
      case VarStatus::AtLower:
        if (w.lb[js] <= -kInfinity) w.stat[js] = w.ub[js] < kInfinity ? VarStatus::AtUpper : VarStatus::FreeZero;
        break;
      case VarStatus::AtUpper:
        if (w.ub[js] >= kInfinity) w.stat[js] = w.lb[js] > -kInfinity ? VarStatus::AtLower : VarStatus::FreeZero;
        break;
      case VarStatus::Basic:
        w.stat[js] = w.lb[js] > -kInfinity ? VarStatus::AtLower
                     : w.ub[js] < kInfinity ? VarStatus::AtUpper
                                            : VarStatus::FreeZero;
        break;
      case VarStatus::FreeZero:
        break;
    }
    w.x[js] = w.stat[js] == VarStatus::AtLower ? w.lb[js]
              : w.stat[js] == VarStatus::AtUpper ? w.ub[js]
                                                 : 0.0;
  }

  SimplexRun run(*this, w, ctl, col_start_, col_row_, col_val_);
  try {
    run.refactor(rhs_);

    // Reduced costs; restore dual feasibility by bound flips where possible.
    auto& y = w.ybuf;
    y.resize(static_cast<std::size_t>(m_));
    for (int i = 0; i < m_; ++i) y[static_cast<std::size_t>(i)] = w.cost[static_cast<std::size_t>(w.basic[static_cast<std::size_t>(i)])];
    run.btran(y);
    w.d.assign(nc, 0.0);
    const double dual_tol = std::max(1e-7, 10.0 * ctl.opt_tol);
    for (int j = 0; j < w.ncols; ++j) {
      const std::size_t js = static_cast<std::size_t>(j);
      if (w.pos[js] >= 0) continue;
      const double d = w.cost[js] - run.col_dot(j, y);
      w.d[js] = d;
      if (w.lb[js] == w.ub[js]) continue;
      if (w.stat[js] == VarStatus::AtLower && d < -dual_tol) {
        if (w.ub[js] < kInfinity) {
          w.stat[js] = VarStatus::AtUpper;
          w.x[js] = w.ub[js];
        } else {
          LpSolution bad;
          bad.status = LpStatus::Numerical;
          return bad;
        }
      } else if (w.stat[js] == VarStatus::AtUpper && d > dual_tol) {
        if (w.lb[js] > -kInfinity) {
          w.stat[js] = VarStatus::AtLower;
          w.x[js] = w.lb[js];
        } else {
          LpSolution bad;
          bad.status = LpStatus::Numerical;
          return bad;
        }
      } else if (w.stat[js] == VarStatus::FreeZero && std::fabs(d) > dual_tol) {
        LpSolution bad;
        bad.status = LpStatus::Numerical;
        return bad;
      }
    }
    run.compute_x_basic(rhs_);
    const LpStatus st = dual_loop(run, w, ctl, rhs_);
    return finish(w, st);
  } catch (const DeadlineHit&) {
    return finish(w, LpStatus::TimeLimit);
  } catch (const NumericalError&) {
    LpSolution bad;
    bad.status = LpStatus::Numerical;
    return bad;
  }
}

}  // namespace qkdtopo
