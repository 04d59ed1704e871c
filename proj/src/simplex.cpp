#include "emob/lp.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>

namespace emob::lp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPivotTol = 1e-9;
constexpr double kDegenerateStep = 1e-12;

enum class VStat { Basic, AtLower, AtUpper, Free };

struct Eta {
  int r = 0;
  double pivot = 1.0;
  std::vector<std::pair<int, double>> others;  // (row, w_row), row != r
};

// Bounded-variable revised simplex working set over the standardized model:
// structural columns, then slacks for inequality rows, then one artificial
// per row forming the phase-1 basis.
struct Tableau {
  int m = 0;       // rows
  int n_struct = 0;
  int total = 0;

  std::vector<std::vector<std::pair<int, double>>> cols;  // (row, coef)
  std::vector<double> lo, hi, cost;
  std::vector<double> b;

  std::vector<VStat> vstat;
  std::vector<int> basis;  // column per basis position
  std::vector<double> x;

  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  std::vector<Eta> etas;

  long iterations = 0;
  long degenerate_streak = 0;
  bool bland = false;
  const SimplexOptions* opt = nullptr;

  void factor() {
    Eigen::SparseMatrix<double> B(m, m);
    std::vector<Eigen::Triplet<double>> trips;
    for (int p = 0; p < m; ++p)
      for (auto [row, coef] : cols[basis[p]]) trips.emplace_back(row, p, coef);
    B.setFromTriplets(trips.begin(), trips.end());
    lu.compute(B);
    if (lu.info() != Eigen::Success)
      throw NumericalBreakdown("basis factorization failed");
    etas.clear();
  }

  Eigen::VectorXd ftran(Eigen::VectorXd v) {
    v = lu.solve(v);
    for (const Eta& e : etas) {
      double vr = v[e.r] / e.pivot;
      for (auto [i, w] : e.others) v[i] -= w * vr;
      v[e.r] = vr;
    }
    return v;
  }

  Eigen::VectorXd btran(Eigen::VectorXd v) {
    for (auto it = etas.rbegin(); it != etas.rend(); ++it) {
      double s = v[it->r];
      for (auto [i, w] : it->others) s -= w * v[i];
      v[it->r] = s / it->pivot;
    }
    return lu.transpose().solve(v);
  }

  void recompute_basics() {
    Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(b.data(), m);
    for (int j = 0; j < total; ++j) {
      if (vstat[j] == VStat::Basic || x[j] == 0.0) continue;
      for (auto [row, coef] : cols[j]) rhs[row] -= coef * x[j];
    }
    Eigen::VectorXd xb = ftran(rhs);
    for (int p = 0; p < m; ++p) x[basis[p]] = xb[p];
  }

  double reduced_cost(int j, const Eigen::VectorXd& y) const {
    double d = cost[j];
    for (auto [row, coef] : cols[j]) d -= y[row] * coef;
    return d;
  }

  // Returns the entering column and direction, or -1 at optimality.
  std::pair<int, int> price() {
    Eigen::VectorXd cb(m);
    for (int p = 0; p < m; ++p) cb[p] = cost[basis[p]];
    Eigen::VectorXd y = btran(cb);

    int enter = -1, dir = 0;
    double best = opt->optimality_tol;
    for (int j = 0; j < total; ++j) {
      if (vstat[j] == VStat::Basic || lo[j] == hi[j]) continue;
      double d = reduced_cost(j, y);
      double viol = 0.0;
      int cand_dir = 0;
      if ((vstat[j] == VStat::AtLower || vstat[j] == VStat::Free) &&
          d < -opt->optimality_tol) {
        viol = -d;
        cand_dir = +1;
      } else if ((vstat[j] == VStat::AtUpper || vstat[j] == VStat::Free) &&
                 d > opt->optimality_tol) {
        viol = d;
        cand_dir = -1;
      }
      if (cand_dir == 0) continue;
      if (bland) return {j, cand_dir};
      if (viol > best) {
        best = viol;
        enter = j;
        dir = cand_dir;
      }
    }
    return {enter, dir};
  }

  // One pivot or bound flip. Returns false when unbounded in `dir`.
  bool step(int enter, int dir) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(m);
    for (auto [row, coef] : cols[enter]) a[row] = coef;
    Eigen::VectorXd w = ftran(a);

    double t = kInf;
    bool flip = false;
    if (lo[enter] > -kInf && hi[enter] < kInf) {
      t = hi[enter] - lo[enter];
      flip = true;
    }
    int leave_pos = -1;
    double leave_pivot = 0.0;
    for (int p = 0; p < m; ++p) {
      double wp = w[p];
      if (std::abs(wp) <= kPivotTol) continue;
      int k = basis[p];
      double delta = -dir * wp;  // d x_k / d t
      double room = delta > 0 ? hi[k] - x[k] : x[k] - lo[k];
      if (room >= kInf) continue;
      double tp = std::max(room, 0.0) / std::abs(delta);
      bool tie_wins =
          leave_pos < 0 ||
          (bland ? basis[p] < basis[leave_pos]
                 : std::abs(wp) > std::abs(leave_pivot));
      if (tp < t - 1e-12 || (tp < t + 1e-12 && tie_wins)) {
        t = tp;
        flip = false;
        leave_pos = p;
        leave_pivot = wp;
      }
    }
    if (t >= kInf) return false;

    if (t <= kDegenerateStep) {
      if (++degenerate_streak > 10L * total) bland = true;
    } else {
      degenerate_streak = 0;
    }

    x[enter] += dir * t;
    for (int p = 0; p < m; ++p) x[basis[p]] -= dir * t * w[p];

    if (flip) {
      vstat[enter] = vstat[enter] == VStat::AtLower ? VStat::AtUpper : VStat::AtLower;
      x[enter] = vstat[enter] == VStat::AtLower ? lo[enter] : hi[enter];
      return true;
    }

    int leave = basis[leave_pos];
    double delta = -dir * leave_pivot;
    vstat[leave] = delta > 0 ? VStat::AtUpper : VStat::AtLower;
    x[leave] = delta > 0 ? hi[leave] : lo[leave];

    basis[leave_pos] = enter;
    vstat[enter] = VStat::Basic;

    Eta e;
    e.r = leave_pos;
    e.pivot = w[leave_pos];
    for (int p = 0; p < m; ++p)
      if (p != leave_pos && w[p] != 0.0) e.others.emplace_back(p, w[p]);
    etas.push_back(std::move(e));
    if (static_cast<int>(etas.size()) >= opt->refactor_interval) {
      factor();
      recompute_basics();
    }
    return true;
  }

  // Runs to optimality for the current cost vector. Returns false on
  // unboundedness.
  bool optimize() {
    for (;;) {
      if (++iterations > opt->max_iterations)
        throw NumericalBreakdown("simplex cycling guard exceeded after " +
                                 std::to_string(iterations - 1) + " iterations");
      auto [enter, dir] = price();
      if (enter < 0) return true;
      if (!step(enter, dir)) return false;
    }
  }
};

}  // namespace

int LinearModel::add_column(double obj, double lo, double hi, bool integer) {
  objective.push_back(obj);
  lower.push_back(lo);
  upper.push_back(hi);
  integral.push_back(integer);
  return num_cols() - 1;
}

int LinearModel::add_row(Sense sense, double rhs_value, std::vector<RowEntry> entries) {
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].col < 0 || entries[i].col >= num_cols())
      throw std::invalid_argument("row entry references unknown column");
    for (std::size_t j = i + 1; j < entries.size(); ++j)
      if (entries[i].col == entries[j].col)
        throw std::invalid_argument("duplicate column in row");
  }
  rows.push_back(std::move(entries));
  senses.push_back(sense);
  rhs.push_back(rhs_value);
  return num_rows() - 1;
}

void LinearModel::validate() const {
  for (int j = 0; j < num_cols(); ++j) {
    if (!std::isfinite(objective[j]))
      throw std::invalid_argument("objective coefficient must be finite");
    if (std::isnan(lower[j]) || std::isnan(upper[j]) || lower[j] > upper[j])
      throw std::invalid_argument("column bounds are inverted or NaN");
  }
  for (int i = 0; i < num_rows(); ++i) {
    if (!std::isfinite(rhs[i])) throw std::invalid_argument("rhs must be finite");
    for (const RowEntry& e : rows[i])
      if (!std::isfinite(e.coef))
        throw std::invalid_argument("row coefficient must be finite");
  }
}

LpResult solve_lp(const LinearModel& model, const SimplexOptions& opt,
                  const std::vector<double>* lower_override,
                  const std::vector<double>* upper_override) {
  model.validate();
  const int n = model.num_cols();
  const int m = model.num_rows();
  const std::vector<double>& mlo = lower_override ? *lower_override : model.lower;
  const std::vector<double>& mhi = upper_override ? *upper_override : model.upper;
  if (static_cast<int>(mlo.size()) != n || static_cast<int>(mhi.size()) != n)
    throw std::invalid_argument("bound override size mismatch");
  for (int j = 0; j < n; ++j)
    if (std::isnan(mlo[j]) || std::isnan(mhi[j]) || mlo[j] > mhi[j])
      throw std::invalid_argument("override bounds are inverted or NaN");

  LpResult res;
  if (m == 0) {
    res.x.assign(n, 0.0);
    for (int j = 0; j < n; ++j) {
      double c = model.objective[j];
      double v = c > 0 ? mlo[j] : c < 0 ? mhi[j] : (mlo[j] > -kInf ? mlo[j]
                                                    : mhi[j] < kInf ? mhi[j]
                                                                    : 0.0);
      if (std::abs(v) >= kInf) {
        res.status = LpStatus::Unbounded;
        return res;
      }
      res.x[j] = v;
      res.objective += c * v;
    }
    return res;
  }

  Tableau t;
  t.m = m;
  t.n_struct = n;
  t.opt = &opt;
  t.b = model.rhs;

  t.cols.assign(n, {});
  for (int i = 0; i < m; ++i)
    for (const RowEntry& e : model.rows[i]) t.cols[e.col].emplace_back(i, e.coef);
  t.lo = mlo;
  t.hi = mhi;

  std::vector<int> slack_col(m, -1);
  for (int i = 0; i < m; ++i) {
    if (model.senses[i] == Sense::Equal) continue;
    slack_col[i] = static_cast<int>(t.cols.size());
    t.cols.push_back({{i, 1.0}});
    if (model.senses[i] == Sense::LessEq) {
      t.lo.push_back(0.0);
      t.hi.push_back(kInf);
    } else {
      t.lo.push_back(-kInf);
      t.hi.push_back(0.0);
    }
  }
  const int n_slack = static_cast<int>(t.cols.size()) - n;

  // Nonbasic starting point: nearest finite bound, or zero when free.
  t.x.assign(t.cols.size(), 0.0);
  t.vstat.assign(t.cols.size(), VStat::AtLower);
  for (std::size_t j = 0; j < t.cols.size(); ++j) {
    if (t.lo[j] > -kInf) {
      t.x[j] = t.lo[j];
      t.vstat[j] = VStat::AtLower;
    } else if (t.hi[j] < kInf) {
      t.x[j] = t.hi[j];
      t.vstat[j] = VStat::AtUpper;
    } else {
      t.vstat[j] = VStat::Free;
    }
  }

  std::vector<double> residual(m);
  for (int i = 0; i < m; ++i) residual[i] = model.rhs[i];
  for (std::size_t j = 0; j < t.cols.size(); ++j) {
    if (t.x[j] == 0.0) continue;
    for (auto [row, coef] : t.cols[j]) residual[row] -= coef * t.x[j];
  }
  // Crash basis: a row whose residual sits on the feasible side of its slack
  // starts with the slack basic; only the rest need an artificial.
  bool need_phase1 = false;
  for (int i = 0; i < m; ++i) {
    bool slack_fits =
        slack_col[i] >= 0 &&
        ((model.senses[i] == Sense::LessEq && residual[i] >= 0.0) ||
         (model.senses[i] == Sense::GreaterEq && residual[i] <= 0.0));
    double sigma = residual[i] >= 0 ? 1.0 : -1.0;
    t.cols.push_back({{i, sigma}});
    t.lo.push_back(0.0);
    if (slack_fits) {
      t.hi.push_back(0.0);
      t.x.push_back(0.0);
      t.vstat.push_back(VStat::AtLower);
      t.vstat[slack_col[i]] = VStat::Basic;
      t.x[slack_col[i]] = residual[i];
      t.basis.push_back(slack_col[i]);
    } else {
      t.hi.push_back(kInf);
      t.x.push_back(std::abs(residual[i]));
      t.vstat.push_back(VStat::Basic);
      t.basis.push_back(static_cast<int>(t.cols.size()) - 1);
      need_phase1 = true;
    }
  }
  t.total = static_cast<int>(t.cols.size());

  // Phase 1: drive the artificial infeasibility to zero.
  t.cost.assign(t.total, 0.0);
  for (int a = n + n_slack; a < t.total; ++a) t.cost[a] = 1.0;
  t.factor();
  t.recompute_basics();
  if (need_phase1) {
    if (!t.optimize()) throw NumericalBreakdown("phase 1 reported unbounded");
    double infeas = 0.0;
    for (int a = n + n_slack; a < t.total; ++a) infeas += t.x[a];
    if (infeas > opt.feasibility_tol) {
      res.status = LpStatus::Infeasible;
      res.iterations = t.iterations;
      return res;
    }
  }

  // Phase 2: original objective with artificials pinned at zero.
  for (int a = n + n_slack; a < t.total; ++a) {
    t.lo[a] = 0.0;
    t.hi[a] = 0.0;
    if (t.vstat[a] != VStat::Basic) {
      t.vstat[a] = VStat::AtLower;
      t.x[a] = 0.0;
    }
  }
  t.cost.assign(t.total, 0.0);
  for (int j = 0; j < n; ++j) t.cost[j] = model.objective[j];
  t.bland = false;
  t.degenerate_streak = 0;
  if (!t.optimize()) {
    res.status = LpStatus::Unbounded;
    res.iterations = t.iterations;
    return res;
  }

  t.factor();
  t.recompute_basics();
  res.status = LpStatus::Optimal;
  res.iterations = t.iterations;
  res.x.assign(t.x.begin(), t.x.begin() + n);
  for (int j = 0; j < n; ++j) {
    if (res.x[j] < mlo[j]) res.x[j] = mlo[j];
    if (res.x[j] > mhi[j]) res.x[j] = mhi[j];
    res.objective += model.objective[j] * res.x[j];
  }
  return res;
}

}  // namespace emob::lp
