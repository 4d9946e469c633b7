#include "kquad/solvers.hpp"

#include "kquad/seed.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

namespace kquad {

Eigen::VectorXd BasicSolution::dense(Eigen::Index n) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (std::size_t k = 0; k < support.size(); ++k) out[support[k]] = weights[static_cast<Eigen::Index>(k)];
  return out;
}

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class Tableau {
 public:
  // Rows 0..m-1 are constraints, row m is the reduced-cost row. Columns
  // 0..n-1 are structural, n..n+m-1 artificial, the last one is the rhs.
  Tableau(const Eigen::MatrixXd& a, const Eigen::VectorXd& b)
      : m_(a.rows()), n_(a.cols()), t_(RowMatrix::Zero(m_ + 1, n_ + m_ + 1)), basis_(m_), active_(m_, true) {
    t_.topLeftCorner(m_, n_) = a;
    t_.block(0, n_, m_, m_).setIdentity();
    t_.col(rhs()).head(m_) = b;
    for (Eigen::Index i = 0; i < m_; ++i) basis_[i] = n_ + i;
  }

  Eigen::Index rhs() const { return n_ + m_; }
  Eigen::Index rows() const { return m_; }
  Eigen::Index structural() const { return n_; }
  double& at(Eigen::Index i, Eigen::Index j) { return t_(i, j); }
  double at(Eigen::Index i, Eigen::Index j) const { return t_(i, j); }
  Eigen::Index basic(Eigen::Index i) const { return basis_[i]; }
  bool active(Eigen::Index i) const { return active_[i]; }
  void deactivate(Eigen::Index i) { active_[i] = false; }

  void set_costs(const Eigen::VectorXd& costs) {
    // reduced costs d_j = c_j - c_B^T B^{-1} A_j ; rhs cell holds -objective
    t_.row(m_).setZero();
    t_.row(m_).head(costs.size()) = costs.transpose();
    for (Eigen::Index i = 0; i < m_; ++i) {
      const double cb = basis_[i] < costs.size() ? costs[basis_[i]] : 0.0;
      if (cb != 0.0 && active_[i]) t_.row(m_) -= cb * t_.row(i);
    }
  }

  void pivot(Eigen::Index r, Eigen::Index col) {
    t_.row(r) /= t_(r, col);
    for (Eigen::Index i = 0; i <= m_; ++i) {
      if (i == r) continue;
      const double f = t_(i, col);
      if (f != 0.0) t_.row(i) -= f * t_.row(r);
    }
    t_(r, col) = 1.0;
    basis_[r] = col;
  }

  double objective() const { return -t_(m_, rhs()); }

  // One pivot. Returns false when optimal; sets `unbounded` when the
  // entering column has no admissible pivot. `degenerate` reports a pivot
  // with a zero step.
  bool step(Eigen::Index allowed_cols, double rc_tol, double pivot_tol, bool bland, bool& unbounded,
            bool& degenerate) {
    Eigen::Index enter = -1;
    if (bland) {
      for (Eigen::Index j = 0; j < allowed_cols; ++j) {
        if (t_(m_, j) < -rc_tol) {
          enter = j;
          break;
        }
      }
    } else {
      double most = -rc_tol;
      for (Eigen::Index j = 0; j < allowed_cols; ++j) {
        if (t_(m_, j) < most) {
          most = t_(m_, j);
          enter = j;
        }
      }
    }
    if (enter < 0) return false;
    Eigen::Index leave = -1;
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (!active_[i]) continue;
      const double a = t_(i, enter);
      if (a <= pivot_tol) continue;
      const double ratio = std::max(0.0, t_(i, rhs())) / a;
      if (leave < 0) {
        best = ratio;
        leave = i;
        continue;
      }
      const double slack = 1e-12 * (1.0 + best);
      if (ratio < best - slack) {
        best = ratio;
        leave = i;
      } else if (ratio <= best + slack && basis_[i] < basis_[leave]) {
        best = std::min(best, ratio);
        leave = i;
      }
    }
    if (leave < 0) {
      unbounded = true;
      return false;
    }
    degenerate = best <= 1e-14;
    pivot(leave, enter);
    return true;
  }

 private:
  Eigen::Index m_;
  Eigen::Index n_;
  RowMatrix t_;
  std::vector<Eigen::Index> basis_;
  std::vector<bool> active_;
};

void run_phase(Tableau& tab, Eigen::Index cols, double rc_tol, const SimplexOptions& opts, int max_iter,
               int& iterations, bool& unbounded) {
  int run = 0;  // consecutive degenerate pivots
  for (;;) {
    const bool bland = opts.rule == PivotRule::Bland || run >= opts.degenerate_run;
    bool degenerate = false;
    if (!tab.step(cols, rc_tol, opts.pivot_tol, bland, unbounded, degenerate)) return;
    run = degenerate ? run + 1 : 0;
    if (++iterations > max_iter) throw std::runtime_error("lp_bfs_solve: iteration limit reached");
  }
}

}  // namespace

LpResult lp_bfs_solve(const StandardFormLP& lp, const SimplexOptions& opts) {
  const Eigen::Index m = lp.A.rows();
  const Eigen::Index n = lp.A.cols();
  if (lp.b.size() != m) throw std::invalid_argument("lp_bfs_solve: b has wrong length");
  if (lp.c.size() != 0 && lp.c.size() != n) throw std::invalid_argument("lp_bfs_solve: c has wrong length");
  if (!lp.A.allFinite() || !lp.b.allFinite() || (lp.c.size() != 0 && !lp.c.allFinite())) {
    throw std::invalid_argument("lp_bfs_solve: non-finite input");
  }
  const Eigen::VectorXd costs = lp.c.size() == 0 ? Eigen::VectorXd::Zero(n) : lp.c;

  LpResult result;
  const double feas_tol = opts.feasibility_tol * (1.0 + (m > 0 ? lp.b.cwiseAbs().maxCoeff() : 0.0));

  // Row equilibration and sign normalisation; empty rows are dropped when
  // consistent.
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double s = n > 0 ? lp.A.row(i).cwiseAbs().maxCoeff() : 0.0;
    if (s == 0.0) {
      if (std::abs(lp.b[i]) > feas_tol) return result;  // Infeasible
      continue;
    }
    keep.push_back(i);
  }
  const auto mk = static_cast<Eigen::Index>(keep.size());
  Eigen::MatrixXd a(mk, n);
  Eigen::VectorXd b(mk);
  for (Eigen::Index k = 0; k < mk; ++k) {
    const Eigen::Index i = keep[k];
    double s = lp.A.row(i).cwiseAbs().maxCoeff();
    if (lp.b[i] < 0.0) s = -s;
    a.row(k) = lp.A.row(i) / s;
    b[k] = lp.b[i] / s;
  }
  const double tol = opts.feasibility_tol * (1.0 + (mk > 0 ? b.cwiseAbs().maxCoeff() : 0.0));
  const int max_iter = opts.max_iterations > 0 ? opts.max_iterations
                                               : static_cast<int>(50 * (mk + n) + 1000);

  // Phases 1 and 2 on rhs; returns false when the tableau cannot be
  // brought back to the exact b after a perturbed solve.
  auto solve = [&](Tableau& tab, bool perturbed) -> bool {
    Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(n + mk);
    phase1.tail(mk).setOnes();
    tab.set_costs(phase1);
    bool unbounded = false;
    run_phase(tab, n, opts.pivot_tol, opts, max_iter, result.iterations, unbounded);
    result.phase1_objective = tab.objective();
    if (result.phase1_objective > tol) {
      result.status = LpStatus::Infeasible;
      return !perturbed;
    }
    // Drive artificials out of the basis; rows where that is impossible are
    // linear combinations of the others.
    for (Eigen::Index i = 0; i < mk; ++i) {
      if (tab.basic(i) < n) continue;
      Eigen::Index col = -1;
      double best = opts.pivot_tol;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (std::abs(tab.at(i, j)) > best) {
          best = std::abs(tab.at(i, j));
          col = j;
        }
      }
      if (col >= 0) {
        tab.pivot(i, col);
      } else {
        tab.deactivate(i);
      }
    }
    tab.set_costs(costs);
    const double rc_tol = opts.pivot_tol * (1.0 + costs.cwiseAbs().maxCoeff());
    run_phase(tab, n, rc_tol, opts, max_iter, result.iterations, unbounded);
    if (unbounded) {
      result.status = LpStatus::Unbounded;
      return true;
    }
    if (perturbed) {
      // The artificial block holds B^{-1}; recompute the basic values for
      // the exact right-hand side.
      for (Eigen::Index i = 0; i < mk; ++i) {
        if (!tab.active(i)) continue;
        double v = 0.0;
        for (Eigen::Index k = 0; k < mk; ++k) v += tab.at(i, n + k) * b[k];
        if (tab.basic(i) >= n ? std::abs(v) > tol : v < -tol) return false;
        tab.at(i, tab.rhs()) = std::max(v, 0.0);
      }
    }
    result.status = LpStatus::Optimal;
    return true;
  };

  std::optional<Tableau> tab;
  if (opts.perturbation > 0.0 && mk > 0 && n > 0) {
    // Shift b inside the cone of the columns, b + eps A v with v > 0, which
    // keeps redundant rows consistent and breaks ties between vertices.
    Eigen::VectorXd v(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double u = static_cast<double>(splitmix64(static_cast<std::uint64_t>(j)) >> 11) * 0x1.0p-53;
      v[j] = (0.5 + u) / static_cast<double>(n);
    }
    const Eigen::VectorXd shifted = b + opts.perturbation * (1.0 + b.cwiseAbs().maxCoeff()) * (a * v);
    tab.emplace(a, shifted);
    const int before = result.iterations;
    try {
      if (!solve(*tab, true)) tab.reset();
    } catch (const std::runtime_error&) {
      tab.reset();
      result.iterations = before;
    }
    if (!tab) result = LpResult{};
  }
  if (!tab) {
    tab.emplace(a, b);
    solve(*tab, false);
  }
  if (result.status != LpStatus::Optimal) return result;

  std::vector<std::pair<int, double>> basic;
  for (Eigen::Index i = 0; i < mk; ++i) {
    if (!tab->active(i) || tab->basic(i) >= n) continue;
    const double v = tab->at(i, tab->rhs());
    if (v > tol) basic.emplace_back(static_cast<int>(tab->basic(i)), v);
  }
  std::sort(basic.begin(), basic.end());

  BasicSolution sol;
  sol.weights.resize(static_cast<Eigen::Index>(basic.size()));
  for (std::size_t k = 0; k < basic.size(); ++k) {
    sol.support.push_back(basic[k].first);
    sol.weights[static_cast<Eigen::Index>(k)] = basic[k].second;
  }

  // Recompute the basic values from the unscaled system to shed tableau
  // round-off; keep the tableau values if that would break positivity.
  if (!sol.support.empty()) {
    Eigen::MatrixXd as(m, static_cast<Eigen::Index>(sol.support.size()));
    for (std::size_t k = 0; k < sol.support.size(); ++k) as.col(static_cast<Eigen::Index>(k)) = lp.A.col(sol.support[k]);
    const Eigen::VectorXd refined = as.colPivHouseholderQr().solve(lp.b);
    const double old_res = (as * sol.weights - lp.b).cwiseAbs().maxCoeff();
    const double new_res = (as * refined - lp.b).cwiseAbs().maxCoeff();
    if (refined.allFinite() && (refined.array() > 0.0).all() && new_res <= old_res) sol.weights = refined;
  }
  double obj = 0.0;
  for (std::size_t k = 0; k < sol.support.size(); ++k) obj += costs[sol.support[k]] * sol.weights[static_cast<Eigen::Index>(k)];
  sol.objective = obj;
  result.solution = std::move(sol);
  result.status = LpStatus::Optimal;
  return result;
}

}  // namespace kquad
