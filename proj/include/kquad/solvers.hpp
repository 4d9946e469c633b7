#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <vector>

namespace kquad {

/// minimize c^T w  subject to  A w = b, w >= 0.
struct StandardFormLP {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::VectorXd c;  // empty means the zero objective
};

/// Vertex of {A w = b, w >= 0}: at most rows(A) strictly positive entries.
struct BasicSolution {
  std::vector<int> support;  // ascending column indices
  Eigen::VectorXd weights;   // values on `support`
  double objective = 0.0;

  Eigen::VectorXd dense(Eigen::Index n) const;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  BasicSolution solution;  // meaningful only when Optimal
  int iterations = 0;
  double phase1_objective = 0.0;

  bool ok() const { return status == LpStatus::Optimal; }
};

enum class PivotRule {
  Bland,
  /// Most negative reduced cost; switches to Bland's rule after a run of
  /// degenerate pivots until the objective moves again.
  DantzigBland,
};

struct SimplexOptions {
  PivotRule rule = PivotRule::Bland;
  int degenerate_run = 50;  // DantzigBland: degenerate pivots tolerated before Bland takes over
  /// When positive, first solve with b shifted by perturbation (1 + |b|_inf) A v
  /// for a fixed v > 0, then re-solve the final basis against the exact b;
  /// falls back to the unperturbed solve if that basis is not feasible.
  double perturbation = 0.0;
  double pivot_tol = 1e-11;
  double feasibility_tol = 1e-9;  // scaled by (1 + |b|_inf)
  int max_iterations = 0;         // 0 = automatic
};

/// Dantzig pricing on a perturbed right-hand side; much faster than plain
/// Bland on the degenerate moment LPs built by the quadrature drivers.
inline SimplexOptions fast_simplex_options() {
  SimplexOptions o;
  o.rule = PivotRule::DantzigBland;
  o.perturbation = 1e-7;
  return o;
}


/// Dense two-phase simplex; Bland's rule unless options say otherwise.
LpResult lp_bfs_solve(const StandardFormLP& lp, const SimplexOptions& opts = {});

struct SpdSolution {
  Eigen::VectorXd x;
  double jitter = 0.0;  // diagonal shift actually used
};

/// Solves (K + jitter I) x = z by Cholesky. If the factorisation fails or
/// the backward error exceeds 1e-8 the jitter is raised tenfold, up to
/// 1e-4 * trace(K) / n.
SpdSolution solve_spd_system(const Eigen::MatrixXd& K, const Eigen::VectorXd& z, double jitter);

class NnlsError : public std::runtime_error {
 public:
  NnlsError(const std::string& what, Eigen::VectorXd best)
      : std::runtime_error(what), best_(std::move(best)) {}
  const Eigen::VectorXd& best() const { return best_; }

 private:
  Eigen::VectorXd best_;
};

/// minimize w^T K w - 2 w^T z over w >= 0 (Lawson-Hanson active set on the
/// normal-equation form). Throws NnlsError after 10 n outer iterations.
Eigen::VectorXd nnls_quadratic(const Eigen::MatrixXd& K, const Eigen::VectorXd& z);

/// Same objective with the extra constraint sum(w) = 1, found by bisecting
/// the multiplier of the equality constraint around nnls_quadratic.
Eigen::VectorXd nnls_quadratic_simplex(const Eigen::MatrixXd& K, const Eigen::VectorXd& z);

/// Scale used by the KKT tolerances: |z|_inf + |K|_max |w|_inf.
double nnls_kkt_scale(const Eigen::MatrixXd& K, const Eigen::VectorXd& z, const Eigen::VectorXd& w);

}  // namespace kquad
