#include "kquad/recombination.hpp"

#include "kquad/solvers.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace kquad {

namespace {

// Columns: atoms; rows: (1, phi).
Eigen::VectorXd augmented_moments(const MomentSystem& s, const std::vector<int>& idx,
                                  const Eigen::VectorXd& w) {
  const Eigen::Index d = s.features.cols() + 1;
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(d);
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const double wk = w[static_cast<Eigen::Index>(k)];
    acc[0] += wk;
    acc.tail(d - 1) += wk * s.features.row(idx[k]).transpose();
  }
  return acc;
}

// Caratheodory reduction of sum_b mass[b] delta_{cols(b)} to at most
// rank(cols) points. `mass` is updated in place; eliminated entries are 0.
void caratheodory(const Eigen::MatrixXd& cols, Eigen::VectorXd& mass) {
  const Eigen::Index b = cols.cols();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(cols, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double cut = sv.size() > 0 ? 1e-12 * sv[0] : 0.0;
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv[rank] > cut) ++rank;
  Eigen::MatrixXd null = svd.matrixV().rightCols(b - rank);

  std::vector<bool> alive(static_cast<std::size_t>(b), true);
  for (Eigen::Index k = 0; k < null.cols(); ++k) {
    Eigen::VectorXd v = null.col(k);
    for (Eigen::Index j = 0; j < b; ++j) {
      if (!alive[j]) v[j] = 0.0;
    }
    const double vmax = v.cwiseAbs().maxCoeff();
    if (!(vmax > 0.0)) continue;
    const double eps = 1e-13 * vmax;
    if (v.maxCoeff() <= eps) v = -v;

    Eigen::Index hit = -1;
    double alpha = 0.0;
    for (Eigen::Index j = 0; j < b; ++j) {
      if (!alive[j] || v[j] <= eps) continue;
      const double ratio = mass[j] / v[j];
      if (hit < 0 || ratio < alpha) {
        alpha = ratio;
        hit = j;
      }
    }
    if (hit < 0) continue;
    mass -= alpha * v;
    mass[hit] = 0.0;
    alive[hit] = false;
    for (Eigen::Index j = 0; j < b; ++j) {
      if (!alive[j]) {
        mass[j] = 0.0;
      } else if (mass[j] < 0.0) {
        mass[j] = 0.0;
      }
    }
    // Keep the remaining null vectors zero on the eliminated column.
    for (Eigen::Index k2 = k + 1; k2 < null.cols(); ++k2) {
      const double f = null(hit, k2) / v[hit];
      if (f != 0.0) null.col(k2) -= f * v;
      null(hit, k2) = 0.0;
    }
  }
}

RecombinationResult lp_route(const MomentSystem& s, const Eigen::VectorXd& target) {
  const Eigen::Index n_atoms = s.features.rows();
  StandardFormLP lp;
  lp.A.resize(s.features.cols() + 1, n_atoms);
  lp.A.row(0).setOnes();
  lp.A.bottomRows(s.features.cols()) = s.features.transpose();
  lp.b = target;
  const LpResult res = lp_bfs_solve(lp, fast_simplex_options());
  if (!res.ok()) throw std::runtime_error("recombine: LP fallback found no feasible reduction");
  RecombinationResult out;
  out.indices = res.solution.support;
  out.weights = res.solution.weights;
  out.used_lp_fallback = true;
  return out;
}

}  // namespace

double recombination_tolerance(const MomentSystem& system) {
  const Eigen::VectorXd m = system.features.transpose() * system.weights;
  const double mm = m.size() ? m.cwiseAbs().maxCoeff() : 0.0;
  return 1e-10 * (1.0 + std::max(mm, std::abs(system.weights.sum())));
}

RecombinationResult recombine(const MomentSystem& system) {
  const Eigen::Index n_atoms = system.features.rows();
  const Eigen::Index d = system.features.cols() + 1;
  if (system.weights.size() != n_atoms) throw std::invalid_argument("recombine: weight count mismatch");
  if (n_atoms == 0) throw std::invalid_argument("recombine: empty measure");
  if (!system.features.allFinite() || !system.weights.allFinite() || (system.weights.array() < 0.0).any()) {
    throw std::invalid_argument("recombine: weights must be finite and nonnegative, features finite");
  }

  std::vector<int> idx;
  for (Eigen::Index i = 0; i < n_atoms; ++i) {
    if (system.weights[i] > 0.0) idx.push_back(static_cast<int>(i));
  }
  Eigen::VectorXd w(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) w[static_cast<Eigen::Index>(k)] = system.weights[idx[k]];
  const Eigen::VectorXd target = augmented_moments(system, idx, w);

  while (static_cast<Eigen::Index>(idx.size()) > d) {
    const auto count = static_cast<Eigen::Index>(idx.size());
    const Eigen::Index blocks = std::min(count, 2 * d);
    // Block j covers [start[j], start[j+1]).
    std::vector<Eigen::Index> start(static_cast<std::size_t>(blocks) + 1);
    for (Eigen::Index j = 0; j <= blocks; ++j) start[j] = (j * count) / blocks;

    Eigen::MatrixXd centers(d, blocks);
    Eigen::VectorXd mass(blocks);
    for (Eigen::Index j = 0; j < blocks; ++j) {
      double m = 0.0;
      Eigen::VectorXd c = Eigen::VectorXd::Zero(d - 1);
      for (Eigen::Index k = start[j]; k < start[j + 1]; ++k) {
        m += w[k];
        c += w[k] * system.features.row(idx[k]).transpose();
      }
      mass[j] = m;
      centers(0, j) = 1.0;
      centers.col(j).tail(d - 1) = c / m;
    }
    const Eigen::VectorXd before = mass;
    caratheodory(centers, mass);

    std::vector<int> next_idx;
    std::vector<double> next_w;
    for (Eigen::Index j = 0; j < blocks; ++j) {
      if (!(mass[j] > 0.0)) continue;
      const double scale = mass[j] / before[j];
      for (Eigen::Index k = start[j]; k < start[j + 1]; ++k) {
        next_idx.push_back(idx[k]);
        next_w.push_back(w[k] * scale);
      }
    }
    if (static_cast<Eigen::Index>(next_idx.size()) >= count || next_idx.empty()) {
      return lp_route(system, target);  // no progress: numerically rank-deficient step
    }
    idx = std::move(next_idx);
    w = Eigen::Map<const Eigen::VectorXd>(next_w.data(), static_cast<Eigen::Index>(next_w.size()));
  }

  RecombinationResult out;
  out.indices = idx;
  out.weights = w;
  out.max_residual = (augmented_moments(system, idx, w) - target).cwiseAbs().maxCoeff();
  if (out.max_residual > recombination_tolerance(system)) {
    out = lp_route(system, target);
  }
  out.max_residual = (augmented_moments(system, out.indices, out.weights) - target).cwiseAbs().maxCoeff();
  return out;
}

}  // namespace kquad
