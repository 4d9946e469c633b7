#include "kquad/solvers.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

namespace kquad {

namespace {

void require_square(const Eigen::MatrixXd& K, const Eigen::VectorXd& z, const char* who) {
  if (K.rows() != K.cols()) throw std::invalid_argument(std::string(who) + ": matrix must be square");
  if (K.rows() != z.size()) throw std::invalid_argument(std::string(who) + ": size mismatch");
  if (!K.allFinite() || !z.allFinite()) throw std::invalid_argument(std::string(who) + ": non-finite input");
}

double backward_error(const Eigen::MatrixXd& a, const Eigen::VectorXd& x, const Eigen::VectorXd& z) {
  const double denom = a.norm() * x.norm() + z.norm();
  if (denom == 0.0) return 0.0;
  return (a * x - z).norm() / denom;
}

}  // namespace

SpdSolution solve_spd_system(const Eigen::MatrixXd& K, const Eigen::VectorXd& z, double jitter) {
  require_square(K, z, "solve_spd_system");
  const Eigen::Index n = K.rows();
  if (n == 0) return {Eigen::VectorXd(), jitter};
  if ((K - K.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, K.norm())) {
    throw std::invalid_argument("solve_spd_system: matrix is not symmetric");
  }
  if (jitter < 0.0) throw std::invalid_argument("solve_spd_system: negative jitter");

  const double mean_diag = std::max(K.trace() / static_cast<double>(n), std::numeric_limits<double>::min());
  const double cap = 1e-4 * mean_diag;
  double j = jitter;
  for (;;) {
    Eigen::MatrixXd a = K;
    a.diagonal().array() += j;
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() == Eigen::Success) {
      Eigen::VectorXd x = llt.solve(z);
      x += llt.solve(z - a * x);
      if (x.allFinite() && backward_error(a, x, z) <= 1e-8) return {std::move(x), j};
    }
    const double next = j == 0.0 ? 1e-12 * mean_diag : 10.0 * j;
    if (next > cap * (1.0 + 1e-12)) {
      throw std::runtime_error("solve_spd_system: factorisation failed after jitter escalation");
    }
    j = next;
  }
}

double nnls_kkt_scale(const Eigen::MatrixXd& K, const Eigen::VectorXd& z, const Eigen::VectorXd& w) {
  const double zmax = z.size() ? z.cwiseAbs().maxCoeff() : 0.0;
  const double kmax = K.size() ? K.cwiseAbs().maxCoeff() : 0.0;
  const double wmax = w.size() ? w.cwiseAbs().maxCoeff() : 0.0;
  return zmax + kmax * wmax;
}

namespace {

Eigen::VectorXd solve_passive(const Eigen::MatrixXd& K, const Eigen::VectorXd& z,
                              const std::vector<Eigen::Index>& passive) {
  const auto p = static_cast<Eigen::Index>(passive.size());
  Eigen::MatrixXd kp(p, p);
  Eigen::VectorXd zp(p);
  for (Eigen::Index a = 0; a < p; ++a) {
    zp[a] = z[passive[a]];
    for (Eigen::Index b = 0; b < p; ++b) kp(a, b) = K(passive[a], passive[b]);
  }
  Eigen::LLT<Eigen::MatrixXd> llt(kp);
  if (llt.info() == Eigen::Success) {
    Eigen::VectorXd s = llt.solve(zp);
    if (s.allFinite() && (kp * s - zp).norm() <= 1e-10 * (kp.norm() * s.norm() + zp.norm())) return s;
  }
  return kp.completeOrthogonalDecomposition().solve(zp);
}

}  // namespace

Eigen::VectorXd nnls_quadratic(const Eigen::MatrixXd& K, const Eigen::VectorXd& z) {
  require_square(K, z, "nnls_quadratic");
  const Eigen::Index n = K.rows();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  if (n == 0) return w;

  std::vector<bool> in_passive(static_cast<std::size_t>(n), false);
  std::vector<bool> blocked(static_cast<std::size_t>(n), false);
  const long max_outer = 10 * static_cast<long>(n);
  long outer = 0;

  for (;;) {
    const Eigen::VectorXd g = z - K * w;  // minus half the gradient
    const double tol = 1e-10 * nnls_kkt_scale(K, z, w);
    Eigen::Index enter = -1;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (in_passive[i] || blocked[i] || g[i] <= tol) continue;
      if (enter < 0 || g[i] > g[enter]) enter = i;
    }
    if (enter < 0) break;
    if (++outer > max_outer) throw NnlsError("nnls_quadratic: iteration cap exceeded", w);
    in_passive[enter] = true;

    for (;;) {
      std::vector<Eigen::Index> passive;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (in_passive[i]) passive.push_back(i);
      }
      const Eigen::VectorXd s = solve_passive(K, z, passive);
      bool all_positive = true;
      for (Eigen::Index a = 0; a < s.size(); ++a) all_positive = all_positive && s[a] > 0.0;
      if (all_positive) {
        w.setZero();
        for (std::size_t a = 0; a < passive.size(); ++a) w[passive[a]] = s[static_cast<Eigen::Index>(a)];
        std::fill(blocked.begin(), blocked.end(), false);
        break;
      }
      double alpha = 1.0;
      for (std::size_t a = 0; a < passive.size(); ++a) {
        const double sa = s[static_cast<Eigen::Index>(a)];
        const double wa = w[passive[a]];
        if (sa <= 0.0) alpha = std::min(alpha, wa - sa > 0.0 ? wa / (wa - sa) : 0.0);
      }
      bool moved = alpha > 0.0;
      for (std::size_t a = 0; a < passive.size(); ++a) {
        const Eigen::Index i = passive[a];
        w[i] += alpha * (s[static_cast<Eigen::Index>(a)] - w[i]);
      }
      const double drop = 1e-14 * std::max(1.0, w.cwiseAbs().maxCoeff());
      for (const Eigen::Index i : passive) {
        if (w[i] <= drop) {
          w[i] = 0.0;
          in_passive[i] = false;
        }
      }
      if (!moved && !in_passive[enter]) {
        // The entering index was rejected without progress; skip it until w changes.
        blocked[enter] = true;
        break;
      }
      if (moved) std::fill(blocked.begin(), blocked.end(), false);
      bool any = false;
      for (Eigen::Index i = 0; i < n; ++i) any = any || in_passive[i];
      if (!any) break;
    }
  }
  return w;
}

Eigen::VectorXd nnls_quadratic_simplex(const Eigen::MatrixXd& K, const Eigen::VectorXd& z) {
  require_square(K, z, "nnls_quadratic_simplex");
  const Eigen::Index n = K.rows();
  if (n == 0) throw std::invalid_argument("nnls_quadratic_simplex: empty problem");
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  auto mass = [&](double nu) {
    Eigen::VectorXd w = nnls_quadratic(K, z + nu * ones);
    return std::pair{w.sum(), w};
  };
  double step = std::max({1.0, z.cwiseAbs().maxCoeff(), K.cwiseAbs().maxCoeff()});
  double lo = 0.0;
  double hi = 0.0;
  auto [m0, w0] = mass(0.0);
  if (m0 < 1.0) {
    hi = step;
    while (mass(hi).first < 1.0) {
      lo = hi;
      hi *= 2.0;
      if (hi > 1e300) throw std::runtime_error("nnls_quadratic_simplex: cannot reach unit mass");
    }
  } else {
    lo = -step;
    while (mass(lo).first > 1.0) {
      hi = lo;
      lo *= 2.0;
      if (lo < -1e300) throw std::runtime_error("nnls_quadratic_simplex: cannot reach unit mass");
    }
  }
  Eigen::VectorXd best = w0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    auto [m, w] = mass(mid);
    best = w;
    if (std::abs(m - 1.0) <= 1e-13) break;
    (m < 1.0 ? lo : hi) = mid;
  }
  const double total = best.sum();
  if (!(total > 0.0)) throw std::runtime_error("nnls_quadratic_simplex: zero mass solution");
  return best / total;
}

}  // namespace kquad
