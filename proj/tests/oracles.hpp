#pragma once

// Reference computations used only by the tests. None of them call into the
// library code they are checking.

#include "kquad/quadrature.hpp"
#include "kquad/solvers.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

namespace oracle {

inline long double binom(int n, int k) {
  long double out = 1.0L;
  for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return out;
}

/// B_k from sum_{j<=k} C(k+1, j) B_j = 0.
inline long double bernoulli_number(int k) {
  std::vector<long double> b(static_cast<std::size_t>(k) + 1, 0.0L);
  b[0] = 1.0L;
  for (int m = 1; m <= k; ++m) {
    long double s = 0.0L;
    for (int j = 0; j < m; ++j) s += binom(m + 1, j) * b[static_cast<std::size_t>(j)];
    b[static_cast<std::size_t>(m)] = -s / (m + 1);
  }
  return b[static_cast<std::size_t>(k)];
}

/// B_n(x) = sum_k C(n,k) B_k x^{n-k}.
inline long double bernoulli_poly(int n, long double x) {
  long double s = 0.0L;
  for (int k = 0; k <= n; ++k) s += binom(n, k) * bernoulli_number(k) * std::pow(x, static_cast<long double>(n - k));
  return s;
}

/// Monomial coefficients of B_n, highest degree first.
inline std::vector<long double> bernoulli_coeffs(int n) {
  std::vector<long double> c;
  for (int k = 0; k <= n; ++k) c.push_back(binom(n, k) * bernoulli_number(k));
  return c;
}

inline long double horner(const std::vector<long double>& c, long double x) {
  long double s = 0.0L;
  for (const long double v : c) s = s * x + v;
  return s;
}

inline double zeta_even(int two_r) {
  const double p = std::numbers::pi;
  switch (two_r) {
    case 2: return p * p / 6.0;
    case 4: return std::pow(p, 4) / 90.0;
    case 6: return std::pow(p, 6) / 945.0;
    default: return std::numeric_limits<double>::quiet_NaN();
  }
}

/// 1 + sum_{m<=terms} 2 m^{-2r} cos(2 pi m (x - y))
inline double sobolev_series(int r, double x, double y, int terms) {
  long double s = 0.0L;
  for (int m = terms; m >= 1; --m) {
    s += 2.0L * std::pow(static_cast<long double>(m), -2.0L * r) *
         std::cos(2.0L * std::numbers::pi_v<long double> * m * (x - y));
  }
  return static_cast<double>(1.0L + s);
}

/// Squared WCE under the uniform measure from the eigen-expansion: the mass
/// error squared plus sum_m m^{-2r} times the squared errors of c_m and s_m.
inline double sobolev_wce_expansion(const kquad::QuadratureRule& rule, int r, int terms) {
  long double mass = -1.0L;
  for (Eigen::Index i = 0; i < rule.weights.size(); ++i) mass += rule.weights[i];
  long double s = mass * mass;
  for (int m = terms; m >= 1; --m) {
    long double c = 0.0L;
    long double sn = 0.0L;
    for (std::size_t i = 0; i < rule.size(); ++i) {
      const long double a = 2.0L * std::numbers::pi_v<long double> * m * rule.nodes[i][0];
      c += rule.weights[static_cast<Eigen::Index>(i)] * std::cos(a);
      sn += rule.weights[static_cast<Eigen::Index>(i)] * std::sin(a);
    }
    s += 2.0L * std::pow(static_cast<long double>(m), -2.0L * r) * (c * c + sn * sn);
  }
  return static_cast<double>(s);
}

/// Direct three-term evaluation with caller-supplied kernel and embedding.
template <class K, class Z>
double wce_direct(const kquad::QuadratureRule& rule, K k, Z z, double zz) {
  long double s = zz;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const long double wi = rule.weights[static_cast<Eigen::Index>(i)];
    s -= 2.0L * wi * z(rule.nodes[i]);
    for (std::size_t j = 0; j < rule.size(); ++j) {
      s += wi * rule.weights[static_cast<Eigen::Index>(j)] * k(rule.nodes[i], rule.nodes[j]);
    }
  }
  return static_cast<double>(s);
}

/// Minimum of c^T w over all basic feasible solutions, by trying every set
/// of rank(A) columns. Empty when infeasible.
inline std::optional<double> enumerate_vertices(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                                const Eigen::VectorXd& c) {
  const int m = static_cast<int>(a.rows());
  const int n = static_cast<int>(a.cols());
  std::optional<double> best;
  std::vector<int> pick(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) pick[static_cast<std::size_t>(i)] = i;
  if (m > n) return best;
  for (;;) {
    Eigen::MatrixXd sub(m, m);
    for (int k = 0; k < m; ++k) sub.col(k) = a.col(pick[static_cast<std::size_t>(k)]);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(sub);
    if (lu.isInvertible()) {
      const Eigen::VectorXd w = lu.solve(b);
      if ((w.array() >= -1e-10).all() && (sub * w - b).cwiseAbs().maxCoeff() < 1e-9) {
        double obj = 0.0;
        for (int k = 0; k < m; ++k) obj += c[pick[static_cast<std::size_t>(k)]] * w[k];
        if (!best || obj < *best) best = obj;
      }
    }
    int i = m - 1;
    while (i >= 0 && pick[static_cast<std::size_t>(i)] == n - m + i) --i;
    if (i < 0) break;
    ++pick[static_cast<std::size_t>(i)];
    for (int k = i + 1; k < m; ++k) pick[static_cast<std::size_t>(k)] = pick[static_cast<std::size_t>(k - 1)] + 1;
  }
  return best;
}

inline Eigen::MatrixXd random_psd(int n, int rank, std::mt19937_64& g) {
  std::normal_distribution<double> d;
  Eigen::MatrixXd f(n, rank);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < rank; ++j) f(i, j) = d(g);
  }
  return f * f.transpose();
}

}  // namespace oracle
