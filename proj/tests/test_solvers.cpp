#include "kquad/solvers.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace kquad;
using doctest::Approx;

namespace {

// Random LP with a probability-simplex row so every objective is bounded,
// and a right-hand side built from a nonnegative point.
StandardFormLP random_lp(std::mt19937_64& g, int m, int n, bool signed_costs) {
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  StandardFormLP lp;
  lp.A.resize(m, n);
  lp.A.row(0).setOnes();
  for (int i = 1; i < m; ++i) {
    for (int j = 0; j < n; ++j) lp.A(i, j) = nd(g);
  }
  Eigen::VectorXd w(n);
  for (int j = 0; j < n; ++j) w[j] = u(g) < 0.5 ? 0.0 : u(g);
  if (w.sum() == 0.0) w[0] = 1.0;
  w /= w.sum();
  lp.b = lp.A * w;
  lp.c.resize(n);
  for (int j = 0; j < n; ++j) lp.c[j] = signed_costs ? nd(g) : u(g);
  return lp;
}

void check_solution(const StandardFormLP& lp, const LpResult& res) {
  REQUIRE(res.ok());
  const auto& s = res.solution;
  CHECK(static_cast<Eigen::Index>(s.support.size()) <= lp.A.rows());
  for (std::size_t k = 1; k < s.support.size(); ++k) CHECK(s.support[k - 1] < s.support[k]);
  CHECK((s.weights.array() > 0.0).all());
  const Eigen::VectorXd w = s.dense(lp.A.cols());
  CHECK((lp.A * w - lp.b).cwiseAbs().maxCoeff() <= 1e-9 * (1.0 + lp.b.cwiseAbs().maxCoeff()));
}

}  // namespace

TEST_CASE("simplex small examples") {
  StandardFormLP one;
  one.A = Eigen::MatrixXd::Ones(1, 1);
  one.b = Eigen::VectorXd::Ones(1);
  auto r = lp_bfs_solve(one);
  REQUIRE(r.ok());
  CHECK(r.solution.dense(1)[0] == Approx(1.0));

  StandardFormLP two;
  two.A.resize(2, 2);
  two.A << 1, 1, 0, 1;
  two.b = Eigen::Vector2d(1.0, 0.5);
  r = lp_bfs_solve(two);
  REQUIRE(r.ok());
  CHECK(r.solution.dense(2)[0] == Approx(0.5).epsilon(1e-14));
  CHECK(r.solution.dense(2)[1] == Approx(0.5).epsilon(1e-14));

  StandardFormLP neg;
  neg.A = Eigen::MatrixXd::Ones(1, 2);
  neg.b = Eigen::VectorXd::Constant(1, -1.0);
  CHECK(lp_bfs_solve(neg).status == LpStatus::Infeasible);

  StandardFormLP unb;
  unb.A.resize(1, 2);
  unb.A << 1, -1;
  unb.b = Eigen::VectorXd::Ones(1);
  unb.c = Eigen::Vector2d(0.0, -1.0);
  CHECK(lp_bfs_solve(unb).status == LpStatus::Unbounded);

  // redundant and all-zero rows
  StandardFormLP red;
  red.A.resize(3, 3);
  red.A << 1, 1, 1, 2, 2, 2, 0, 0, 0;
  red.b = Eigen::Vector3d(1.0, 2.0, 0.0);
  red.c = Eigen::Vector3d(3.0, 1.0, 2.0);
  r = lp_bfs_solve(red);
  check_solution(red, r);
  CHECK(r.solution.objective == Approx(1.0));
  CHECK(r.solution.support == std::vector<int>{1});

  StandardFormLP bad = red;
  bad.b[2] = 1.0;
  CHECK(lp_bfs_solve(bad).status == LpStatus::Infeasible);
  bad = red;
  bad.b = Eigen::Vector2d(1.0, 1.0);
  CHECK_THROWS_AS(lp_bfs_solve(bad), std::invalid_argument);
}

TEST_CASE("simplex agrees with vertex enumeration") {
  std::mt19937_64 g(101);
  std::uniform_int_distribution<int> rows(1, 5);
  for (int t = 0; t < 500; ++t) {
    const int m = rows(g);
    std::uniform_int_distribution<int> cols(m, 12);
    const int n = cols(g);
    const auto lp = random_lp(g, m, n, t % 2 == 1);
    const auto ref = oracle::enumerate_vertices(lp.A, lp.b, lp.c);
    REQUIRE(ref.has_value());
    for (const auto& opts : {SimplexOptions{}, fast_simplex_options()}) {
      const auto res = lp_bfs_solve(lp, opts);
      check_solution(lp, res);
      CHECK(std::abs(res.solution.objective - *ref) <= 1e-8 * (1.0 + std::abs(*ref)));
    }
  }
}

TEST_CASE("simplex is deterministic") {
  std::mt19937_64 g(7);
  for (int t = 0; t < 20; ++t) {
    const auto lp = random_lp(g, 6, 40, false);
    const auto a = lp_bfs_solve(lp);
    const auto b = lp_bfs_solve(lp);
    CHECK(a.solution.support == b.solution.support);
    CHECK((a.solution.weights - b.solution.weights).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("perturbed simplex on degenerate moment systems") {
  // many zero right-hand sides and a duplicated mass row, as in the
  // quadrature drivers
  std::mt19937_64 g(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 10; ++t) {
    const int m = 21;
    const int n = 200;
    StandardFormLP lp;
    lp.A.resize(m, n);
    std::vector<double> xs(n);
    for (auto& x : xs) x = u(g);
    for (int j = 0; j < n; ++j) {
      lp.A(0, j) = 1.0;
      lp.A(1, j) = 1.0;
      for (int k = 1; 2 * k < m; ++k) {
        lp.A(2 * k, j) = std::sqrt(2.0) * std::cos(2 * M_PI * k * xs[static_cast<std::size_t>(j)]);
        if (2 * k + 1 < m) lp.A(2 * k + 1, j) = std::sqrt(2.0) * std::sin(2 * M_PI * k * xs[static_cast<std::size_t>(j)]);
      }
    }
    lp.b = Eigen::VectorXd::Zero(m);
    lp.b[0] = lp.b[1] = 1.0;
    const auto plain = lp_bfs_solve(lp);
    const auto fast = lp_bfs_solve(lp, fast_simplex_options());
    CHECK(plain.ok() == fast.ok());
    if (fast.ok()) check_solution(lp, fast);
  }
}

TEST_CASE("spd solves") {
  const Eigen::Vector3d z(1.0, -2.0, 0.5);
  CHECK(solve_spd_system(Eigen::Matrix3d::Identity(), z, 0.0).x.isApprox(z));
  Eigen::Matrix2d k;
  k << 2, 0, 0, 1;
  const auto s = solve_spd_system(k, Eigen::Vector2d(2.0, 3.0), 0.0);
  CHECK(s.x[0] == Approx(1.0).epsilon(1e-15));
  CHECK(s.x[1] == Approx(3.0).epsilon(1e-15));

  const Eigen::Vector3d v(1.0, 2.0, -1.0);
  const Eigen::Matrix3d sing = v * v.transpose();
  const auto js = solve_spd_system(sing, z, 1e-6);
  CHECK(js.x.allFinite());
  CHECK(js.jitter >= 1e-6);
  const Eigen::Matrix3d shifted = sing + js.jitter * Eigen::Matrix3d::Identity();
  CHECK((shifted * js.x - z).norm() <= 1e-8 * (shifted.norm() * js.x.norm() + z.norm()));
}

TEST_CASE("nnls examples") {
  const Eigen::Matrix2d id = Eigen::Matrix2d::Identity();
  CHECK(nnls_quadratic(id, Eigen::Vector2d(1.0, -1.0)).isApprox(Eigen::Vector2d(1.0, 0.0)));
  CHECK(nnls_quadratic(id, Eigen::Vector2d::Zero()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(nnls_quadratic(id, Eigen::Vector2d(1.0, 2.0)).isApprox(Eigen::Vector2d(1.0, 2.0)));
}

TEST_CASE("nnls satisfies the KKT conditions") {
  std::mt19937_64 g(202);
  std::uniform_int_distribution<int> size(1, 40);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 300; ++t) {
    const int n = size(g);
    std::uniform_int_distribution<int> rank(1, n);
    const bool deficient = t % 3 == 0;
    const Eigen::MatrixXd k = oracle::random_psd(n, deficient ? rank(g) : n + 2, g);
    Eigen::VectorXd z(n);
    for (int i = 0; i < n; ++i) z[i] = nd(g);
    // outside range(K) the objective is unbounded below
    if (deficient) z = k * z;
    const Eigen::VectorXd w = nnls_quadratic(k, z);
    CHECK((w.array() >= 0.0).all());
    const double scale = nnls_kkt_scale(k, z, w);
    const Eigen::VectorXd grad = k * w - z;
    for (int i = 0; i < n; ++i) {
      if (w[i] > 0.0) {
        CHECK(std::abs(grad[i]) <= 1e-7 * scale);
      } else {
        CHECK(grad[i] >= -1e-7 * scale);
      }
    }
    auto f = [&](const Eigen::VectorXd& x) { return x.dot(k * x) - 2.0 * x.dot(z); };
    const double fw = f(w);
    if ((z.array() >= 0.0).any()) CHECK(fw <= 1e-12 * scale * scale);
    for (int s = 0; s < 5; ++s) {
      Eigen::VectorXd other(n);
      for (int i = 0; i < n; ++i) other[i] = u(g);
      CHECK(fw <= f(other) + 1e-9 * (1.0 + std::abs(f(other))));
    }
  }
}

TEST_CASE("nnls with unit mass") {
  std::mt19937_64 g(303);
  std::normal_distribution<double> nd;
  for (int t = 0; t < 50; ++t) {
    const int n = 12;
    const Eigen::MatrixXd k = oracle::random_psd(n, n, g);
    Eigen::VectorXd z(n);
    for (int i = 0; i < n; ++i) z[i] = nd(g);
    const Eigen::VectorXd w = nnls_quadratic_simplex(k, z);
    CHECK((w.array() >= 0.0).all());
    CHECK(w.sum() == Approx(1.0).epsilon(1e-10));
    // no vertex of the simplex does better
    const double fw = w.dot(k * w) - 2.0 * w.dot(z);
    for (int i = 0; i < n; ++i) CHECK(fw <= k(i, i) - 2.0 * z[i] + 1e-8 * (1.0 + std::abs(fw)));
  }
}
