#pragma once

#include <Eigen/Core>

#include <string>
#include <variant>
#include <vector>

namespace kquad {

using Point = Eigen::VectorXd;
using PointSet = std::vector<Point>;

/// Periodic Sobolev kernel of smoothness r on [0,1]:
///   k_r(x,y) = 1 + (-1)^{r-1} (2 pi)^{2r} / (2r)! * B_{2r}(|x - y|).
struct PeriodicSobolev {
  int r = 1;
};

/// exp(-|x-y|^2 / (2 lambda^2))
struct Gaussian {
  double lambda = 1.0;
};

/// (1 + |x-y|^2 / (2 lambda^2))^{-1}
struct RationalQuadratic {
  double lambda = 1.0;
};

class KernelSpec {
 public:
  using Variant = std::variant<PeriodicSobolev, Gaussian, RationalQuadratic>;

  KernelSpec(Variant v);  // NOLINT(google-explicit-constructor)

  static KernelSpec periodic_sobolev(int r) { return KernelSpec(PeriodicSobolev{r}); }
  static KernelSpec gaussian(double lambda) { return KernelSpec(Gaussian{lambda}); }
  static KernelSpec rational_quadratic(double lambda) {
    return KernelSpec(RationalQuadratic{lambda});
  }

  const Variant& variant() const { return v_; }
  bool is_sobolev() const { return std::holds_alternative<PeriodicSobolev>(v_); }
  /// Smoothness of a Sobolev kernel; throws for the other families.
  int smoothness() const;
  std::string name() const;

 private:
  Variant v_;
};

/// Bernoulli polynomial B_degree(x) for degree in {2, 4, 6}.
double bernoulli_poly(int degree, double x);

double kernel_eval(const KernelSpec& spec, const Point& x, const Point& y);

/// k(x, x); cheaper than kernel_eval for the stationary families.
double kernel_diag(const KernelSpec& spec, const Point& x);

Eigen::MatrixXd gram_matrix(const KernelSpec& spec, const PointSet& a, const PointSet& b);
Eigen::MatrixXd gram_matrix(const KernelSpec& spec, const PointSet& a);

/// Bandwidth lambda = sqrt(med{|X_i - X_j|^2 : i < j} / 2). For an even
/// number of pairs the lower-middle order statistic is used.
double median_heuristic(const PointSet& sample);

/// Convenience: wrap scalars as 1-d points.
Point point1(double x);
PointSet points1(const std::vector<double>& xs);

}  // namespace kquad
