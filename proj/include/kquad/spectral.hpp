#pragma once

#include "kquad/kernel.hpp"
#include "kquad/measure.hpp"

#include <functional>
#include <memory>
#include <optional>

namespace kquad {

using KernelFn = std::function<double(const Point&, const Point&)>;

// ---------------------------------------------------------------------------
// Mercer system of the periodic Sobolev kernel under the uniform measure.
//
// Functions are ordered 1, c_1, s_1, c_2, s_2, ... with
// c_m(x) = sqrt(2) cos(2 pi m x), s_m(x) = sqrt(2) sin(2 pi m x), and
// eigenvalue 1 for the constant and m^{-2r} for both c_m and s_m.
// Indices below are 1-based positions in that sequence.
// ---------------------------------------------------------------------------
class MercerBasis {
 public:
  MercerBasis(int r, int count);

  int smoothness() const { return r_; }
  int count() const { return count_; }

  double eigenvalue(int index) const;
  double eval(int index, double x) const;

  Eigen::VectorXd eigenvalues() const;
  /// (e_1(x), ..., e_count(x)), not weighted by the eigenvalues.
  Eigen::VectorXd features(const Point& x) const;
  /// Expectations of the features under the uniform measure: (1, 0, ..., 0).
  Eigen::VectorXd uniform_expectations() const;

  /// sup_m ||e_m||_inf
  static constexpr double kSupNorm = 1.4142135623730951;

 private:
  int r_;
  int count_;
};

MercerBasis sobolev_mercer_basis(int r, int count);

/// Sum of the eigenvalues at positions n, n+1, ... of the ordered sequence.
double mercer_tail_sum(int r, int n);

/// sum_m sigma_m e_m(x) e_m(y) over the truncated basis.
double mercer_truncated_kernel(const MercerBasis& basis, const Point& x, const Point& y);

// ---------------------------------------------------------------------------
// Symmetric eigendecomposition (LAPACK backed).
// Eigenvalues descending; each eigenvector's first non-negligible entry is
// positive.
// ---------------------------------------------------------------------------
struct EigenDecomposition {
  Eigen::MatrixXd vectors;  // columns
  Eigen::VectorXd values;
};

EigenDecomposition sym_eigendecomp(const Eigen::MatrixXd& w);
/// Leading `count` eigenpairs only.
EigenDecomposition sym_eigendecomp_top(const Eigen::MatrixXd& w, int count);

// ---------------------------------------------------------------------------
// Nystrom rank-s approximation k^Z_s(x, y) = k(x, Z) W_s^+ k(Z, y).
// ---------------------------------------------------------------------------
class NystromFeatureMap {
 public:
  NystromFeatureMap(KernelSpec spec, PointSet landmarks, Eigen::MatrixXd vectors,
                    Eigen::VectorXd values, int requested_rank);

  const KernelSpec& kernel() const { return spec_; }
  const PointSet& landmarks() const { return landmarks_; }
  /// Retained eigenvectors u_1..u_rank of the landmark Gram matrix (l x rank).
  const Eigen::MatrixXd& eigenvectors() const { return vectors_; }
  const Eigen::VectorXd& eigenvalues() const { return values_; }
  int rank() const { return static_cast<int>(values_.size()); }
  int requested_rank() const { return requested_rank_; }

  /// (u_i^T k(Z, x))_{i <= rank}
  Eigen::VectorXd features(const Point& x) const;
  /// Feature rows for a batch of points (|xs| x rank).
  Eigen::MatrixXd features(const PointSet& xs) const;
  double kernel_eval(const Point& x, const Point& y) const;

 private:
  Eigen::VectorXd landmark_column(const Point& x) const;

  KernelSpec spec_;
  PointSet landmarks_;
  Eigen::MatrixXd vectors_;
  Eigen::VectorXd values_;
  int requested_rank_;
};

/// Keeps min(s, #{lambda_i > rank_tol * lambda_1}) components.
NystromFeatureMap nystrom_fit(const KernelSpec& spec, PointSet landmarks, int s,
                              double rank_tol = 1e-10);
Eigen::VectorXd nystrom_features(const NystromFeatureMap& map, const Point& x);
double nystrom_kernel_eval(const NystromFeatureMap& map, const Point& x, const Point& y);

// ---------------------------------------------------------------------------
// Approximation diagnostics.
// ---------------------------------------------------------------------------

/// max over probe pairs of |k(x,y) - ktilde(x,y)|; a lower bound on the sup.
double uniform_gap_estimate(const KernelSpec& spec, const KernelFn& ktilde, const PointSet& probe);

/// sqrt(mean over all ordered sample pairs of (k^Z_s - k)^2).
double hs_error_estimate(const KernelSpec& spec, const NystromFeatureMap& map,
                         const PointSet& sample);

// ---------------------------------------------------------------------------
// Test functions phi: X -> R^{n-1}.
// ---------------------------------------------------------------------------
class TestFunctionSet {
 public:
  enum class Provenance { Mercer, Nystrom, Custom };
  using Evaluator = std::function<Eigen::VectorXd(const Point&)>;

  TestFunctionSet(int dim, Evaluator eval, std::optional<Eigen::VectorXd> expectations,
                  Provenance provenance, KernelFn truncated_kernel = {});

  /// Mercer eigenfunctions with their exact uniform-measure expectations.
  static TestFunctionSet mercer(const MercerBasis& basis);
  /// Nystrom features. Expectations u_i^T z(Z) are attached when the cache
  /// is given (the measure must admit exact embeddings).
  static TestFunctionSet nystrom(std::shared_ptr<const NystromFeatureMap> map,
                                 const EmbeddingCache* cache = nullptr);
  static TestFunctionSet empty();

  int dim() const { return dim_; }
  Eigen::VectorXd operator()(const Point& x) const;
  const std::optional<Eigen::VectorXd>& expectations() const { return expectations_; }
  Provenance provenance() const { return provenance_; }
  /// Finite-rank kernel the functions span (sum of phi_m(x) phi_m(y) with
  /// spectral weights); empty for custom sets.
  const KernelFn& truncated_kernel() const { return truncated_kernel_; }

 private:
  int dim_;
  Evaluator eval_;
  std::optional<Eigen::VectorXd> expectations_;
  Provenance provenance_;
  KernelFn truncated_kernel_;
};

}  // namespace kquad
