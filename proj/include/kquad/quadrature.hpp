#pragma once

#include "kquad/measure.hpp"
#include "kquad/spectral.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>

namespace kquad {

/// Nodes x_i with weights w_i. A positive rule has w_i >= 0 summing to one;
/// `is_signed` marks rules exempt from positivity (iid Bayes) and
/// `normalized == false` rules exempt from the unit-mass condition.
struct QuadratureRule {
  PointSet nodes;
  Eigen::VectorXd weights;
  bool is_signed = false;
  bool normalized = true;

  std::size_t size() const { return nodes.size(); }
  /// Throws std::logic_error if the rule violates its own invariants.
  void validate() const;
};

/// Builds a positive normalized rule: weights in [-1e-12, 0) are set to 0,
/// zero-weight nodes dropped and the rest rescaled to unit mass.
QuadratureRule make_positive_rule(PointSet nodes, Eigen::VectorXd weights);

/// Equal weights 1/n.
QuadratureRule make_equal_weight_rule(PointSet nodes);

/// The three terms of ||sum_i w_i k(., x_i) - z||^2.
struct WceReport {
  double wce_squared = 0.0;
  double gram_term = 0.0;             // sum_ij w_i w_j k(x_i, x_j)
  double cross_term = 0.0;            // 2 sum_i w_i z(x_i)
  double double_integral_term = 0.0;  // int int k dmu dmu
};

WceReport wce_squared(const QuadratureRule& rule, const KernelSpec& spec, const MeasureSpec& mu);
/// Uses the cached embeddings and double integral.
WceReport wce_squared(const QuadratureRule& rule, const EmbeddingCache& cache);

/// phi_hat = (1, phi_1, ..., phi_{n-1}) with its target vector.
class TestStack {
 public:
  explicit TestStack(TestFunctionSet tfs);

  int dim() const { return tfs_.dim() + 1; }
  Eigen::VectorXd operator()(const Point& x) const;
  /// Rows phi_hat(x_i).
  Eigen::MatrixXd matrix(const PointSet& xs) const;
  /// (1, E[phi]) when expectations are known.
  const std::optional<Eigen::VectorXd>& target() const { return target_; }
  /// (1, empirical means of phi over xs).
  Eigen::VectorXd empirical_target(const PointSet& xs) const;
  const TestFunctionSet& functions() const { return tfs_; }

 private:
  TestFunctionSet tfs_;
  std::optional<Eigen::VectorXd> target_;
};

TestStack build_test_stack(const TestFunctionSet& tfs);

/// psi_n(x) = k(x,x) - ktilde(x,x), clipped at zero.
double psi_n(const KernelSpec& spec, const KernelFn& ktilde, const Point& x);

enum class Meta1Objective { Feasibility, PsiN };

struct Meta1Options {
  Meta1Objective objective = Meta1Objective::Feasibility;
  int max_retries = 50;
};

struct Meta1Result {
  QuadratureRule rule;
  int retries = 0;          // infeasible samples discarded before success
  double residual = 0.0;    // |sum_i w_i phi_hat(x_i) - target|_inf
  double objective = 0.0;   // sum_i w_i psi_n(x_i) for PsiN, else 0
  std::vector<int> support;  // indices into the accepted candidate sample
  PointSet candidates;
};

class InfeasibleError : public std::runtime_error {
 public:
  InfeasibleError(const std::string& what, int retries) : std::runtime_error(what), retries_(retries) {}
  int retries() const { return retries_; }

 private:
  int retries_;
};

/// LP-based construction: sample N candidates from mu and pick a vertex of
/// {w >= 0 : sum_i w_i phi_hat(X_i) = target}. Resamples on infeasibility,
/// at most max_retries times.
Meta1Result kq_meta1(const KernelSpec& spec, const MeasureSpec& mu, const TestFunctionSet& tfs, int n,
                     int big_n, std::uint64_t seed, const Meta1Options& options = {});

struct Meta2Result {
  QuadratureRule rule;
  bool used_lp_fallback = false;
  double residual = 0.0;  // against the empirical moments
  std::vector<int> support;
  PointSet candidates;
};

/// Recombination-based construction: match the empirical moments of phi
/// over an N-sample.
Meta2Result kq_meta2(const KernelSpec& spec, const MeasureSpec& mu, const TestFunctionSet& tfs, int n,
                     int big_n, std::uint64_t seed);

/// ceil(6 (n-1) max_pool sum_m phi_m(x)^2), or ceil(6 C (n-1)^2) if C is given.
long recommended_sample_size(int n, const TestFunctionSet& tfs, const PointSet& pool,
                             std::optional<double> sup_norm = std::nullopt);

double integrate(const QuadratureRule& rule, const std::function<double(const Point&)>& f);

struct TheoreticalBounds {
  double prop_main_bound = 0.0;  // 2 sup_x (sum_{m>=n} sigma_m e_m(x)^2)^{1/2}
  double main_bdd_bound = 0.0;   // 2 sqrt(2) (sum_{m>=n} sigma_m)^{1/2}
  int truncation_level = 0;      // last index summed explicitly on the grid
  int grid_size = 0;
};

TheoreticalBounds theoretical_bounds(int r, int n, int grid_size = 512);

}  // namespace kquad
