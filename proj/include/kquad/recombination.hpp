#pragma once

#include <Eigen/Core>

#include <vector>

namespace kquad {

/// Discrete measure sum_i w_i delta_{X_i} described through the feature
/// rows phi(X_i).
struct MomentSystem {
  Eigen::MatrixXd features;  // N x (n-1), row i = phi(X_i)
  Eigen::VectorXd weights;   // N, nonnegative, summing to one
};

struct RecombinationResult {
  std::vector<int> indices;  // ascending rows of the input
  Eigen::VectorXd weights;   // strictly positive
  bool used_lp_fallback = false;
  double max_residual = 0.0;  // |Phi^T w_out - Phi^T w_in|_inf including the mass row
};

/// Reduces the measure to at most n = cols + 1 atoms with the same mass and
/// the same moments, by repeated block-wise Caratheodory elimination over 2n
/// blocks of atoms. Falls back to the simplex on the same system if the
/// elimination loses accuracy.
RecombinationResult recombine(const MomentSystem& system);

/// Absolute tolerance used for the moment check: 1e-10 (1 + |moments|_inf).
double recombination_tolerance(const MomentSystem& system);

}  // namespace kquad
