#pragma once

#include "kquad/quadrature.hpp"

#include <cstdint>

namespace kquad {

/// n i.i.d. draws from mu with weights 1/n.
QuadratureRule monte_carlo(const MeasureSpec& mu, int n, std::uint64_t seed);

/// Rectangle rule on [0,1]: nodes i/n, i = 1..n, weights 1/n.
QuadratureRule uniform_grid(int n);

/// WCE-minimising signed weights on fixed nodes: (K + jitter I) w = z with
/// jitter defaulting to 1e-10 trace(K)/n.
QuadratureRule bayes_weights(const KernelSpec& spec, PointSet nodes, const Eigen::VectorXd& z,
                             std::optional<double> jitter = std::nullopt);

/// i.i.d. nodes from mu with bayes_weights.
QuadratureRule iid_bayes(const KernelSpec& spec, const MeasureSpec& mu, int n, std::uint64_t seed);
QuadratureRule iid_bayes(const EmbeddingCache& cache, int n, std::uint64_t seed);

/// Nonnegative WCE-minimising weights on fixed nodes. Without
/// `sum_to_one` the weights are not renormalised.
QuadratureRule n_reweight(const KernelSpec& spec, const MeasureSpec& mu, PointSet nodes,
                          bool sum_to_one = false);
QuadratureRule n_reweight(const EmbeddingCache& cache, PointSet nodes, bool sum_to_one = false);

/// Equally weighted greedy herding over the atoms of a discrete measure:
/// x_{t+1} = argmax_x z(x) - (1/(t+1)) sum_{i<=t} k(x, x_i), lowest atom
/// index on ties, repeats allowed.
QuadratureRule herding(const EmbeddingCache& cache, int n);
QuadratureRule herding(const KernelSpec& spec, const MeasureSpec& mu, int n);

/// Atom indices chosen by herding, in selection order.
std::vector<std::size_t> herding_indices(const EmbeddingCache& cache, int n);

}  // namespace kquad
