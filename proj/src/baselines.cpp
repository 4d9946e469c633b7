#include "kquad/baselines.hpp"

#include "kquad/seed.hpp"
#include "kquad/solvers.hpp"

#include <stdexcept>

namespace kquad {

namespace {

void require_n(int n, const char* who) {
  if (n < 1) throw std::invalid_argument(std::string(who) + ": n must be positive");
}

Eigen::VectorXd embeddings(const EmbeddingCache& cache, const PointSet& nodes) {
  Eigen::VectorXd z(static_cast<Eigen::Index>(nodes.size()));
  for (std::size_t i = 0; i < nodes.size(); ++i) z[static_cast<Eigen::Index>(i)] = cache.embedding(nodes[i]);
  return z;
}

Eigen::VectorXd embeddings(const KernelSpec& spec, const MeasureSpec& mu, const PointSet& nodes) {
  Eigen::VectorXd z(static_cast<Eigen::Index>(nodes.size()));
  for (std::size_t i = 0; i < nodes.size(); ++i) z[static_cast<Eigen::Index>(i)] = mean_embedding(spec, mu, nodes[i]);
  return z;
}

QuadratureRule reweight(const KernelSpec& spec, PointSet nodes, const Eigen::VectorXd& z, bool sum_to_one) {
  if (nodes.empty()) throw std::invalid_argument("n_reweight: no nodes");
  const Eigen::MatrixXd k = gram_matrix(spec, nodes);
  QuadratureRule rule;
  rule.weights = sum_to_one ? nnls_quadratic_simplex(k, z) : nnls_quadratic(k, z);
  rule.nodes = std::move(nodes);
  rule.normalized = sum_to_one;
  rule.validate();
  return rule;
}

}  // namespace

QuadratureRule monte_carlo(const MeasureSpec& mu, int n, std::uint64_t seed) {
  require_n(n, "monte_carlo");
  Rng rng(seed);
  return make_equal_weight_rule(mu.sample(static_cast<std::size_t>(n), rng));
}

QuadratureRule uniform_grid(int n) {
  require_n(n, "uniform_grid");
  PointSet nodes;
  for (int i = 1; i <= n; ++i) nodes.push_back(point1(static_cast<double>(i) / n));
  return make_equal_weight_rule(std::move(nodes));
}

QuadratureRule bayes_weights(const KernelSpec& spec, PointSet nodes, const Eigen::VectorXd& z,
                             std::optional<double> jitter) {
  if (nodes.empty()) throw std::invalid_argument("bayes_weights: no nodes");
  const Eigen::MatrixXd k = gram_matrix(spec, nodes);
  const double j = jitter ? *jitter : 1e-10 * k.trace() / static_cast<double>(k.rows());
  QuadratureRule rule;
  rule.weights = solve_spd_system(k, z, j).x;
  rule.nodes = std::move(nodes);
  rule.is_signed = true;
  rule.normalized = false;
  return rule;
}

QuadratureRule iid_bayes(const KernelSpec& spec, const MeasureSpec& mu, int n, std::uint64_t seed) {
  require_n(n, "iid_bayes");
  Rng rng(seed);
  PointSet nodes = mu.sample(static_cast<std::size_t>(n), rng);
  const Eigen::VectorXd z = embeddings(spec, mu, nodes);
  return bayes_weights(spec, std::move(nodes), z);
}

QuadratureRule iid_bayes(const EmbeddingCache& cache, int n, std::uint64_t seed) {
  require_n(n, "iid_bayes");
  Rng rng(seed);
  PointSet nodes = cache.measure().sample(static_cast<std::size_t>(n), rng);
  const Eigen::VectorXd z = embeddings(cache, nodes);
  return bayes_weights(cache.kernel(), std::move(nodes), z);
}

QuadratureRule n_reweight(const KernelSpec& spec, const MeasureSpec& mu, PointSet nodes, bool sum_to_one) {
  const Eigen::VectorXd z = embeddings(spec, mu, nodes);
  return reweight(spec, std::move(nodes), z, sum_to_one);
}

QuadratureRule n_reweight(const EmbeddingCache& cache, PointSet nodes, bool sum_to_one) {
  const Eigen::VectorXd z = embeddings(cache, nodes);
  return reweight(cache.kernel(), std::move(nodes), z, sum_to_one);
}

std::vector<std::size_t> herding_indices(const EmbeddingCache& cache, int n) {
  require_n(n, "herding");
  const DiscreteMeasure* d = cache.measure().as_discrete();
  if (d == nullptr) throw std::invalid_argument("herding: measure must be discrete");
  const PointSet& atoms = d->atoms();
  const KernelSpec& spec = cache.kernel();
  const std::size_t m = atoms.size();
  std::vector<double> running(m, 0.0);  // sum_{i<=t} k(a, x_i)
  std::vector<std::size_t> chosen;
  for (int t = 0; t < n; ++t) {
    const double inv = 1.0 / (t + 1);
    std::size_t best = 0;
    double best_val = cache.atom_embedding(0) - inv * running[0];
    for (std::size_t a = 1; a < m; ++a) {
      const double v = cache.atom_embedding(a) - inv * running[a];
      if (v > best_val) {
        best_val = v;
        best = a;
      }
    }
    chosen.push_back(best);
    for (std::size_t a = 0; a < m; ++a) running[a] += kernel_eval(spec, atoms[a], atoms[best]);
  }
  return chosen;
}

QuadratureRule herding(const EmbeddingCache& cache, int n) {
  const auto idx = herding_indices(cache, n);
  const PointSet& atoms = cache.measure().as_discrete()->atoms();
  PointSet nodes;
  for (const auto i : idx) nodes.push_back(atoms[i]);
  return make_equal_weight_rule(std::move(nodes));
}

QuadratureRule herding(const KernelSpec& spec, const MeasureSpec& mu, int n) {
  return herding(EmbeddingCache(spec, mu), n);
}

}  // namespace kquad
