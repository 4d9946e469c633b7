#include "kquad/quadrature.hpp"

#include "kquad/recombination.hpp"
#include "kquad/seed.hpp"
#include "kquad/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace kquad {

void QuadratureRule::validate() const {
  if (static_cast<Eigen::Index>(nodes.size()) != weights.size()) {
    throw std::logic_error("quadrature rule: node/weight count mismatch");
  }
  if (!weights.allFinite()) throw std::logic_error("quadrature rule: non-finite weight");
  if (!is_signed && weights.size() > 0 && weights.minCoeff() < 0.0) {
    throw std::logic_error("quadrature rule: negative weight in a positive rule");
  }
  if (normalized && !is_signed && std::abs(weights.sum() - 1.0) > 1e-10) {
    throw std::logic_error("quadrature rule: weights do not sum to one");
  }
}

QuadratureRule make_positive_rule(PointSet nodes, Eigen::VectorXd weights) {
  if (static_cast<Eigen::Index>(nodes.size()) != weights.size()) {
    throw std::invalid_argument("make_positive_rule: node/weight count mismatch");
  }
  QuadratureRule rule;
  std::vector<double> kept;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double w = weights[static_cast<Eigen::Index>(i)];
    if (!std::isfinite(w) || w < -1e-12) throw std::invalid_argument("make_positive_rule: negative weight");
    if (w <= 0.0) continue;
    rule.nodes.push_back(std::move(nodes[i]));
    kept.push_back(w);
  }
  if (kept.empty()) throw std::invalid_argument("make_positive_rule: no positive weight");
  rule.weights = Eigen::Map<const Eigen::VectorXd>(kept.data(), static_cast<Eigen::Index>(kept.size()));
  rule.weights /= rule.weights.sum();
  rule.validate();
  return rule;
}

QuadratureRule make_equal_weight_rule(PointSet nodes) {
  if (nodes.empty()) throw std::invalid_argument("make_equal_weight_rule: no nodes");
  QuadratureRule rule;
  const auto n = static_cast<Eigen::Index>(nodes.size());
  rule.nodes = std::move(nodes);
  rule.weights = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  return rule;
}

// ---------------------------------------------------------------------------

namespace {

using quad = __float128;

quad quad_pi() {
  // pi as a double-double
  return static_cast<quad>(3.141592653589793) + static_cast<quad>(1.2246467991473532e-16);
}

quad bernoulli_quad(int degree, quad x) {
  const quad x2 = x * x;
  switch (degree) {
    case 2:
      return x2 - x + static_cast<quad>(1) / 6;
    case 4:
      return x2 * x2 - 2 * x2 * x + x2 - static_cast<quad>(1) / 30;
    case 6:
      return x2 * x2 * x2 - 3 * x2 * x2 * x + static_cast<quad>(5) / 2 * x2 * x2 - x2 / 2 +
             static_cast<quad>(1) / 42;
    default:
      throw std::invalid_argument("degree out of supported range");
  }
}

// Periodic Sobolev kernel against the uniform measure, where z = 1 and the
// double integral is 1:
//   wce^2 = (sum w - 1)^2 + c_r sum_ij w_i w_j B_{2r}(|x_i - x_j|).
// The cancellation at large n makes double precision useless, so the sum is
// carried in binary128.
WceReport sobolev_uniform_wce(const QuadratureRule& rule, int r) {
  quad c = 1;
  const quad two_pi = 2 * quad_pi();
  for (int k = 0; k < 2 * r; ++k) c *= two_pi;
  for (int k = 2; k <= 2 * r; ++k) c /= k;
  if (r % 2 == 0) c = -c;

  const std::size_t n = rule.nodes.size();
  std::vector<quad> x(n);
  std::vector<quad> w(n);
  quad mass = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (rule.nodes[i].size() != 1) throw std::invalid_argument("Sobolev kernel requires 1-d points");
    const double xi = rule.nodes[i][0];
    if (!(xi >= 0.0 && xi <= 1.0)) throw std::invalid_argument("Sobolev kernel requires points in [0,1]");
    x[i] = xi;
    w[i] = rule.weights[static_cast<Eigen::Index>(i)];
    mass += w[i];
  }
  quad acc = 0;
  const quad b0 = bernoulli_quad(2 * r, 0);
  for (std::size_t i = 0; i < n; ++i) {
    quad row = w[i] * b0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const quad d = x[i] > x[j] ? x[i] - x[j] : x[j] - x[i];
      row += 2 * w[j] * bernoulli_quad(2 * r, d);
    }
    acc += w[i] * row;
  }
  const quad gram = mass * mass + c * acc;
  quad total = (mass - 1) * (mass - 1) + c * acc;
  WceReport rep;
  rep.gram_term = static_cast<double>(gram);
  rep.cross_term = static_cast<double>(2 * mass);
  rep.double_integral_term = 1.0;
  const double scale = 1.0 + std::abs(rep.gram_term) + std::abs(rep.cross_term) + 1.0;
  if (total < 0) {
    if (static_cast<double>(total) < -1e-9 * scale) throw std::logic_error("wce_squared: negative value");
    total = 0;
  }
  rep.wce_squared = static_cast<double>(total);
  return rep;
}

WceReport assemble(double gram, double cross, double dbl) {
  WceReport rep;
  rep.gram_term = gram;
  rep.cross_term = cross;
  rep.double_integral_term = dbl;
  double v = gram - cross + dbl;
  const double scale = 1.0 + std::abs(gram) + std::abs(cross) + std::abs(dbl);
  if (v < 0.0) {
    if (v < -1e-9 * scale) throw std::logic_error("wce_squared: negative value");
    v = 0.0;
  }
  rep.wce_squared = v;
  return rep;
}

double gram_term(const QuadratureRule& rule, const KernelSpec& spec) {
  long double acc = 0.0L;
  const std::size_t n = rule.nodes.size();
  for (std::size_t i = 0; i < n; ++i) {
    const long double wi = rule.weights[static_cast<Eigen::Index>(i)];
    long double row = wi * kernel_diag(spec, rule.nodes[i]);
    for (std::size_t j = i + 1; j < n; ++j) {
      row += 2.0L * rule.weights[static_cast<Eigen::Index>(j)] * kernel_eval(spec, rule.nodes[i], rule.nodes[j]);
    }
    acc += wi * row;
  }
  return static_cast<double>(acc);
}

}  // namespace

WceReport wce_squared(const QuadratureRule& rule, const KernelSpec& spec, const MeasureSpec& mu) {
  if (!mu.has_exact_integrals()) throw std::invalid_argument("embedding unavailable; use recombination pipeline");
  if (static_cast<Eigen::Index>(rule.nodes.size()) != rule.weights.size()) {
    throw std::invalid_argument("wce_squared: node/weight count mismatch");
  }
  if (spec.is_sobolev() && mu.is_uniform01()) return sobolev_uniform_wce(rule, spec.smoothness());
  long double cross = 0.0L;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    cross += static_cast<long double>(rule.weights[static_cast<Eigen::Index>(i)]) *
             mean_embedding(spec, mu, rule.nodes[i]);
  }
  return assemble(gram_term(rule, spec), static_cast<double>(2.0L * cross), double_integral(spec, mu));
}

WceReport wce_squared(const QuadratureRule& rule, const EmbeddingCache& cache) {
  if (static_cast<Eigen::Index>(rule.nodes.size()) != rule.weights.size()) {
    throw std::invalid_argument("wce_squared: node/weight count mismatch");
  }
  const KernelSpec& spec = cache.kernel();
  if (spec.is_sobolev() && cache.measure().is_uniform01()) return sobolev_uniform_wce(rule, spec.smoothness());
  long double cross = 0.0L;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    cross += static_cast<long double>(rule.weights[static_cast<Eigen::Index>(i)]) * cache.embedding(rule.nodes[i]);
  }
  return assemble(gram_term(rule, spec), static_cast<double>(2.0L * cross), cache.double_integral());
}

// ---------------------------------------------------------------------------

TestStack::TestStack(TestFunctionSet tfs) : tfs_(std::move(tfs)) {
  if (tfs_.expectations()) {
    Eigen::VectorXd t(tfs_.dim() + 1);
    t[0] = 1.0;
    t.tail(tfs_.dim()) = *tfs_.expectations();
    target_ = std::move(t);
  }
}

Eigen::VectorXd TestStack::operator()(const Point& x) const {
  Eigen::VectorXd v(dim());
  v[0] = 1.0;
  v.tail(tfs_.dim()) = tfs_(x);
  return v;
}

Eigen::MatrixXd TestStack::matrix(const PointSet& xs) const {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(xs.size()), dim());
  for (std::size_t i = 0; i < xs.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = (*this)(xs[i]).transpose();
  return m;
}

Eigen::VectorXd TestStack::empirical_target(const PointSet& xs) const {
  if (xs.empty()) throw std::invalid_argument("empirical_target: empty sample");
  return matrix(xs).colwise().mean().transpose();
}

TestStack build_test_stack(const TestFunctionSet& tfs) { return TestStack(tfs); }

double psi_n(const KernelSpec& spec, const KernelFn& ktilde, const Point& x) {
  const double v = kernel_diag(spec, x) - (ktilde ? ktilde(x, x) : 0.0);
  return std::max(v, 0.0);
}

// ---------------------------------------------------------------------------

namespace {

void check_sizes(const TestFunctionSet& tfs, int n, int big_n, const char* who) {
  if (n < 1) throw std::invalid_argument(std::string(who) + ": n must be positive");
  if (big_n < n) throw std::invalid_argument(std::string(who) + ": need N >= n");
  if (tfs.dim() > n - 1) throw std::invalid_argument(std::string(who) + ": more than n-1 test functions");
}

}  // namespace

Meta1Result kq_meta1(const KernelSpec& spec, const MeasureSpec& mu, const TestFunctionSet& tfs, int n,
                     int big_n, std::uint64_t seed, const Meta1Options& options) {
  check_sizes(tfs, n, big_n, "kq_meta1");
  if (!tfs.expectations()) throw std::invalid_argument("kq_meta1: test functions need known expectations");
  if (options.max_retries < 0) throw std::invalid_argument("kq_meta1: negative retry cap");
  const TestStack stack(tfs);
  const Eigen::VectorXd& target = *stack.target();
  const KernelFn& ktilde = tfs.truncated_kernel();

  for (int attempt = 0; attempt <= options.max_retries; ++attempt) {
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(attempt)}));
    PointSet xs = mu.sample(static_cast<std::size_t>(big_n), rng);
    const Eigen::MatrixXd phi = stack.matrix(xs);

    StandardFormLP lp;
    lp.A = phi.transpose();
    lp.b = target;
    Eigen::VectorXd psi;
    if (options.objective == Meta1Objective::PsiN) {
      psi.resize(big_n);
      for (int i = 0; i < big_n; ++i) psi[i] = psi_n(spec, ktilde, xs[static_cast<std::size_t>(i)]);
      lp.c = psi;
    }
    const LpResult res = lp_bfs_solve(lp, fast_simplex_options());
    if (res.status == LpStatus::Unbounded) throw std::logic_error("kq_meta1: LP reported unbounded");
    if (!res.ok()) continue;

    const BasicSolution& sol = res.solution;
    PointSet nodes;
    for (const int i : sol.support) nodes.push_back(xs[static_cast<std::size_t>(i)]);
    Meta1Result out;
    out.rule = make_positive_rule(std::move(nodes), sol.weights);
    if (out.rule.size() != sol.support.size()) continue;  // a support weight was not positive
    Eigen::VectorXd dense = Eigen::VectorXd::Zero(big_n);
    for (std::size_t k = 0; k < sol.support.size(); ++k) {
      dense[sol.support[k]] = out.rule.weights[static_cast<Eigen::Index>(k)];
    }
    out.residual = (phi.transpose() * dense - target).cwiseAbs().maxCoeff();
    if (!(out.residual <= 1e-9)) continue;
    out.support = sol.support;
    if (options.objective == Meta1Objective::PsiN) out.objective = psi.dot(dense);
    out.retries = attempt;
    out.candidates = std::move(xs);
    return out;
  }
  throw InfeasibleError("kq_meta1: no feasible sample after " + std::to_string(options.max_retries) + " retries",
                        options.max_retries);
}

Meta2Result kq_meta2(const KernelSpec& /*spec*/, const MeasureSpec& mu, const TestFunctionSet& tfs, int n,
                     int big_n, std::uint64_t seed) {
  check_sizes(tfs, n, big_n, "kq_meta2");
  Rng rng(derive_seed(seed, {0}));
  PointSet xs = mu.sample(static_cast<std::size_t>(big_n), rng);
  MomentSystem sys;
  sys.features.resize(big_n, tfs.dim());
  for (int i = 0; i < big_n; ++i) {
    if (tfs.dim() > 0) sys.features.row(i) = tfs(xs[static_cast<std::size_t>(i)]).transpose();
  }
  sys.weights = Eigen::VectorXd::Constant(big_n, 1.0 / big_n);
  const RecombinationResult rec = recombine(sys);

  PointSet nodes;
  for (const int i : rec.indices) nodes.push_back(xs[static_cast<std::size_t>(i)]);
  Meta2Result out;
  out.rule = make_positive_rule(std::move(nodes), rec.weights);
  out.used_lp_fallback = rec.used_lp_fallback;
  out.support = rec.indices;

  const TestStack stack(tfs);
  const Eigen::VectorXd target = stack.empirical_target(xs);
  Eigen::VectorXd got = Eigen::VectorXd::Zero(stack.dim());
  for (std::size_t k = 0; k < out.rule.size(); ++k) {
    got += out.rule.weights[static_cast<Eigen::Index>(k)] * stack(out.rule.nodes[k]);
  }
  out.residual = (got - target).cwiseAbs().maxCoeff() / (1.0 + target.cwiseAbs().maxCoeff());
  out.candidates = std::move(xs);
  return out;
}

long recommended_sample_size(int n, const TestFunctionSet& tfs, const PointSet& pool,
                             std::optional<double> sup_norm) {
  if (n < 2) throw std::invalid_argument("recommended_sample_size: n must be at least 2");
  const double nm1 = static_cast<double>(n - 1);
  double v = 0.0;
  if (sup_norm) {
    if (!(*sup_norm > 0.0)) throw std::invalid_argument("recommended_sample_size: C must be positive");
    v = 6.0 * *sup_norm * nm1 * nm1;
  } else {
    if (pool.empty()) throw std::invalid_argument("recommended_sample_size: empty candidate pool");
    double best = 0.0;
    for (const auto& x : pool) best = std::max(best, tfs(x).squaredNorm());
    v = 6.0 * nm1 * best;
  }
  return static_cast<long>(std::ceil(v * (1.0 - 1e-15)));
}

double integrate(const QuadratureRule& rule, const std::function<double(const Point&)>& f) {
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) acc += rule.weights[static_cast<Eigen::Index>(i)] * f(rule.nodes[i]);
  return acc;
}

TheoreticalBounds theoretical_bounds(int r, int n, int grid_size) {
  if (n < 1) throw std::invalid_argument("theoretical_bounds: n must be positive");
  if (grid_size < 1) throw std::invalid_argument("theoretical_bounds: empty grid");
  const double tail = mercer_tail_sum(r, n);
  TheoreticalBounds out;
  out.main_bdd_bound = 2.0 * std::numbers::sqrt2 * std::sqrt(tail);

  // Explicit terms up to a complete (cos, sin) pair; beyond it each pair
  // contributes sigma (c^2 + s^2) = 2 sigma whatever x is, so the remainder
  // is the eigenvalue tail itself.
  int last = std::max(n, 2 * (n / 2 + 200) + 1);
  if (last % 2 == 0) ++last;
  const MercerBasis basis(r, last);
  const double remainder = mercer_tail_sum(r, last + 1);
  double sup = 0.0;
  for (int g = 0; g < grid_size; ++g) {
    const double x = static_cast<double>(g) / grid_size;
    double acc = 0.0;
    for (int i = last; i >= n; --i) {
      const double e = basis.eval(i, x);
      acc += basis.eigenvalue(i) * e * e;
    }
    sup = std::max(sup, acc + remainder);
  }
  out.prop_main_bound = 2.0 * std::sqrt(sup);
  out.truncation_level = last;
  out.grid_size = grid_size;
  return out;
}

}  // namespace kquad
