#include "kquad/spectral.hpp"

#include <lapacke.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace kquad {

MercerBasis::MercerBasis(int r, int count) : r_(r), count_(count) {
  if (r < 1 || r > 3) throw std::invalid_argument("Mercer basis: r must be in {1,2,3}");
  if (count < 0) throw std::invalid_argument("Mercer basis: count must be nonnegative");
}

double MercerBasis::eigenvalue(int index) const {
  if (index < 1) throw std::out_of_range("Mercer basis index is 1-based");
  if (index == 1) return 1.0;
  const double m = index / 2;
  return std::pow(m, -2.0 * r_);
}

double MercerBasis::eval(int index, double x) const {
  if (index < 1) throw std::out_of_range("Mercer basis index is 1-based");
  if (index == 1) return 1.0;
  const double arg = 2.0 * std::numbers::pi * static_cast<double>(index / 2) * x;
  return std::numbers::sqrt2 * ((index % 2 == 0) ? std::cos(arg) : std::sin(arg));
}

Eigen::VectorXd MercerBasis::eigenvalues() const {
  Eigen::VectorXd out(count_);
  for (int i = 0; i < count_; ++i) out[i] = eigenvalue(i + 1);
  return out;
}

Eigen::VectorXd MercerBasis::features(const Point& x) const {
  if (x.size() != 1) throw std::invalid_argument("Mercer basis: points must be 1-dimensional");
  Eigen::VectorXd out(count_);
  for (int i = 0; i < count_; ++i) out[i] = eval(i + 1, x[0]);
  return out;
}

Eigen::VectorXd MercerBasis::uniform_expectations() const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(count_);
  if (count_ > 0) out[0] = 1.0;
  return out;
}

MercerBasis sobolev_mercer_basis(int r, int count) { return MercerBasis(r, count); }

namespace {

// sum_{m >= j} m^{-s}: 10^6 explicit terms (smallest first) plus an
// Euler-Maclaurin remainder, which is below 1e-24 at that cutoff.
double zeta_tail(double s, long j) {
  constexpr long kTerms = 1'000'000;
  const long cutoff = j + kTerms;
  const double big_m = static_cast<double>(cutoff);
  double acc = std::pow(big_m, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(big_m, -s) +
               s / 12.0 * std::pow(big_m, -s - 1.0) -
               s * (s + 1.0) * (s + 2.0) / 720.0 * std::pow(big_m, -s - 3.0);
  const int half = static_cast<int>(s / 2.0);
  for (long m = cutoff - 1; m >= j; --m) {
    const double md = static_cast<double>(m);
    const double inv_sq = 1.0 / (md * md);
    double term = inv_sq;
    for (int k = 1; k < half; ++k) term *= inv_sq;
    acc += term;
  }
  return acc;
}

}  // namespace

double mercer_tail_sum(int r, int n) {
  if (r < 1 || r > 3) throw std::invalid_argument("mercer_tail_sum: r must be in {1,2,3}");
  if (n < 1) throw std::invalid_argument("mercer_tail_sum: n must be >= 1");
  const double s = 2.0 * r;
  if (n == 1) return 1.0 + 2.0 * zeta_tail(s, 1);
  const long m0 = n / 2;
  if (n % 2 == 0) return 2.0 * zeta_tail(s, m0);
  return std::pow(static_cast<double>(m0), -s) + 2.0 * zeta_tail(s, m0 + 1);
}

double mercer_truncated_kernel(const MercerBasis& basis, const Point& x, const Point& y) {
  const Eigen::VectorXd fx = basis.features(x);
  const Eigen::VectorXd fy = basis.features(y);
  double acc = 0.0;
  for (int i = 0; i < basis.count(); ++i) acc += basis.eigenvalue(i + 1) * fx[i] * fy[i];
  return acc;
}

// ---------------------------------------------------------------------------

namespace {

void check_symmetric(const Eigen::MatrixXd& w) {
  if (w.rows() != w.cols()) throw std::invalid_argument("sym_eigendecomp: matrix must be square");
  if (!w.allFinite()) throw std::invalid_argument("sym_eigendecomp: non-finite entries");
  const double scale = w.norm();
  if ((w - w.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw std::invalid_argument("sym_eigendecomp: matrix is not symmetric");
  }
}

// LAPACK returns ascending order; flip to descending and fix signs.
EigenDecomposition finish(Eigen::MatrixXd vecs, const Eigen::VectorXd& ascending) {
  const Eigen::Index k = ascending.size();
  EigenDecomposition out;
  out.values = ascending.reverse();
  out.vectors = vecs.rowwise().reverse();
  for (Eigen::Index c = 0; c < k; ++c) {
    auto col = out.vectors.col(c);
    const double tol = 1e-12 * col.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < col.size(); ++i) {
      if (std::abs(col[i]) > tol) {
        if (col[i] < 0.0) col *= -1.0;
        break;
      }
    }
  }
  return out;
}

}  // namespace

EigenDecomposition sym_eigendecomp(const Eigen::MatrixXd& w) {
  check_symmetric(w);
  const auto n = static_cast<lapack_int>(w.rows());
  if (n == 0) return {};
  Eigen::MatrixXd a = 0.5 * (w + w.transpose());
  Eigen::VectorXd vals(n);
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'U', n, a.data(), n, vals.data());
  if (info != 0) throw std::runtime_error("sym_eigendecomp: LAPACK dsyevd failed");
  return finish(std::move(a), vals);
}

EigenDecomposition sym_eigendecomp_top(const Eigen::MatrixXd& w, int count) {
  check_symmetric(w);
  const auto n = static_cast<lapack_int>(w.rows());
  if (count < 1 || count > n) throw std::invalid_argument("sym_eigendecomp_top: bad count");
  if (4 * count >= n) {
    auto full = sym_eigendecomp(w);
    return {full.vectors.leftCols(count), full.values.head(count)};
  }
  Eigen::MatrixXd a = 0.5 * (w + w.transpose());
  Eigen::VectorXd vals(n);
  Eigen::MatrixXd z(n, count);
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(n));
  lapack_int found = 0;
  const lapack_int info =
      LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'I', 'U', n, a.data(), n, 0.0, 0.0, n - count + 1, n,
                     0.0, &found, vals.data(), z.data(), n, support.data());
  if (info != 0 || found != count) throw std::runtime_error("sym_eigendecomp_top: LAPACK dsyevr failed");
  return finish(std::move(z), vals.head(count));
}

// ---------------------------------------------------------------------------

double uniform_gap_estimate(const KernelSpec& spec, const KernelFn& ktilde, const PointSet& probe) {
  if (probe.empty()) throw std::invalid_argument("uniform_gap_estimate: empty probe set");
  double gap = 0.0;
  for (std::size_t i = 0; i < probe.size(); ++i) {
    for (std::size_t j = i; j < probe.size(); ++j) {
      gap = std::max(gap, std::abs(kernel_eval(spec, probe[i], probe[j]) - ktilde(probe[i], probe[j])));
    }
  }
  return gap;
}

double hs_error_estimate(const KernelSpec& spec, const NystromFeatureMap& map,
                         const PointSet& sample) {
  if (sample.size() < 2) throw std::invalid_argument("hs_error_estimate: need at least 2 points");
  const Eigen::MatrixXd f = map.features(sample);
  const Eigen::VectorXd inv = map.eigenvalues().cwiseInverse();
  const Eigen::MatrixXd approx = f * inv.asDiagonal() * f.transpose();
  const Eigen::MatrixXd exact = gram_matrix(spec, sample);
  const double count = static_cast<double>(sample.size() * sample.size());
  return std::sqrt((approx - exact).squaredNorm() / count);
}

// ---------------------------------------------------------------------------

TestFunctionSet::TestFunctionSet(int dim, Evaluator eval, std::optional<Eigen::VectorXd> expectations,
                                 Provenance provenance, KernelFn truncated_kernel)
    : dim_(dim),
      eval_(std::move(eval)),
      expectations_(std::move(expectations)),
      provenance_(provenance),
      truncated_kernel_(std::move(truncated_kernel)) {
  if (dim_ < 0) throw std::invalid_argument("test function set: negative dimension");
  if (dim_ > 0 && !eval_) throw std::invalid_argument("test function set: missing evaluator");
  if (expectations_ && expectations_->size() != dim_) {
    throw std::invalid_argument("test function set: expectation vector has wrong length");
  }
}

TestFunctionSet TestFunctionSet::mercer(const MercerBasis& basis) {
  return TestFunctionSet(
      basis.count(), [basis](const Point& x) { return basis.features(x); },
      basis.uniform_expectations(), Provenance::Mercer,
      [basis](const Point& x, const Point& y) { return mercer_truncated_kernel(basis, x, y); });
}

TestFunctionSet TestFunctionSet::nystrom(std::shared_ptr<const NystromFeatureMap> map,
                                         const EmbeddingCache* cache) {
  if (!map) throw std::invalid_argument("test function set: null Nystrom map");
  std::optional<Eigen::VectorXd> expectations;
  if (cache != nullptr) {
    const auto& z = map->landmarks();
    Eigen::VectorXd emb(static_cast<Eigen::Index>(z.size()));
    for (std::size_t i = 0; i < z.size(); ++i) emb[static_cast<Eigen::Index>(i)] = cache->embedding(z[i]);
    expectations = map->eigenvectors().transpose() * emb;
  }
  return TestFunctionSet(
      map->rank(), [map](const Point& x) { return map->features(x); }, std::move(expectations),
      Provenance::Nystrom, [map](const Point& x, const Point& y) { return map->kernel_eval(x, y); });
}

TestFunctionSet TestFunctionSet::empty() {
  return TestFunctionSet(
      0, [](const Point&) { return Eigen::VectorXd(); }, Eigen::VectorXd(), Provenance::Custom,
      [](const Point&, const Point&) { return 0.0; });
}

Eigen::VectorXd TestFunctionSet::operator()(const Point& x) const {
  if (dim_ == 0) return Eigen::VectorXd();
  Eigen::VectorXd v = eval_(x);
  if (v.size() != dim_) throw std::logic_error("test function set: evaluator returned wrong length");
  return v;
}

}  // namespace kquad
