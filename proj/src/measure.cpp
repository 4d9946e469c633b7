#include "kquad/measure.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

namespace kquad {

DiscreteMeasure::DiscreteMeasure(PointSet atoms, Eigen::VectorXd weights)
    : atoms_(std::move(atoms)), weights_(std::move(weights)) {
  if (atoms_.empty()) throw std::invalid_argument("discrete measure needs at least one atom");
  if (static_cast<std::size_t>(weights_.size()) != atoms_.size()) {
    throw std::invalid_argument("discrete measure: atom/weight count mismatch");
  }
  const auto d = atoms_.front().size();
  for (const auto& a : atoms_) {
    if (a.size() != d) throw std::invalid_argument("discrete measure: inconsistent atom dimension");
    if (!a.allFinite()) throw std::invalid_argument("discrete measure: non-finite atom");
  }
  if ((weights_.array() < 0.0).any() || !weights_.allFinite()) {
    throw std::invalid_argument("discrete measure: weights must be finite and nonnegative");
  }
  if (std::abs(weights_.sum() - 1.0) > 1e-12) {
    throw std::invalid_argument("discrete measure: weights must sum to 1");
  }
  equal_weights_ = (weights_.array() == weights_[0]).all();
  if (!equal_weights_) {
    cumulative_.resize(atoms_.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      acc += weights_[static_cast<Eigen::Index>(i)];
      cumulative_[i] = acc;
    }
  }
}

DiscreteMeasure DiscreteMeasure::uniform(PointSet atoms) {
  const auto m = static_cast<Eigen::Index>(atoms.size());
  if (m == 0) throw std::invalid_argument("discrete measure needs at least one atom");
  return DiscreteMeasure(std::move(atoms), Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m)));
}

std::size_t DiscreteMeasure::sample_index(Rng& rng) const {
  if (equal_weights_) {
    std::uniform_int_distribution<std::size_t> pick(0, atoms_.size() - 1);
    return pick(rng);
  }
  std::uniform_real_distribution<double> u(0.0, cumulative_.back());
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u(rng));
  return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()),
                               atoms_.size() - 1);
}

MeasureSpec::MeasureSpec(Variant v) : v_(std::move(v)) {
  if (const auto* d = std::get_if<std::shared_ptr<const DiscreteMeasure>>(&v_)) {
    if (!*d) throw std::invalid_argument("null discrete measure");
  }
  if (const auto* s = std::get_if<SamplerOnly>(&v_)) {
    if (!s->draw) throw std::invalid_argument("sampler-only measure needs a sampler");
  }
}

const DiscreteMeasure* MeasureSpec::as_discrete() const {
  if (const auto* d = std::get_if<std::shared_ptr<const DiscreteMeasure>>(&v_)) return d->get();
  return nullptr;
}

Point MeasureSpec::sample(Rng& rng) const {
  if (is_uniform01()) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return point1(u(rng));
  }
  if (const auto* d = as_discrete()) return d->atoms()[d->sample_index(rng)];
  return std::get<SamplerOnly>(v_).draw(rng);
}

PointSet MeasureSpec::sample(std::size_t count, Rng& rng) const {
  PointSet out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(sample(rng));
  return out;
}

namespace {

void require_exact(const KernelSpec& spec, const MeasureSpec& mu) {
  if (!mu.has_exact_integrals()) {
    throw std::invalid_argument("embedding unavailable; use recombination pipeline");
  }
  if (mu.is_uniform01() && !spec.is_sobolev()) {
    throw std::invalid_argument("Uniform01 embeddings are only available for periodic Sobolev kernels");
  }
}

double discrete_embedding(const KernelSpec& spec, const DiscreteMeasure& m, const Point& x) {
  double acc = 0.0;
  const auto& atoms = m.atoms();
  const auto& w = m.weights();
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    acc += w[static_cast<Eigen::Index>(j)] * kernel_eval(spec, x, atoms[j]);
  }
  return acc;
}

}  // namespace

double mean_embedding(const KernelSpec& spec, const MeasureSpec& mu, const Point& x) {
  require_exact(spec, mu);
  if (mu.is_uniform01()) {
    // int_0^1 B_{2r}(|x - y|) dy = 0, so only the constant survives.
    (void)kernel_diag(spec, x);  // domain check
    return 1.0;
  }
  return discrete_embedding(spec, *mu.as_discrete(), x);
}

double double_integral(const KernelSpec& spec, const MeasureSpec& mu) {
  require_exact(spec, mu);
  if (mu.is_uniform01()) return 1.0;
  const auto& m = *mu.as_discrete();
  double acc = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    acc += m.weights()[static_cast<Eigen::Index>(i)] * discrete_embedding(spec, m, m.atoms()[i]);
  }
  return acc;
}

double variance_constant(const KernelSpec& spec, const MeasureSpec& mu) {
  require_exact(spec, mu);
  double diag = 0.0;
  if (mu.is_uniform01()) {
    diag = kernel_diag(spec, point1(0.0));
  } else {
    const auto& m = *mu.as_discrete();
    for (std::size_t i = 0; i < m.size(); ++i) {
      diag += m.weights()[static_cast<Eigen::Index>(i)] * kernel_diag(spec, m.atoms()[i]);
    }
  }
  return std::max(0.0, diag - double_integral(spec, mu));
}

std::size_t EmbeddingCache::PointHash::operator()(const Point& p) const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    std::uint64_t bits = 0;
    const double v = p[i] == 0.0 ? 0.0 : p[i];  // fold -0.0 onto +0.0
    std::memcpy(&bits, &v, sizeof bits);
    h ^= bits + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return static_cast<std::size_t>(h);
}

EmbeddingCache::EmbeddingCache(KernelSpec spec, MeasureSpec mu)
    : spec_(std::move(spec)), mu_(std::move(mu)) {
  require_exact(spec_, mu_);
  if (const auto* m = mu_.as_discrete()) {
    atom_embeddings_.resize(m->size());
    index_.reserve(m->size());
    double acc = 0.0;
    for (std::size_t i = 0; i < m->size(); ++i) {
      atom_embeddings_[i] = discrete_embedding(spec_, *m, m->atoms()[i]);
      acc += m->weights()[static_cast<Eigen::Index>(i)] * atom_embeddings_[i];
      index_.emplace(m->atoms()[i], i);
    }
    double_integral_ = acc;
  } else {
    double_integral_ = kquad::double_integral(spec_, mu_);
  }
}

double EmbeddingCache::embedding(const Point& x) const {
  if (mu_.as_discrete() != nullptr) {
    if (const auto i = atom_index(x); i >= 0) return atom_embeddings_[static_cast<std::size_t>(i)];
  }
  return mean_embedding(spec_, mu_, x);
}

std::ptrdiff_t EmbeddingCache::atom_index(const Point& x) const {
  const auto it = index_.find(x);
  return it == index_.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
}

}  // namespace kquad
