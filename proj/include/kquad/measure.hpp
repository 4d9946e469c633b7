#pragma once

#include "kquad/kernel.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <unordered_map>
#include <variant>

namespace kquad {

using Rng = std::mt19937_64;

/// Finite probability measure sum_j w_j delta_{a_j}.
class DiscreteMeasure {
 public:
  DiscreteMeasure(PointSet atoms, Eigen::VectorXd weights);
  /// Equally weighted measure over the given atoms.
  static DiscreteMeasure uniform(PointSet atoms);

  const PointSet& atoms() const { return atoms_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  std::size_t size() const { return atoms_.size(); }
  std::size_t dim() const { return static_cast<std::size_t>(atoms_.front().size()); }

  std::size_t sample_index(Rng& rng) const;

 private:
  PointSet atoms_;
  Eigen::VectorXd weights_;
  bool equal_weights_ = false;
  std::vector<double> cumulative_;
};

/// Lebesgue measure on [0,1].
struct Uniform01 {};

/// A measure known only through a seeded sampler; no exact integrals.
struct SamplerOnly {
  std::function<Point(Rng&)> draw;
};

class MeasureSpec {
 public:
  using Variant = std::variant<Uniform01, std::shared_ptr<const DiscreteMeasure>, SamplerOnly>;

  MeasureSpec(Variant v);  // NOLINT(google-explicit-constructor)
  static MeasureSpec uniform01() { return MeasureSpec(Uniform01{}); }
  static MeasureSpec discrete(DiscreteMeasure m) {
    return MeasureSpec(std::make_shared<const DiscreteMeasure>(std::move(m)));
  }
  static MeasureSpec sampler(std::function<Point(Rng&)> draw) {
    return MeasureSpec(SamplerOnly{std::move(draw)});
  }

  const Variant& variant() const { return v_; }
  bool is_uniform01() const { return std::holds_alternative<Uniform01>(v_); }
  /// Null unless the measure is discrete.
  const DiscreteMeasure* as_discrete() const;
  bool has_exact_integrals() const { return !std::holds_alternative<SamplerOnly>(v_); }

  Point sample(Rng& rng) const;
  PointSet sample(std::size_t count, Rng& rng) const;

 private:
  Variant v_;
};

/// z(x) = int k(x, y) dmu(y).
double mean_embedding(const KernelSpec& spec, const MeasureSpec& mu, const Point& x);
/// int int k(x, y) dmu(x) dmu(y).
double double_integral(const KernelSpec& spec, const MeasureSpec& mu);
/// c_k = int k(x,x) dmu - int int k dmu dmu.
double variance_constant(const KernelSpec& spec, const MeasureSpec& mu);

/// Memoised embeddings for a fixed (kernel, measure) pair. For a discrete
/// measure every atom's embedding and the double integral are computed once
/// at construction; lookups are keyed by the exact coordinates of the point.
/// Immutable after construction, so it can be shared between worker threads.
class EmbeddingCache {
 public:
  EmbeddingCache(KernelSpec spec, MeasureSpec mu);

  const KernelSpec& kernel() const { return spec_; }
  const MeasureSpec& measure() const { return mu_; }

  double embedding(const Point& x) const;
  double double_integral() const { return double_integral_; }
  /// Embedding of atom i of a discrete measure.
  double atom_embedding(std::size_t i) const { return atom_embeddings_.at(i); }
  const std::vector<double>& atom_embeddings() const { return atom_embeddings_; }
  /// Index of the atom with exactly these coordinates, or -1.
  std::ptrdiff_t atom_index(const Point& x) const;

 private:
  struct PointHash {
    std::size_t operator()(const Point& p) const;
  };
  struct PointEq {
    bool operator()(const Point& a, const Point& b) const {
      return a.size() == b.size() && (a.array() == b.array()).all();
    }
  };

  KernelSpec spec_;
  MeasureSpec mu_;
  double double_integral_ = 0.0;
  std::vector<double> atom_embeddings_;
  std::unordered_map<Point, std::size_t, PointHash, PointEq> index_;
};

}  // namespace kquad
