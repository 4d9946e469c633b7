#include "kquad/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace kquad {

namespace {

double squared_distance(const Point& x, const Point& y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("kernel_eval: dimension mismatch (" + std::to_string(x.size()) +
                                " vs " + std::to_string(y.size()) + ")");
  }
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    s += d * d;
  }
  return s;
}

// (-1)^{r-1} (2 pi)^{2r} / (2r)!
double sobolev_scale(int r) {
  double scale = 1.0;
  const double two_pi = 2.0 * std::numbers::pi;
  for (int i = 0; i < 2 * r; ++i) scale *= two_pi / static_cast<double>(i + 1);
  return (r % 2 == 1) ? scale : -scale;
}

double sobolev_eval(int r, const Point& x, const Point& y) {
  if (x.size() != 1 || y.size() != 1) {
    throw std::invalid_argument("periodic Sobolev kernel: points must be 1-dimensional");
  }
  const double a = x[0];
  const double b = y[0];
  if (!(a >= 0.0 && a <= 1.0 && b >= 0.0 && b <= 1.0)) {
    throw std::domain_error("periodic Sobolev kernel: points must lie in [0,1]");
  }
  return 1.0 + sobolev_scale(r) * bernoulli_poly(2 * r, std::abs(a - b));
}

}  // namespace

KernelSpec::KernelSpec(Variant v) : v_(v) {
  std::visit(
      [](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, PeriodicSobolev>) {
          if (k.r < 1) throw std::invalid_argument("periodic Sobolev kernel: r must be >= 1");
          if (k.r > 3) throw std::invalid_argument("degree out of supported range");
        } else {
          if (!(k.lambda > 0.0) || !std::isfinite(k.lambda)) {
            throw std::invalid_argument("kernel bandwidth lambda must be positive and finite");
          }
        }
      },
      v_);
}

int KernelSpec::smoothness() const {
  if (const auto* s = std::get_if<PeriodicSobolev>(&v_)) return s->r;
  throw std::logic_error("smoothness() is only defined for periodic Sobolev kernels");
}

std::string KernelSpec::name() const {
  return std::visit(
      [](const auto& k) -> std::string {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, PeriodicSobolev>) {
          return "sobolev_r" + std::to_string(k.r);
        } else if constexpr (std::is_same_v<K, Gaussian>) {
          return "gaussian";
        } else {
          return "rq";
        }
      },
      v_);
}

double bernoulli_poly(int degree, double x) {
  switch (degree) {
    case 2:
      return (x - 1.0) * x + 1.0 / 6.0;
    case 4: {
      const double x2 = x * x;
      return x2 * (x2 - 2.0 * x + 1.0) - 1.0 / 30.0;
    }
    case 6: {
      const double x2 = x * x;
      return x2 * (x2 * (x2 - 3.0 * x + 2.5) - 0.5) + 1.0 / 42.0;
    }
    default:
      throw std::invalid_argument("degree out of supported range");
  }
}

double kernel_eval(const KernelSpec& spec, const Point& x, const Point& y) {
  return std::visit(
      [&](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, PeriodicSobolev>) {
          return sobolev_eval(k.r, x, y);
        } else if constexpr (std::is_same_v<K, Gaussian>) {
          return std::exp(-squared_distance(x, y) / (2.0 * k.lambda * k.lambda));
        } else {
          return 1.0 / (1.0 + squared_distance(x, y) / (2.0 * k.lambda * k.lambda));
        }
      },
      spec.variant());
}

double kernel_diag(const KernelSpec& spec, const Point& x) {
  if (const auto* s = std::get_if<PeriodicSobolev>(&spec.variant())) {
    return sobolev_eval(s->r, x, x);
  }
  return 1.0;
}

Eigen::MatrixXd gram_matrix(const KernelSpec& spec, const PointSet& a, const PointSet& b) {
  Eigen::MatrixXd g(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) g(i, j) = kernel_eval(spec, a[i], b[j]);
  }
  return g;
}

Eigen::MatrixXd gram_matrix(const KernelSpec& spec, const PointSet& a) {
  const auto n = static_cast<Eigen::Index>(a.size());
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    g(i, i) = kernel_eval(spec, a[i], a[i]);
    for (Eigen::Index j = 0; j < i; ++j) {
      g(i, j) = kernel_eval(spec, a[i], a[j]);
      g(j, i) = g(i, j);
    }
  }
  return g;
}

namespace {

// Exact k-th smallest pairwise squared distance without materialising all
// M(M-1)/2 values when M is large: bracket the target rank with a strided
// sample, then collect only the distances inside the bracket.
double kth_pair_distance(const PointSet& pts, std::size_t k) {
  const std::size_t m = pts.size();
  const std::size_t total = m * (m - 1) / 2;
  auto for_each_pair = [&](auto&& fn) {
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) fn(squared_distance(pts[i], pts[j]));
    }
  };

  constexpr std::size_t kDirectLimit = 20'000'000;
  if (total <= kDirectLimit) {
    std::vector<double> all;
    all.reserve(total);
    for_each_pair([&](double d) { all.push_back(d); });
    std::nth_element(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end());
    return all[k];
  }

  const std::size_t stride = total / 200'000 + 1;
  std::vector<double> sample;
  {
    std::size_t idx = 0;
    for_each_pair([&](double d) {
      if (idx++ % stride == 0) sample.push_back(d);
    });
  }
  std::sort(sample.begin(), sample.end());
  const double q = static_cast<double>(k) / static_cast<double>(total);
  for (double halfwidth = 0.01; halfwidth < 1.0; halfwidth *= 4.0) {
    const auto pick = [&](double p) {
      p = std::clamp(p, 0.0, 1.0);
      return sample[std::min(sample.size() - 1,
                             static_cast<std::size_t>(p * static_cast<double>(sample.size())))];
    };
    const double lo = q - halfwidth <= 0.0 ? -1.0 : pick(q - halfwidth);
    const double hi = q + halfwidth >= 1.0 ? std::numeric_limits<double>::infinity()
                                           : pick(q + halfwidth);
    std::size_t below = 0;
    std::vector<double> inside;
    for_each_pair([&](double d) {
      if (d < lo) {
        ++below;
      } else if (d <= hi) {
        inside.push_back(d);
      }
    });
    if (k >= below && k - below < inside.size()) {
      const auto pos = static_cast<std::ptrdiff_t>(k - below);
      std::nth_element(inside.begin(), inside.begin() + pos, inside.end());
      return inside[static_cast<std::size_t>(pos)];
    }
  }
  throw std::logic_error("median selection failed to bracket the target rank");
}

}  // namespace

double median_heuristic(const PointSet& sample) {
  if (sample.size() < 2) throw std::invalid_argument("median heuristic needs at least 2 points");
  const std::size_t total = sample.size() * (sample.size() - 1) / 2;
  const double med = kth_pair_distance(sample, (total - 1) / 2);
  if (!(med > 0.0)) throw std::invalid_argument("zero bandwidth");
  return std::sqrt(med / 2.0);
}

Point point1(double x) {
  Point p(1);
  p[0] = x;
  return p;
}

PointSet points1(const std::vector<double>& xs) {
  PointSet out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back(point1(x));
  return out;
}

}  // namespace kquad
