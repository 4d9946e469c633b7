#include "kquad/spectral.hpp"

#include <stdexcept>

namespace kquad {

NystromFeatureMap::NystromFeatureMap(KernelSpec spec, PointSet landmarks, Eigen::MatrixXd vectors,
                                     Eigen::VectorXd values, int requested_rank)
    : spec_(std::move(spec)),
      landmarks_(std::move(landmarks)),
      vectors_(std::move(vectors)),
      values_(std::move(values)),
      requested_rank_(requested_rank) {
  if (values_.size() == 0) throw std::invalid_argument("degenerate landmark set");
  if (vectors_.cols() != values_.size() ||
      vectors_.rows() != static_cast<Eigen::Index>(landmarks_.size())) {
    throw std::invalid_argument("Nystrom map: inconsistent eigenpair shapes");
  }
}

Eigen::VectorXd NystromFeatureMap::landmark_column(const Point& x) const {
  Eigen::VectorXd col(static_cast<Eigen::Index>(landmarks_.size()));
  for (std::size_t i = 0; i < landmarks_.size(); ++i) {
    col[static_cast<Eigen::Index>(i)] = kquad::kernel_eval(spec_, landmarks_[i], x);
  }
  return col;
}

Eigen::VectorXd NystromFeatureMap::features(const Point& x) const {
  return vectors_.transpose() * landmark_column(x);
}

Eigen::MatrixXd NystromFeatureMap::features(const PointSet& xs) const {
  return gram_matrix(spec_, xs, landmarks_) * vectors_;
}

double NystromFeatureMap::kernel_eval(const Point& x, const Point& y) const {
  const Eigen::VectorXd fx = features(x);
  const Eigen::VectorXd fy = features(y);
  return (fx.array() * fy.array() / values_.array()).sum();
}

NystromFeatureMap nystrom_fit(const KernelSpec& spec, PointSet landmarks, int s, double rank_tol) {
  if (landmarks.empty()) throw std::invalid_argument("nystrom_fit: empty landmark set");
  const int ell = static_cast<int>(landmarks.size());
  if (s < 1) throw std::invalid_argument("nystrom_fit: rank must be >= 1");
  if (s > ell) throw std::invalid_argument("nystrom_fit: rank exceeds landmark count");

  const Eigen::MatrixXd w = gram_matrix(spec, landmarks);
  const EigenDecomposition eig = sym_eigendecomp_top(w, s);
  const double lead = eig.values[0];
  if (!(lead > 0.0)) throw std::invalid_argument("degenerate landmark set");
  int keep = 0;
  while (keep < s && eig.values[keep] > rank_tol * lead) ++keep;
  if (keep == 0) throw std::invalid_argument("degenerate landmark set");
  return NystromFeatureMap(spec, std::move(landmarks), eig.vectors.leftCols(keep),
                           eig.values.head(keep), s);
}

Eigen::VectorXd nystrom_features(const NystromFeatureMap& map, const Point& x) {
  return map.features(x);
}

double nystrom_kernel_eval(const NystromFeatureMap& map, const Point& x, const Point& y) {
  return map.kernel_eval(x, y);
}

}  // namespace kquad
