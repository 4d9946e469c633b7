#pragma once

#include "kquad/kernel.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace kquad {

struct CsvOptions {
  std::vector<int> columns;  // 0-based; must be nonempty
  char delimiter = ',';
  bool skip_header = false;
};

/// Reads the selected numeric columns. Errors name the file and the 1-based
/// line of the offending row.
PointSet load_dataset_csv(const std::string& path, const CsvOptions& options);

/// Per coordinate: subtract the mean, then divide by the root mean square.
PointSet normalize_dataset(const PointSet& points);

/// x_d if x_1 >= 0 and x_2 >= 0, else 0 (d is 1-based).
double out_of_model_integrand(const Point& x, int d);

/// Mixture of four Gaussians in `dim` dimensions with seeded means and
/// per-coordinate scales.
PointSet synthetic_gaussian_mixture(std::size_t count, int dim, std::uint64_t seed);

/// First `count` points of a seeded shuffle.
PointSet random_subset(const PointSet& points, std::size_t count, std::uint64_t seed);

void write_points_csv(const std::string& path, const PointSet& points);

}  // namespace kquad
