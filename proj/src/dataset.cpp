#include "kquad/dataset.hpp"

#include "kquad/measure.hpp"
#include "kquad/seed.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace kquad {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

}  // namespace

PointSet load_dataset_csv(const std::string& path, const CsvOptions& options) {
  if (options.columns.empty()) throw std::invalid_argument("load_dataset_csv: empty column selection");
  for (const int c : options.columns) {
    if (c < 0) throw std::invalid_argument("load_dataset_csv: negative column index");
  }
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path);

  PointSet out;
  std::string line;
  long lineno = 0;
  std::vector<std::string_view> fields;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1 && options.skip_header) continue;
    if (trim(line).empty()) continue;
    fields.clear();
    std::string_view rest(line);
    for (;;) {
      const auto pos = rest.find(options.delimiter);
      fields.push_back(rest.substr(0, pos));
      if (pos == std::string_view::npos) break;
      rest.remove_prefix(pos + 1);
    }
    Point p(static_cast<Eigen::Index>(options.columns.size()));
    for (std::size_t k = 0; k < options.columns.size(); ++k) {
      const auto c = static_cast<std::size_t>(options.columns[k]);
      std::ostringstream msg;
      if (c >= fields.size()) {
        msg << path << ":" << lineno << ": column " << c << " missing (row has " << fields.size() << " fields)";
        throw std::runtime_error(msg.str());
      }
      double v = 0.0;
      if (!parse_double(fields[c], v)) {
        msg << path << ":" << lineno << ": column " << c << " is not numeric: '" << trim(fields[c]) << "'";
        throw std::runtime_error(msg.str());
      }
      p[static_cast<Eigen::Index>(k)] = v;
    }
    out.push_back(std::move(p));
  }
  if (out.empty()) throw std::runtime_error(path + ": no data rows");
  return out;
}

PointSet normalize_dataset(const PointSet& points) {
  if (points.size() < 2) throw std::invalid_argument("normalize_dataset: need at least 2 points");
  const Eigen::Index d = points.front().size();
  const double count = static_cast<double>(points.size());
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  for (const auto& p : points) {
    if (p.size() != d) throw std::invalid_argument("normalize_dataset: inconsistent dimensions");
    mean += p;
  }
  mean /= count;
  Eigen::VectorXd ss = Eigen::VectorXd::Zero(d);
  for (const auto& p : points) ss += (p - mean).cwiseAbs2();
  Eigen::VectorXd rms = (ss / count).cwiseSqrt();
  for (Eigen::Index j = 0; j < d; ++j) {
    if (!(rms[j] > 0.0)) {
      throw std::invalid_argument("normalize_dataset: coordinate " + std::to_string(j) + " is constant");
    }
  }
  PointSet out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back((p - mean).cwiseQuotient(rms));
  // A second centring pass removes the rounding left by the first.
  Eigen::VectorXd resid = Eigen::VectorXd::Zero(d);
  for (const auto& p : out) resid += p;
  resid /= count;
  for (auto& p : out) p -= resid;
  return out;
}

double out_of_model_integrand(const Point& x, int d) {
  if (d < 1 || x.size() < std::max<Eigen::Index>(2, d)) {
    throw std::invalid_argument("out_of_model_integrand: point dimension too small");
  }
  return (x[0] >= 0.0 && x[1] >= 0.0) ? x[d - 1] : 0.0;
}

PointSet synthetic_gaussian_mixture(std::size_t count, int dim, std::uint64_t seed) {
  if (dim < 1) throw std::invalid_argument("synthetic_gaussian_mixture: dim must be positive");
  constexpr int kComponents = 4;
  Rng rng(derive_seed(seed, {0x5eed}));
  std::uniform_real_distribution<double> centre(-3.0, 3.0);
  std::uniform_real_distribution<double> scale(0.4, 1.4);
  std::vector<Eigen::VectorXd> means(kComponents, Eigen::VectorXd(dim));
  std::vector<Eigen::VectorXd> scales(kComponents, Eigen::VectorXd(dim));
  for (int c = 0; c < kComponents; ++c) {
    for (int j = 0; j < dim; ++j) {
      means[c][j] = centre(rng);
      scales[c][j] = scale(rng);
    }
  }
  std::uniform_int_distribution<int> pick(0, kComponents - 1);
  std::normal_distribution<double> gauss(0.0, 1.0);
  PointSet out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const int c = pick(rng);
    Point p(dim);
    for (int j = 0; j < dim; ++j) p[j] = means[c][j] + scales[c][j] * gauss(rng);
    out.push_back(std::move(p));
  }
  return out;
}

PointSet random_subset(const PointSet& points, std::size_t count, std::uint64_t seed) {
  if (count >= points.size()) return points;
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  PointSet out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(points[order[i]]);
  return out;
}

void write_points_csv(const std::string& path, const PointSet& points) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (f == nullptr) throw std::runtime_error("cannot write " + path);
  for (const auto& p : points) {
    for (Eigen::Index j = 0; j < p.size(); ++j) std::fprintf(f, j ? ",%.17g" : "%.17g", p[j]);
    std::fputc('\n', f);
  }
  if (std::fclose(f) != 0) throw std::runtime_error("cannot write " + path);
}

}  // namespace kquad
