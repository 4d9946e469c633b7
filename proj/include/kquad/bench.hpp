#pragma once

#include "kquad/dataset.hpp"
#include "kquad/measure.hpp"
#include "kquad/quadrature.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace kquad {

enum class ExperimentKind { Sobolev, Dataset };

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Sobolev;

  // sobolev
  std::vector<int> r_list{1};

  // dataset
  std::string kernel = "gaussian";  // gaussian | rq
  std::optional<double> lambda;     // median heuristic when unset
  std::size_t median_points = 10000;
  std::string data_path;            // empty: synthetic data
  CsvOptions csv{{0}, ',', false};
  double subsample = 1.0;           // fraction of rows kept
  std::size_t synthetic_points = 10000;
  int synthetic_dim = 5;

  std::vector<int> n_list{5, 10, 20};
  int trials = 10;
  int sample_multiplier = 0;    // N = multiplier * n; 0 picks 10 (sobolev) or 20 (dataset)
  int landmark_multiplier = 0;  // l = multiplier * n; 0 picks 10 (sobolev) or N/n (dataset)
  std::vector<std::string> methods;
  std::uint64_t seed = 0;
  int max_retries = 50;
  int threads = 0;  // 0: hardware concurrency
  std::string out = "results.csv";

  int effective_sample_multiplier() const;
  int effective_landmark_multiplier() const;
  /// Throws std::invalid_argument describing the first problem found.
  void validate() const;
};

/// Flat `key = value` lines, `#` starts a comment.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
/// Applies one key; used by the parser and by command-line overrides.
void set_config_value(ExperimentConfig& config, const std::string& key, const std::string& value);

std::vector<std::string> default_methods(ExperimentKind kind);

struct ResultRecord {
  std::string method;
  int n = 0;
  int trial = 0;
  double wce_sq = 0.0;
  double err_mean_sq = 0.0;
  double err_oom_sq = 0.0;
  double runtime_ms = 0.0;
  int retries = 0;
};

struct TrialFailure {
  std::string method;
  int n = 0;
  int trial = 0;
  bool infeasible = false;
  int retries = 0;
  std::string message;
};

struct BenchResult {
  std::vector<ResultRecord> records;
  std::vector<TrialFailure> failures;

  bool any_infeasible() const;
};

/// Periodic Sobolev kernels under the uniform measure on [0,1].
BenchResult run_sobolev_bench(const ExperimentConfig& config);

/// Normalised data, bandwidth and cached embeddings of the empirical measure.
struct DatasetContext {
  PointSet points;
  KernelSpec kernel = KernelSpec::gaussian(1.0);
  std::shared_ptr<const EmbeddingCache> cache;
  double mean_last = 0.0;  // E[x_d]
  double mean_oom = 0.0;   // E[f(x)]
};

/// Raw rows (CSV or synthetic), subsampled as configured, not normalised.
PointSet load_raw_dataset(const ExperimentConfig& config);
DatasetContext prepare_dataset(const ExperimentConfig& config);
DatasetContext prepare_dataset(const ExperimentConfig& config, PointSet normalized_points);
BenchResult run_dataset_bench(const ExperimentConfig& config);
BenchResult run_dataset_bench(const ExperimentConfig& config, const DatasetContext& context);

struct BuiltRule {
  QuadratureRule rule;
  int retries = 0;
};

/// One construction of `method` on the dataset, seeded exactly like trial
/// `trial` of the dataset bench.
BuiltRule build_dataset_rule(const ExperimentConfig& config, const DatasetContext& context,
                             const std::string& method, int n, int trial);

struct AggregateRow {
  std::string method;
  int n = 0;
  int count = 0;
  double wce_sq = 0.0;
  double err_mean_sq = 0.0;
  double err_oom_sq = 0.0;
  double runtime_ms = 0.0;
  double retries = 0.0;
};

/// Per-(method, n) means in first-appearance order.
std::vector<AggregateRow> aggregate(const std::vector<ResultRecord>& records);

/// `<stem>_aggregate<ext>` next to `out_path`.
std::string aggregate_path(const std::string& out_path);

/// Writes the raw CSV and the aggregate CSV.
void emit_results(const std::vector<ResultRecord>& records, const std::string& out_path);

}  // namespace kquad
