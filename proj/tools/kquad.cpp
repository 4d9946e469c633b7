// kquad: kernel quadrature experiments from the command line.

#include "kquad/bench.hpp"
#include "kquad/dataset.hpp"
#include "kquad/quadrature.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <map>
#include <string>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;

// Options whose raw text is forwarded to set_config_value when given.
struct Overrides {
  std::map<std::string, std::string> values;

  void add(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    app->add_option(flag, values[key], help);
    keys.emplace_back(flag, key);
  }
  void apply(CLI::App* app, kquad::ExperimentConfig& c) const {
    for (const auto& [flag, key] : keys) {
      if (app->count(flag) > 0) kquad::set_config_value(c, key, values.at(key));
    }
  }

  std::vector<std::pair<std::string, std::string>> keys;
};

kquad::ExperimentConfig base_config(const std::string& path, kquad::ExperimentKind kind) {
  kquad::ExperimentConfig c = path.empty() ? kquad::ExperimentConfig{} : kquad::load_config(path);
  c.kind = kind;
  return c;
}

int report(const kquad::BenchResult& res, const std::string& out) {
  kquad::emit_results(res.records, out);
  for (const auto& f : res.failures) {
    std::fprintf(stderr, "trial failed: method=%s n=%d trial=%d%s: %s\n", f.method.c_str(), f.n, f.trial,
                 f.infeasible ? " (infeasible)" : "", f.message.c_str());
  }
  std::fprintf(stderr, "wrote %zu records to %s (aggregate: %s)\n", res.records.size(), out.c_str(),
               kquad::aggregate_path(out).c_str());
  return res.any_infeasible() ? kExitInfeasible : kExitOk;
}

void add_common(CLI::App* app, Overrides& o) {
  o.add(app, "--n", "n", "comma-separated node counts");
  o.add(app, "--trials", "trials", "trials per (method, n)");
  o.add(app, "--seed", "seed", "master seed");
  o.add(app, "--methods", "methods", "comma-separated methods");
  o.add(app, "--out", "out", "output CSV");
  o.add(app, "--threads", "threads", "worker threads (0 = all cores)");
  o.add(app, "--max-retries", "max_retries", "LP resampling cap");
  o.add(app, "--sample-multiplier", "sample_multiplier", "N = multiplier * n");
  o.add(app, "--landmark-multiplier", "landmark_multiplier", "landmarks = multiplier * n");
}

void add_data(CLI::App* app, Overrides& o) {
  o.add(app, "--data", "data", "input CSV (synthetic data when omitted)");
  o.add(app, "--cols", "cols", "comma-separated 0-based columns");
  o.add(app, "--delimiter", "delimiter", "field delimiter");
  o.add(app, "--kernel", "kernel", "gaussian or rq");
  o.add(app, "--lambda", "lambda", "bandwidth (default: median heuristic)");
  o.add(app, "--median-points", "median_points", "points used by the median heuristic");
  o.add(app, "--subsample", "subsample", "fraction of rows kept");
  o.add(app, "--synthetic-points", "synthetic_points", "size of the synthetic dataset");
  o.add(app, "--synthetic-dim", "synthetic_dim", "dimension of the synthetic dataset");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kernel quadrature with positive weights"};
  app.require_subcommand(1);

  std::string sob_config;
  Overrides sob;
  auto* sob_cmd = app.add_subcommand("sobolev", "periodic Sobolev benchmark under the uniform measure");
  sob_cmd->add_option("--config", sob_config, "config file");
  sob.add(sob_cmd, "--r", "r", "comma-separated smoothness values");
  add_common(sob_cmd, sob);

  std::string ds_config;
  bool ds_skip_header = false;
  Overrides ds;
  auto* ds_cmd = app.add_subcommand("dataset", "benchmark on an empirical measure");
  ds_cmd->add_option("--config", ds_config, "config file");
  ds_cmd->add_flag("--skip-header", ds_skip_header, "ignore the first CSV line");
  add_common(ds_cmd, ds);
  add_data(ds_cmd, ds);

  std::string build_config;
  std::string build_method = "nystrom";
  int build_n = 20;
  int build_trial = 0;
  std::string build_out = "rule.csv";
  bool build_skip_header = false;
  Overrides bo;
  auto* build_cmd = app.add_subcommand("build", "construct one rule and write weight,x1..xd rows");
  build_cmd->add_option("--config", build_config, "config file");
  build_cmd->add_option("--method", build_method,
                        "nystrom, nystrom_psi, nystrom_recomb, n_reweight, monte_carlo, iid_bayes, herding");
  build_cmd->add_option("--n", build_n, "number of nodes")->check(CLI::PositiveNumber);
  build_cmd->add_option("--trial", build_trial, "trial index used for seeding")->check(CLI::NonNegativeNumber);
  build_cmd->add_option("--out", build_out, "output CSV");
  build_cmd->add_flag("--skip-header", build_skip_header, "ignore the first CSV line");
  bo.add(build_cmd, "--seed", "seed", "master seed");
  bo.add(build_cmd, "--max-retries", "max_retries", "LP resampling cap");
  bo.add(build_cmd, "--sample-multiplier", "sample_multiplier", "N = multiplier * n");
  bo.add(build_cmd, "--landmark-multiplier", "landmark_multiplier", "landmarks = multiplier * n");
  add_data(build_cmd, bo);

  std::size_t synth_points = 10000;
  int synth_dim = 5;
  std::uint64_t synth_seed = 0;
  std::string synth_out = "synthetic.csv";
  auto* synth_cmd = app.add_subcommand("synth", "write the synthetic Gaussian-mixture dataset");
  synth_cmd->add_option("--points", synth_points, "number of rows");
  synth_cmd->add_option("--dim", synth_dim, "dimension")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--seed", synth_seed, "generator seed");
  synth_cmd->add_option("--out", synth_out, "output CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (*sob_cmd) {
      auto c = base_config(sob_config, kquad::ExperimentKind::Sobolev);
      sob.apply(sob_cmd, c);
      c.validate();
      return report(kquad::run_sobolev_bench(c), c.out);
    }
    if (*ds_cmd) {
      auto c = base_config(ds_config, kquad::ExperimentKind::Dataset);
      ds.apply(ds_cmd, c);
      if (ds_skip_header) c.csv.skip_header = true;
      c.validate();
      return report(kquad::run_dataset_bench(c), c.out);
    }
    if (*build_cmd) {
      auto c = base_config(build_config, kquad::ExperimentKind::Dataset);
      bo.apply(build_cmd, c);
      if (build_skip_header) c.csv.skip_header = true;
      c.n_list = {build_n};
      c.validate();
      // Keep the raw rows so nodes can be reported in input coordinates.
      const kquad::PointSet raw = kquad::load_raw_dataset(c);
      const auto ctx = kquad::prepare_dataset(c, kquad::normalize_dataset(raw));
      const kquad::BuiltRule built = kquad::build_dataset_rule(c, ctx, build_method, build_n, build_trial);
      std::FILE* f = std::fopen(build_out.c_str(), "w");
      if (f == nullptr) throw std::runtime_error("cannot write " + build_out);
      std::fputs("weight", f);
      for (Eigen::Index j = 0; j < raw.front().size(); ++j) std::fprintf(f, ",x%ld", static_cast<long>(j + 1));
      std::fputc('\n', f);
      for (std::size_t i = 0; i < built.rule.size(); ++i) {
        const auto idx = ctx.cache->atom_index(built.rule.nodes[i]);
        if (idx < 0) throw std::logic_error("node is not a data point");
        std::fprintf(f, "%.17g", built.rule.weights[static_cast<Eigen::Index>(i)]);
        for (const double v : raw[static_cast<std::size_t>(idx)]) std::fprintf(f, ",%.17g", v);
        std::fputc('\n', f);
      }
      if (std::fclose(f) != 0) throw std::runtime_error("cannot write " + build_out);
      const double wce2 = kquad::wce_squared(built.rule, *ctx.cache).wce_squared;
      std::fprintf(stderr, "%s: %zu nodes, wce^2 = %.6g, retries = %d, written to %s\n", build_method.c_str(),
                   built.rule.size(), wce2, built.retries, build_out.c_str());
      return kExitOk;
    }
    if (*synth_cmd) {
      kquad::write_points_csv(synth_out, kquad::synthetic_gaussian_mixture(synth_points, synth_dim, synth_seed));
      return kExitOk;
    }
  } catch (const kquad::InfeasibleError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInfeasible;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitError;
  }
  return kExitError;
}
