#include "kquad/bench.hpp"

#include "kquad/baselines.hpp"
#include "kquad/quadrature.hpp"
#include "kquad/seed.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <thread>

namespace kquad {

bool BenchResult::any_infeasible() const {
  return std::any_of(failures.begin(), failures.end(), [](const TrialFailure& f) { return f.infeasible; });
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

struct Job {
  std::string method;
  int r = 0;  // Sobolev smoothness; 0 for datasets
  int n = 0;
  int trial = 0;
  bool emit_primary = true;
  bool emit_reweight = false;
};

struct JobOutput {
  std::vector<ResultRecord> records;
  std::vector<TrialFailure> failures;
};

template <class F>
std::vector<JobOutput> run_pool(const std::vector<Job>& jobs, int threads, F work) {
  std::vector<JobOutput> out(jobs.size());
  std::atomic<std::size_t> next{0};
  auto loop = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) out[i] = work(jobs[i]);
  };
  unsigned t = threads > 0 ? static_cast<unsigned>(threads) : std::max(1U, std::thread::hardware_concurrency());
  t = std::min<unsigned>(t, static_cast<unsigned>(std::max<std::size_t>(jobs.size(), 1)));
  if (t <= 1) {
    loop();
    return out;
  }
  std::vector<std::thread> pool;
  for (unsigned k = 0; k < t; ++k) pool.emplace_back(loop);
  for (auto& th : pool) th.join();
  return out;
}

std::uint64_t trial_seed(std::uint64_t seed, const std::string& method, std::uint64_t family, int n, int trial) {
  return derive_seed(seed, {hash_string(method), family, static_cast<std::uint64_t>(n),
                            static_cast<std::uint64_t>(trial)});
}

std::vector<std::string> methods_of(const ExperimentConfig& c) {
  return c.methods.empty() ? default_methods(c.kind) : c.methods;
}

BenchResult merge(const ExperimentConfig& c, std::vector<JobOutput> outputs) {
  const auto methods = methods_of(c);
  auto rank = [&](const std::string& label) {
    const std::string base = label.substr(0, label.find(':'));
    return std::find(methods.begin(), methods.end(), base) - methods.begin();
  };
  BenchResult res;
  for (auto& o : outputs) {
    for (auto& r : o.records) res.records.push_back(std::move(r));
    for (auto& f : o.failures) res.failures.push_back(std::move(f));
  }
  auto key = [&](const std::string& m, int n, int t) { return std::make_tuple(rank(m), m, n, t); };
  std::stable_sort(res.records.begin(), res.records.end(), [&](const ResultRecord& a, const ResultRecord& b) {
    return key(a.method, a.n, a.trial) < key(b.method, b.n, b.trial);
  });
  std::stable_sort(res.failures.begin(), res.failures.end(), [&](const TrialFailure& a, const TrialFailure& b) {
    return key(a.method, a.n, a.trial) < key(b.method, b.n, b.trial);
  });
  return res;
}

TrialFailure failure(const std::string& label, const Job& j, const std::exception& e) {
  TrialFailure f;
  f.method = label;
  f.n = j.n;
  f.trial = j.trial;
  f.message = e.what();
  if (const auto* inf = dynamic_cast<const InfeasibleError*>(&e)) {
    f.infeasible = true;
    f.retries = inf->retries();
  }
  return f;
}

TestFunctionSet nystrom_functions(const KernelSpec& spec, const MeasureSpec& mu, const EmbeddingCache& cache,
                                  int n, int landmarks, std::uint64_t seed) {
  if (n <= 1) return TestFunctionSet::empty();
  Rng rng(seed);
  PointSet z = mu.sample(static_cast<std::size_t>(landmarks), rng);
  auto map = std::make_shared<const NystromFeatureMap>(nystrom_fit(spec, std::move(z), n - 1));
  return TestFunctionSet::nystrom(map, &cache);
}

// ---------------------------------------------------------------------------

JobOutput sobolev_job(const ExperimentConfig& c, const Job& j) {
  JobOutput out;
  const std::string label = j.method + ":r" + std::to_string(j.r);
  const std::uint64_t seed = trial_seed(c.seed, j.method, static_cast<std::uint64_t>(j.r), j.n, j.trial);
  const KernelSpec spec = KernelSpec::periodic_sobolev(j.r);
  const MeasureSpec mu = MeasureSpec::uniform01();
  const int big_n = c.effective_sample_multiplier() * j.n;
  try {
    const EmbeddingCache cache(spec, mu);
    QuadratureRule rule;
    int retries = 0;
    const auto t0 = Clock::now();
    if (j.method == "mercer" || j.method == "mercer_psi") {
      Meta1Options opts;
      opts.max_retries = c.max_retries;
      if (j.method == "mercer_psi") opts.objective = Meta1Objective::PsiN;
      const auto tfs = TestFunctionSet::mercer(sobolev_mercer_basis(j.r, j.n - 1));
      auto res = kq_meta1(spec, mu, tfs, j.n, big_n, seed, opts);
      rule = std::move(res.rule);
      retries = res.retries;
    } else if (j.method == "mercer_recomb") {
      const auto tfs = TestFunctionSet::mercer(sobolev_mercer_basis(j.r, j.n - 1));
      rule = kq_meta2(spec, mu, tfs, j.n, big_n, seed).rule;
    } else if (j.method == "nystrom") {
      const int l = c.effective_landmark_multiplier() * j.n;
      const auto tfs = nystrom_functions(spec, mu, cache, j.n, l, derive_seed(seed, {1}));
      Meta1Options opts;
      opts.max_retries = c.max_retries;
      auto res = kq_meta1(spec, mu, tfs, j.n, big_n, derive_seed(seed, {2}), opts);
      rule = std::move(res.rule);
      retries = res.retries;
    } else if (j.method == "monte_carlo") {
      rule = monte_carlo(mu, j.n, seed);
    } else if (j.method == "iid_bayes") {
      rule = iid_bayes(cache, j.n, seed);
    } else if (j.method == "uniform_grid") {
      rule = uniform_grid(j.n);
    } else {
      throw std::invalid_argument("unknown method " + j.method);
    }
    ResultRecord rec;
    rec.runtime_ms = elapsed_ms(t0);
    rule.validate();
    rec.method = label;
    rec.n = j.n;
    rec.trial = j.trial;
    rec.retries = retries;
    rec.wce_sq = wce_squared(rule, cache).wce_squared;
    const double m = integrate(rule, [](const Point& x) { return x[0]; }) - 0.5;
    rec.err_mean_sq = m * m;
    rec.err_oom_sq = std::numeric_limits<double>::quiet_NaN();  // needs two coordinates
    out.records.push_back(rec);
  } catch (const std::exception& e) {
    out.failures.push_back(failure(label, j, e));
  }
  return out;
}

// ---------------------------------------------------------------------------

ResultRecord dataset_record(const std::string& method, const Job& j, const QuadratureRule& rule,
                            const DatasetContext& ctx, double runtime_ms, int retries) {
  rule.validate();
  ResultRecord rec;
  rec.method = method;
  rec.n = j.n;
  rec.trial = j.trial;
  rec.runtime_ms = runtime_ms;
  rec.retries = retries;
  rec.wce_sq = wce_squared(rule, *ctx.cache).wce_squared;
  const int d = static_cast<int>(ctx.points.front().size());
  const double em = integrate(rule, [d](const Point& x) { return x[d - 1]; }) - ctx.mean_last;
  const double eo = integrate(rule, [d](const Point& x) { return out_of_model_integrand(x, d); }) - ctx.mean_oom;
  rec.err_mean_sq = em * em;
  rec.err_oom_sq = eo * eo;
  return rec;
}

BuiltRule build_rule(const ExperimentConfig& c, const DatasetContext& ctx, const std::string& method, int n,
                     std::uint64_t seed) {
  const EmbeddingCache& cache = *ctx.cache;
  const MeasureSpec& mu = cache.measure();
  const KernelSpec& spec = ctx.kernel;
  const int big_n = c.effective_sample_multiplier() * n;
  const int l = c.effective_landmark_multiplier() * n;
  BuiltRule out;
  if (method == "nystrom" || method == "nystrom_psi" || method == "n_reweight") {
    const auto tfs = nystrom_functions(spec, mu, cache, n, l, derive_seed(seed, {1}));
    Meta1Options opts;
    opts.max_retries = c.max_retries;
    if (method == "nystrom_psi") opts.objective = Meta1Objective::PsiN;
    auto res = kq_meta1(spec, mu, tfs, n, big_n, derive_seed(seed, {2}), opts);
    out.retries = res.retries;
    out.rule = method == "n_reweight" ? n_reweight(cache, res.rule.nodes) : std::move(res.rule);
  } else if (method == "nystrom_recomb") {
    const auto tfs = nystrom_functions(spec, mu, cache, n, l, derive_seed(seed, {1}));
    out.rule = kq_meta2(spec, mu, tfs, n, big_n, derive_seed(seed, {2})).rule;
  } else if (method == "monte_carlo") {
    out.rule = monte_carlo(mu, n, seed);
  } else if (method == "iid_bayes") {
    out.rule = iid_bayes(cache, n, seed);
  } else if (method == "herding") {
    out.rule = herding(cache, n);
  } else {
    throw std::invalid_argument("unknown method " + method);
  }
  return out;
}

JobOutput dataset_job(const ExperimentConfig& c, const DatasetContext& ctx, const Job& j) {
  JobOutput out;
  const std::uint64_t family = hash_string(ctx.kernel.name());
  const std::uint64_t seed = trial_seed(c.seed, j.method, family, j.n, j.trial);
  const EmbeddingCache& cache = *ctx.cache;
  const MeasureSpec& mu = cache.measure();
  const KernelSpec& spec = ctx.kernel;
  const int big_n = c.effective_sample_multiplier() * j.n;
  const int l = c.effective_landmark_multiplier() * j.n;
  std::string current = j.method;
  try {
    if (j.method == "nystrom" || j.method == "nystrom_psi") {
      const auto t0 = Clock::now();
      const auto tfs = nystrom_functions(spec, mu, cache, j.n, l, derive_seed(seed, {1}));
      Meta1Options opts;
      opts.max_retries = c.max_retries;
      if (j.method == "nystrom_psi") opts.objective = Meta1Objective::PsiN;
      auto res = kq_meta1(spec, mu, tfs, j.n, big_n, derive_seed(seed, {2}), opts);
      const double t_build = elapsed_ms(t0);
      if (j.emit_primary) out.records.push_back(dataset_record(j.method, j, res.rule, ctx, t_build, res.retries));
      if (j.emit_reweight) {
        current = "n_reweight";
        const auto t1 = Clock::now();
        const QuadratureRule rw = n_reweight(cache, res.rule.nodes);
        out.records.push_back(dataset_record("n_reweight", j, rw, ctx, t_build + elapsed_ms(t1), res.retries));
      }
      return out;
    }
    const auto t0 = Clock::now();
    const BuiltRule built = build_rule(c, ctx, j.method, j.n, seed);
    out.records.push_back(dataset_record(j.method, j, built.rule, ctx, elapsed_ms(t0), built.retries));
  } catch (const std::exception& e) {
    if (current != j.method) {
      out.failures.push_back(failure(current, j, e));
    } else {
      if (j.emit_primary) out.failures.push_back(failure(j.method, j, e));
      if (j.emit_reweight) out.failures.push_back(failure("n_reweight", j, e));
    }
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

BenchResult run_sobolev_bench(const ExperimentConfig& config) {
  ExperimentConfig c = config;
  c.kind = ExperimentKind::Sobolev;
  c.validate();
  std::vector<Job> jobs;
  for (const auto& m : methods_of(c)) {
    for (const int r : c.r_list) {
      for (const int n : c.n_list) {
        for (int t = 0; t < c.trials; ++t) jobs.push_back({m, r, n, t});
      }
    }
  }
  return merge(c, run_pool(jobs, c.threads, [&](const Job& j) { return sobolev_job(c, j); }));
}

PointSet load_raw_dataset(const ExperimentConfig& config) {
  PointSet raw = config.data_path.empty()
                     ? synthetic_gaussian_mixture(config.synthetic_points, config.synthetic_dim, 0)
                     : load_dataset_csv(config.data_path, config.csv);
  if (config.subsample < 1.0) {
    const auto keep = static_cast<std::size_t>(std::floor(config.subsample * static_cast<double>(raw.size())));
    raw = random_subset(raw, std::max<std::size_t>(keep, 2), derive_seed(config.seed, {hash_string("subsample")}));
  }
  return raw;
}

DatasetContext prepare_dataset(const ExperimentConfig& config) {
  return prepare_dataset(config, normalize_dataset(load_raw_dataset(config)));
}

DatasetContext prepare_dataset(const ExperimentConfig& config, PointSet points) {
  if (points.size() < 2) throw std::invalid_argument("dataset needs at least 2 points");
  const int d = static_cast<int>(points.front().size());
  if (d < 2) throw std::invalid_argument("dataset needs at least 2 coordinates");
  DatasetContext ctx;
  double lambda = 0.0;
  if (config.lambda) {
    lambda = *config.lambda;
  } else {
    const PointSet sub = random_subset(points, config.median_points, derive_seed(config.seed, {hash_string("median")}));
    lambda = median_heuristic(sub);
  }
  ctx.kernel = config.kernel == "rq" ? KernelSpec::rational_quadratic(lambda) : KernelSpec::gaussian(lambda);
  long double ml = 0.0L;
  long double mo = 0.0L;
  for (const auto& p : points) {
    ml += p[d - 1];
    mo += out_of_model_integrand(p, d);
  }
  ctx.mean_last = static_cast<double>(ml / points.size());
  ctx.mean_oom = static_cast<double>(mo / points.size());
  ctx.cache = std::make_shared<const EmbeddingCache>(ctx.kernel,
                                                     MeasureSpec::discrete(DiscreteMeasure::uniform(points)));
  ctx.points = std::move(points);
  return ctx;
}

BenchResult run_dataset_bench(const ExperimentConfig& config) {
  ExperimentConfig c = config;
  c.kind = ExperimentKind::Dataset;
  c.validate();
  return run_dataset_bench(c, prepare_dataset(c));
}

BenchResult run_dataset_bench(const ExperimentConfig& config, const DatasetContext& context) {
  ExperimentConfig c = config;
  c.kind = ExperimentKind::Dataset;
  c.validate();
  const auto methods = methods_of(c);
  const bool has = std::find(methods.begin(), methods.end(), "nystrom") != methods.end();
  const bool rew = std::find(methods.begin(), methods.end(), "n_reweight") != methods.end();
  std::vector<Job> jobs;
  for (const auto& m : methods) {
    if (m == "n_reweight" && has) continue;  // produced by the Nystrom job of the same trial
    for (const int n : c.n_list) {
      for (int t = 0; t < c.trials; ++t) {
        Job j{m, 0, n, t};
        if (m == "n_reweight") {
          j.method = "nystrom";
          j.emit_primary = false;
          j.emit_reweight = true;
        } else if (m == "nystrom") {
          j.emit_reweight = rew;
        }
        jobs.push_back(j);
      }
    }
  }
  return merge(c, run_pool(jobs, c.threads, [&](const Job& j) { return dataset_job(c, context, j); }));
}

BuiltRule build_dataset_rule(const ExperimentConfig& config, const DatasetContext& context,
                             const std::string& method, int n, int trial) {
  // n_reweight shares the Nystrom stream of its trial.
  const std::string stream = method == "n_reweight" ? "nystrom" : method;
  const std::uint64_t seed = trial_seed(config.seed, stream, hash_string(context.kernel.name()), n, trial);
  return build_rule(config, context, method, n, seed);
}

// ---------------------------------------------------------------------------

std::vector<AggregateRow> aggregate(const std::vector<ResultRecord>& records) {
  std::vector<AggregateRow> rows;
  std::map<std::pair<std::string, int>, std::size_t> where;
  for (const auto& r : records) {
    const auto key = std::make_pair(r.method, r.n);
    auto it = where.find(key);
    if (it == where.end()) {
      it = where.emplace(key, rows.size()).first;
      AggregateRow row;
      row.method = r.method;
      row.n = r.n;
      rows.push_back(row);
    }
    AggregateRow& row = rows[it->second];
    ++row.count;
    row.wce_sq += r.wce_sq;
    row.err_mean_sq += r.err_mean_sq;
    row.err_oom_sq += r.err_oom_sq;
    row.runtime_ms += r.runtime_ms;
    row.retries += r.retries;
  }
  for (auto& row : rows) {
    const double k = row.count;
    row.wce_sq /= k;
    row.err_mean_sq /= k;
    row.err_oom_sq /= k;
    row.runtime_ms /= k;
    row.retries /= k;
  }
  return rows;
}

std::string aggregate_path(const std::string& out_path) {
  const auto slash = out_path.find_last_of('/');
  const auto dot = out_path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return out_path + "_aggregate";
  return out_path.substr(0, dot) + "_aggregate" + out_path.substr(dot);
}

void emit_results(const std::vector<ResultRecord>& records, const std::string& out_path) {
  std::FILE* f = std::fopen(out_path.c_str(), "w");
  if (f == nullptr) throw std::runtime_error("cannot write " + out_path);
  std::fputs("method,n,trial,wce_sq,err_mean_sq,err_oom_sq,runtime_ms,retries\n", f);
  for (const auto& r : records) {
    std::fprintf(f, "%s,%d,%d,%.17g,%.17g,%.17g,%.3f,%d\n", r.method.c_str(), r.n, r.trial, r.wce_sq,
                 r.err_mean_sq, r.err_oom_sq, r.runtime_ms, r.retries);
  }
  if (std::fclose(f) != 0) throw std::runtime_error("cannot write " + out_path);

  const std::string agg = aggregate_path(out_path);
  f = std::fopen(agg.c_str(), "w");
  if (f == nullptr) throw std::runtime_error("cannot write " + agg);
  std::fputs("method,n,trials,wce_sq,err_mean_sq,err_oom_sq,runtime_ms,retries\n", f);
  for (const auto& r : aggregate(records)) {
    std::fprintf(f, "%s,%d,%d,%.17g,%.17g,%.17g,%.3f,%.17g\n", r.method.c_str(), r.n, r.count, r.wce_sq,
                 r.err_mean_sq, r.err_oom_sq, r.runtime_ms, r.retries);
  }
  if (std::fclose(f) != 0) throw std::runtime_error("cannot write " + agg);
}

}  // namespace kquad
