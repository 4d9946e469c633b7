// Acceptance suite: one PASS/FAIL line per criterion.
// usage: kquad_acceptance <path to kquad> <configs dir> <scratch dir>

#include "kquad/baselines.hpp"
#include "kquad/bench.hpp"
#include "kquad/quadrature.hpp"
#include "kquad/recombination.hpp"
#include "kquad/seed.hpp"
#include "kquad/solvers.hpp"
#include "kquad/spectral.hpp"

#include "oracles.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace kquad;

namespace {

// Tolerances and budgets.
constexpr double kGridRelTol = 1e-9;
constexpr double kGridSeconds = 5.0;
constexpr double kMcStdErrors = 4.0;
constexpr double kMcSeconds = 30.0;
constexpr double kSweepSeconds = 120.0;
constexpr double kMeta1Residual = 1e-9;
constexpr double kMeta2Relative = 1e-10;
constexpr double kOrderingSlack = 1e-9;
constexpr double kMomentTol = 1e-10;
constexpr double kRuntimeRatio = 1.5;
constexpr double kGridFactor = 10.0;
constexpr double kDatasetSeconds = 600.0;
constexpr double kLpGap = 1e-8;
constexpr double kKktTol = 1e-7;
constexpr double kEigTol = 1e-8;

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct CsvRow {
  std::string method;
  int n = 0;
  int trial = 0;
  double wce_sq = 0.0;
};

std::vector<CsvRow> read_results(const std::string& path) {
  std::ifstream in(path);
  std::vector<CsvRow> out;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string field;
    CsvRow r;
    std::getline(ss, r.method, ',');
    std::getline(ss, field, ',');
    r.n = std::stoi(field);
    std::getline(ss, field, ',');
    r.trial = std::stoi(field);
    std::getline(ss, field, ',');
    r.wce_sq = std::stod(field);
    out.push_back(r);
  }
  return out;
}

int run_command(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  if (status == -1) return -1;
  return WEXITSTATUS(status);
}

std::string tfs_label(int r) { return ":r" + std::to_string(r); }

// --------------------------------------------------------------------------

Outcome criterion1(const std::string& kquad, const std::filesystem::path& scratch) {
  Outcome o;
  const std::string out = (scratch / "grid.csv").string();
  const auto t0 = Clock::now();
  const int code = run_command("\"" + kquad + "\" sobolev --r 1,2,3 --n 5,10,20,40,80 --trials 1 --methods uniform_grid --out \"" +
                               out + "\" 2>/dev/null");
  const double secs = seconds_since(t0);
  if (code != 0) return {false, "kquad exited with " + std::to_string(code)};
  const auto rows = read_results(out);
  double worst = 0.0;
  double worst_oracle = 0.0;
  for (const auto& row : rows) {
    const int r = row.method.back() - '0';
    const double analytic = 2.0 * oracle::zeta_even(2 * r) * std::pow(row.n, -2.0 * r);
    worst = std::max(worst, std::abs(row.wce_sq - analytic) / analytic);
    // 10^4-term expansion; the omitted grid terms sum to at most
    // 2 sum_{k > 10^4/n} (k n)^{-2r} <= 2 n^{-2r} (n / 10^4)^{2r-1} / (2r-1)
    const double expansion = oracle::sobolev_wce_expansion(uniform_grid(row.n), r, 10000);
    const double omitted = 2.0 * std::pow(row.n, -2.0 * r) * std::pow(row.n / 1e4, 2.0 * r - 1.0) / (2.0 * r - 1.0);
    worst_oracle = std::max(worst_oracle, std::max(0.0, (row.wce_sq - expansion) - omitted) / analytic);
    if (row.wce_sq < expansion - 1e-15) worst_oracle = std::max(worst_oracle, (expansion - row.wce_sq) / analytic);
  }
  o.pass = rows.size() == 15 && worst <= kGridRelTol && worst_oracle <= kGridRelTol && secs < kGridSeconds;
  o.detail = "rows=" + std::to_string(rows.size()) + " max rel err " + fmt("%.2e", worst) + ", expansion oracle " +
             fmt("%.2e", worst_oracle) + ", " + fmt("%.2f", secs) + " s";
  return o;
}

Outcome criterion2() {
  ExperimentConfig c;
  c.methods = {"monte_carlo"};
  c.r_list = {1};
  c.n_list = {10};
  c.trials = 500;
  c.seed = 2;
  const auto t0 = Clock::now();
  const auto res = run_sobolev_bench(c);
  const double secs = seconds_since(t0);
  double mean = 0.0;
  for (const auto& r : res.records) mean += r.wce_sq;
  mean /= static_cast<double>(res.records.size());
  double var = 0.0;
  for (const auto& r : res.records) var += (r.wce_sq - mean) * (r.wce_sq - mean);
  const double se = std::sqrt(var / static_cast<double>(res.records.size() - 1) / static_cast<double>(res.records.size()));
  const double target = std::numbers::pi * std::numbers::pi / 30.0;
  const double z = std::abs(mean - target) / se;
  Outcome o;
  o.pass = res.records.size() == 500 && z <= kMcStdErrors && secs < kMcSeconds;
  o.detail = "mean " + fmt("%.5f", mean) + " vs " + fmt("%.5f", target) + ", " + fmt("%.2f", z) + " SE, " +
             fmt("%.2f", secs) + " s";
  return o;
}

struct Sweep {
  BenchResult result;
  double seconds = 0.0;
};

Sweep mercer_sweep() {
  ExperimentConfig c;
  c.methods = {"mercer", "mercer_psi"};
  c.r_list = {1, 2, 3};
  c.n_list = {5, 10, 20, 40, 80};
  c.trials = 10;
  c.seed = 3;
  Sweep s;
  const auto t0 = Clock::now();
  s.result = run_sobolev_bench(c);
  s.seconds = seconds_since(t0);
  return s;
}

Outcome criterion3(const Sweep& s) {
  int checked = 0;
  int violations = 0;
  for (const auto& rec : s.result.records) {
    if (rec.method.rfind("mercer:", 0) != 0) continue;
    const int r = rec.method.back() - '0';
    const double bound = 2.0 * std::numbers::sqrt2 * std::sqrt(mercer_tail_sum(r, rec.n));
    ++checked;
    if (!(std::sqrt(rec.wce_sq) <= bound)) ++violations;
  }
  int failed = 0;
  for (const auto& f : s.result.failures) failed += f.method.rfind("mercer:", 0) == 0 ? 1 : 0;
  Outcome o;
  o.pass = violations == 0 && checked + failed == 150 && failed == 0 && s.seconds < kSweepSeconds;
  o.detail = std::to_string(checked) + " rules, " + std::to_string(violations) + " violations, " +
             std::to_string(failed) + " failed trials, sweep " + fmt("%.1f", s.seconds) + " s";
  return o;
}

Outcome criterion4(const Sweep& s) {
  int checked = 0;
  int violations = 0;
  for (const auto& rec : s.result.records) {
    if (rec.method.rfind("mercer_psi:", 0) != 0) continue;
    const int r = rec.method.back() - '0';
    const double bound = 2.0 * std::sqrt(mercer_tail_sum(r, rec.n));
    ++checked;
    if (!(std::sqrt(rec.wce_sq) <= bound)) ++violations;
  }
  int infeasible = 0;
  for (const auto& f : s.result.failures) infeasible += f.method.rfind("mercer_psi:", 0) == 0 ? 1 : 0;
  Outcome o;
  o.pass = violations == 0 && checked > 0;
  o.detail = std::to_string(checked) + " feasible trials, " + std::to_string(violations) + " violations, " +
             std::to_string(infeasible) + " infeasible";
  return o;
}

Outcome criterion5() {
  double worst1 = 0.0;
  double worst2 = 0.0;
  bool support_ok = true;
  int rules = 0;
  const auto mu = MeasureSpec::uniform01();
  auto residual = [](const TestStack& st, const QuadratureRule& rule, const Eigen::VectorXd& target) {
    Eigen::VectorXd got = Eigen::VectorXd::Zero(st.dim());
    for (std::size_t i = 0; i < rule.size(); ++i) got += rule.weights[static_cast<Eigen::Index>(i)] * st(rule.nodes[i]);
    return (got - target).cwiseAbs().maxCoeff();
  };
  for (int r = 1; r <= 3; ++r) {
    const auto spec = KernelSpec::periodic_sobolev(r);
    for (int n : {5, 10, 20, 40, 80}) {
      const auto tfs = TestFunctionSet::mercer(sobolev_mercer_basis(r, n - 1));
      const TestStack st(tfs);
      for (int t = 0; t < 3; ++t) {
        const std::uint64_t seed = derive_seed(5, {static_cast<std::uint64_t>(r), static_cast<std::uint64_t>(n),
                                                   static_cast<std::uint64_t>(t)});
        for (const auto obj : {Meta1Objective::Feasibility, Meta1Objective::PsiN}) {
          const auto m1 = kq_meta1(spec, mu, tfs, n, 10 * n, seed, {obj, 50});
          worst1 = std::max(worst1, residual(st, m1.rule, *st.target()));
          support_ok = support_ok && m1.rule.size() <= static_cast<std::size_t>(n);
          ++rules;
        }
        const auto m2 = kq_meta2(spec, mu, tfs, n, 10 * n, seed);
        const Eigen::VectorXd emp = st.empirical_target(m2.candidates);
        worst2 = std::max(worst2, residual(st, m2.rule, emp) / (1.0 + emp.cwiseAbs().maxCoeff()));
        support_ok = support_ok && m2.rule.size() <= static_cast<std::size_t>(n);
        ++rules;
      }
    }
  }
  // Nystrom test functions on a discrete measure
  std::mt19937_64 g(55);
  std::normal_distribution<double> nd;
  PointSet atoms;
  for (int i = 0; i < 2000; ++i) {
    Point p(3);
    p << nd(g), nd(g), nd(g);
    atoms.push_back(p);
  }
  const auto gk = KernelSpec::gaussian(1.0);
  const auto dmu = MeasureSpec::discrete(DiscreteMeasure::uniform(atoms));
  const EmbeddingCache cache(gk, dmu);
  for (int n : {5, 10, 20, 40}) {
    for (int t = 0; t < 3; ++t) {
      Rng rng(derive_seed(6, {static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(t)}));
      auto map = std::make_shared<const NystromFeatureMap>(nystrom_fit(gk, dmu.sample(static_cast<std::size_t>(20 * n), rng), n - 1));
      const auto tfs = TestFunctionSet::nystrom(map, &cache);
      const TestStack st(tfs);
      const auto m1 = kq_meta1(gk, dmu, tfs, n, 20 * n, derive_seed(7, {static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(t)}));
      worst1 = std::max(worst1, residual(st, m1.rule, *st.target()));
      const auto m2 = kq_meta2(gk, dmu, tfs, n, 20 * n, derive_seed(8, {static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(t)}));
      const Eigen::VectorXd emp = st.empirical_target(m2.candidates);
      worst2 = std::max(worst2, residual(st, m2.rule, emp) / (1.0 + emp.cwiseAbs().maxCoeff()));
      support_ok = support_ok && m1.rule.size() <= static_cast<std::size_t>(n) && m2.rule.size() <= static_cast<std::size_t>(n);
      rules += 2;
    }
  }
  Outcome o;
  o.pass = worst1 <= kMeta1Residual && worst2 <= kMeta2Relative && support_ok;
  o.detail = std::to_string(rules) + " rules, meta-1 residual " + fmt("%.2e", worst1) + ", meta-2 relative " +
             fmt("%.2e", worst2) + (support_ok ? ", supports <= n" : ", support bound violated");
  return o;
}

Outcome criterion6() {
  std::mt19937_64 g(66);
  std::normal_distribution<double> nd;
  PointSet atoms;
  for (int i = 0; i < 1000; ++i) {
    Point p(2);
    p << nd(g), nd(g);
    atoms.push_back(p);
  }
  const auto gk = KernelSpec::gaussian(median_heuristic(atoms));
  const EmbeddingCache cache(gk, MeasureSpec::discrete(DiscreteMeasure::uniform(atoms)));
  std::uniform_int_distribution<int> size(2, 30);
  int bad = 0;
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const int n = size(g);
    std::vector<std::size_t> idx(atoms.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::shuffle(idx.begin(), idx.end(), g);
    PointSet nodes;
    Eigen::VectorXd z(n);
    for (int i = 0; i < n; ++i) {
      nodes.push_back(atoms[idx[static_cast<std::size_t>(i)]]);
      z[i] = cache.atom_embedding(idx[static_cast<std::size_t>(i)]);
    }
    const double bayes = std::sqrt(wce_squared(bayes_weights(gk, nodes, z), cache).wce_squared);
    const double nr = std::sqrt(wce_squared(n_reweight(cache, nodes), cache).wce_squared);
    const double eq = std::sqrt(wce_squared(make_equal_weight_rule(nodes), cache).wce_squared);
    worst = std::max({worst, bayes - nr, nr - eq});
    if (!(bayes <= nr + kOrderingSlack && nr <= eq + kOrderingSlack)) ++bad;
  }
  Outcome o;
  o.pass = bad == 0;
  o.detail = "100 node sets, " + std::to_string(bad) + " violations, largest excess " + fmt("%.2e", worst);
  return o;
}

MomentSystem random_system(std::mt19937_64& g, int big_n, int n) {
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  MomentSystem s;
  s.features.resize(big_n, n - 1);
  for (int i = 0; i < big_n; ++i) {
    for (int j = 0; j < n - 1; ++j) s.features(i, j) = nd(g);
  }
  s.weights.resize(big_n);
  for (int i = 0; i < big_n; ++i) s.weights[i] = u(g);
  s.weights /= s.weights.sum();
  return s;
}

double moment_error(const MomentSystem& s, const std::vector<int>& idx, const Eigen::VectorXd& w) {
  Eigen::VectorXd target(s.features.cols() + 1);
  target[0] = s.weights.sum();
  target.tail(s.features.cols()) = s.features.transpose() * s.weights;
  Eigen::VectorXd got = Eigen::VectorXd::Zero(target.size());
  for (std::size_t k = 0; k < idx.size(); ++k) {
    got[0] += w[static_cast<Eigen::Index>(k)];
    got.tail(s.features.cols()) += w[static_cast<Eigen::Index>(k)] * s.features.row(idx[k]).transpose();
  }
  return (got - target).cwiseAbs().maxCoeff() / (1.0 + target.cwiseAbs().maxCoeff());
}

double median_recombine_seconds(int big_n, int n, int reps) {
  std::vector<double> t;
  for (int k = 0; k < reps; ++k) {
    std::mt19937_64 g(7000 + static_cast<unsigned>(k));
    const auto s = random_system(g, big_n, n);
    const auto t0 = Clock::now();
    const auto r = recombine(s);
    t.push_back(seconds_since(t0));
    if (r.indices.empty()) return -1.0;
  }
  std::sort(t.begin(), t.end());
  return t[t.size() / 2];
}

Outcome criterion7() {
  std::mt19937_64 g(77);
  std::uniform_int_distribution<int> nn(2, 40);
  double worst_rec = 0.0;
  double worst_lp = 0.0;
  bool support_ok = true;
  int lp_failures = 0;
  for (int t = 0; t < 200; ++t) {
    const int n = nn(g);
    std::uniform_int_distribution<int> bn(n, 2000);
    const auto s = random_system(g, bn(g), n);
    const auto rec = recombine(s);
    worst_rec = std::max(worst_rec, moment_error(s, rec.indices, rec.weights));
    StandardFormLP lp;
    lp.A.resize(n, s.features.rows());
    lp.A.row(0).setOnes();
    lp.A.bottomRows(n - 1) = s.features.transpose();
    lp.b = lp.A * s.weights;
    const auto res = lp_bfs_solve(lp, fast_simplex_options());
    if (!res.ok()) {
      ++lp_failures;
      continue;
    }
    worst_lp = std::max(worst_lp, moment_error(s, res.solution.support, res.solution.weights));
    support_ok = support_ok && rec.indices.size() <= static_cast<std::size_t>(n) &&
                 res.solution.support.size() <= static_cast<std::size_t>(n);
  }
  median_recombine_seconds(500, 40, 3);  // warm-up
  const double t1 = median_recombine_seconds(1000, 40, 15);
  const double t2 = median_recombine_seconds(2000, 40, 15);
  const double ratio = t2 / t1;
  Outcome o;
  o.pass = worst_rec <= kMomentTol && worst_lp <= kMomentTol && support_ok && lp_failures == 0 && ratio <= kRuntimeRatio;
  o.detail = "recombination " + fmt("%.2e", worst_rec) + ", LP " + fmt("%.2e", worst_lp) + ", runtime ratio N=1000->2000 at n=40 " +
             fmt("%.2f", ratio) + " (" + fmt("%.2f", t1 * 1e3) + " -> " + fmt("%.2f", t2 * 1e3) + " ms)";
  return o;
}

Outcome criterion8() {
  ExperimentConfig c;
  c.methods = {"mercer", "monte_carlo", "uniform_grid"};
  c.r_list = {2};
  c.n_list = {10, 20, 40, 80};
  c.trials = 50;
  c.seed = 8;
  const auto res = run_sobolev_bench(c);
  std::map<std::pair<std::string, int>, double> mean;
  for (const auto& row : aggregate(res.records)) mean[{row.method, row.n}] = row.wce_sq;
  bool below_mc = true;
  std::string detail;
  for (int n : c.n_list) {
    const double m = mean[{"mercer" + tfs_label(2), n}];
    const double mc = mean[{"monte_carlo" + tfs_label(2), n}];
    below_mc = below_mc && m < mc;
    detail += "n=" + std::to_string(n) + " " + fmt("%.2e", m) + "/" + fmt("%.2e", mc) + " ";
  }
  const double ratio = mean[{"mercer" + tfs_label(2), 80}] / mean[{"uniform_grid" + tfs_label(2), 80}];
  Outcome o;
  o.pass = below_mc && res.failures.empty() && ratio <= kGridFactor;
  o.detail = "mercer/mc " + detail + "; mercer/grid at n=80 " + fmt("%.2f", ratio);
  return o;
}

Outcome criterion9(const std::string& kquad, const std::filesystem::path& configs, const std::filesystem::path& scratch) {
  const std::string out = (scratch / "dataset.csv").string();
  const auto t0 = Clock::now();
  const int code = run_command("\"" + kquad + "\" dataset --config \"" + (configs / "dataset-synthetic.cfg").string() +
                               "\" --out \"" + out + "\" 2>/dev/null");
  const double secs = seconds_since(t0);
  if (code != 0) return {false, "kquad exited with " + std::to_string(code)};
  const auto rows = read_results(out);
  std::map<std::pair<std::string, int>, std::pair<double, int>> sums;
  std::map<std::pair<int, int>, double> nystrom;
  for (const auto& r : rows) {
    auto& s = sums[{r.method, r.n}];
    s.first += r.wce_sq;
    s.second += 1;
    if (r.method == "nystrom") nystrom[{r.n, r.trial}] = r.wce_sq;
  }
  int reweight_bad = 0;
  int reweight_checked = 0;
  for (const auto& r : rows) {
    if (r.method != "n_reweight") continue;
    ++reweight_checked;
    const auto it = nystrom.find({r.n, r.trial});
    if (it == nystrom.end() || !(r.wce_sq <= it->second + kOrderingSlack)) ++reweight_bad;
  }
  auto mean = [&](const std::string& m, int n) {
    const auto& s = sums[{m, n}];
    return s.second > 0 ? s.first / s.second : std::nan("");
  };
  const double ny = mean("nystrom", 160);
  const double mc = mean("monte_carlo", 160);
  Outcome o;
  o.pass = secs < kDatasetSeconds && ny < mc && reweight_bad == 0 && reweight_checked == 30 && sums[{"nystrom", 160}].second == 5;
  o.detail = fmt("%.1f", secs) + " s, n=160 nystrom " + fmt("%.2e", ny) + " vs monte carlo " + fmt("%.2e", mc) + ", n_reweight > nystrom in " +
             std::to_string(reweight_bad) + "/" + std::to_string(reweight_checked) + " trials";
  return o;
}

Outcome criterion10() {
  std::mt19937_64 g(1010);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> rows(1, 5);
  double worst_gap = 0.0;
  int lp_bad = 0;
  for (int t = 0; t < 500; ++t) {
    const int m = rows(g);
    std::uniform_int_distribution<int> cols(m, 12);
    const int n = cols(g);
    StandardFormLP lp;
    lp.A.resize(m, n);
    lp.A.row(0).setOnes();
    for (int i = 1; i < m; ++i) {
      for (int j = 0; j < n; ++j) lp.A(i, j) = nd(g);
    }
    Eigen::VectorXd w(n);
    for (int j = 0; j < n; ++j) w[j] = u(g) < 0.5 ? 0.0 : u(g);
    if (w.sum() == 0.0) w[0] = 1.0;
    w /= w.sum();
    lp.b = lp.A * w;
    lp.c.resize(n);
    for (int j = 0; j < n; ++j) lp.c[j] = nd(g);
    const auto ref = oracle::enumerate_vertices(lp.A, lp.b, lp.c);
    const auto res = lp_bfs_solve(lp);
    if (!ref || !res.ok() || static_cast<Eigen::Index>(res.solution.support.size()) > m) {
      ++lp_bad;
      continue;
    }
    worst_gap = std::max(worst_gap, std::abs(res.solution.objective - *ref));
  }

  double worst_kkt = 0.0;
  std::uniform_int_distribution<int> size(1, 40);
  for (int t = 0; t < 500; ++t) {
    const int n = size(g);
    std::uniform_int_distribution<int> rank(1, n);
    const bool deficient = t % 2 == 0;
    const Eigen::MatrixXd k = oracle::random_psd(n, deficient ? rank(g) : n + 3, g);
    Eigen::VectorXd z(n);
    for (int i = 0; i < n; ++i) z[i] = nd(g);
    if (deficient) z = k * z;
    const Eigen::VectorXd w = nnls_quadratic(k, z);
    const double scale = nnls_kkt_scale(k, z, w);
    const Eigen::VectorXd grad = k * w - z;
    for (int i = 0; i < n; ++i) {
      const double v = w[i] > 0.0 ? std::abs(grad[i]) : std::max(0.0, -grad[i]);
      worst_kkt = std::max(worst_kkt, v / scale);
      if (w[i] < 0.0) worst_kkt = std::max(worst_kkt, 1.0);
    }
  }

  double worst_eig = 0.0;
  std::uniform_int_distribution<int> dim(1, 50);
  for (int t = 0; t < 500; ++t) {
    const int n = dim(g);
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = nd(g);
    }
    const auto d = sym_eigendecomp(a);
    worst_eig = std::max(worst_eig, (d.vectors * d.values.asDiagonal() * d.vectors.transpose() - a).norm() / a.norm());
  }
  Outcome o;
  o.pass = lp_bad == 0 && worst_gap <= kLpGap && worst_kkt <= kKktTol && worst_eig <= kEigTol;
  o.detail = "simplex gap " + fmt("%.2e", worst_gap) + " (" + std::to_string(lp_bad) + " bad), NNLS KKT " +
             fmt("%.2e", worst_kkt) + ", eigen residual " + fmt("%.2e", worst_eig);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 4) {
    std::fprintf(stderr, "usage: %s <kquad> <configs dir> <scratch dir>\n", argv[0]);
    return 2;
  }
  const std::string kquad = argv[1];
  const std::filesystem::path configs = argv[2];
  const std::filesystem::path scratch = argv[3];
  std::filesystem::create_directories(scratch);

  int failed = 0;
  auto report = [&](int id, const std::function<Outcome()>& fn) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %2d: %s  %s\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  };

  report(1, [&] { return criterion1(kquad, scratch); });
  report(2, criterion2);
  Sweep sweep;
  try {
    sweep = mercer_sweep();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "sweep failed: %s\n", e.what());
  }
  report(3, [&] { return criterion3(sweep); });
  report(4, [&] { return criterion4(sweep); });
  report(5, criterion5);
  report(6, criterion6);
  report(7, criterion7);
  report(8, criterion8);
  report(9, [&] { return criterion9(kquad, configs, scratch); });
  report(10, criterion10);
  std::printf("%d of 10 criteria passed\n", 10 - failed);
  return failed == 0 ? 0 : 1;
}
