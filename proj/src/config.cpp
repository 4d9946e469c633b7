#include "kquad/bench.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace kquad {

namespace {

const std::vector<std::string> kSobolevMethods = {"mercer",    "mercer_psi", "mercer_recomb", "nystrom",
                                                  "monte_carlo", "iid_bayes", "uniform_grid"};
const std::vector<std::string> kDatasetMethods = {"nystrom",     "n_reweight", "nystrom_psi", "nystrom_recomb",
                                                  "monte_carlo", "iid_bayes",  "herding"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <class T>
T parse_number(const std::string& key, const std::string& v) {
  T out{};
  const std::string t = trim(v);
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw std::invalid_argument("config key '" + key + "': cannot parse '" + v + "'");
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  for (const auto& item : split_list(v)) out.push_back(parse_number<int>(key, item));
  if (out.empty()) throw std::invalid_argument("config key '" + key + "': empty list");
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw std::invalid_argument("config key '" + key + "': expected a boolean, got '" + v + "'");
}

}  // namespace

std::vector<std::string> default_methods(ExperimentKind kind) {
  if (kind == ExperimentKind::Sobolev) return {"mercer", "nystrom", "monte_carlo", "iid_bayes", "uniform_grid"};
  return {"nystrom", "n_reweight", "monte_carlo", "iid_bayes", "herding"};
}

int ExperimentConfig::effective_sample_multiplier() const {
  if (sample_multiplier > 0) return sample_multiplier;
  return kind == ExperimentKind::Sobolev ? 10 : 20;
}

int ExperimentConfig::effective_landmark_multiplier() const {
  if (landmark_multiplier > 0) return landmark_multiplier;
  return kind == ExperimentKind::Sobolev ? 10 : effective_sample_multiplier();
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw std::invalid_argument("trials must be at least 1");
  if (n_list.empty()) throw std::invalid_argument("n list is empty");
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] < 1) throw std::invalid_argument("n values must be positive");
    if (i > 0 && n_list[i] <= n_list[i - 1]) throw std::invalid_argument("n values must be strictly ascending");
  }
  if (sample_multiplier < 0 || landmark_multiplier < 0) throw std::invalid_argument("multipliers must be >= 1");
  if (max_retries < 0) throw std::invalid_argument("max_retries must be nonnegative");
  if (threads < 0) throw std::invalid_argument("threads must be nonnegative");
  const auto& allowed = kind == ExperimentKind::Sobolev ? kSobolevMethods : kDatasetMethods;
  for (const auto& m : methods) {
    if (std::find(allowed.begin(), allowed.end(), m) == allowed.end()) {
      throw std::invalid_argument("unknown method '" + m + "' for this experiment");
    }
  }
  if (kind == ExperimentKind::Sobolev) {
    if (r_list.empty()) throw std::invalid_argument("r list is empty");
    for (const int r : r_list) {
      if (r < 1 || r > 3) throw std::invalid_argument("r must be in {1,2,3}");
    }
  } else {
    if (kernel != "gaussian" && kernel != "rq") throw std::invalid_argument("kernel must be gaussian or rq");
    if (lambda && !(*lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
    if (!(subsample > 0.0 && subsample <= 1.0)) throw std::invalid_argument("subsample must lie in (0, 1]");
    if (median_points < 2) throw std::invalid_argument("median_points must be at least 2");
    if (data_path.empty() && (synthetic_points < 2 || synthetic_dim < 2)) {
      throw std::invalid_argument("synthetic data needs at least 2 points and 2 dimensions");
    }
    if (csv.columns.empty()) throw std::invalid_argument("empty column selection");
  }
}

void set_config_value(ExperimentConfig& c, const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (key == "experiment") {
    if (v == "sobolev") {
      c.kind = ExperimentKind::Sobolev;
    } else if (v == "dataset") {
      c.kind = ExperimentKind::Dataset;
    } else {
      throw std::invalid_argument("config key 'experiment': expected sobolev or dataset");
    }
  } else if (key == "r") {
    c.r_list = parse_int_list(key, v);
  } else if (key == "n") {
    c.n_list = parse_int_list(key, v);
  } else if (key == "trials") {
    c.trials = parse_number<int>(key, v);
  } else if (key == "seed") {
    c.seed = parse_number<std::uint64_t>(key, v);
  } else if (key == "methods") {
    c.methods = split_list(v);
  } else if (key == "sample_multiplier") {
    c.sample_multiplier = parse_number<int>(key, v);
  } else if (key == "landmark_multiplier") {
    c.landmark_multiplier = parse_number<int>(key, v);
  } else if (key == "max_retries") {
    c.max_retries = parse_number<int>(key, v);
  } else if (key == "threads") {
    c.threads = parse_number<int>(key, v);
  } else if (key == "kernel") {
    c.kernel = v;
  } else if (key == "lambda") {
    if (v == "auto" || v.empty()) {
      c.lambda.reset();
    } else {
      c.lambda = parse_number<double>(key, v);
    }
  } else if (key == "median_points") {
    c.median_points = parse_number<std::size_t>(key, v);
  } else if (key == "data") {
    c.data_path = v;
  } else if (key == "cols") {
    c.csv.columns = parse_int_list(key, v);
  } else if (key == "delimiter") {
    if (v.size() != 1) throw std::invalid_argument("config key 'delimiter': expected one character");
    c.csv.delimiter = v[0];
  } else if (key == "skip_header") {
    c.csv.skip_header = parse_bool(key, v);
  } else if (key == "subsample") {
    c.subsample = parse_number<double>(key, v);
  } else if (key == "synthetic_points") {
    c.synthetic_points = parse_number<std::size_t>(key, v);
  } else if (key == "synthetic_dim") {
    c.synthetic_dim = parse_number<int>(key, v);
  } else if (key == "out") {
    c.out = v;
  } else {
    throw std::invalid_argument("unknown config key '" + key + "'");
  }
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig c;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    }
    try {
      set_config_value(c, trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace kquad
