#include "weakminty/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace weakminty {

using nlohmann::json;

namespace {

std::string join_problems(const std::vector<std::string>& problems) {
  std::string out = "invalid configuration";
  for (const auto& p : problems) out += "\n  " + p;
  return out;
}

constexpr double kDefaultAlpha0 = 1.0 / 18.0;

// Collects field errors while walking a JSON object.
class Reader {
 public:
  Reader(const json& obj, std::string path, std::vector<std::string>& errors)
      : obj_(obj), path_(std::move(path)), errors_(errors) {}

  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  void error(const std::string& key, const std::string& msg) const { errors_.push_back(at(key) + ": " + msg); }
  bool has(const std::string& key) const { return obj_.contains(key); }
  const json& raw(const std::string& key) const { return obj_.at(key); }

  std::optional<double> number(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    const auto& v = obj_.at(key);
    if (!v.is_number()) {
      error(key, "expected a number");
      return std::nullopt;
    }
    return v.get<double>();
  }
  std::optional<std::uint64_t> count(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    const auto& v = obj_.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
      error(key, "expected a non-negative integer");
      return std::nullopt;
    }
    return v.get<std::uint64_t>();
  }
  std::optional<std::string> string(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    const auto& v = obj_.at(key);
    if (!v.is_string()) {
      error(key, "expected a string");
      return std::nullopt;
    }
    return v.get<std::string>();
  }
  void reject_unknown(std::initializer_list<const char*> known) const {
    for (const auto& [key, _] : obj_.items()) {
      if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; })) {
        error(key, "unknown field");
      }
    }
  }

 private:
  const json& obj_;
  std::string path_;
  std::vector<std::string>& errors_;
};

std::optional<Schedule> parse_schedule(const json& j, const std::string& path, std::vector<std::string>& errors) {
  if (!j.is_object()) {
    errors.push_back(path + ": expected an object");
    return std::nullopt;
  }
  Reader r(j, path, errors);
  r.reject_unknown({"kind", "alpha", "alpha0", "c", "r"});
  const auto kind = r.string("kind").value_or("harmonic");
  const double alpha0 = r.number("alpha0").value_or(kDefaultAlpha0);
  const double c = r.number("c").value_or(100.0);
  try {
    if (kind == "constant") return Schedule::constant(r.number("alpha").value_or(kDefaultAlpha0));
    if (kind == "harmonic") return Schedule::harmonic(alpha0, c);
    if (kind == "inverse-sqrt") return Schedule::inverse_sqrt(alpha0, c);
    if (kind == "robbins-monro") return Schedule::robbins_monro(r.number("r").value_or(2.0));
    r.error("kind", "unknown schedule '" + kind + "' (constant, harmonic, inverse-sqrt, robbins-monro)");
  } catch (const std::invalid_argument& e) {
    errors.push_back(path + ": " + e.what());
  }
  return std::nullopt;
}

double metric_value(const IterationRecord& rec, const std::string& metric) {
  if (metric == "fnorm") return std::sqrt(rec.fnorm_sq);
  if (metric == "fnorm_sq") return rec.fnorm_sq;
  if (metric == "dist") return std::sqrt(rec.dist_sq);
  if (metric == "dist_sq") return rec.dist_sq;
  if (metric == "residual") return rec.residual;
  if (metric == "explore_sq") return rec.explore_sq;
  throw std::invalid_argument("unknown metric: " + metric);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error(join_problems(problems)), problems_(std::move(problems)) {}

const std::vector<std::string>& metric_names() {
  static const std::vector<std::string> names{"fnorm", "fnorm_sq", "dist", "dist_sq", "residual", "explore_sq"};
  return names;
}

ExperimentConfig parse_experiment(const json& j, const std::string& path) {
  std::vector<std::string> errors;
  if (!j.is_object()) throw ConfigError({(path.empty() ? std::string("<root>") : path) + ": expected an object"});
  Reader r(j, path, errors);
  r.reject_unknown({"name", "problem", "sigma", "gamma", "schedule", "algorithms", "n_iters", "n_seeds",
                    "base_seed", "metrics", "output", "z0"});

  ExperimentConfig cfg;
  if (auto name = r.string("name")) cfg.name = *name;
  else if (!r.has("name")) r.error("name", "required");

  // Problem.
  std::optional<Problem> problem;
  if (!r.has("problem")) {
    r.error("problem", "required");
  } else {
    const json& pj = r.raw("problem");
    if (pj.is_string()) {
      cfg.problem = pj.get<std::string>();
    } else if (pj.is_object()) {
      Reader pr(pj, r.at("problem"), errors);
      pr.reject_unknown({"name", "lipschitz", "rho", "shift", "bound"});
      if (auto n = pr.string("name")) cfg.problem = *n;
      else if (!pr.has("name")) pr.error("name", "required");
      cfg.params.lipschitz = pr.number("lipschitz").value_or(cfg.params.lipschitz);
      cfg.params.rho = pr.number("rho").value_or(cfg.params.rho);
      cfg.params.shift = pr.number("shift").value_or(cfg.params.shift);
      cfg.params.bound = pr.number("bound").value_or(cfg.params.bound);
    } else {
      r.error("problem", "expected a name or an object");
    }
    if (!cfg.problem.empty()) {
      try {
        problem = make_problem(cfg.problem, cfg.params);
      } catch (const std::exception& e) {
        r.error("problem", e.what());
      }
    }
  }

  if (auto s = r.number("sigma")) {
    if (*s < 0.0) r.error("sigma", "must be >= 0");
    cfg.sigma = *s;
  }
  if (auto n = r.count("n_iters")) {
    if (*n < 1) r.error("n_iters", "must be >= 1");
    cfg.n_iters = *n;
  }
  if (auto n = r.count("n_seeds")) {
    if (*n < 1) r.error("n_seeds", "must be >= 1");
    cfg.n_seeds = *n;
  }
  if (auto n = r.count("base_seed")) cfg.base_seed = *n;
  cfg.output = r.string("output").value_or(cfg.name);

  if (r.has("metrics")) {
    const json& mj = r.raw("metrics");
    if (!mj.is_array()) {
      r.error("metrics", "expected an array");
    } else {
      cfg.metrics.clear();
      for (std::size_t i = 0; i < mj.size(); ++i) {
        const std::string at = r.at("metrics") + "[" + std::to_string(i) + "]";
        if (!mj[i].is_string()) {
          errors.push_back(at + ": expected a string");
          continue;
        }
        const auto m = mj[i].get<std::string>();
        const auto& known = metric_names();
        if (std::find(known.begin(), known.end(), m) == known.end()) {
          errors.push_back(at + ": unknown metric '" + m + "'");
        } else if ((m == "dist" || m == "dist_sq") && problem && !problem->constants.z_star) {
          errors.push_back(at + ": problem '" + cfg.problem + "' has no known solution");
        } else {
          cfg.metrics.push_back(m);
        }
      }
    }
  }

  if (r.has("z0")) {
    const json& zj = r.raw("z0");
    if (!zj.is_array() || !std::all_of(zj.begin(), zj.end(), [](const json& v) { return v.is_number(); })) {
      r.error("z0", "expected an array of numbers");
    } else {
      Vec z(static_cast<Index>(zj.size()));
      for (std::size_t i = 0; i < zj.size(); ++i) z(static_cast<Index>(i)) = zj[i].get<double>();
      if (problem && z.size() != problem->dim()) r.error("z0", "length must equal the problem dimension");
      cfg.z0 = z;
    }
  }

  // Defaults shared by all series.
  std::optional<double> default_gamma = r.number("gamma");
  if (!default_gamma && problem) default_gamma = 1.0 / (2.0 * problem->constants.lipschitz);
  std::optional<Schedule> default_schedule = Schedule();
  if (r.has("schedule")) default_schedule = parse_schedule(r.raw("schedule"), r.at("schedule"), errors);

  if (!r.has("algorithms")) {
    r.error("algorithms", "required");
  } else if (!r.raw("algorithms").is_array() || r.raw("algorithms").empty()) {
    r.error("algorithms", "expected a non-empty array");
  } else {
    const json& aj = r.raw("algorithms");
    std::set<std::string> labels;
    for (std::size_t i = 0; i < aj.size(); ++i) {
      const std::string at = r.at("algorithms") + "[" + std::to_string(i) + "]";
      SeriesSpec s;
      std::string id;
      std::optional<double> gamma = default_gamma;
      std::optional<Schedule> schedule = default_schedule;
      if (aj[i].is_string()) {
        id = aj[i].get<std::string>();
      } else if (aj[i].is_object()) {
        Reader sr(aj[i], at, errors);
        sr.reject_unknown({"method", "label", "gamma", "schedule", "theta"});
        id = sr.string("method").value_or("");
        if (!sr.has("method")) sr.error("method", "required");
        s.label = sr.string("label").value_or("");
        if (auto g = sr.number("gamma")) gamma = g;
        if (sr.has("schedule")) schedule = parse_schedule(sr.raw("schedule"), sr.at("schedule"), errors);
        s.theta = sr.number("theta");
        if (s.theta && *s.theta < 0.0) sr.error("theta", "must be >= 0");
      } else {
        errors.push_back(at + ": expected a method identifier or an object");
        continue;
      }
      const auto method = parse_method(id);
      if (!method) {
        errors.push_back(at + ": unknown algorithm '" + id + "'");
        continue;
      }
      s.method = *method;
      if (s.label.empty()) s.label = id;
      if (!labels.insert(s.label).second) errors.push_back(at + ": duplicate label '" + s.label + "'");
      if (problem) {
        if (requires_constraints(s.method) && !problem->constrained) {
          errors.push_back(at + ": '" + id + "' needs a constrained problem, '" + cfg.problem + "' has none");
        }
        if (requires_unconstrained(s.method) && problem->constrained) {
          errors.push_back(at + ": '" + id + "' is for unconstrained problems, '" + cfg.problem +
                           "' is constrained");
        }
        if (s.method == Method::NpPdeg && problem->primal_dim == 0) {
          errors.push_back(at + ": np-pdeg needs a primal-dual split");
        }
      }
      if (!gamma || !(*gamma > 0.0)) {
        errors.push_back(at + ".gamma: must be a positive number");
      } else {
        s.gamma = *gamma;
      }
      if (schedule) s.schedule = uses_fixed_relaxation(s.method) ? schedule->frozen() : *schedule;
      cfg.series.push_back(std::move(s));
    }
  }

  if (!errors.empty()) throw ConfigError(std::move(errors));
  return cfg;
}

std::vector<ExperimentConfig> parse_config(const json& j) {
  if (j.is_object() && j.contains("experiments")) {
    const json& ej = j.at("experiments");
    if (!ej.is_array() || ej.empty()) throw ConfigError({"experiments: expected a non-empty array"});
    std::vector<ExperimentConfig> out;
    std::vector<std::string> errors;
    for (std::size_t i = 0; i < ej.size(); ++i) {
      try {
        out.push_back(parse_experiment(ej[i], "experiments[" + std::to_string(i) + "]"));
      } catch (const ConfigError& e) {
        errors.insert(errors.end(), e.problems().begin(), e.problems().end());
      }
    }
    for (const auto& [key, _] : j.items()) {
      if (key != "experiments") errors.push_back(key + ": unknown field");
    }
    if (!errors.empty()) throw ConfigError(std::move(errors));
    return out;
  }
  return {parse_experiment(j)};
}

std::vector<ExperimentConfig> load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({path.string() + ": file not found or unreadable"});
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError({path.string() + ": " + e.what()});
  }
  return parse_config(j);
}

Problem build_problem(const ExperimentConfig& cfg) {
  Problem p = make_problem(cfg.problem, cfg.params);
  if (cfg.sigma > 0.0) p = p.with_noise(cfg.sigma, cfg.base_seed);
  if (cfg.z0) p.z0 = *cfg.z0;
  return p;
}

// ---------------------------------------------------------------------------

bool SeriesResult::any_diverged() const {
  return std::any_of(status.begin(), status.end(), [](TerminalStatus s) { return s == TerminalStatus::Diverged; });
}

bool SeriesResult::all_converged() const {
  return std::all_of(status.begin(), status.end(), [](TerminalStatus s) { return s == TerminalStatus::Converged; });
}

double SeriesResult::terminal_mean(const std::string& metric) const {
  const auto& rows = metrics.at(metric);
  if (rows.empty()) throw std::logic_error("series '" + label + "' has no rows");
  return rows.back().mean;
}

const SeriesResult& AggregateResult::find(const std::string& label) const {
  for (const auto& s : series) {
    if (s.label == label) return s;
  }
  throw std::out_of_range("no series labelled '" + label + "'");
}

std::vector<std::uint64_t> geometric_grid(std::uint64_t n_iters, std::size_t max_rows) {
  if (max_rows < 2) throw std::invalid_argument("geometric_grid: need room for k = 0 and k = K");
  std::vector<std::uint64_t> grid;
  if (n_iters + 1 <= max_rows) {
    grid.resize(n_iters + 1);
    for (std::uint64_t k = 0; k <= n_iters; ++k) grid[k] = k;
    return grid;
  }
  // Shrink the number of geometric points until deduplication fits.
  for (std::size_t m = max_rows - 1; m >= 2; --m) {
    grid.assign(1, 0);
    const double logk = std::log(static_cast<double>(n_iters));
    for (std::size_t i = 0; i < m; ++i) {
      const double t = static_cast<double>(i) / static_cast<double>(m - 1);
      auto k = static_cast<std::uint64_t>(std::llround(std::exp(t * logk)));
      k = std::clamp<std::uint64_t>(k, 1, n_iters);
      if (k != grid.back()) grid.push_back(k);
    }
    if (grid.back() != n_iters) grid.push_back(n_iters);
    if (grid.size() <= max_rows) return grid;
  }
  return {0, n_iters};
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

std::size_t worker_count() {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("WEAKMINTY_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) n = std::min<std::size_t>(n, static_cast<std::size_t>(v));
  }
  return n;
}

namespace {

template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const std::size_t workers = std::min(worker_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

AlgorithmSpec spec_for(const Problem& problem, const SeriesSpec& s) {
  AlgorithmSpec spec{s.method, s.gamma, std::nullopt, std::nullopt};
  if (s.method == Method::NpPdeg) {
    spec.pdhg = PdhgConfig::scalar(problem.primal_dim, problem.dual_dim(), s.gamma, s.theta.value_or(1.0),
                                   problem.constants.lipschitz, problem.constants.mean_lipschitz);
  }
  return spec;
}

}  // namespace

std::vector<Trajectory> run_series(const ExperimentConfig& cfg, const SeriesSpec& series,
                                   const std::vector<std::uint64_t>& grid) {
  const Problem problem = build_problem(cfg);
  const AlgorithmSpec spec = spec_for(problem, series);
  RunOptions opts;
  opts.record_at = grid;
  std::vector<Trajectory> out(cfg.n_seeds);
  parallel_for(cfg.n_seeds, [&](std::size_t i) {
    out[i] = run(problem, spec, series.schedule, cfg.n_iters, cfg.base_seed + i, opts);
  });
  return out;
}

AggregateResult run_experiment(const ExperimentConfig& cfg) {
  if (cfg.n_seeds < 1) throw ConfigError({"n_seeds: must be >= 1"});
  if (cfg.series.empty()) throw ConfigError({"algorithms: expected a non-empty array"});
  AggregateResult result;
  result.config = cfg;
  result.grid = geometric_grid(cfg.n_iters);

  const Problem problem = build_problem(cfg);
  const std::size_t n_series = cfg.series.size();
  std::vector<AlgorithmSpec> specs;
  for (const auto& s : cfg.series) specs.push_back(spec_for(problem, s));
  RunOptions opts;
  opts.record_at = result.grid;

  std::vector<Trajectory> trajs(n_series * cfg.n_seeds);
  parallel_for(trajs.size(), [&](std::size_t t) {
    const std::size_t si = t / cfg.n_seeds;
    const std::size_t seed = t % cfg.n_seeds;
    trajs[t] = run(problem, specs[si], cfg.series[si].schedule, cfg.n_iters, cfg.base_seed + seed, opts);
  });

  for (std::size_t si = 0; si < n_series; ++si) {
    const SeriesSpec& spec = cfg.series[si];
    SeriesResult sr;
    sr.label = spec.label;
    sr.method = spec.method;
    sr.gamma = spec.gamma;
    sr.schedule = spec.schedule.describe();
    std::size_t rows = result.grid.size();
    for (std::size_t seed = 0; seed < cfg.n_seeds; ++seed) {
      const Trajectory& tr = trajs[si * cfg.n_seeds + seed];
      sr.status.push_back(tr.status);
      sr.k_star.push_back(tr.k_star);
      rows = std::min(rows, tr.records.size());
    }
    sr.truncated = rows < result.grid.size();
    for (const auto& metric : cfg.metrics) {
      auto& out = sr.metrics[metric];
      out.reserve(rows);
      std::vector<double> sample(cfg.n_seeds);
      for (std::size_t row = 0; row < rows; ++row) {
        double sum = 0.0;
        for (std::size_t seed = 0; seed < cfg.n_seeds; ++seed) {
          sample[seed] = metric_value(trajs[si * cfg.n_seeds + seed].records[row], metric);
          sum += sample[seed];
        }
        AggregateRow agg;
        agg.k = result.grid[row];
        agg.mean = sum / static_cast<double>(cfg.n_seeds);
        agg.median = quantile(sample, 0.5);
        agg.p10 = quantile(sample, 0.1);
        agg.p90 = quantile(sample, 0.9);
        out.push_back(agg);
      }
    }
    result.series.push_back(std::move(sr));
  }
  return result;
}

// ---------------------------------------------------------------------------
// Output

std::string csv_file_name(const std::string& label, const std::string& metric) {
  std::string safe;
  for (char c : label) safe += (std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.') ? c : '_';
  return safe + "__" + metric + ".csv";
}

void write_csv(const AggregateResult& result, const std::filesystem::path& dir) {
  if (result.config.metrics.empty()) throw std::invalid_argument("no metrics selected");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error(dir.string() + ": " + ec.message());
  for (const auto& s : result.series) {
    for (const auto& metric : result.config.metrics) {
      const auto path = dir / csv_file_name(s.label, metric);
      std::ofstream out(path, std::ios::binary);
      if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
      out << "k,mean,median,p10,p90\n";
      for (const auto& row : s.metrics.at(metric)) {
        out << row.k << ',' << format_double(row.mean) << ',' << format_double(row.median) << ','
            << format_double(row.p10) << ',' << format_double(row.p90) << '\n';
      }
      if (!out) throw std::runtime_error(path.string() + ": write failed");
    }
  }
}

void write_summary(const AggregateResult& result, const std::filesystem::path& dir) {
  json j;
  j["name"] = result.config.name;
  j["problem"] = result.config.problem;
  j["n_iters"] = result.config.n_iters;
  j["n_seeds"] = result.config.n_seeds;
  j["base_seed"] = result.config.base_seed;
  j["series"] = json::array();
  for (const auto& s : result.series) {
    json js;
    js["label"] = s.label;
    js["method"] = std::string(method_name(s.method));
    js["gamma"] = s.gamma;
    js["schedule"] = s.schedule;
    std::map<std::string, int> counts;
    for (auto st : s.status) ++counts[std::string(status_name(st))];
    js["status"] = counts;
    js["truncated"] = s.truncated;
    js["k_star"] = s.k_star;
    json terminal = json::object();
    for (const auto& [metric, rows] : s.metrics) {
      if (!rows.empty()) terminal[metric] = rows.back().mean;
    }
    js["terminal_mean"] = terminal;
    j["series"].push_back(js);
  }
  std::filesystem::create_directories(dir);
  const auto path = dir / "summary.json";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  out << j.dump(2) << '\n';
}

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

void render_svg(const AggregateResult& result, const std::filesystem::path& dir) {
  if (result.config.metrics.empty()) throw std::invalid_argument("no metrics selected");
  const std::string& metric = result.config.metrics.front();
  constexpr double W = 760, H = 480, left = 80, right = 170, top = 40, bottom = 60;
  const double pw = W - left - right, ph = H - top - bottom;

  double ymin = std::numeric_limits<double>::infinity(), ymax = 0.0;
  for (const auto& s : result.series) {
    for (const auto& row : s.metrics.at(metric)) {
      for (double v : {row.p10, row.mean, row.p90}) {
        if (v > 0.0 && std::isfinite(v)) {
          ymin = std::min(ymin, v);
          ymax = std::max(ymax, v);
        }
      }
    }
  }
  if (!(ymax > 0.0)) {
    ymin = 1e-3;
    ymax = 1.0;
  }
  double lo = std::floor(std::log10(ymin));
  double hi = std::ceil(std::log10(ymax));
  if (hi <= lo) hi = lo + 1.0;
  const double K = static_cast<double>(std::max<std::uint64_t>(result.config.n_iters, 1));
  auto X = [&](double k) { return left + pw * k / K; };
  auto Y = [&](double v) {
    const double lv = std::log10(std::max(v, std::pow(10.0, lo)));
    return top + ph * (1.0 - (lv - lo) / (hi - lo));
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
      << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << fmt2(left + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
      << escape_xml(result.config.name + " (" + result.config.problem + ")") << "</text>\n";
  // Grid and axes.
  for (double d = lo; d <= hi; d += 1.0) {
    const double y = Y(std::pow(10.0, d));
    svg << "<line x1=\"" << fmt2(left) << "\" y1=\"" << fmt2(y) << "\" x2=\"" << fmt2(left + pw) << "\" y2=\"" << fmt2(y)
        << "\" stroke=\"#ddd\"/>\n";
    svg << "<text x=\"" << fmt2(left - 6) << "\" y=\"" << fmt2(y + 4) << "\" text-anchor=\"end\">1e"
        << static_cast<int>(d) << "</text>\n";
  }
  for (int i = 0; i <= 5; ++i) {
    const double k = K * i / 5.0;
    const double x = X(k);
    svg << "<line x1=\"" << fmt2(x) << "\" y1=\"" << fmt2(top + ph) << "\" x2=\"" << fmt2(x) << "\" y2=\""
        << fmt2(top + ph + 5) << "\" stroke=\"black\"/>\n";
    char label[32];
    std::snprintf(label, sizeof label, "%.3g", k);
    svg << "<text x=\"" << fmt2(x) << "\" y=\"" << fmt2(top + ph + 20) << "\" text-anchor=\"middle\">" << label
        << "</text>\n";
  }
  svg << "<rect x=\"" << fmt2(left) << "\" y=\"" << fmt2(top) << "\" width=\"" << fmt2(pw) << "\" height=\"" << fmt2(ph)
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << fmt2(left + pw / 2) << "\" y=\"" << fmt2(H - 18) << "\" text-anchor=\"middle\">iteration k</text>\n";
  svg << "<text transform=\"translate(20," << fmt2(top + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
      << escape_xml(metric) << "</text>\n";

  for (std::size_t i = 0; i < result.series.size(); ++i) {
    const auto& s = result.series[i];
    const auto& rows = s.metrics.at(metric);
    const char* color = kPalette[i % std::size(kPalette)];
    if (rows.empty()) continue;
    std::ostringstream band, line;
    for (const auto& row : rows) band << fmt2(X(static_cast<double>(row.k))) << ',' << fmt2(Y(row.p90)) << ' ';
    for (auto it = rows.rbegin(); it != rows.rend(); ++it) {
      band << fmt2(X(static_cast<double>(it->k))) << ',' << fmt2(Y(it->p10)) << ' ';
    }
    for (const auto& row : rows) line << fmt2(X(static_cast<double>(row.k))) << ',' << fmt2(Y(row.mean)) << ' ';
    svg << "<polygon points=\"" << band.str() << "\" fill=\"" << color << "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";
    svg << "<polyline points=\"" << line.str() << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
    if (s.truncated) {
      const double x = X(static_cast<double>(rows.back().k)), y = Y(rows.back().mean);
      svg << "<path d=\"M" << fmt2(x - 5) << ' ' << fmt2(y - 5) << " L" << fmt2(x + 5) << ' ' << fmt2(y + 5) << " M"
          << fmt2(x - 5) << ' ' << fmt2(y + 5) << " L" << fmt2(x + 5) << ' ' << fmt2(y - 5) << "\" stroke=\"" << color
          << "\" stroke-width=\"2\"/>\n";
    }
    const double ly = top + 10 + 20.0 * static_cast<double>(i);
    svg << "<line x1=\"" << fmt2(left + pw + 12) << "\" y1=\"" << fmt2(ly) << "\" x2=\"" << fmt2(left + pw + 36)
        << "\" y2=\"" << fmt2(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << fmt2(left + pw + 42) << "\" y=\"" << fmt2(ly + 4) << "\">" << escape_xml(s.label) << "</text>\n";
  }
  svg << "</svg>\n";

  std::filesystem::create_directories(dir);
  const auto path = dir / (result.config.name + ".svg");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  out << svg.str();
}

}  // namespace weakminty
