#ifndef WEAKMINTY_HARNESS_HPP
#define WEAKMINTY_HARNESS_HPP

#include "weakminty/algorithms.hpp"
#include "weakminty/problems.hpp"
#include "weakminty/schedule.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace weakminty {

/// Configuration errors, one entry per offending field ("series[1].gamma: ...").
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

/// One curve of an experiment.
struct SeriesSpec {
  std::string label;  // defaults to the method identifier
  Method method = Method::BcSegPlus;
  double gamma = 0.0;
  Schedule schedule;  // fixed-relaxation methods run on schedule.frozen()
  std::optional<double> theta;  // NP-PDEG only
};

struct ExperimentConfig {
  std::string name;
  std::string problem;
  ProblemParams params;
  double sigma = 0.1;
  std::vector<SeriesSpec> series;
  std::uint64_t n_iters = 100000;
  std::uint64_t n_seeds = 20;
  std::uint64_t base_seed = 0;
  std::vector<std::string> metrics{"fnorm"};
  std::string output;  // sub-directory under --out; defaults to name
  std::optional<Vec> z0;
};

/// Metric identifiers accepted in ExperimentConfig::metrics.
const std::vector<std::string>& metric_names();

/// Parse one experiment. Throws ConfigError listing every invalid field.
ExperimentConfig parse_experiment(const nlohmann::json& j, const std::string& path = "");
/// A file holds either one experiment or {"experiments": [...]}.
std::vector<ExperimentConfig> parse_config(const nlohmann::json& j);
std::vector<ExperimentConfig> load_config_file(const std::filesystem::path& path);

/// Problem instance for a config, noise attached.
Problem build_problem(const ExperimentConfig& cfg);

struct AggregateRow {
  std::uint64_t k = 0;
  double mean = 0.0;
  double median = 0.0;
  double p10 = 0.0;
  double p90 = 0.0;
};

struct SeriesResult {
  std::string label;
  Method method = Method::BcSegPlus;
  double gamma = 0.0;
  std::string schedule;
  std::map<std::string, std::vector<AggregateRow>> metrics;
  std::vector<TerminalStatus> status;  // per seed
  std::vector<std::uint64_t> k_star;   // per seed
  bool truncated = false;              // some seed blew up; rows stop there

  bool any_diverged() const;
  bool all_converged() const;
  /// Mean over seeds of the metric at the last aggregated row.
  double terminal_mean(const std::string& metric) const;
};

struct AggregateResult {
  ExperimentConfig config;
  std::vector<std::uint64_t> grid;  // recorded iterations
  std::vector<SeriesResult> series;

  const SeriesResult& find(const std::string& label) const;
};

/// Iterations 0 and K plus a geometric grid in between, at most `max_rows` entries.
std::vector<std::uint64_t> geometric_grid(std::uint64_t n_iters, std::size_t max_rows = 2000);

/// Linear-interpolation quantile of an unsorted sample, q ∈ [0, 1].
double quantile(std::vector<double> values, double q);

/// Runs n_seeds trajectories (seeds base_seed + i) per series in parallel.
/// WEAKMINTY_THREADS caps the worker count.
AggregateResult run_experiment(const ExperimentConfig& cfg);

/// Raw per-seed trajectories for one series, recorded on `grid` (all iterations when empty).
std::vector<Trajectory> run_series(const ExperimentConfig& cfg, const SeriesSpec& series,
                                   const std::vector<std::uint64_t>& grid);

std::size_t worker_count();

/// One file per (series, metric): `<dir>/<label>__<metric>.csv`.
void write_csv(const AggregateResult& result, const std::filesystem::path& dir);
/// Log-y chart of the first metric: `<dir>/<name>.svg`.
void render_svg(const AggregateResult& result, const std::filesystem::path& dir);
/// Per-series terminal status and k⋆ draws: `<dir>/summary.json`.
void write_summary(const AggregateResult& result, const std::filesystem::path& dir);

std::string csv_file_name(const std::string& label, const std::string& metric);

}  // namespace weakminty

#endif  // WEAKMINTY_HARNESS_HPP
