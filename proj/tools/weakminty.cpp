// Command-line front end: run experiment configs, reproduce the shipped
// figures, evaluate theorem conditions and certify linear operators.

#include "weakminty/analysis.hpp"
#include "weakminty/harness.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#ifndef WEAKMINTY_CONFIG_DIR
#define WEAKMINTY_CONFIG_DIR "configs"
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace weakminty;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kDiverged = 2;

struct OutputOptions {
  std::string out = "out";
  std::uint64_t seeds = 0;
  std::uint64_t iters = 0;
  bool strict = false;
  std::string format = "both";
};

void add_output_flags(CLI::App* cmd, OutputOptions& o) {
  cmd->add_option("--out", o.out, "Output directory")->capture_default_str();
  cmd->add_option("--seeds", o.seeds, "Override the number of seeds");
  cmd->add_option("--iters", o.iters, "Override the number of iterations");
  cmd->add_flag("--strict", o.strict, "Exit with status 2 if any run diverged");
  cmd->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "svg", "both"}))->capture_default_str();
}

int run_configs(const fs::path& path, const OutputOptions& o) {
  std::vector<ExperimentConfig> configs;
  try {
    configs = load_config_file(path);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }
  bool diverged = false;
  for (auto cfg : configs) {
    if (o.seeds > 0) cfg.n_seeds = o.seeds;
    if (o.iters > 0) cfg.n_iters = o.iters;
    const AggregateResult result = run_experiment(cfg);
    const fs::path dir = fs::path(o.out) / cfg.output;
    try {
      if (o.format != "svg") write_csv(result, dir);
      if (o.format != "csv") render_svg(result, dir);
      write_summary(result, dir);
    } catch (const std::invalid_argument& e) {
      std::cerr << "error: " << cfg.name << ": " << e.what() << '\n';
      return kConfigError;
    }
    std::printf("%s: %s, K=%llu, %llu seeds -> %s\n", cfg.name.c_str(), cfg.problem.c_str(),
                static_cast<unsigned long long>(cfg.n_iters), static_cast<unsigned long long>(cfg.n_seeds),
                dir.string().c_str());
    for (const auto& s : result.series) {
      int counts[3] = {0, 0, 0};
      for (auto st : s.status) ++counts[static_cast<int>(st)];
      std::printf("  %-16s", s.label.c_str());
      if (!cfg.metrics.empty()) {
        std::printf(" final mean %s = %.4g", cfg.metrics.front().c_str(), s.terminal_mean(cfg.metrics.front()));
      }
      std::printf("  [converged %d, running %d, diverged %d]\n", counts[0], counts[1], counts[2]);
      diverged = diverged || s.any_diverged();
    }
  }
  return (o.strict && diverged) ? kDiverged : kOk;
}

// ---------------------------------------------------------------------------
// check-conditions

json report_json(const TheoremReport& r) {
  json j;
  j["theorem"] = r.theorem;
  j["satisfied"] = r.satisfied;
  j["residuals"] = r.residuals;
  j["constants"] = r.constants;
  json env = json::object();
  for (const auto& [K, v] : r.rate_envelope) env[std::to_string(K)] = v;
  j["rate_envelope"] = env;
  return j;
}

Schedule schedule_from(const json& j) {
  if (!j.contains("schedule")) return Schedule();
  const json& s = j.at("schedule");
  const std::string kind = s.value("kind", "harmonic");
  const double a0 = s.value("alpha0", 1.0 / 18.0);
  const double c = s.value("c", 100.0);
  if (kind == "constant") return Schedule::constant(s.value("alpha", a0));
  if (kind == "harmonic") return Schedule::harmonic(a0, c);
  if (kind == "inverse-sqrt") return Schedule::inverse_sqrt(a0, c);
  if (kind == "robbins-monro") return Schedule::robbins_monro(s.value("r", 2.0));
  throw ConfigError({"schedule.kind: unknown schedule '" + kind + "'"});
}

PdhgConfig pdhg_from(const json& j, double gamma, double L, double Lh) {
  const json p = j.value("pdhg", json::object());
  const Index n = p.value("primal_dim", 1);
  const Index r = p.value("dual_dim", 1);
  PdhgConfig cfg = PdhgConfig::scalar(n, r, gamma, p.value("theta", 1.0), L, Lh);
  cfg.gamma1 = BlockDiagMatrix<>::scaled_identity(n, p.value("gamma1", gamma));
  cfg.gamma2 = BlockDiagMatrix<>::scaled_identity(r, p.value("gamma2", gamma));
  if (p.contains("lipschitz")) {
    const json& t = p.at("lipschitz");
    auto& L2 = cfg.lipschitz;
    L2 = PdhgLipschitz{};
    L2.xx = t.value("xx", 0.0);
    L2.xy = t.value("xy", 0.0);
    L2.yx = t.value("yx", 0.0);
    L2.yy = t.value("yy", 0.0);
    L2.hat_xz = t.value("hat_xz", 0.0);
    L2.hat_yz = t.value("hat_yz", 0.0);
    L2.hat_yx = t.value("hat_yx", 0.0);
    L2.hat_yy = t.value("hat_yy", 0.0);
  }
  return cfg;
}

int check_conditions(const std::string& arg) {
  json j;
  try {
    if (!arg.empty() && arg.front() == '{') {
      j = json::parse(arg);
    } else {
      std::ifstream in(arg);
      if (!in) {
        std::cerr << "error: " << arg << ": file not found or unreadable\n";
        return kConfigError;
      }
      in >> j;
    }
  } catch (const json::parse_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }
  try {
    const double L = j.at("lipschitz").get<double>();
    const double Lh = j.value("mean_lipschitz", L);
    const double sigma_f = j.value("sigma_f", 0.0);
    const double rho = j.at("rho").get<double>();
    const double gamma = j.value("gamma", 1.0 / (2.0 * L));
    const Schedule schedule = schedule_from(j);
    EnvelopeInputs env;
    env.initial_dist_sq = j.value("initial_dist_sq", 0.0);
    env.anchor_gap_sq = j.value("anchor_gap_sq", 0.0);
    env.horizons = j.value("horizons", std::vector<std::uint64_t>{});
    const std::string theorem = j.value("theorem", "all");

    json out = json::array();
    auto want = [&](const char* id) { return theorem == "all" || theorem == id; };
    if (want("bc-seg+/rate")) out.push_back(report_json(check_thm_bcsegplus_rate(L, Lh, sigma_f, rho, gamma, schedule, env)));
    if (want("bc-seg+/almost-sure") && (theorem != "all" || j.contains("r"))) {
      out.push_back(report_json(check_thm_bcsegplus_as(L, Lh, rho, gamma, j.value("r", std::uint64_t{2}))));
    }
    if (want("bc-pseg+/rate")) out.push_back(report_json(check_thm_const(L, Lh, sigma_f, rho, gamma, schedule, env)));
    if (want("np-pdeg/rate")) {
      const PdhgConfig cfg = pdhg_from(j, gamma, L, Lh);
      out.push_back(report_json(check_thm_pdhg(cfg, rho, j.value("sigma_gamma_sq", gamma * sigma_f * sigma_f), schedule, env)));
    }
    if (want("seg+/affine")) out.push_back(report_json(check_seg_plus_affine(L, sigma_f, rho, gamma, schedule, env)));
    if (out.empty()) {
      std::cerr << "error: theorem: unknown id '" << theorem << "'\n";
      return kConfigError;
    }
    std::cout << (out.size() == 1 ? out.front() : out).dump(2) << '\n';
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// certify

int certify(const std::string& matrix, double rho, bool negative) {
  Mat m;
  try {
    const json j = json::parse(matrix);
    if (!j.is_array() || j.empty()) throw std::invalid_argument("expected a non-empty array of rows");
    const auto n = static_cast<Index>(j.size());
    m.resize(n, static_cast<Index>(j[0].size()));
    for (Index i = 0; i < n; ++i) {
      if (!j[i].is_array() || static_cast<Index>(j[i].size()) != m.cols()) {
        throw std::invalid_argument("rows must have equal length");
      }
      for (Index c = 0; c < m.cols(); ++c) m(i, c) = j[i][c].get<double>();
    }
    if (m.rows() != m.cols()) throw std::invalid_argument("matrix must be square");
  } catch (const std::exception& e) {
    std::cerr << "error: --matrix: " << e.what() << '\n';
    return kConfigError;
  }
  const bool ok = negative ? certify_negative_weak_mvi_linear(m, rho) : certify_weak_mvi_linear(m, rho);
  std::cout << (ok ? "certified" : "not certified") << '\n';
  const WeakMviRange range = weak_mvi_range(m);
  std::printf("admissible rho range: (%.12g, %.12g]%s\n", range.lower, range.upper, range.nonempty() ? "" : " (empty)");
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic extragradient methods for weak Minty variational inequalities"};
  app.require_subcommand(1, 1);

  OutputOptions run_opts;
  std::string run_path;
  auto* run_cmd = app.add_subcommand("run", "Run an experiment config");
  run_cmd->add_option("config", run_path, "Experiment JSON")->required();
  add_output_flags(run_cmd, run_opts);

  OutputOptions rep_opts;
  std::string figure;
  std::string config_dir = WEAKMINTY_CONFIG_DIR;
  auto* rep_cmd = app.add_subcommand("reproduce", "Reproduce a shipped figure");
  rep_cmd->add_option("figure", figure, "Figure id")
      ->required()
      ->check(CLI::IsMember({"fig1", "fig2-left", "fig2-right", "fig3", "fig4"}));
  rep_cmd->add_option("--configs", config_dir, "Directory holding the figure configs")->capture_default_str();
  add_output_flags(rep_cmd, rep_opts);

  std::string constants;
  auto* chk_cmd = app.add_subcommand("check-conditions", "Evaluate theorem conditions (JSON file or inline JSON)");
  chk_cmd->add_option("constants", constants, "Constants JSON")->required();

  std::string matrix;
  double rho = 0.0;
  bool negative = false;
  auto* cert_cmd = app.add_subcommand("certify", "Certify the weak MVI for a linear operator");
  cert_cmd->add_option("--matrix", matrix, "Matrix as JSON rows, e.g. [[0,1],[-1,0]]")->required();
  cert_cmd->add_option("--rho", rho, "Weak MVI parameter")->required();
  cert_cmd->add_flag("--negative", negative, "Check the negative weak MVI instead");

  auto* list_cmd = app.add_subcommand("list-algorithms", "List algorithm identifiers");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e, std::cerr, std::cerr);
    std::cerr << app.help();
    return kConfigError;
  }

  try {
    if (run_cmd->parsed()) return run_configs(run_path, run_opts);
    if (rep_cmd->parsed()) return run_configs(fs::path(config_dir) / (figure + ".json"), rep_opts);
    if (chk_cmd->parsed()) return check_conditions(constants);
    if (cert_cmd->parsed()) return certify(matrix, rho, negative);
    if (list_cmd->parsed()) {
      for (Method m : all_methods()) {
        const char* kind = requires_constraints(m) ? "constrained" : requires_unconstrained(m) ? "unconstrained" : "any";
        std::printf("%-10s %s%s\n", std::string(method_name(m)).c_str(), kind,
                    uses_fixed_relaxation(m) ? ", fixed relaxation" : "");
      }
      return kOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }
  return kOk;
}
