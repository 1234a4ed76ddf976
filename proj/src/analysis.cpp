#include "weakminty/analysis.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace weakminty {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Sums {
  double s1 = 0.0;  // Σ αⱼ
  double s2 = 0.0;  // Σ αⱼ²
};

// Partial sums at each requested horizon, in one pass.
std::map<std::uint64_t, Sums> schedule_sums(const Schedule& schedule, const std::vector<std::uint64_t>& horizons) {
  std::map<std::uint64_t, Sums> out;
  if (horizons.empty()) return out;
  const std::uint64_t last = *std::max_element(horizons.begin(), horizons.end());
  Sums acc;
  for (std::uint64_t k = 0; k <= last; ++k) {
    const double a = schedule.alpha(k);
    acc.s1 += a;
    acc.s2 += a * a;
    if (std::find(horizons.begin(), horizons.end(), k) != horizons.end()) out[k] = acc;
  }
  return out;
}

void require_admissible_gamma(double gamma, double lipschitz) {
  if (!(gamma > 0.0) || !(gamma * lipschitz < 1.0)) {
    throw std::domain_error("stepsize γ out of admissible interval (0, 1/L_F)");
  }
}

void finish(TheoremReport& report) {
  report.satisfied = std::all_of(report.residuals.begin(), report.residuals.end(),
                                 [](const auto& kv) { return kv.second <= 0.0; });
  if (!report.satisfied) report.rate_envelope.clear();
}

double spectral_norm(const Mat& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()(0);
}

Mat d_or_identity(const Mat& d, Index n) { return d.size() == 0 ? Mat(Mat::Identity(n, n)) : d; }

}  // namespace

// ---------------------------------------------------------------------------

TheoremReport check_thm_bcsegplus_rate(double L, double Lh, double sigma_f, double rho, double gamma,
                                       const Schedule& schedule, const EnvelopeInputs& env) {
  require_admissible_gamma(gamma, L);
  if (!(Lh > 0.0)) throw std::domain_error("mean-square Lipschitz constant must be positive");
  TheoremReport rep;
  rep.theorem = "bc-seg+/rate";
  const double a0 = schedule.alpha0();
  const double g2l2 = gamma * gamma * L * L;
  const double g2lh2 = gamma * gamma * Lh * Lh;
  const double ratio = (1.0 + g2l2) / (1.0 - g2l2);
  const double lhs = 2.0 * gamma * Lh * std::sqrt(a0) + (1.0 + ratio * g2l2 * g2lh2) * a0;
  const double rhs = 1.0 + 2.0 * rho / gamma;
  rep.residuals["condition"] = lhs - rhs;
  rep.residuals["gamma_lower"] = -2.0 * rho - gamma;
  rep.residuals["alpha0"] = a0 - 1.0;

  const double eta = 0.5 * ratio * g2l2 + 1.0 / (gamma * Lh * std::sqrt(a0));
  const double C = 1.0 + 2.0 * eta * ((g2lh2 + 1.0) + 2.0 * a0);
  const double mu = gamma * gamma * (1.0 - g2l2) / 2.0;
  rep.constants = {{"eta", eta}, {"C", C}, {"mu", mu}, {"b", 2.0 * g2l2 / (1.0 - g2l2)}, {"alpha0", a0}};

  for (const auto& [K, s] : schedule_sums(schedule, env.horizons)) {
    rep.rate_envelope[K] =
        ((1.0 + eta * g2l2) * env.initial_dist_sq + C * sigma_f * sigma_f * gamma * gamma * s.s2) / (mu * s.s1);
  }
  finish(rep);
  return rep;
}

double bcsegplus_as_lhs(double L, double Lh, double gamma, double r, std::uint64_t k) {
  const double g2l2 = gamma * gamma * L * L;
  const double b = 2.0 * g2l2 / (1.0 - g2l2);
  const double ak = 1.0 / (static_cast<double>(k) + r);
  const double ak1 = 1.0 / (static_cast<double>(k) + 1.0 + r);
  const double g4 = gamma * gamma * gamma * gamma;
  return (gamma * Lh + 1.0) * ak + 2.0 * ((1.0 + b) * g4 * L * L * Lh * Lh * ak1 + gamma * Lh) * (ak1 + 1.0) * ak1;
}

TheoremReport check_thm_bcsegplus_as(double L, double Lh, double rho, double gamma, std::uint64_t r) {
  require_admissible_gamma(gamma, L);
  if (r < 1) throw std::invalid_argument("r must be a positive integer");
  TheoremReport rep;
  rep.theorem = "bc-seg+/almost-sure";
  const double rhs = 1.0 + 2.0 * rho / gamma;
  // The left side is nonincreasing in k, so k = 0 is the binding index.
  rep.residuals["condition"] = bcsegplus_as_lhs(L, Lh, gamma, static_cast<double>(r), 0) - rhs;
  rep.residuals["gamma_lower"] = -2.0 * rho - gamma;
  rep.constants["b"] = 2.0 * gamma * gamma * L * L / (1.0 - gamma * gamma * L * L);
  rep.constants["r"] = static_cast<double>(r);

  constexpr std::uint64_t kMaxR = 1'000'000'000ULL;
  auto ok = [&](std::uint64_t rr) { return bcsegplus_as_lhs(L, Lh, gamma, static_cast<double>(rr), 0) <= rhs; };
  if (ok(kMaxR)) {
    std::uint64_t lo = 0, hi = kMaxR;  // ok(hi), !ok(lo) or lo == 0
    while (hi - lo > 1) {
      const std::uint64_t mid = lo + (hi - lo) / 2;
      (ok(mid) ? hi : lo) = mid;
    }
    rep.constants["r_min"] = static_cast<double>(hi);
  }
  finish(rep);
  return rep;
}

TheoremReport check_thm_const(double L, double Lh, double sigma_f, double rho, double gamma,
                              const Schedule& schedule, const EnvelopeInputs& env) {
  require_admissible_gamma(gamma, L);
  TheoremReport rep;
  rep.theorem = "bc-pseg+/rate";
  const double a0 = schedule.alpha0();
  const double sa = std::sqrt(a0);
  const double g2lh2 = gamma * gamma * Lh * Lh;
  const double one_m = 1.0 - gamma * L;
  const double eta = 1.0 / (sa * one_m * one_m) + (1.0 - sa) / sa;
  const double mu = (1.0 - sa) / (1.0 + sa) - a0 * (1.0 + 2.0 * g2lh2 * eta) + 2.0 * rho / gamma;
  const double C = 1.0 + 2.0 * eta * (1.0 + g2lh2) + 2.0 * a0 * eta;
  rep.residuals["mu"] = -mu;
  rep.residuals["gamma_lower"] = -2.0 * rho - gamma;
  rep.residuals["alpha0"] = a0 - 1.0;
  rep.constants = {{"eta", eta}, {"mu", mu}, {"C", C}, {"alpha0", a0}, {"b", sa}};

  for (const auto& [K, s] : schedule_sums(schedule, env.horizons)) {
    rep.rate_envelope[K] = (env.initial_dist_sq + eta * env.anchor_gap_sq + C * gamma * gamma * sigma_f * sigma_f * s.s2) /
                           (gamma * gamma * mu * s.s1);
  }
  finish(rep);
  return rep;
}

TheoremReport check_thm_pdhg(const PdhgConfig& cfg, double rho, double sigma_gamma_sq, const Schedule& schedule,
                             const EnvelopeInputs& env) {
  if (!cfg.stepsize_condition()) throw std::domain_error("primal-dual stepsize condition violated");
  const Index n = cfg.gamma1.dim();
  const Index r = cfg.gamma2.dim();
  const auto& t = cfg.lipschitz;
  const double theta = cfg.theta;
  const BlockDiagMatrix<> G = cfg.gamma();
  const Mat Gd = G.dense();
  const Mat G1 = cfg.gamma1.dense();
  const Mat G2 = cfg.gamma2.dense();

  const double lm2 = std::max(t.xx * t.xx * spectral_norm(d_or_identity(t.d_xx, n) * G1) +
                                  t.yx * t.yx * spectral_norm(d_or_identity(t.d_yx, n) * G1),
                              t.xy * t.xy * spectral_norm(d_or_identity(t.d_xy, r) * G2) +
                                  t.yy * t.yy * spectral_norm(d_or_identity(t.d_yy, r) * G2));
  const double lm = std::sqrt(lm2);
  const double c1 = t.hat_xz * t.hat_xz * spectral_norm(Gd * d_or_identity(t.d_hat_xz, n + r)) +
                    2.0 * (1.0 - theta) * (1.0 - theta) * t.hat_yz * t.hat_yz *
                        spectral_norm(Gd * d_or_identity(t.d_hat_yz, n + r)) +
                    2.0 * theta * theta * t.hat_yy * t.hat_yy * spectral_norm(G2 * d_or_identity(t.d_hat_yy, r));
  const double c2 = 2.0 * theta * theta * t.hat_yx * t.hat_yx * spectral_norm(G1 * d_or_identity(t.d_hat_yx, n));
  const double c3 = t.hat_xz * t.hat_xz * spectral_norm(Gd * d_or_identity(t.d_hat_xz, n + r));
  const double big_theta = (1.0 - theta) * (1.0 - theta) + 2.0 * theta * theta;
  const double gbar = G.smallest_eigenvalue();

  const double a0 = schedule.alpha0();
  const double sa = std::sqrt(a0);
  const double base = 1.0 / (sa * (1.0 - lm) * (1.0 - lm)) + (1.0 - sa) / sa;
  const double denom = 1.0 - 4.0 * c2 * a0;
  const double eta = (1.0 + 4.0 * c2 * a0 * a0) * base / denom;
  const double mu = (1.0 - sa) / (1.0 + sa) + 2.0 * rho / gbar - a0 - 2.0 * a0 * (c1 + 2.0 * c2 * (1.0 + c3)) * eta;
  const double C = 2.0 * (eta + a0 * base) * (1.0 + 2.0 * c2) + 1.0 + 2.0 * (c1 + 2.0 * c2 * (big_theta + c3)) * eta;

  TheoremReport rep;
  rep.theorem = "np-pdeg/rate";
  rep.residuals["mu"] = denom > 0.0 ? -mu : kInf;
  rep.residuals["c2_condition"] = -denom;
  rep.residuals["l_m"] = lm - 1.0;
  rep.residuals["alpha0"] = a0 - 1.0;
  rep.constants = {{"c1", c1},   {"c2", c2},     {"c3", c3},      {"L_M", lm}, {"gamma_bar", gbar},
                   {"eta", eta}, {"mu", mu},     {"C", C},        {"Theta", big_theta}, {"alpha0", a0}};
  for (const auto& [K, s] : schedule_sums(schedule, env.horizons)) {
    rep.rate_envelope[K] = (env.initial_dist_sq + eta * env.anchor_gap_sq + C * sigma_gamma_sq * s.s2) / (mu * s.s1);
  }
  finish(rep);
  return rep;
}

TheoremReport check_seg_plus_affine(double L, double sigma_f, double rho, double gamma, const Schedule& schedule,
                                    const EnvelopeInputs& env) {
  require_admissible_gamma(gamma, L);
  TheoremReport rep;
  rep.theorem = "seg+/affine";
  std::uint64_t last = 0;
  for (auto K : env.horizons) last = std::max(last, K);
  double worst = -kInf;
  for (std::uint64_t k = 0; k <= last; ++k) worst = std::max(worst, gamma * (schedule.alpha(k) - 1.0) / 2.0);
  rep.residuals["stepsize_rule"] = worst - rho;
  rep.residuals["alpha0"] = schedule.alpha0() - 1.0;  // αₖ = 1 is allowed here
  rep.constants = {{"alpha0", schedule.alpha0()}, {"alpha_max", 2.0 * worst / gamma + 1.0}};
  const double g2l2 = gamma * gamma * L * L;
  for (const auto& [K, s] : schedule_sums(schedule, env.horizons)) {
    rep.rate_envelope[K] = (env.initial_dist_sq + gamma * gamma * (g2l2 + 1.0) * sigma_f * sigma_f * s.s2) /
                           (gamma * gamma * (1.0 - g2l2) * s.s1);
  }
  finish(rep);
  return rep;
}

// ---------------------------------------------------------------------------
// Linear weak MVI

namespace {

Mat mvi_form(const Mat& m, double rho) {
  if (m.rows() != m.cols()) throw DimensionError("weak MVI certifier: matrix must be square");
  return 0.5 * (m + m.transpose()) - rho * (m.transpose() * m);
}

}  // namespace

bool certify_weak_mvi_linear(const Mat& m, double rho, double tol) {
  const Mat s = mvi_form(m, rho);
  return symmetric_eigenvalues<double>(0.5 * (s + s.transpose()))(0) >= -tol;
}

bool certify_negative_weak_mvi_linear(const Mat& m, double rho_bar, double tol) {
  const Mat s = mvi_form(m, rho_bar);
  const Vec ev = symmetric_eigenvalues<double>(0.5 * (s + s.transpose()));
  return ev(ev.size() - 1) <= tol;
}

WeakMviRange weak_mvi_range(const Mat& m) {
  if (m.rows() != m.cols()) throw DimensionError("weak_mvi_range: matrix must be square");
  WeakMviRange out;
  const double norm = spectral_norm(m);
  if (norm == 0.0) {
    out.lower = -kInf;
    out.upper = kInf;
    return out;
  }
  out.lower = -1.0 / (2.0 * norm);
  const Mat sym = 0.5 * (m + m.transpose());
  const Mat gram = m.transpose() * m;
  const Vec gram_eigs = symmetric_eigenvalues<double>(gram);
  if (gram_eigs(0) > 1e-12 * gram_eigs(gram_eigs.size() - 1)) {
    // Largest ρ with S − ρG ⪰ 0 is the smallest generalized eigenvalue of (S, G).
    Eigen::GeneralizedSelfAdjointEigenSolver<Mat> solver(sym, gram, Eigen::EigenvaluesOnly);
    out.upper = solver.eigenvalues()(0);
    return out;
  }
  // Singular MᵀM: bisect on the certifier.
  if (!certify_weak_mvi_linear(m, -1e12)) {
    out.upper = -kInf;
    return out;
  }
  double lo = -1.0, hi = 1.0;
  while (!certify_weak_mvi_linear(m, lo) && lo > -1e12) lo *= 2.0;
  while (certify_weak_mvi_linear(m, hi) && hi < 1e12) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (certify_weak_mvi_linear(m, mid) ? lo : hi) = mid;
  }
  out.upper = lo;
  return out;
}

// ---------------------------------------------------------------------------

RateComparison empirical_rate_vs_envelope(const std::vector<Trajectory>& trajectories, const Schedule& schedule,
                                          const TheoremReport& report, std::uint64_t horizon, RateMetric metric) {
  RateComparison out;
  out.horizon = horizon;
  out.claimed = report.satisfied && report.rate_envelope.count(horizon) > 0;
  if (out.claimed) out.envelope = report.rate_envelope.at(horizon);
  if (trajectories.empty()) throw std::invalid_argument("empirical_rate_vs_envelope: no trajectories");

  std::vector<double> mean(horizon + 1, 0.0);
  for (const auto& traj : trajectories) {
    std::vector<bool> seen(horizon + 1, false);
    for (const auto& rec : traj.records) {
      if (rec.k > horizon) continue;
      double v = 0.0;
      switch (metric) {
        case RateMetric::FnormSq: v = rec.fnorm_sq; break;
        case RateMetric::ExploreSq: v = rec.explore_sq; break;
        case RateMetric::ExploreGammaSq: v = rec.explore_gamma_sq; break;
      }
      mean[rec.k] += v / static_cast<double>(trajectories.size());
      seen[rec.k] = true;
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
      throw std::invalid_argument("empirical_rate_vs_envelope: trajectory lacks records up to the horizon");
    }
  }
  double s1 = 0.0, acc = 0.0;
  for (std::uint64_t k = 0; k <= horizon; ++k) {
    const double a = schedule.alpha(k);
    s1 += a;
    acc += a * mean[k];
  }
  out.empirical = acc / s1;
  out.holds = out.claimed && out.empirical <= out.envelope;
  return out;
}

}  // namespace weakminty
