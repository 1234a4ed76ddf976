#include "weakminty/algorithms.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace weakminty {

namespace {

constexpr std::array<std::pair<Method, std::string_view>, 12> kMethodNames{{
    {Method::EgPlus, "eg+"},
    {Method::Seg, "seg"},
    {Method::SegPlus, "seg+"},
    {Method::SfEgPlus, "sf-eg+"},
    {Method::Pseg, "pseg"},
    {Method::P1SegPlus, "p1seg+"},
    {Method::P2SegPlus, "p2seg+"},
    {Method::SfPegPlus, "sf-peg+"},
    {Method::CegPlus, "ceg+"},
    {Method::BcSegPlus, "bc-seg+"},
    {Method::BcPsegPlus, "bc-pseg+"},
    {Method::NpPdeg, "np-pdeg"},
}};

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

SampleTicket ticket(const Problem& p, std::uint64_t k, std::uint64_t slot) {
  return p.oracle.draw(ticket_counter(k, slot));
}

void require_state(const Problem& p, const SolverState& s) {
  require_same_dim(s.z.size(), p.dim(), "solver state");
}

void require_memory(const SolverState& s, const char* who) {
  if (!s.has_memory()) {
    throw std::logic_error(std::string(who) + ": missing bias-correction memory; build the state with the "
                                              "matching initial_*_state function");
  }
}

SolverState advance(const SolverState& s, Vec z_next) {
  SolverState out;
  out.z = std::move(z_next);
  out.k = s.k + 1;
  return out;
}

Mat d_or_identity(const Mat& d, Index n) { return d.size() == 0 ? Mat(Mat::Identity(n, n)) : d; }

double min_eig(const Mat& m) { return symmetric_eigenvalues<double>(0.5 * (m + m.transpose()))(0); }

}  // namespace

std::string_view method_name(Method m) {
  for (const auto& [method, name] : kMethodNames) {
    if (method == m) return name;
  }
  return "?";
}

std::optional<Method> parse_method(std::string_view name) {
  for (const auto& [method, n] : kMethodNames) {
    if (n == name) return method;
  }
  return std::nullopt;
}

const std::vector<Method>& all_methods() {
  static const std::vector<Method> methods = [] {
    std::vector<Method> out;
    for (const auto& entry : kMethodNames) out.push_back(entry.first);
    return out;
  }();
  return methods;
}

bool requires_constraints(Method m) {
  return m == Method::Pseg || m == Method::P1SegPlus || m == Method::P2SegPlus || m == Method::SfPegPlus;
}

bool requires_unconstrained(Method m) {
  return m == Method::EgPlus || m == Method::Seg || m == Method::SegPlus || m == Method::SfEgPlus ||
         m == Method::BcSegPlus;
}

bool uses_fixed_relaxation(Method m) { return m == Method::SfEgPlus || m == Method::SfPegPlus; }

std::string_view status_name(TerminalStatus s) {
  switch (s) {
    case TerminalStatus::Converged: return "converged";
    case TerminalStatus::Running: return "running";
    case TerminalStatus::Diverged: return "diverged";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// PDHG configuration

BlockDiagMatrix<> PdhgConfig::gamma() const {
  std::vector<Mat> blocks = gamma1.blocks();
  for (const auto& b : gamma2.blocks()) blocks.push_back(b);
  return BlockDiagMatrix<>(std::move(blocks));
}

PdhgConfig PdhgConfig::scalar(Index primal_dim, Index dual_dim, double gamma, double theta, double lipschitz,
                              double mean_lipschitz) {
  if (!(theta >= 0.0)) throw std::invalid_argument("PdhgConfig: theta must be >= 0");
  PdhgConfig cfg;
  cfg.gamma1 = BlockDiagMatrix<>::scaled_identity(primal_dim, gamma);
  cfg.gamma2 = BlockDiagMatrix<>::scaled_identity(dual_dim, gamma);
  cfg.theta = theta;
  const double l = std::sqrt(gamma) * lipschitz;
  const double lh = std::sqrt(gamma) * mean_lipschitz;
  cfg.lipschitz.xx = l;
  cfg.lipschitz.yy = l;
  cfg.lipschitz.hat_xz = lh;
  cfg.lipschitz.hat_yx = lh;
  cfg.lipschitz.hat_yy = lh;
  return cfg;
}

std::pair<double, double> PdhgConfig::stepsize_margins() const {
  const Index n = gamma1.dim();
  const Index r = gamma2.dim();
  const auto& t = lipschitz;
  const Mat lhs1 = t.xx * t.xx * d_or_identity(t.d_xx, n) + t.yx * t.yx * d_or_identity(t.d_yx, n);
  const Mat lhs2 = t.xy * t.xy * d_or_identity(t.d_xy, r) + t.yy * t.yy * d_or_identity(t.d_yy, r);
  const Mat inv1 = gamma1.dense().inverse();
  const Mat inv2 = gamma2.dense().inverse();
  return {min_eig(inv1 - lhs1), min_eig(inv2 - lhs2)};
}

bool PdhgConfig::stepsize_condition() const {
  const auto [a, b] = stepsize_margins();
  return a > 0.0 && b > 0.0;
}

// ---------------------------------------------------------------------------
// Initial states

SolverState initial_state(const Problem& problem, const Vec& z0) {
  require_same_dim(z0.size(), problem.dim(), "initial_state");
  SolverState s;
  s.z = z0;
  return s;
}

SolverState initial_bc_state(const Problem& problem, const Vec& z0, double gamma, AnchorInit init) {
  SolverState s = initial_state(problem, z0);
  s.z_prev = z0;
  if (init == AnchorInit::Iterate) {
    s.anchor_prev = z0;
  } else {
    const auto xi = ticket(problem, 0, ticket_slot::kInit);
    s.anchor_prev = z0 - gamma * problem.oracle.eval(xi, z0);
  }
  return s;
}

SolverState initial_pdhg_state(const Problem& problem, const Vec& z0, const PdhgConfig& cfg, AnchorInit init) {
  SolverState s = initial_state(problem, z0);
  const Index n = problem.primal_dim;
  require_same_dim(cfg.gamma1.dim(), n, "initial_pdhg_state Γ₁");
  require_same_dim(cfg.gamma2.dim(), problem.dual_dim(), "initial_pdhg_state Γ₂");
  s.z_prev = z0;
  s.xbar_prev = z0.head(n);
  if (init == AnchorInit::Iterate) {
    s.anchor_prev = z0;
  } else {
    // With x̄⁻¹ = x⁰ both dual oracle terms are evaluated at z⁰, so the warm
    // anchor is z⁰ − Γ F̂(z⁰, ξ_init) for every θ.
    const auto xi = ticket(problem, 0, ticket_slot::kInit);
    const Vec g = problem.oracle.eval(xi, z0);
    const Index r = problem.dual_dim();
    s.anchor_prev.resize(z0.size());
    s.anchor_prev.head(n) = z0.head(n) - cfg.gamma1.apply(g.head(n));
    s.anchor_prev.tail(r) = z0.tail(r) - cfg.gamma2.apply(g.tail(r));
  }
  return s;
}

// ---------------------------------------------------------------------------
// Unconstrained schemes

SolverState step_eg_plus(const Problem& problem, const SolverState& state, double gamma, double alpha) {
  require_state(problem, state);
  const Vec zbar = state.z - gamma * problem.F(state.z);
  SolverState out = advance(state, state.z - alpha * gamma * problem.F(zbar));
  out.zbar = zbar;
  out.h = zbar;
  return out;
}

SolverState step_seg(const Problem& problem, const SolverState& state, double gamma, const Schedule& schedule) {
  require_state(problem, state);
  const double alpha = schedule.alpha(state.k);
  const double beta = schedule.beta(state.k);
  const auto xi = ticket(problem, state.k, ticket_slot::kExplore);
  const auto xi_bar = ticket(problem, state.k, ticket_slot::kUpdate);
  const Vec zbar = state.z - beta * gamma * problem.oracle.eval(xi, state.z);
  SolverState out = advance(state, state.z - alpha * gamma * problem.oracle.eval(xi_bar, zbar));
  out.zbar = zbar;
  out.h = zbar;
  return out;
}

SolverState step_seg_plus(const Problem& problem, const SolverState& state, double gamma,
                          const Schedule& schedule) {
  require_state(problem, state);
  const double alpha = schedule.alpha(state.k);
  const auto xi = ticket(problem, state.k, ticket_slot::kExplore);
  const auto xi_bar = ticket(problem, state.k, ticket_slot::kUpdate);
  const Vec zbar = state.z - gamma * problem.oracle.eval(xi, state.z);
  SolverState out = advance(state, state.z - alpha * gamma * problem.oracle.eval(xi_bar, zbar));
  out.zbar = zbar;
  out.h = zbar;
  return out;
}

SolverState step_bc_seg_plus(const Problem& problem, const SolverState& state, double gamma,
                             const Schedule& schedule) {
  require_state(problem, state);
  require_memory(state, "step_bc_seg_plus");
  const double alpha = schedule.alpha(state.k);
  const auto xi = ticket(problem, state.k, ticket_slot::kExplore);
  const auto xi_bar = ticket(problem, state.k, ticket_slot::kUpdate);
  // One sample ξₖ at both zᵏ and zᵏ⁻¹.
  const Vec g = problem.oracle.eval(xi, state.z);
  const Vec g_prev = problem.oracle.eval(xi, state.z_prev);
  const Vec zbar = state.z - gamma * g + (1.0 - alpha) * (state.anchor_prev - state.z_prev + gamma * g_prev);
  SolverState out = advance(state, state.z - alpha * gamma * problem.oracle.eval(xi_bar, zbar));
  out.z_prev = state.z;
  out.anchor_prev = zbar;
  out.zbar = zbar;
  out.h = zbar;
  return out;
}

// ---------------------------------------------------------------------------
// Constrained schemes

SolverState step_ceg_plus(const Problem& problem, const SolverState& state, double gamma, double alpha) {
  require_state(problem, state);
  const Vec hz = problem.H(state.z, gamma);
  const Vec zbar = problem.resolvent(hz, gamma);
  SolverState out = advance(state, state.z - alpha * (hz - problem.H(zbar, gamma)));
  out.zbar = zbar;
  out.h = hz;
  return out;
}

SolverState step_bc_pseg_plus(const Problem& problem, const SolverState& state, double gamma,
                              const Schedule& schedule) {
  require_state(problem, state);
  require_memory(state, "step_bc_pseg_plus");
  const double alpha = schedule.alpha(state.k);
  const auto xi = ticket(problem, state.k, ticket_slot::kExplore);
  const auto xi_bar = ticket(problem, state.k, ticket_slot::kUpdate);
  const Vec g = problem.oracle.eval(xi, state.z);
  const Vec g_prev = problem.oracle.eval(xi, state.z_prev);
  const Vec h = (state.z - gamma * g) + (1.0 - alpha) * (state.anchor_prev - (state.z_prev - gamma * g_prev));
  const Vec zbar = problem.resolvent(h, gamma);
  const Vec g_bar = problem.oracle.eval(xi_bar, zbar);
  SolverState out = advance(state, state.z - alpha * ((h - zbar) + gamma * g_bar));
  out.z_prev = state.z;
  out.anchor_prev = h;
  out.zbar = zbar;
  out.h = h;
  return out;
}

SolverState step_projected_baseline(ProjectedMode mode, const Problem& problem, const SolverState& state,
                                    double gamma, const Schedule& schedule) {
  require_state(problem, state);
  const double alpha = schedule.alpha(state.k);
  const auto xi = ticket(problem, state.k, ticket_slot::kExplore);
  const auto xi_bar = ticket(problem, state.k, ticket_slot::kUpdate);
  const auto& J = problem.resolvent;
  const Vec& z = state.z;
  Vec zbar;
  Vec z_next;
  switch (mode) {
    case ProjectedMode::Pseg: {
      const double beta = schedule.beta(state.k);
      zbar = J(z - beta * gamma * problem.oracle.eval(xi, z), beta * gamma);
      z_next = J(z - alpha * gamma * problem.oracle.eval(xi_bar, zbar), alpha * gamma);
      break;
    }
    case ProjectedMode::P1SegPlus: {
      const Vec g = problem.oracle.eval(xi, z);
      zbar = J(z - gamma * g, gamma);
      z_next = z + alpha * ((zbar - z) - gamma * (problem.oracle.eval(xi_bar, zbar) - g));
      break;
    }
    case ProjectedMode::P2SegPlus:
    case ProjectedMode::SfPegPlus: {
      zbar = J(z - gamma * problem.oracle.eval(xi, z), gamma);
      z_next = J(z - alpha * gamma * problem.oracle.eval(xi_bar, zbar), alpha * gamma);
      break;
    }
  }
  SolverState out = advance(state, std::move(z_next));
  out.zbar = std::move(zbar);
  return out;
}

// ---------------------------------------------------------------------------
// Nonlinearly preconditioned primal-dual extragradient

SolverState step_np_pdeg(const Problem& problem, const SolverState& state, const PdhgConfig& cfg,
                         const Schedule& schedule) {
  require_state(problem, state);
  require_memory(state, "step_np_pdeg");
  if (state.xbar_prev.size() == 0) throw std::logic_error("step_np_pdeg: missing x̄ memory");
  const Index n = problem.primal_dim;
  const Index r = problem.dual_dim();
  require_same_dim(cfg.gamma1.dim(), n, "step_np_pdeg Γ₁");
  require_same_dim(cfg.gamma2.dim(), r, "step_np_pdeg Γ₂");
  const double alpha = schedule.alpha(state.k);
  const double theta = cfg.theta;
  const auto& oracle = problem.oracle;
  const auto xi = ticket(problem, state.k, ticket_slot::kExplore);
  const auto xi_bar = ticket(problem, state.k, ticket_slot::kUpdate);

  // F̂ = (∇ₓφ̂, −∇ᵧφ̂); the updates below are written with F̂ blocks.
  const Vec& z = state.z;
  const Vec& zp = state.z_prev;
  const Vec g = oracle.eval(xi, z);
  const Vec g_prev = oracle.eval(xi, zp);

  const Vec x = z.head(n);
  const Vec y = z.tail(r);
  const Vec xp = zp.head(n);
  const Vec yp = zp.tail(r);
  const Vec xhat_prev = state.anchor_prev.head(n);
  const Vec yhat_prev = state.anchor_prev.tail(r);

  const Vec xhat = (x - cfg.gamma1.apply(g.head(n))) +
                   (1.0 - alpha) * (xhat_prev - (xp - cfg.gamma1.apply(g_prev.head(n))));
  const Vec xbar = problem.prox_f(xhat, cfg.gamma1);

  // Dual direction −(θ∇ᵧφ̂(x̄, y, ξ′) + (1 − θ)∇ᵧφ̂(z, ξ)); θ = 0 needs no ξ′ sample.
  Vec d = g.tail(r);
  Vec d_prev = g_prev.tail(r);
  if (theta != 0.0) {
    const auto xi_p = ticket(problem, state.k, ticket_slot::kPrime);
    Vec u(n + r);
    u << xbar, y;
    Vec up(n + r);
    up << state.xbar_prev, yp;
    d = theta * oracle.eval(xi_p, u).tail(r) + (1.0 - theta) * d;
    d_prev = theta * oracle.eval(xi_p, up).tail(r) + (1.0 - theta) * d_prev;
  }
  const Vec yhat = (y - cfg.gamma2.apply(d)) + (1.0 - alpha) * (yhat_prev - (yp - cfg.gamma2.apply(d_prev)));
  const Vec ybar = problem.prox_g(yhat, cfg.gamma2);

  Vec zbar(n + r);
  zbar << xbar, ybar;
  const Vec g_bar = oracle.eval(xi_bar, zbar);
  Vec z_next(n + r);
  z_next.head(n) = x - alpha * ((xhat - xbar) + cfg.gamma1.apply(g_bar.head(n)));
  z_next.tail(r) = y - alpha * ((yhat - ybar) + cfg.gamma2.apply(g_bar.tail(r)));

  SolverState out = advance(state, std::move(z_next));
  out.z_prev = z;
  out.anchor_prev.resize(n + r);
  out.anchor_prev << xhat, yhat;
  out.xbar_prev = xbar;
  out.zbar = std::move(zbar);
  out.h = out.anchor_prev;
  return out;
}

// ---------------------------------------------------------------------------
// Dispatch and driver

namespace {

PdhgConfig pdhg_config_for(const Problem& problem, const AlgorithmSpec& spec) {
  if (spec.pdhg) return *spec.pdhg;
  return PdhgConfig::scalar(problem.primal_dim, problem.dual_dim(), spec.gamma, 1.0, problem.constants.lipschitz,
                            problem.constants.mean_lipschitz);
}

AnchorInit default_init(Method m) { return m == Method::BcSegPlus ? AnchorInit::Iterate : AnchorInit::Warm; }

}  // namespace

SolverState initial_state(const Problem& problem, const AlgorithmSpec& spec, const Vec& z0) {
  const AnchorInit init = spec.init.value_or(default_init(spec.method));
  switch (spec.method) {
    case Method::BcSegPlus:
    case Method::BcPsegPlus: return initial_bc_state(problem, z0, spec.gamma, init);
    case Method::NpPdeg: return initial_pdhg_state(problem, z0, pdhg_config_for(problem, spec), init);
    default: return initial_state(problem, z0);
  }
}

SolverState step(const Problem& problem, const AlgorithmSpec& spec, const SolverState& state,
                 const Schedule& schedule) {
  const double gamma = spec.gamma;
  switch (spec.method) {
    case Method::EgPlus: return step_eg_plus(problem, state, gamma, schedule.alpha(state.k));
    case Method::Seg: return step_seg(problem, state, gamma, schedule);
    case Method::SegPlus:
    case Method::SfEgPlus: return step_seg_plus(problem, state, gamma, schedule);
    case Method::Pseg: return step_projected_baseline(ProjectedMode::Pseg, problem, state, gamma, schedule);
    case Method::P1SegPlus: return step_projected_baseline(ProjectedMode::P1SegPlus, problem, state, gamma, schedule);
    case Method::P2SegPlus: return step_projected_baseline(ProjectedMode::P2SegPlus, problem, state, gamma, schedule);
    case Method::SfPegPlus: return step_projected_baseline(ProjectedMode::SfPegPlus, problem, state, gamma, schedule);
    case Method::CegPlus: return step_ceg_plus(problem, state, gamma, schedule.alpha(state.k));
    case Method::BcSegPlus: return step_bc_seg_plus(problem, state, gamma, schedule);
    case Method::BcPsegPlus: return step_bc_pseg_plus(problem, state, gamma, schedule);
    case Method::NpPdeg: {
      // Callers driving many steps should hold a PdhgConfig in the spec.
      return step_np_pdeg(problem, state, pdhg_config_for(problem, spec), schedule);
    }
  }
  throw std::logic_error("step: unknown method");
}

std::uint64_t sample_k_star(const Schedule& schedule, std::uint64_t n_iters, std::uint64_t seed) {
  double total = 0.0;
  for (std::uint64_t k = 0; k <= n_iters; ++k) total += schedule.alpha(k);
  auto gen = SampleTicket{mix64(seed ^ 0x6b5f5f73746172ULL), 0}.stream();
  const double target = uniform01(gen) * total;
  double acc = 0.0;
  for (std::uint64_t k = 0; k <= n_iters; ++k) {
    acc += schedule.alpha(k);
    if (target < acc) return k;
  }
  return n_iters;
}

Trajectory run(const Problem& base_problem, const AlgorithmSpec& base_spec, const Schedule& schedule,
               std::uint64_t n_iters, std::uint64_t seed, const RunOptions& options) {
  if (n_iters < 1) throw std::invalid_argument("run: n_iters must be >= 1");
  const Problem problem = base_problem.reseeded(seed);
  AlgorithmSpec spec = base_spec;
  if (spec.method == Method::NpPdeg && !spec.pdhg) spec.pdhg = pdhg_config_for(problem, spec);
  const double gamma = spec.gamma;
  const std::optional<BlockDiagMatrix<>> pdhg_gamma =
      spec.pdhg ? std::optional<BlockDiagMatrix<>>(spec.pdhg->gamma()) : std::nullopt;
  const bool has_star = problem.constants.z_star.has_value();

  Trajectory traj;
  traj.method = spec.method;
  traj.n_iters = n_iters;
  traj.k_star = sample_k_star(schedule, n_iters, seed);
  traj.records.reserve(options.record_at.empty() ? static_cast<std::size_t>(n_iters + 1)
                                                 : options.record_at.size());

  auto next_record = options.record_at.begin();
  auto wanted = [&](std::uint64_t k) {
    if (options.record_at.empty()) return true;
    while (next_record != options.record_at.end() && *next_record < k) ++next_record;
    return next_record != options.record_at.end() && *next_record == k;
  };

  auto base_metrics = [&](const Vec& z, std::uint64_t k) {
    IterationRecord rec;
    rec.k = k;
    const Vec fz = problem.F(z);
    rec.fnorm_sq = fz.squaredNorm();
    rec.dist_sq = has_star ? (z - *problem.constants.z_star).squaredNorm() : kNaN;
    rec.residual = (z - problem.resolvent(Vec(z - gamma * fz), gamma)).norm();
    rec.explore_sq = kNaN;
    rec.explore_gamma_sq = kNaN;
    return rec;
  };
  // ‖v‖² for v = Γ⁻¹(h − z̄) + F z̄ ∈ T z̄; with A ≡ 0 and h = z̄ this is ‖F z̄‖².
  auto explore_metric = [&](const SolverState& s, IterationRecord& rec) {
    if (s.zbar.size() == 0 || s.h.size() == 0) return;
    const Vec diff = s.h - s.zbar;
    const Vec v = (pdhg_gamma ? pdhg_gamma->solve(diff) : Vec(diff / gamma)) + problem.F(s.zbar);
    rec.explore_sq = v.squaredNorm();
    rec.explore_gamma_sq = pdhg_gamma ? v.dot(pdhg_gamma->apply(v)) : gamma * rec.explore_sq;
  };

  const Vec z0 = options.z0.value_or(problem.z0);
  SolverState state = initial_state(problem, spec, z0);
  double initial_residual = kNaN;
  double last_residual = kNaN;
  for (std::uint64_t k = 0;; ++k) {
    const bool record = wanted(k);
    const bool finite = state.z.allFinite() && state.z.norm() <= options.divergence_bound;
    if (!finite) {
      traj.blew_up = true;
      break;
    }
    IterationRecord rec;
    if (record || k == 0 || k == n_iters) {
      rec = base_metrics(state.z, k);
      if (k == 0) initial_residual = rec.residual;
      last_residual = rec.residual;
    }
    if (k == n_iters) {
      if (record) traj.records.push_back(rec);
      break;
    }
    state = step(problem, spec, state, schedule);
    if (record) {
      explore_metric(state, rec);
      traj.records.push_back(rec);
    }
  }
  traj.final_z = state.z;

  if (traj.blew_up || !(last_residual <= initial_residual)) {
    traj.status = TerminalStatus::Diverged;
  } else if (last_residual <= options.converged_ratio * initial_residual) {
    traj.status = TerminalStatus::Converged;
  } else {
    traj.status = TerminalStatus::Running;
  }
  return traj;
}

}  // namespace weakminty
