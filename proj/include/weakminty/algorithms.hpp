#ifndef WEAKMINTY_ALGORITHMS_HPP
#define WEAKMINTY_ALGORITHMS_HPP

#include "weakminty/core.hpp"
#include "weakminty/problems.hpp"
#include "weakminty/schedule.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace weakminty {

enum class Method {
  EgPlus,
  Seg,
  SegPlus,
  SfEgPlus,
  Pseg,
  P1SegPlus,
  P2SegPlus,
  SfPegPlus,
  CegPlus,
  BcSegPlus,
  BcPsegPlus,
  NpPdeg,
};

std::string_view method_name(Method m);
std::optional<Method> parse_method(std::string_view name);
const std::vector<Method>& all_methods();

/// Methods that only make sense with a nontrivial resolvent (projected baselines).
bool requires_constraints(Method m);
/// Methods written for A ≡ 0.
bool requires_unconstrained(Method m);
/// Methods whose second stepsize is held at α₀ ("stochastic feedback" EG+).
bool uses_fixed_relaxation(Method m);

/// Oracle draws are addressed by (seed, 4k + slot), so every method can replay
/// the same sample for the same role at the same iteration.
namespace ticket_slot {
inline constexpr std::uint64_t kPerStep = 4;
inline constexpr std::uint64_t kExplore = 0;  // ξₖ
inline constexpr std::uint64_t kPrime = 1;    // ξ′ₖ
inline constexpr std::uint64_t kUpdate = 2;   // ξ̄ₖ
inline constexpr std::uint64_t kInit = 3;     // used once, at k = 0, to warm-start the anchor
}  // namespace ticket_slot

inline std::uint64_t ticket_counter(std::uint64_t k, std::uint64_t slot) { return ticket_slot::kPerStep * k + slot; }

/// Lipschitz constants of the minimax splitting, measured in the Γ-weighted
/// norms, and the scaling matrices they refer to (empty = identity).
struct PdhgLipschitz {
  double xx = 0.0, xy = 0.0, yx = 0.0, yy = 0.0;
  double hat_xz = 0.0, hat_yz = 0.0, hat_yx = 0.0, hat_yy = 0.0;
  Mat d_xx, d_xy, d_yx, d_yy;
  Mat d_hat_xz, d_hat_yz, d_hat_yx, d_hat_yy;
};

struct PdhgConfig {
  BlockDiagMatrix<> gamma1;
  BlockDiagMatrix<> gamma2;
  double theta = 1.0;
  PdhgLipschitz lipschitz;

  /// Γ = blockdiag(Γ₁, Γ₂)
  BlockDiagMatrix<> gamma() const;

  /// Γᵢ = γ I with the table collapsed onto (L_F, L_F̂): L_xx² = L_yy² = γ L_F²,
  /// L̂_xz² = γ L_F̂², L̂_yx² = L̂_yy² = γ L_F̂², remaining entries zero.
  static PdhgConfig scalar(Index primal_dim, Index dual_dim, double gamma, double theta, double lipschitz,
                           double mean_lipschitz);

  /// Smallest eigenvalues of Γᵢ⁻¹ − (L²D + L²D) for both blocks; the stepsize
  /// condition holds iff both are > 0.
  std::pair<double, double> stepsize_margins() const;
  bool stepsize_condition() const;
};

/// How the bias-correction anchor (z̄⁻¹, h⁻¹ or ẑ⁻¹) is initialized.
enum class AnchorInit {
  Iterate,  // anchor⁻¹ = z⁰
  Warm,     // anchor⁻¹ = z⁰ − γ F̂(z⁰, ξ_init)  (z⁰ − Γ F̂ for NP-PDEG)
};

struct SolverState {
  Vec z;
  std::uint64_t k = 0;

  // Bias-correction memory.
  Vec z_prev;       // z^{k−1}
  Vec anchor_prev;  // z̄^{k−1} (BC-SEG+), h^{k−1} (BC-PSEG+), ẑ^{k−1} (NP-PDEG)
  Vec xbar_prev;    // x̄^{k−1} (NP-PDEG)

  // Outputs of the latest step.
  Vec zbar;  // exploration point z̄^{k−1}
  Vec h;     // anchor h^{k−1} / ẑ^{k−1} when the method has one

  bool has_memory() const { return z_prev.size() > 0; }
};

SolverState initial_state(const Problem& problem, const Vec& z0);
SolverState initial_bc_state(const Problem& problem, const Vec& z0, double gamma, AnchorInit init);
SolverState initial_pdhg_state(const Problem& problem, const Vec& z0, const PdhgConfig& cfg, AnchorInit init);

SolverState step_eg_plus(const Problem& problem, const SolverState& state, double gamma, double alpha);
SolverState step_seg(const Problem& problem, const SolverState& state, double gamma, const Schedule& schedule);
SolverState step_seg_plus(const Problem& problem, const SolverState& state, double gamma, const Schedule& schedule);
SolverState step_bc_seg_plus(const Problem& problem, const SolverState& state, double gamma,
                             const Schedule& schedule);
SolverState step_ceg_plus(const Problem& problem, const SolverState& state, double gamma, double alpha);
SolverState step_bc_pseg_plus(const Problem& problem, const SolverState& state, double gamma,
                              const Schedule& schedule);

enum class ProjectedMode { Pseg, P1SegPlus, P2SegPlus, SfPegPlus };
SolverState step_projected_baseline(ProjectedMode mode, const Problem& problem, const SolverState& state,
                                    double gamma, const Schedule& schedule);

SolverState step_np_pdeg(const Problem& problem, const SolverState& state, const PdhgConfig& cfg,
                         const Schedule& schedule);

struct AlgorithmSpec {
  Method method = Method::BcSegPlus;
  double gamma = 0.5;
  std::optional<PdhgConfig> pdhg;      // NP-PDEG only; defaults to PdhgConfig::scalar(γ, θ = 1)
  std::optional<AnchorInit> init;      // default: Iterate for BC-SEG+, Warm otherwise
};

/// One dispatching step; `schedule` is used as given (fixed-relaxation methods
/// should be handed a constant schedule).
SolverState step(const Problem& problem, const AlgorithmSpec& spec, const SolverState& state,
                 const Schedule& schedule);
SolverState initial_state(const Problem& problem, const AlgorithmSpec& spec, const Vec& z0);

struct IterationRecord {
  std::uint64_t k = 0;
  double fnorm_sq = 0.0;    // ‖F zᵏ‖²
  double dist_sq = 0.0;     // ‖zᵏ − z⋆‖², NaN without z⋆
  double residual = 0.0;    // ‖zᵏ − J_{γA}(H zᵏ)‖
  double explore_sq = 0.0;  // ‖v‖², v ∈ T z̄ᵏ from the step out of zᵏ; NaN when unavailable
  double explore_gamma_sq = 0.0;  // ‖v‖²_Γ for the same v
};

enum class TerminalStatus { Converged, Running, Diverged };
std::string_view status_name(TerminalStatus s);

struct Trajectory {
  Method method = Method::BcSegPlus;
  std::uint64_t n_iters = 0;
  std::vector<IterationRecord> records;
  std::uint64_t k_star = 0;
  TerminalStatus status = TerminalStatus::Running;
  bool blew_up = false;  // non-finite or ‖z‖ above the divergence bound; records truncated
  Vec final_z;
};

struct RunOptions {
  /// Iterations to record (sorted). Empty records every iteration.
  std::vector<std::uint64_t> record_at;
  double divergence_bound = 1e12;
  /// Final residual ≤ ratio · initial residual counts as converged.
  double converged_ratio = 1e-2;
  std::optional<Vec> z0;
};

/// Sample k⋆ ∈ {0..K} with P[k⋆ = k] = αₖ / Σⱼ αⱼ by inverse CDF on one uniform draw.
std::uint64_t sample_k_star(const Schedule& schedule, std::uint64_t n_iters, std::uint64_t seed);

Trajectory run(const Problem& problem, const AlgorithmSpec& spec, const Schedule& schedule, std::uint64_t n_iters,
               std::uint64_t seed, const RunOptions& options = {});

}  // namespace weakminty

#endif  // WEAKMINTY_ALGORITHMS_HPP
