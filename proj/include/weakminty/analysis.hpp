#ifndef WEAKMINTY_ANALYSIS_HPP
#define WEAKMINTY_ANALYSIS_HPP

#include "weakminty/algorithms.hpp"
#include "weakminty/core.hpp"
#include "weakminty/schedule.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace weakminty {

/// Outcome of checking one convergence theorem. Residuals follow the
/// convention "≤ 0 means satisfied".
struct TheoremReport {
  std::string theorem;
  std::map<std::string, double> residuals;
  bool satisfied = false;
  std::map<std::uint64_t, double> rate_envelope;  // K -> bound; empty unless satisfied
  std::map<std::string, double> constants;

  double residual(const std::string& name) const { return residuals.at(name); }
  double constant(const std::string& name) const { return constants.at(name); }
  double envelope(std::uint64_t K) const { return rate_envelope.at(K); }
};

/// Problem-dependent numerators of the rate envelopes.
struct EnvelopeInputs {
  double initial_dist_sq = 0.0;  // ‖z⁰ − z⋆‖²  (Γ⁻¹-norm for the primal-dual theorem)
  double anchor_gap_sq = 0.0;    // E‖h⁻¹ − H z⁻¹‖²  (Γ-norm analogue for the primal-dual theorem)
  std::vector<std::uint64_t> horizons;
};

/// BC-SEG+ random-iterate rate for a diminishing schedule.
/// Throws std::domain_error unless 0 < γ < 1/L_F.
TheoremReport check_thm_bcsegplus_rate(double lipschitz, double mean_lipschitz, double sigma_f, double rho,
                                       double gamma, const Schedule& schedule, const EnvelopeInputs& env = {});

/// BC-SEG+ almost-sure convergence with αₖ = 1/(k + r). Reports the smallest
/// integer r ≤ 10⁹ for which the requirement holds as constant "r_min"
/// (absent when none does).
TheoremReport check_thm_bcsegplus_as(double lipschitz, double mean_lipschitz, double rho, double gamma,
                                     std::uint64_t r);

/// Left-hand side of the almost-sure requirement at index k for αₖ = 1/(k + r).
double bcsegplus_as_lhs(double lipschitz, double mean_lipschitz, double gamma, double r, std::uint64_t k);

/// BC-PSEG+ with a constant exploration stepsize; the metric is dist(0, T z̄)².
TheoremReport check_thm_const(double lipschitz, double mean_lipschitz, double sigma_f, double rho, double gamma,
                              const Schedule& schedule, const EnvelopeInputs& env = {});

/// NP-PDEG; `sigma_gamma_sq` is the Γ-weighted variance bound E‖F̂ − F‖²_Γ.
/// Throws std::domain_error when the stepsize condition fails.
TheoremReport check_thm_pdhg(const PdhgConfig& cfg, double rho, double sigma_gamma_sq, const Schedule& schedule,
                             const EnvelopeInputs& env = {});

/// SEG+ on an affine operator.
TheoremReport check_seg_plus_affine(double lipschitz, double sigma_f, double rho, double gamma,
                                    const Schedule& schedule, const EnvelopeInputs& env = {});

/// ½(M + Mᵀ) − ρ MᵀM ⪰ 0, i.e. ⟨Mz, z⟩ ≥ ρ‖Mz‖² for all z.
bool certify_weak_mvi_linear(const Mat& m, double rho, double tol = 1e-10);
/// ½(M + Mᵀ) − ρ̄ MᵀM ⪯ 0, i.e. ⟨Mz, z⟩ ≤ ρ̄‖Mz‖² for all z.
bool certify_negative_weak_mvi_linear(const Mat& m, double rho_bar, double tol = 1e-10);

/// Admissible ρ for a linear operator: (−1/(2‖M‖), upper], where upper is the
/// largest certified ρ (+∞ when M = 0).
struct WeakMviRange {
  double lower = 0.0;
  double upper = 0.0;
  bool nonempty() const { return upper > lower; }
};
WeakMviRange weak_mvi_range(const Mat& m);

enum class RateMetric {
  FnormSq,          // ‖F zᵏ‖²
  ExploreSq,        // dist(0, T z̄ᵏ)² surrogate
  ExploreGammaSq,   // Γ-weighted surrogate
};

struct RateComparison {
  bool claimed = false;  // false when the report is not satisfied
  std::uint64_t horizon = 0;
  double empirical = 0.0;
  double envelope = 0.0;
  bool holds = false;  // claimed and empirical ≤ envelope
};

/// Σₖ (αₖ / Σⱼ αⱼ) · mean over trajectories of the metric at k, for k = 0..K.
/// Every trajectory must carry a record for each k ≤ K.
RateComparison empirical_rate_vs_envelope(const std::vector<Trajectory>& trajectories, const Schedule& schedule,
                                          const TheoremReport& report, std::uint64_t horizon, RateMetric metric);

}  // namespace weakminty

#endif  // WEAKMINTY_ANALYSIS_HPP
