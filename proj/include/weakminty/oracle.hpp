#ifndef WEAKMINTY_ORACLE_HPP
#define WEAKMINTY_ORACLE_HPP

#include "weakminty/core.hpp"
#include "weakminty/rng.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

namespace weakminty {

/// Single-valued operator F: ℝⁿ → ℝⁿ with an optional declared Lipschitz constant.
class DeterministicOperator {
 public:
  using Map = std::function<Vec(const Vec&)>;

  DeterministicOperator() = default;
  DeterministicOperator(Index dim, Map eval, std::optional<double> lipschitz = std::nullopt);

  Vec operator()(const Vec& z) const;
  Index dim() const { return dim_; }
  std::optional<double> lipschitz() const { return lipschitz_; }
  explicit operator bool() const { return static_cast<bool>(eval_); }

  /// A linear operator z ↦ M z with Lipschitz constant ‖M‖₂.
  static DeterministicOperator linear(const Mat& m);
  static DeterministicOperator zero(Index dim);

 private:
  Index dim_ = 0;
  Map eval_;
  std::optional<double> lipschitz_;
};

struct NoNoise {};
/// F̂(z, ξ) = Fz + ζ(ξ), ζ ~ N(0, σ² I); one ζ per ticket.
struct AdditiveGaussian {
  double sigma = 0.0;
};
/// F̂(z, ξ) = F_i(z), i uniform on {0, …, N−1}; the mean operator is the average.
struct FiniteSum {
  std::vector<DeterministicOperator> components;
};
using NoiseKind = std::variant<NoNoise, AdditiveGaussian, FiniteSum>;

struct NoiseModel {
  NoiseKind kind = NoNoise{};
  std::uint64_t rng_seed = 0;
};

/// Two-point stochastic oracle F̂(·, ξ) around a deterministic base operator.
class StochasticOracle {
 public:
  StochasticOracle() = default;
  StochasticOracle(DeterministicOperator base, NoiseModel noise,
                   std::optional<double> mean_lipschitz = std::nullopt);

  /// Finite-sum oracle whose base operator is the component average.
  static StochasticOracle finite_sum(std::vector<DeterministicOperator> components, std::uint64_t seed,
                                     std::optional<double> mean_lipschitz = std::nullopt);

  SampleTicket draw(std::uint64_t counter) const { return SampleTicket{noise_.rng_seed, counter}; }
  Vec eval(const SampleTicket& ticket, const Vec& z) const;

  /// Noise vector ζ(ξ) for additive noise; empty for other kinds.
  Vec additive_noise(const SampleTicket& ticket) const;
  /// Component index for finite-sum noise.
  std::size_t component_index(const SampleTicket& ticket) const;

  const DeterministicOperator& base() const { return base_; }
  const NoiseModel& noise() const { return noise_; }
  Index dim() const { return base_.dim(); }
  double sign() const { return sign_; }

  /// σ_F² = E‖F̂(z,ξ) − Fz‖²; n σ² for isotropic Gaussian noise, 0 without noise,
  /// unset for finite sums (point dependent).
  std::optional<double> variance_bound() const;
  /// Per-coordinate standard deviation for Gaussian noise.
  double per_coordinate_sigma() const;
  std::optional<double> mean_lipschitz() const { return mean_lipschitz_; }

  StochasticOracle reseeded(std::uint64_t seed) const;
  StochasticOracle negated() const;

 private:
  DeterministicOperator base_;      // sign applied
  DeterministicOperator raw_base_;  // as constructed
  NoiseModel noise_;
  std::optional<double> mean_lipschitz_;
  double sign_ = 1.0;
};

inline SampleTicket draw_sample(const StochasticOracle& oracle, std::uint64_t counter) {
  return oracle.draw(counter);
}
inline Vec eval_at(const StochasticOracle& oracle, const SampleTicket& ticket, const Vec& z) {
  return oracle.eval(ticket, z);
}

/// Statistical lower bound on L_F̂: max over random point pairs (uniform in the
/// ball of `radius` about the origin) of sqrt(mean_ξ ‖F̂(z,ξ) − F̂(z′,ξ)‖²)/‖z − z′‖.
double estimate_mean_lipschitz(const StochasticOracle& oracle, int n_pairs, int n_tickets,
                               double radius = 1.0, std::uint64_t pair_seed = 0x5eed);

struct FiniteSumGap {
  double lipschitz = 0.0;       // L_F of the mean operator
  double mean_lipschitz = 0.0;  // L_F̂
  double ratio = 0.0;           // L_F̂ / L_F
  StochasticOracle oracle;      // scalar worst-case finite sum
};

/// Worst-case scalar finite sum: one component N·L·z, N−1 components L·z.
FiniteSumGap finite_sum_gap_report(int n, double l);

DeterministicOperator negate(const DeterministicOperator& op);
StochasticOracle negate(const StochasticOracle& oracle);

}  // namespace weakminty

#endif  // WEAKMINTY_ORACLE_HPP
