#ifndef WEAKMINTY_PROBLEMS_HPP
#define WEAKMINTY_PROBLEMS_HPP

#include "weakminty/core.hpp"
#include "weakminty/oracle.hpp"

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace weakminty {

/// Resolvent (id + γA)⁻¹ of a maximally monotone A. The matrix form evaluates
/// the preconditioned resolvent (Γ⁻¹ + A)⁻¹Γ⁻¹, i.e. solves v ∈ z̄ + Γ A z̄.
class Resolvent {
 public:
  using ScalarStep = std::function<Vec(const Vec&, double)>;
  using MatrixStep = std::function<Vec(const Vec&, const BlockDiagMatrix<>&)>;

  Resolvent();  // identity (A ≡ 0)
  Resolvent(ScalarStep scalar, MatrixStep matrix, bool identity = false);

  Vec operator()(const Vec& v, double step) const { return identity_ ? v : scalar_(v, step); }
  Vec operator()(const Vec& v, const BlockDiagMatrix<>& step) const { return identity_ ? v : matrix_(v, step); }
  bool is_identity() const { return identity_; }

 private:
  ScalarStep scalar_;
  MatrixStep matrix_;
  bool identity_ = true;
};

/// Projection onto the box [−bound, bound]ⁿ, the resolvent of its normal cone
/// for every step size.
Resolvent box_resolvent(double bound);

/// Resolvent of a separable pair A = (∂f, ∂g) acting on z = (x, y), x ∈ ℝ^primal_dim.
Resolvent split_resolvent(Resolvent prox_f, Resolvent prox_g, Index primal_dim);

struct ProblemConstants {
  double lipschitz = 0.0;       // L_F
  double mean_lipschitz = 0.0;  // L_F̂
  double sigma = 0.0;           // per-coordinate noise std
  double variance = 0.0;        // σ_F² = n σ²
  std::optional<double> rho;
  std::optional<Vec> z_star;
};

/// Inclusion 0 ∈ Az + Fz stated as a minimax problem over z = (x, y).
struct Problem {
  std::string name;
  DeterministicOperator F;
  StochasticOracle oracle;
  Resolvent resolvent;  // (id + γA)⁻¹; identity when A ≡ 0
  Resolvent prox_f;     // acts on x
  Resolvent prox_g;     // acts on y
  Index primal_dim = 0;
  bool constrained = false;
  ProblemConstants constants;
  Vec z0;

  Index dim() const { return F.dim(); }
  Index dual_dim() const { return dim() - primal_dim; }

  /// Copy with additive Gaussian noise of per-coordinate std `sigma`.
  Problem with_noise(double sigma, std::uint64_t seed) const;
  /// Copy whose oracle draws from `seed`.
  Problem reseeded(std::uint64_t seed) const;
  /// H z = z − γ F z with the deterministic F.
  Vec H(const Vec& z, double gamma) const { return z - gamma * F(z); }
};

/// F(x, y) = (b x + a y, −a x + b y) with a = √(L² − L⁴ρ²), b = L² ρ.
Problem quadratic_game(double lipschitz, double rho);

/// ψ′(z) = (4/7) z⁵ − (4/3) z³ + (2/3) z.
double forsaken_dpsi(double z);
/// Lipschitz constant of the GlobalForsaken F restricted to its box: the largest
/// Jacobian spectral norm, attained where ψ″ takes its extreme values.
double forsaken_box_lipschitz();
Problem global_forsaken();

/// φ(x, y) = (x − shift)(y − shift) on the box ‖(x, y)‖∞ ≤ bound.
Problem bilinear_box(double shift, double bound);

/// Quadratic game translated to have its solution at (shift, shift), on a box.
Problem shifted_quadratic_box(double lipschitz, double rho, double shift, double bound);

using GradientMap = std::function<Vec(const Vec& x, const Vec& y)>;

/// F(z) = (∇ₓφ, −∇ᵧφ) and A = (∂f, ∂g) given by their proximal maps.
Problem minimax_to_inclusion(Index primal_dim, Index dual_dim, GradientMap grad_x, GradientMap grad_y,
                             Resolvent prox_f, Resolvent prox_g, std::optional<double> lipschitz = std::nullopt);

/// Names accepted by make_problem.
const std::vector<std::string>& problem_names();

struct ProblemParams {
  double lipschitz = 1.0;
  double rho = -0.1;
  double shift = 0.9;
  double bound = 1.0;
};

/// Construct a problem by name: "quadratic", "global-forsaken", "bilinear-box",
/// "shifted-quadratic-box". Throws std::invalid_argument for unknown names.
Problem make_problem(std::string_view name, const ProblemParams& params = {});

}  // namespace weakminty

#endif  // WEAKMINTY_PROBLEMS_HPP
