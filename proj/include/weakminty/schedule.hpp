#ifndef WEAKMINTY_SCHEDULE_HPP
#define WEAKMINTY_SCHEDULE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

namespace weakminty {

/// Diminishing (or constant) relaxation stepsizes αₖ and, for SEG, βₖ.
class Schedule {
 public:
  struct Constant {
    double alpha = 1.0 / 18.0;
  };
  /// α₀ / (k/c + 1)
  struct Harmonic {
    double alpha0 = 1.0 / 18.0;
    double c = 100.0;
  };
  /// α₀ / √(k/c + 1)
  struct InverseSqrt {
    double alpha0 = 1.0 / 18.0;
    double c = 100.0;
  };
  /// 1 / (k + r)
  struct RobbinsMonro {
    double r = 2.0;
  };
  using Kind = std::variant<Constant, Harmonic, InverseSqrt, RobbinsMonro>;

  Schedule() : Schedule(Harmonic{}) {}
  explicit Schedule(Kind alpha, std::optional<Kind> beta = std::nullopt);

  static Schedule constant(double alpha) { return Schedule(Constant{alpha}); }
  static Schedule harmonic(double alpha0, double c) { return Schedule(Harmonic{alpha0, c}); }
  static Schedule inverse_sqrt(double alpha0, double c) { return Schedule(InverseSqrt{alpha0, c}); }
  static Schedule robbins_monro(double r) { return Schedule(RobbinsMonro{r}); }

  double alpha(std::uint64_t k) const { return eval(alpha_, k); }
  /// βₖ; mirrors αₖ unless a separate schedule was given.
  double beta(std::uint64_t k) const { return beta_ ? eval(*beta_, k) : alpha(k); }
  double alpha0() const { return alpha(0); }

  const Kind& alpha_kind() const { return alpha_; }
  const std::optional<Kind>& beta_kind() const { return beta_; }
  bool is_constant() const { return std::holds_alternative<Constant>(alpha_); }

  /// Same schedule held at its initial value.
  Schedule frozen() const { return Schedule(Constant{alpha0()}); }

  std::string describe() const;

 private:
  static double eval(const Kind& kind, std::uint64_t k);
  static void validate(const Kind& kind);

  Kind alpha_;
  std::optional<Kind> beta_;
};

}  // namespace weakminty

#endif  // WEAKMINTY_SCHEDULE_HPP
