#include "weakminty/schedule.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace weakminty {

Schedule::Schedule(Kind alpha, std::optional<Kind> beta) : alpha_(alpha), beta_(beta) {
  validate(alpha_);
  if (beta_) validate(*beta_);
}

void Schedule::validate(const Kind& kind) {
  std::visit(
      [](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, Constant>) {
          if (!(s.alpha > 0.0 && s.alpha <= 1.0)) throw std::invalid_argument("schedule: alpha must lie in (0, 1]");
        } else if constexpr (std::is_same_v<S, RobbinsMonro>) {
          if (!(s.r >= 1.0)) throw std::invalid_argument("schedule: r must be >= 1");
        } else {
          if (!(s.alpha0 > 0.0 && s.alpha0 <= 1.0)) throw std::invalid_argument("schedule: alpha0 must lie in (0, 1]");
          if (!(s.c > 0.0)) throw std::invalid_argument("schedule: c must be positive");
        }
      },
      kind);
}

double Schedule::eval(const Kind& kind, std::uint64_t k) {
  const double kd = static_cast<double>(k);
  return std::visit(
      [kd](const auto& s) -> double {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, Constant>) {
          return s.alpha;
        } else if constexpr (std::is_same_v<S, Harmonic>) {
          return s.alpha0 / (kd / s.c + 1.0);
        } else if constexpr (std::is_same_v<S, InverseSqrt>) {
          return s.alpha0 / std::sqrt(kd / s.c + 1.0);
        } else {
          return 1.0 / (kd + s.r);
        }
      },
      kind);
}

std::string Schedule::describe() const {
  std::ostringstream os;
  std::visit(
      [&os](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, Constant>) os << "constant(" << s.alpha << ")";
        else if constexpr (std::is_same_v<S, Harmonic>) os << "harmonic(" << s.alpha0 << ", c=" << s.c << ")";
        else if constexpr (std::is_same_v<S, InverseSqrt>) os << "inverse-sqrt(" << s.alpha0 << ", c=" << s.c << ")";
        else os << "robbins-monro(r=" << s.r << ")";
      },
      alpha_);
  return os.str();
}

}  // namespace weakminty
