#include "weakminty/problems.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace weakminty {

Resolvent::Resolvent() = default;

Resolvent::Resolvent(ScalarStep scalar, MatrixStep matrix, bool identity)
    : scalar_(std::move(scalar)), matrix_(std::move(matrix)), identity_(identity) {
  if (!identity_ && (!scalar_ || !matrix_)) throw std::invalid_argument("Resolvent: missing map");
}

Resolvent box_resolvent(double bound) {
  if (!(bound > 0.0)) throw std::invalid_argument("box_resolvent: bound must be positive");
  auto clamp = [bound](const Vec& v) -> Vec { return v.cwiseMax(-bound).cwiseMin(bound); };
  return Resolvent([clamp](const Vec& v, double) { return clamp(v); },
                   [clamp](const Vec& v, const BlockDiagMatrix<>&) { return clamp(v); });
}

Resolvent split_resolvent(Resolvent prox_f, Resolvent prox_g, Index primal_dim) {
  if (prox_f.is_identity() && prox_g.is_identity()) return Resolvent();
  auto scalar = [prox_f, prox_g, primal_dim](const Vec& v, double step) -> Vec {
    Vec out(v.size());
    const Index r = v.size() - primal_dim;
    out.head(primal_dim) = prox_f(Vec(v.head(primal_dim)), step);
    out.tail(r) = prox_g(Vec(v.tail(r)), step);
    return out;
  };
  auto matrix = [prox_f, prox_g, primal_dim](const Vec& v, const BlockDiagMatrix<>& step) -> Vec {
    Vec out(v.size());
    const Index r = v.size() - primal_dim;
    out.head(primal_dim) = prox_f(Vec(v.head(primal_dim)), step.sub(0, primal_dim));
    out.tail(r) = prox_g(Vec(v.tail(r)), step.sub(primal_dim, r));
    return out;
  };
  return Resolvent(scalar, matrix);
}

Problem Problem::with_noise(double sigma, std::uint64_t seed) const {
  if (!(sigma >= 0.0)) throw std::invalid_argument("with_noise: sigma must be non-negative");
  Problem out = *this;
  NoiseModel noise{sigma > 0.0 ? NoiseKind{AdditiveGaussian{sigma}} : NoiseKind{NoNoise{}}, seed};
  out.oracle = StochasticOracle(F, noise, constants.mean_lipschitz);
  out.constants.sigma = sigma;
  out.constants.variance = static_cast<double>(dim()) * sigma * sigma;
  return out;
}

Problem Problem::reseeded(std::uint64_t seed) const {
  Problem out = *this;
  out.oracle = oracle.reseeded(seed);
  return out;
}

namespace {

// `box`: both proxes project onto the same box, so the joint resolvent is one clamp.
Problem finish(Problem p, std::optional<double> box = std::nullopt) {
  p.oracle = StochasticOracle(p.F, NoiseModel{}, p.constants.mean_lipschitz);
  p.resolvent = box ? box_resolvent(*box) : split_resolvent(p.prox_f, p.prox_g, p.primal_dim);
  p.constrained = !p.resolvent.is_identity();
  if (p.z0.size() == 0) p.z0 = Vec::Ones(p.dim());
  return p;
}

void check_quadratic_params(double lipschitz, double rho) {
  if (!(lipschitz > 0.0)) throw std::invalid_argument("quadratic game: L must be positive");
  if (std::abs(rho) > 1.0 / (2.0 * lipschitz)) throw std::invalid_argument("quadratic game: |rho| must be <= 1/(2L)");
}

Mat quadratic_matrix(double lipschitz, double rho) {
  const double a = std::sqrt(lipschitz * lipschitz - std::pow(lipschitz, 4) * rho * rho);
  const double b = lipschitz * lipschitz * rho;
  Mat m(2, 2);
  m << b, a, -a, b;
  return m;
}

}  // namespace

Problem quadratic_game(double lipschitz, double rho) {
  check_quadratic_params(lipschitz, rho);
  const Mat m = quadratic_matrix(lipschitz, rho);
  const double a = m(0, 1);
  const double b = m(0, 0);
  Problem p;
  p.name = "quadratic";
  p.F = DeterministicOperator(
      2, [a, b](const Vec& z) -> Vec { return Vec{{b * z(0) + a * z(1), -a * z(0) + b * z(1)}}; }, lipschitz);
  p.primal_dim = 1;
  p.constants.lipschitz = lipschitz;
  p.constants.mean_lipschitz = lipschitz;
  p.constants.rho = rho;
  p.constants.z_star = Vec::Zero(2);
  return finish(std::move(p));
}

double forsaken_dpsi(double z) {
  const double z2 = z * z;
  return z * ((4.0 / 7.0) * z2 * z2 - (4.0 / 3.0) * z2 + 2.0 / 3.0);
}

double forsaken_box_lipschitz() {
  // ψ″(z) = (20/7) z⁴ − 4 z² + 2/3 over |z| ≤ 4/3; extremes at z² = 0.7 and |z| = 4/3.
  auto ddpsi = [](double z2) { return (20.0 / 7.0) * z2 * z2 - 4.0 * z2 + 2.0 / 3.0; };
  const double bound = 4.0 / 3.0;
  const double lo = ddpsi(0.7);
  const double hi = std::max({ddpsi(0.0), ddpsi(bound * bound)});
  // ‖[[p, 1], [−1, q]]‖₂ is convex in (p, q), so its max over the rectangle is at a corner.
  double best = 0.0;
  for (double p : {lo, hi}) {
    for (double q : {lo, hi}) {
      Mat j(2, 2);
      j << p, 1.0, -1.0, q;
      best = std::max(best, Eigen::JacobiSVD<Mat>(j).singularValues()(0));
    }
  }
  return best;
}

Problem global_forsaken() {
  const double bound = 4.0 / 3.0;
  const double lipschitz = forsaken_box_lipschitz();
  Problem p;
  p.name = "global-forsaken";
  p.F = DeterministicOperator(
      2,
      [](const Vec& z) -> Vec { return Vec{{z(1) + forsaken_dpsi(z(0)), -z(0) + forsaken_dpsi(z(1))}}; },
      lipschitz);
  p.primal_dim = 1;
  p.prox_f = box_resolvent(bound);
  p.prox_g = box_resolvent(bound);
  p.constants.lipschitz = lipschitz;
  p.constants.mean_lipschitz = lipschitz;
  p.constants.z_star = Vec::Zero(2);
  return finish(std::move(p), bound);
}

Problem bilinear_box(double shift, double bound) {
  if (!(bound > 0.0) || !(std::abs(shift) < bound)) {
    throw std::invalid_argument("bilinear_box: need bound > 0 and |shift| < bound");
  }
  Problem p;
  p.name = "bilinear-box";
  p.F = DeterministicOperator(
      2, [shift](const Vec& z) -> Vec { return Vec{{z(1) - shift, -(z(0) - shift)}}; }, 1.0);
  p.primal_dim = 1;
  p.prox_f = box_resolvent(bound);
  p.prox_g = box_resolvent(bound);
  p.constants.lipschitz = 1.0;
  p.constants.mean_lipschitz = 1.0;
  p.constants.rho = 0.0;
  p.constants.z_star = Vec::Constant(2, shift);
  return finish(std::move(p), bound);
}

Problem shifted_quadratic_box(double lipschitz, double rho, double shift, double bound) {
  check_quadratic_params(lipschitz, rho);
  if (!(bound > 0.0) || !(std::abs(shift) < bound)) {
    throw std::invalid_argument("shifted_quadratic_box: need bound > 0 and |shift| < bound");
  }
  const Mat m = quadratic_matrix(lipschitz, rho);
  const double a = m(0, 1);
  const double b = m(0, 0);
  Problem p;
  p.name = "shifted-quadratic-box";
  p.F = DeterministicOperator(
      2,
      [a, b, shift](const Vec& z) -> Vec {
        const double x = z(0) - shift;
        const double y = z(1) - shift;
        return Vec{{b * x + a * y, -a * x + b * y}};
      },
      lipschitz);
  p.primal_dim = 1;
  p.prox_f = box_resolvent(bound);
  p.prox_g = box_resolvent(bound);
  p.constants.lipschitz = lipschitz;
  p.constants.mean_lipschitz = lipschitz;
  p.constants.rho = rho;
  p.constants.z_star = Vec::Constant(2, shift);
  return finish(std::move(p), bound);
}

Problem minimax_to_inclusion(Index primal_dim, Index dual_dim, GradientMap grad_x, GradientMap grad_y,
                             Resolvent prox_f, Resolvent prox_g, std::optional<double> lipschitz) {
  if (primal_dim <= 0 || dual_dim <= 0) throw DimensionError("minimax_to_inclusion: block dimensions must be positive");
  if (!grad_x || !grad_y) throw std::invalid_argument("minimax_to_inclusion: missing gradient");
  const Index n = primal_dim;
  const Index r = dual_dim;
  Problem p;
  p.name = "minimax";
  p.F = DeterministicOperator(
      n + r,
      [grad_x, grad_y, n, r](const Vec& z) -> Vec {
        const Vec x = z.head(n);
        const Vec y = z.tail(r);
        Vec out(n + r);
        out.head(n) = grad_x(x, y);
        out.tail(r) = -grad_y(x, y);
        return out;
      },
      lipschitz);
  p.primal_dim = n;
  p.prox_f = std::move(prox_f);
  p.prox_g = std::move(prox_g);
  p.constants.lipschitz = lipschitz.value_or(0.0);
  p.constants.mean_lipschitz = lipschitz.value_or(0.0);
  return finish(std::move(p));
}

const std::vector<std::string>& problem_names() {
  static const std::vector<std::string> names{"quadratic", "global-forsaken", "bilinear-box", "shifted-quadratic-box"};
  return names;
}

Problem make_problem(std::string_view name, const ProblemParams& params) {
  if (name == "quadratic") return quadratic_game(params.lipschitz, params.rho);
  if (name == "global-forsaken") return global_forsaken();
  if (name == "bilinear-box") return bilinear_box(params.shift, params.bound);
  if (name == "shifted-quadratic-box") {
    return shifted_quadratic_box(params.lipschitz, params.rho, params.shift, params.bound);
  }
  throw std::invalid_argument("unknown problem '" + std::string(name) + "'");
}

}  // namespace weakminty
