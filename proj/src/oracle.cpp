#include "weakminty/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace weakminty {

DeterministicOperator::DeterministicOperator(Index dim, Map eval, std::optional<double> lipschitz)
    : dim_(dim), eval_(std::move(eval)), lipschitz_(lipschitz) {
  if (dim <= 0) throw std::invalid_argument("DeterministicOperator: dimension must be positive");
  if (!eval_) throw std::invalid_argument("DeterministicOperator: empty map");
  if (lipschitz_ && !(*lipschitz_ >= 0.0)) throw std::invalid_argument("DeterministicOperator: negative Lipschitz constant");
}

Vec DeterministicOperator::operator()(const Vec& z) const {
  require_same_dim(z.size(), dim_, "DeterministicOperator");
  return eval_(z);
}

DeterministicOperator DeterministicOperator::linear(const Mat& m) {
  if (m.rows() != m.cols()) throw DimensionError("DeterministicOperator::linear: matrix is not square");
  Eigen::JacobiSVD<Mat> svd(m);
  const double norm = m.size() == 0 ? 0.0 : svd.singularValues()(0);
  return DeterministicOperator(m.rows(), [m](const Vec& z) -> Vec { return m * z; }, norm);
}

DeterministicOperator DeterministicOperator::zero(Index dim) {
  return DeterministicOperator(dim, [dim](const Vec&) -> Vec { return Vec::Zero(dim); }, 0.0);
}

StochasticOracle::StochasticOracle(DeterministicOperator base, NoiseModel noise, std::optional<double> mean_lipschitz)
    : base_(base), raw_base_(std::move(base)), noise_(std::move(noise)), mean_lipschitz_(mean_lipschitz) {
  if (!base_) throw std::invalid_argument("StochasticOracle: missing base operator");
  if (const auto* g = std::get_if<AdditiveGaussian>(&noise_.kind); g && !(g->sigma >= 0.0)) {
    throw std::invalid_argument("StochasticOracle: negative noise level");
  }
  if (const auto* fs = std::get_if<FiniteSum>(&noise_.kind)) {
    if (fs->components.empty()) throw std::invalid_argument("StochasticOracle: empty finite sum");
    for (const auto& c : fs->components) require_same_dim(c.dim(), base_.dim(), "StochasticOracle component");
  }
  // Additive noise cancels in differences, so L_F̂ = L_F.
  if (!mean_lipschitz_ && !std::holds_alternative<FiniteSum>(noise_.kind)) mean_lipschitz_ = base_.lipschitz();
}

StochasticOracle StochasticOracle::finite_sum(std::vector<DeterministicOperator> components, std::uint64_t seed,
                                              std::optional<double> mean_lipschitz) {
  if (components.empty()) throw std::invalid_argument("finite_sum: no components");
  const Index dim = components.front().dim();
  auto shared = std::make_shared<const std::vector<DeterministicOperator>>(components);
  DeterministicOperator mean(dim, [shared, dim](const Vec& z) -> Vec {
    Vec acc = Vec::Zero(dim);
    for (const auto& c : *shared) acc += c(z);
    return acc / static_cast<double>(shared->size());
  });
  return StochasticOracle(std::move(mean), NoiseModel{FiniteSum{std::move(components)}, seed}, mean_lipschitz);
}

Vec StochasticOracle::additive_noise(const SampleTicket& ticket) const {
  const auto* g = std::get_if<AdditiveGaussian>(&noise_.kind);
  if (g == nullptr) return Vec();
  Vec zeta(dim());
  if (g->sigma == 0.0) {
    zeta.setZero();
    return zeta;
  }
  auto gen = ticket.stream();
  std::normal_distribution<double> normal(0.0, g->sigma);
  for (Index i = 0; i < zeta.size(); ++i) zeta(i) = normal(gen);
  return zeta;
}

std::size_t StochasticOracle::component_index(const SampleTicket& ticket) const {
  const auto* fs = std::get_if<FiniteSum>(&noise_.kind);
  if (fs == nullptr) return 0;
  auto gen = ticket.stream();
  std::uniform_int_distribution<std::size_t> pick(0, fs->components.size() - 1);
  return pick(gen);
}

Vec StochasticOracle::eval(const SampleTicket& ticket, const Vec& z) const {
  require_same_dim(z.size(), dim(), "StochasticOracle::eval");
  Vec out = std::visit(
      [&](const auto& kind) -> Vec {
        using K = std::decay_t<decltype(kind)>;
        if constexpr (std::is_same_v<K, NoNoise>) {
          return raw_base_(z);
        } else if constexpr (std::is_same_v<K, AdditiveGaussian>) {
          Vec v = raw_base_(z);
          if (kind.sigma == 0.0) return v;
          // Same draws, in the same order, as additive_noise(ticket).
          auto gen = ticket.stream();
          std::normal_distribution<double> normal(0.0, kind.sigma);
          for (Index i = 0; i < v.size(); ++i) v(i) += normal(gen);
          return v;
        } else {
          return kind.components[component_index(ticket)](z);
        }
      },
      noise_.kind);
  if (sign_ < 0.0) out = -out;
  return out;
}

std::optional<double> StochasticOracle::variance_bound() const {
  if (std::holds_alternative<NoNoise>(noise_.kind)) return 0.0;
  if (const auto* g = std::get_if<AdditiveGaussian>(&noise_.kind)) {
    return static_cast<double>(dim()) * g->sigma * g->sigma;
  }
  return std::nullopt;
}

double StochasticOracle::per_coordinate_sigma() const {
  if (const auto* g = std::get_if<AdditiveGaussian>(&noise_.kind)) return g->sigma;
  return 0.0;
}

StochasticOracle StochasticOracle::reseeded(std::uint64_t seed) const {
  StochasticOracle out = *this;
  out.noise_.rng_seed = seed;
  return out;
}

StochasticOracle StochasticOracle::negated() const {
  StochasticOracle out = *this;
  out.sign_ = -sign_;
  out.base_ = out.sign_ < 0.0 ? negate(raw_base_) : raw_base_;
  return out;
}

double estimate_mean_lipschitz(const StochasticOracle& oracle, int n_pairs, int n_tickets, double radius,
                               std::uint64_t pair_seed) {
  if (n_pairs < 1 || n_tickets < 1) throw std::invalid_argument("estimate_mean_lipschitz: counts must be >= 1");
  const Index n = oracle.dim();
  SplitMix64 gen(mix64(pair_seed));
  std::normal_distribution<double> normal;
  auto sample_ball = [&]() {
    Vec v(n);
    for (Index i = 0; i < n; ++i) v(i) = normal(gen);
    const double r = radius * std::pow(uniform01(gen), 1.0 / static_cast<double>(n));
    const double norm = v.norm();
    return norm > 0.0 ? Vec(v * (r / norm)) : Vec(Vec::Zero(n));
  };
  double best = 0.0;
  bool any = false;
  for (int p = 0; p < n_pairs; ++p) {
    const Vec z = sample_ball();
    const Vec zp = sample_ball();
    const double dz = (z - zp).norm();
    if (dz == 0.0) continue;
    any = true;
    double acc = 0.0;
    for (int t = 0; t < n_tickets; ++t) {
      const auto ticket = oracle.draw(static_cast<std::uint64_t>(t));
      acc += (oracle.eval(ticket, z) - oracle.eval(ticket, zp)).squaredNorm();
    }
    best = std::max(best, std::sqrt(acc / n_tickets) / dz);
  }
  if (!any) throw std::invalid_argument("estimate_mean_lipschitz: all sampled pairs were degenerate");
  return best;
}

FiniteSumGap finite_sum_gap_report(int n, double l) {
  if (n < 1) throw std::invalid_argument("finite_sum_gap_report: N must be >= 1");
  if (!(l > 0.0)) throw std::invalid_argument("finite_sum_gap_report: L must be positive");
  const double nd = n;
  std::vector<DeterministicOperator> comps;
  comps.reserve(static_cast<std::size_t>(n));
  comps.push_back(DeterministicOperator::linear(Mat::Constant(1, 1, nd * l)));
  for (int i = 1; i < n; ++i) comps.push_back(DeterministicOperator::linear(Mat::Constant(1, 1, l)));

  FiniteSumGap out;
  out.lipschitz = (2.0 * nd - 1.0) * l / nd;
  out.mean_lipschitz = std::sqrt((nd * nd + nd - 1.0) / nd) * l;
  out.ratio = out.mean_lipschitz / out.lipschitz;
  out.oracle = StochasticOracle::finite_sum(std::move(comps), 0, out.mean_lipschitz);
  return out;
}

DeterministicOperator negate(const DeterministicOperator& op) {
  return DeterministicOperator(op.dim(), [op](const Vec& z) -> Vec { return -op(z); }, op.lipschitz());
}

StochasticOracle negate(const StochasticOracle& oracle) { return oracle.negated(); }

}  // namespace weakminty
