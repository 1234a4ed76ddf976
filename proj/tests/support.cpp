#include "support.hpp"

#include <chrono>
#include <cmath>

namespace support {

double max_gap(SolverState a, SolverState b, const Stepper& step_a, const Stepper& step_b, int steps) {
  double gap = (a.z - b.z).cwiseAbs().maxCoeff();
  for (int i = 0; i < steps; ++i) {
    a = step_a(a);
    b = step_b(b);
    gap = std::max(gap, (a.z - b.z).cwiseAbs().maxCoeff());
  }
  return gap;
}

namespace {

template <typename F>
Reduction timed(std::string name, F&& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Reduction r{std::move(name), body(), 0.0};
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

const Schedule kHarmonic = Schedule::harmonic(1.0 / 18.0, 100.0);

}  // namespace

Reduction bc_seg_plus_noiseless_vs_eg_plus(int steps) {
  return timed("bc-seg+ (sigma=0) == eg+", [&] {
    const Problem p = quadratic_game(1.0, -0.1);
    const double g = 0.5;
    // The warm anchor is H z⁰ without noise; the iterate anchor is not.
    return max_gap(
        initial_bc_state(p, p.z0, g, AnchorInit::Warm), initial_state(p, p.z0),
        [&](const SolverState& s) { return step_bc_seg_plus(p, s, g, kHarmonic); },
        [&](const SolverState& s) { return step_eg_plus(p, s, g, kHarmonic.alpha(s.k)); }, steps);
  });
}

Reduction bc_pseg_plus_noiseless_vs_ceg_plus(int steps) {
  return timed("bc-pseg+ (sigma=0) == ceg+", [&] {
    const Problem p = global_forsaken();
    const double g = 0.5 / p.constants.lipschitz;
    // With σ = 0 the warm anchor is exactly H z⁰.
    return max_gap(
        initial_bc_state(p, p.z0, g, AnchorInit::Warm), initial_state(p, p.z0),
        [&](const SolverState& s) { return step_bc_pseg_plus(p, s, g, kHarmonic); },
        [&](const SolverState& s) { return step_ceg_plus(p, s, g, kHarmonic.alpha(s.k)); }, steps);
  });
}

Reduction ceg_plus_unconstrained_vs_eg_plus(int steps) {
  return timed("ceg+ (A=0) == eg+", [&] {
    const Problem p = quadratic_game(1.0, -0.1);
    const double g = 0.5;
    return max_gap(
        initial_state(p, p.z0), initial_state(p, p.z0),
        [&](const SolverState& s) { return step_ceg_plus(p, s, g, kHarmonic.alpha(s.k)); },
        [&](const SolverState& s) { return step_eg_plus(p, s, g, kHarmonic.alpha(s.k)); }, steps);
  });
}

Reduction np_pdeg_theta0_vs_bc_pseg_plus(int steps) {
  return timed("np-pdeg (theta=0, Gamma=gamma I) == bc-pseg+", [&] {
    const Problem p = global_forsaken().with_noise(0.1, 7);
    const double g = 0.5 / p.constants.lipschitz;
    const PdhgConfig cfg = PdhgConfig::scalar(1, 1, g, 0.0, p.constants.lipschitz, p.constants.mean_lipschitz);
    return max_gap(
        initial_pdhg_state(p, p.z0, cfg, AnchorInit::Warm), initial_bc_state(p, p.z0, g, AnchorInit::Warm),
        [&](const SolverState& s) { return step_np_pdeg(p, s, cfg, kHarmonic); },
        [&](const SolverState& s) { return step_bc_pseg_plus(p, s, g, kHarmonic); }, steps);
  });
}

Reduction bc_pseg_plus_unconstrained_vs_bc_seg_plus(int steps) {
  return timed("bc-pseg+ (A=0) == bc-seg+", [&] {
    const Problem p = quadratic_game(1.0, -0.1).with_noise(0.1, 11);
    const double g = 0.5;
    double gap = 0.0;
    for (AnchorInit init : {AnchorInit::Iterate, AnchorInit::Warm}) {
      gap = std::max(gap, max_gap(
                              initial_bc_state(p, p.z0, g, init), initial_bc_state(p, p.z0, g, init),
                              [&](const SolverState& s) { return step_bc_pseg_plus(p, s, g, kHarmonic); },
                              [&](const SolverState& s) { return step_bc_seg_plus(p, s, g, kHarmonic); }, steps));
    }
    return gap;
  });
}

std::vector<Reduction> reduction_lattice(int steps) {
  return {bc_seg_plus_noiseless_vs_eg_plus(steps), bc_pseg_plus_noiseless_vs_ceg_plus(steps),
          ceg_plus_unconstrained_vs_eg_plus(steps), np_pdeg_theta0_vs_bc_pseg_plus(steps),
          bc_pseg_plus_unconstrained_vs_bc_seg_plus(steps)};
}

double window_mean(const std::vector<Trajectory>& runs, std::uint64_t from, std::uint64_t to,
                   double IterationRecord::*field, bool take_sqrt) {
  double total = 0.0;
  std::size_t count = 0;
  for (const auto& t : runs) {
    for (const auto& r : t.records) {
      if (r.k < from || r.k > to) continue;
      const double v = r.*field;
      total += take_sqrt ? std::sqrt(v) : v;
      ++count;
    }
  }
  return count ? total / static_cast<double>(count) : std::nan("");
}

double grid_rho(const Mat& m, int n) {
  auto ratio = [&](double t) {
    const Vec z{{std::cos(t), std::sin(t)}};
    const Vec mz = m * z;
    return mz.squaredNorm() < 1e-300 ? INFINITY : mz.dot(z) / mz.squaredNorm();
  };
  const double h = M_PI / n;
  double best = INFINITY, at = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = ratio(h * i);
    if (v < best) best = v, at = h * i;
  }
  for (int i = -n; i <= n; ++i) best = std::min(best, ratio(at + h * i / n));
  return best;
}

}  // namespace support
