#ifndef WEAKMINTY_TESTS_SUPPORT_HPP
#define WEAKMINTY_TESTS_SUPPORT_HPP

#include "weakminty/algorithms.hpp"
#include "weakminty/problems.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace support {

using namespace weakminty;

/// Largest per-coordinate gap between two trajectories driven step by step.
using Stepper = std::function<SolverState(const SolverState&)>;
double max_gap(SolverState a, SolverState b, const Stepper& step_a, const Stepper& step_b, int steps);

struct Reduction {
  std::string name;
  double max_gap = 0.0;
  double seconds = 0.0;
};

/// The exact reductions between the methods, 10³ steps each.
Reduction bc_seg_plus_noiseless_vs_eg_plus(int steps = 1000);
Reduction bc_pseg_plus_noiseless_vs_ceg_plus(int steps = 1000);
Reduction ceg_plus_unconstrained_vs_eg_plus(int steps = 1000);
Reduction np_pdeg_theta0_vs_bc_pseg_plus(int steps = 1000);
Reduction bc_pseg_plus_unconstrained_vs_bc_seg_plus(int steps = 1000);
std::vector<Reduction> reduction_lattice(int steps = 1000);

/// Mean over seeds of a metric averaged over the iterations in [from, to].
double window_mean(const std::vector<Trajectory>& runs, std::uint64_t from, std::uint64_t to,
                   double IterationRecord::*field, bool take_sqrt);

/// min over unit vectors of ⟨Mz, z⟩ / ‖Mz‖² for a 2×2 M: angular grid, then a
/// second grid around the best cell.
double grid_rho(const Mat& m, int n = 20000);

}  // namespace support

#endif
