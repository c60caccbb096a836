#pragma once

// Brute-force references: exhaustive simplex lattice search, central finite
// differences and a dense scalar scan. Slow on purpose and free of any
// solver logic, so they can check the solvers.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "fdpo/kernels.hpp"

namespace fdpo {

struct GridSpec {
  double resolution = 1e-3;
  std::size_t n = 3;

  /// Lattice steps per unit; validates n <= 4, resolution >= 1e-4 and that
  /// 1 / resolution is an integer.
  std::size_t steps() const;
};

LatticeResult grid_maximize(const SimplexObjective& objective, const GridSpec& spec);

/// One coordinate's contribution to a separable objective sum_i term_i(p_i).
using CoordinateTerm = std::function<double(double)>;

/// Exact lattice maximum of a separable objective by dynamic programming
/// over the mass budget; same answer as exhaustive search at any n, in
/// O(n steps^2).
LatticeResult separable_lattice_maximize(std::span<const CoordinateTerm> terms, std::size_t steps);

std::vector<double> finite_diff_gradient(const std::function<double(std::span<const double>)>& fn,
                                         std::span<const double> point, double h = 1e-6);

/// Rounding noise of a central difference of a function of magnitude
/// |value| with step h: a few ulps of the value divided by h.
double fd_noise_floor(double value, double h = 1e-6);

/// |analytic - fd| within rel * |fd| plus the rounding floor.
bool fd_agrees(double analytic, double fd, double value, double rel = 1e-6, double h = 1e-6);

/// True when the one-sided difference quotients of fn at x disagree by more
/// than `rel` relative: a kink within h.
bool near_kink(const std::function<double(double)>& fn, double x, double h = 1e-6, double rel = 1e-3);

ScanResult grid_argmin_scalar(const std::function<double(double)>& fn, double lo, double hi,
                              std::size_t points = 1'000'000);

}  // namespace fdpo

namespace fdpo {

class CounterRng;
class SimplexInstance;

/// Random instance for property checks: rewards reward_scale * N(0, 1),
/// reference softmax(N(0, 1)), beta log-uniform on [0.2, 2] and a random
/// non-empty strict subset S. With satisfy_hypothesis the largest reward in
/// S is swapped out so that max_{S} r <= max_{not S} r.
SimplexInstance random_instance(CounterRng& rng, std::size_t n, double reward_scale = 2.0,
                                bool satisfy_hypothesis = false);

/// Nearest lattice point with spacing 1 / steps (largest-remainder
/// rounding), keeping every positive coordinate at least one step.
std::vector<double> lattice_round(std::span<const double> p, std::size_t steps);

/// Objective drop from p to its lattice rounding; never negative.
double lattice_slack(const SimplexObjective& objective, std::span<const double> p, std::size_t steps);

}  // namespace fdpo
