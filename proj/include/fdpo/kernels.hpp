#pragma once

// Hot loops in two flavours. `serial` is the reference used by tests;
// `omp` is the OpenMP version the library calls. Both must give bitwise
// identical results: reductions are either absent or performed in a fixed
// order after the parallel section.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "fdpo/losses.hpp"

namespace fdpo {

struct PreferenceTriple {
  std::size_t prompt = 0;
  std::size_t winner = 0;
  std::size_t loser = 0;

  friend bool operator==(const PreferenceTriple&, const PreferenceTriple&) = default;
};

/// Objective over a point of the simplex, used by the lattice search.
using SimplexObjective = std::function<double(std::span<const double>)>;

struct LatticeResult {
  std::vector<double> point;
  double value = 0.0;
};

struct ScanResult {
  double location = 0.0;
  double value = 0.0;
  std::size_t index = 0;
};

namespace kernels {

/// Row-major log-softmax of a rows x cols matrix.
using LogSoftmaxFn = void (*)(std::span<const double> logits, std::size_t cols, std::span<double> out);

namespace serial {

void log_softmax_rows(std::span<const double> logits, std::size_t cols, std::span<double> out);

/// Loss and gradient of every triple given current and reference
/// log-probabilities (both rows x cols, row = prompt).
void triple_losses(const Loss& loss, std::span<const double> logp, std::span<const double> ref_logp,
                   std::size_t cols, std::span<const PreferenceTriple> triples, std::span<LossValue> out);

/// out = G - p * rowsum(G) per row, with p = exp(logp): the gradient with
/// respect to logits of a function whose gradient with respect to
/// log-probabilities is G.
void softmax_backward(std::span<const double> logp, std::span<const double> grad_logp, std::size_t cols,
                      std::span<double> out);

/// Exhaustive maximization over {k / steps : k in N^n, sum k = steps}.
/// Ties resolve to the lexicographically smallest index vector.
LatticeResult lattice_maximize(std::size_t n, std::size_t steps, const SimplexObjective& objective);

/// Best of `points` log-spaced samples of fn on [lo, hi]. Non-finite
/// samples are skipped; ties resolve to the smallest location.
ScanResult log_grid_argmin(const std::function<double(double)>& fn, double lo, double hi, std::size_t points);

}  // namespace serial

namespace omp {

void log_softmax_rows(std::span<const double> logits, std::size_t cols, std::span<double> out);
void triple_losses(const Loss& loss, std::span<const double> logp, std::span<const double> ref_logp,
                   std::size_t cols, std::span<const PreferenceTriple> triples, std::span<LossValue> out);
void softmax_backward(std::span<const double> logp, std::span<const double> grad_logp, std::size_t cols,
                      std::span<double> out);
LatticeResult lattice_maximize(std::size_t n, std::size_t steps, const SimplexObjective& objective);
ScanResult log_grid_argmin(const std::function<double(double)>& fn, double lo, double hi, std::size_t points);

}  // namespace omp

/// Accumulates per-triple gradients into a rows x cols log-probability
/// gradient, in triple order. Kept serial so the sum is deterministic.
void scatter_triple_grads(std::span<const PreferenceTriple> triples, std::span<const LossValue> losses,
                          double scale, std::size_t cols, std::span<double> grad_logp);

/// The k-th log-spaced sample on [lo, hi] out of `points`.
double log_grid_point(double lo, double hi, std::size_t k, std::size_t points);

}  // namespace kernels
}  // namespace fdpo
