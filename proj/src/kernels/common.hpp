#pragma once

// Per-row and per-item bodies shared by the serial and OpenMP kernels, so
// both flavours execute the same floating-point operations.

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "fdpo/error.hpp"
#include "fdpo/kernels.hpp"

namespace fdpo::kernels::detail {

inline void check_matrix(std::size_t size, std::size_t cols) {
  if (cols == 0 || size % cols != 0) throw ValidationError("matrix size is not a multiple of cols");
}

inline void log_softmax_row(const double* z, std::size_t cols, double* out) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < cols; ++j) m = std::max(m, z[j]);
  double sum = 0.0;
  for (std::size_t j = 0; j < cols; ++j) sum += std::exp(z[j] - m);
  const double shift = m + std::log(sum);
  for (std::size_t j = 0; j < cols; ++j) out[j] = z[j] - shift;
}

inline void softmax_backward_row(const double* logp, const double* g, std::size_t cols, double* out) {
  double rowsum = 0.0;
  for (std::size_t j = 0; j < cols; ++j) rowsum += g[j];
  for (std::size_t j = 0; j < cols; ++j) out[j] = g[j] - std::exp(logp[j]) * rowsum;
}

inline LossValue triple_loss(const Loss& loss, std::span<const double> logp, std::span<const double> ref_logp,
                             std::size_t cols, const PreferenceTriple& t) {
  const std::size_t w = t.prompt * cols + t.winner, l = t.prompt * cols + t.loser;
  return loss({logp[w], ref_logp[w], logp[l], ref_logp[l]});
}

// Best lattice point whose first coordinate is k0 / steps, searched in
// lexicographic order with strict improvement.
inline LatticeResult lattice_best_with_first(std::size_t n, std::size_t steps, std::size_t k0,
                                             const SimplexObjective& objective) {
  std::vector<std::size_t> k(n, 0);
  std::vector<double> point(n, 0.0);
  LatticeResult best{{}, -std::numeric_limits<double>::infinity()};
  k[0] = k0;
  const double inv = 1.0 / static_cast<double>(steps);

  auto visit = [&](auto&& self, std::size_t depth, std::size_t remaining) -> void {
    if (depth == n - 1) {
      k[depth] = remaining;
      for (std::size_t i = 0; i < n; ++i) point[i] = static_cast<double>(k[i]) * inv;
      const double v = objective(point);
      if (v > best.value || best.point.empty()) {
        if (!std::isnan(v)) best = {point, v};
      }
      return;
    }
    for (std::size_t c = 0; c <= remaining; ++c) {
      k[depth] = c;
      self(self, depth + 1, remaining - c);
    }
  };
  visit(visit, 1, steps - k0);
  return best;
}

inline void check_lattice(std::size_t n, std::size_t steps) {
  if (n < 2) throw ValidationError("lattice needs n >= 2");
  if (steps == 0) throw ValidationError("lattice needs at least one step");
}

inline LatticeResult combine(std::vector<LatticeResult>& parts) {
  LatticeResult best{{}, -std::numeric_limits<double>::infinity()};
  for (auto& part : parts) {
    if (part.point.empty()) continue;
    if (best.point.empty() || part.value > best.value) best = std::move(part);
  }
  if (best.point.empty()) throw NumericalError("lattice objective is NaN everywhere");
  return best;
}

inline ScanResult pick_min(std::span<const double> values, double lo, double hi) {
  ScanResult best{0.0, std::numeric_limits<double>::infinity(), values.size()};
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (std::isfinite(values[k]) && values[k] < best.value) best = {0.0, values[k], k};
  }
  if (best.index == values.size()) throw NumericalError("function is non-finite on the whole grid");
  best.location = log_grid_point(lo, hi, best.index, values.size());
  return best;
}

inline void check_scan(double lo, double hi, std::size_t points) {
  if (!(lo > 0.0) || !(lo < hi)) throw ValidationError("log grid needs 0 < lo < hi");
  if (points < 2) throw ValidationError("log grid needs at least 2 points");
}

}  // namespace fdpo::kernels::detail
