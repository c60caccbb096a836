#include <omp.h>

#include "common.hpp"

namespace fdpo::kernels::omp {

void log_softmax_rows(std::span<const double> logits, std::size_t cols, std::span<double> out) {
  detail::check_matrix(logits.size(), cols);
  const auto rows = static_cast<std::ptrdiff_t>(logits.size() / cols);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < rows; ++r)
    detail::log_softmax_row(logits.data() + r * cols, cols, out.data() + r * cols);
}

void triple_losses(const Loss& loss, std::span<const double> logp, std::span<const double> ref_logp,
                   std::size_t cols, std::span<const PreferenceTriple> triples, std::span<LossValue> out) {
  const auto count = static_cast<std::ptrdiff_t>(triples.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < count; ++i) out[i] = detail::triple_loss(loss, logp, ref_logp, cols, triples[i]);
}

void softmax_backward(std::span<const double> logp, std::span<const double> grad_logp, std::size_t cols,
                      std::span<double> out) {
  detail::check_matrix(logp.size(), cols);
  const auto rows = static_cast<std::ptrdiff_t>(logp.size() / cols);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < rows; ++r)
    detail::softmax_backward_row(logp.data() + r * cols, grad_logp.data() + r * cols, cols, out.data() + r * cols);
}

LatticeResult lattice_maximize(std::size_t n, std::size_t steps, const SimplexObjective& objective) {
  detail::check_lattice(n, steps);
  std::vector<LatticeResult> parts(steps + 1);
  const auto count = static_cast<std::ptrdiff_t>(steps + 1);
  // Slices shrink as k0 grows, hence dynamic scheduling.
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t k0 = 0; k0 < count; ++k0)
    parts[k0] = detail::lattice_best_with_first(n, steps, static_cast<std::size_t>(k0), objective);
  return detail::combine(parts);
}

ScanResult log_grid_argmin(const std::function<double(double)>& fn, double lo, double hi, std::size_t points) {
  detail::check_scan(lo, hi, points);
  std::vector<double> values(points);
  const auto count = static_cast<std::ptrdiff_t>(points);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < count; ++k) values[k] = fn(log_grid_point(lo, hi, static_cast<std::size_t>(k), points));
  return detail::pick_min(values, lo, hi);
}

}  // namespace fdpo::kernels::omp
