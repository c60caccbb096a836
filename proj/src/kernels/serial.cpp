#include "common.hpp"

namespace fdpo::kernels {

double log_grid_point(double lo, double hi, std::size_t k, std::size_t points) {
  if (k == 0) return lo;
  if (k + 1 == points) return hi;
  const double a = std::log(lo), b = std::log(hi);
  return std::exp(a + (b - a) * static_cast<double>(k) / static_cast<double>(points - 1));
}

void scatter_triple_grads(std::span<const PreferenceTriple> triples, std::span<const LossValue> losses,
                          double scale, std::size_t cols, std::span<double> grad_logp) {
  for (std::size_t i = 0; i < triples.size(); ++i) {
    const auto& t = triples[i];
    grad_logp[t.prompt * cols + t.winner] += scale * losses[i].grad_w;
    grad_logp[t.prompt * cols + t.loser] += scale * losses[i].grad_l;
  }
}

namespace serial {

void log_softmax_rows(std::span<const double> logits, std::size_t cols, std::span<double> out) {
  detail::check_matrix(logits.size(), cols);
  for (std::size_t r = 0; r < logits.size() / cols; ++r)
    detail::log_softmax_row(logits.data() + r * cols, cols, out.data() + r * cols);
}

void triple_losses(const Loss& loss, std::span<const double> logp, std::span<const double> ref_logp,
                   std::size_t cols, std::span<const PreferenceTriple> triples, std::span<LossValue> out) {
  for (std::size_t i = 0; i < triples.size(); ++i) out[i] = detail::triple_loss(loss, logp, ref_logp, cols, triples[i]);
}

void softmax_backward(std::span<const double> logp, std::span<const double> grad_logp, std::size_t cols,
                      std::span<double> out) {
  detail::check_matrix(logp.size(), cols);
  for (std::size_t r = 0; r < logp.size() / cols; ++r)
    detail::softmax_backward_row(logp.data() + r * cols, grad_logp.data() + r * cols, cols, out.data() + r * cols);
}

LatticeResult lattice_maximize(std::size_t n, std::size_t steps, const SimplexObjective& objective) {
  detail::check_lattice(n, steps);
  std::vector<LatticeResult> parts;
  parts.reserve(steps + 1);
  for (std::size_t k0 = 0; k0 <= steps; ++k0) parts.push_back(detail::lattice_best_with_first(n, steps, k0, objective));
  return detail::combine(parts);
}

ScanResult log_grid_argmin(const std::function<double(double)>& fn, double lo, double hi, std::size_t points) {
  detail::check_scan(lo, hi, points);
  std::vector<double> values(points);
  for (std::size_t k = 0; k < points; ++k) values[k] = fn(log_grid_point(lo, hi, k, points));
  return detail::pick_min(values, lo, hi);
}

}  // namespace serial
}  // namespace fdpo::kernels
