#include "fdpo/oracle.hpp"

#include <cmath>
#include <limits>

#include "fdpo/error.hpp"

namespace fdpo {

std::size_t GridSpec::steps() const {
  if (n < 2 || n > 4) throw ValidationError("grid oracle supports 2 <= n <= 4");
  if (!(resolution >= 1e-4) || resolution > 1.0) throw ValidationError("grid resolution must lie in [1e-4, 1]");
  const double inv = 1.0 / resolution;
  const double rounded = std::round(inv);
  if (std::abs(inv - rounded) > 1e-9 * rounded) throw ValidationError("1 / resolution must be an integer");
  return static_cast<std::size_t>(rounded);
}

LatticeResult grid_maximize(const SimplexObjective& objective, const GridSpec& spec) {
  return kernels::omp::lattice_maximize(spec.n, spec.steps(), objective);
}

LatticeResult separable_lattice_maximize(std::span<const CoordinateTerm> terms, std::size_t steps) {
  const std::size_t n = terms.size();
  if (n < 2) throw ValidationError("separable lattice search needs at least two coordinates");
  if (steps == 0) throw ValidationError("lattice needs at least one step");
  const double ninf = -std::numeric_limits<double>::infinity();
  const auto unit = static_cast<double>(steps);

  std::vector<std::vector<double>> table(n, std::vector<double>(steps + 1));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k <= steps; ++k) {
      const double v = terms[i](static_cast<double>(k) / unit);
      table[i][k] = std::isnan(v) ? ninf : v;
    }

  // best[i][m]: max of the first i + 1 terms using m steps; take[i][m] is
  // the share of term i in that maximum.
  std::vector<std::vector<double>> best(n, std::vector<double>(steps + 1, ninf));
  std::vector<std::vector<std::size_t>> take(n, std::vector<std::size_t>(steps + 1, 0));
  for (std::size_t m = 0; m <= steps; ++m) {
    best[0][m] = table[0][m];
    take[0][m] = m;
  }
  for (std::size_t i = 1; i < n; ++i)
    for (std::size_t m = 0; m <= steps; ++m)
      for (std::size_t k = 0; k <= m; ++k) {
        const double v = best[i - 1][m - k] + table[i][k];
        if (v > best[i][m]) {
          best[i][m] = v;
          take[i][m] = k;
        }
      }

  LatticeResult out;
  out.point.assign(n, 0.0);
  std::size_t left = steps;
  for (std::size_t i = n; i-- > 0;) {
    const std::size_t k = take[i][left];
    out.point[i] = static_cast<double>(k) / unit;
    left -= k;
  }
  out.value = 0.0;
  for (std::size_t i = 0; i < n; ++i) out.value += terms[i](out.point[i]);
  return out;
}

std::vector<double> finite_diff_gradient(const std::function<double(std::span<const double>)>& fn,
                                         std::span<const double> point, double h) {
  if (!(h > 0.0)) throw ValidationError("finite difference step must be positive");
  std::vector<double> x(point.begin(), point.end());
  std::vector<double> grad(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    x[i] = xi + h;
    const double up = fn(x);
    x[i] = xi - h;
    const double down = fn(x);
    x[i] = xi;
    if (!std::isfinite(up) || !std::isfinite(down)) throw NumericalError("non-finite value in finite differences");
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

double fd_noise_floor(double value, double h) {
  return 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(value)) / h;
}

bool fd_agrees(double analytic, double fd, double value, double rel, double h) {
  return std::abs(analytic - fd) <= rel * std::abs(fd) + fd_noise_floor(value, h);
}

bool near_kink(const std::function<double(double)>& fn, double x, double h, double rel) {
  const double f0 = fn(x);
  const double right = (fn(x + h) - f0) / h;
  const double left = (f0 - fn(x - h)) / h;
  return std::abs(right - left) > rel * std::max({std::abs(right), std::abs(left), 1e-300});
}

ScanResult grid_argmin_scalar(const std::function<double(double)>& fn, double lo, double hi, std::size_t points) {
  return kernels::omp::log_grid_argmin(fn, lo, hi, points);
}

}  // namespace fdpo

#include <algorithm>
#include <numeric>

#include "fdpo/rng.hpp"
#include "fdpo/simplex.hpp"

namespace fdpo {

SimplexInstance random_instance(CounterRng& rng, std::size_t n, double reward_scale, bool satisfy_hypothesis) {
  if (n < 2) throw ValidationError("random instance needs n >= 2");
  std::vector<double> r(n), logits(n);
  for (double& v : r) v = reward_scale * rng.normal();
  for (double& v : logits) v = rng.normal();
  const double m = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double& v : logits) z += (v = std::exp(v - m));
  for (double& v : logits) v /= z;
  const double beta = 0.2 * std::pow(10.0, rng.uniform());

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);
  const std::size_t k = 1 + rng.below(n - 1);
  std::vector<std::size_t> s(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));

  if (satisfy_hypothesis) {
    std::size_t best_in = s[0], best_out = order[k];
    for (std::size_t i : s)
      if (r[i] > r[best_in]) best_in = i;
    for (std::size_t j = k; j < n; ++j)
      if (r[order[j]] > r[best_out]) best_out = order[j];
    if (r[best_in] > r[best_out]) std::swap(r[best_in], r[best_out]);
  }
  // Renormalize once more so the sum is 1 to rounding.
  double total = 0.0;
  for (double v : logits) total += v;
  for (double& v : logits) v /= total;
  return SimplexInstance(std::move(r), Distribution(std::move(logits)), beta, std::move(s));
}

std::vector<double> lattice_round(std::span<const double> p, std::size_t steps) {
  const std::size_t n = p.size();
  std::vector<std::size_t> k(n);
  std::vector<double> rem(n);
  std::size_t used = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double scaled = std::max(0.0, p[i]) * static_cast<double>(steps);
    k[i] = static_cast<std::size_t>(std::floor(scaled));
    if (p[i] > 0.0 && k[i] == 0) k[i] = 1;
    rem[i] = scaled - static_cast<double>(k[i]);
    used += k[i];
  }
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return rem[a] > rem[b]; });
  for (std::size_t j = 0; used < steps; j = (j + 1) % n) {
    ++k[idx[j]];
    ++used;
  }
  // Overshoot from the one-step floor: take back from the largest entries.
  while (used > steps) {
    const auto it = std::max_element(k.begin(), k.end());
    --*it;
    --used;
  }
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<double>(k[i]) / static_cast<double>(steps);
  return out;
}

double lattice_slack(const SimplexObjective& objective, std::span<const double> p, std::size_t steps) {
  const auto rounded = lattice_round(p, steps);
  const double drop = objective(p) - objective(rounded);
  return std::isnan(drop) ? kInfinity : std::max(0.0, drop);
}

}  // namespace fdpo
