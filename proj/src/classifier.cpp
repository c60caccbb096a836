#include "fdpo/classifier.hpp"

#include <array>
#include <cmath>

#include "fdpo/error.hpp"
#include "fdpo/kernels.hpp"

namespace fdpo {
namespace {

// Sign pattern of the last three differences of a sampled sequence.
struct Tail {
  bool nan = false;
  bool decreasing = false;
  bool non_decreasing = false;
  bool plateau = false;
  bool non_shrinking = false;
  double last = 0.0;
};

Tail inspect_tail(const std::vector<std::pair<double, double>>& samples) {
  Tail tail;
  for (const auto& [t, v] : samples)
    if (std::isnan(v)) tail.nan = true;
  if (tail.nan || samples.size() < 4) {
    tail.nan = true;
    return tail;
  }
  const std::size_t m = samples.size();
  std::array<double, 3> d{};
  for (std::size_t i = 0; i < 3; ++i) d[i] = samples[m - 3 + i].second - samples[m - 4 + i].second;
  tail.last = samples.back().second;
  tail.decreasing = d[0] < 0 && d[1] < 0 && d[2] < 0;
  tail.non_decreasing = d[0] >= 0 && d[1] >= 0 && d[2] >= 0;
  tail.plateau = std::abs(d[0]) < kPlateauTolerance && std::abs(d[1]) < kPlateauTolerance &&
                 std::abs(d[2]) < kPlateauTolerance;
  tail.non_shrinking = tail.decreasing && d[1] / d[0] >= 0.9 && d[2] / d[1] >= 0.9;
  if (tail.last == -kInfinity) tail.non_shrinking = tail.decreasing || std::isinf(d[2]);
  return tail;
}

bool diverges_down(const Tail& tail) {
  return tail.decreasing && (tail.last < kDivergenceThreshold || tail.non_shrinking);
}

double golden_section(const Generator& gen, double a, double b) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = gen.f(c), fd = gen.f(d);
  while (b - a > 1e-12 * std::max(1.0, std::abs(a) + std::abs(b)) * 0.5) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = gen.f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = gen.f(d);
    }
    if (d <= c) break;
  }
  return 0.5 * (a + b);
}

}  // namespace

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::kInducing: return "Inducing";
    case Verdict::kNotInducing: return "NotInducing";
    case Verdict::kInconclusive: return "Inconclusive";
  }
  return "?";
}

std::string_view to_string(InducingMethod m) {
  return m == InducingMethod::kLimitTest ? "limit-test" : "ratio-test";
}

InducingVerdict is_dpo_inducing(const Generator& gen, double t_min) {
  if (!(t_min > 0.0) || t_min >= 1e-3) throw ValidationError("t_min must lie in (0, 1e-3)");
  const int kmax = static_cast<int>(std::lround(-std::log10(t_min)));
  InducingVerdict out;
  out.method = InducingMethod::kLimitTest;
  for (int k = 1; k <= kmax; ++k) {
    const double t = std::pow(10.0, -k);
    out.evidence.emplace_back(t, gen.f_prime(t));
  }
  const Tail limit = inspect_tail(out.evidence);
  if (limit.nan) return out;
  if (diverges_down(limit)) {
    out.verdict = Verdict::kInducing;
    return out;
  }
  if (limit.plateau && std::isfinite(limit.last)) {
    out.verdict = Verdict::kNotInducing;
    return out;
  }

  out.method = InducingMethod::kRatioTest;
  const double f0 = gen.f_at_zero();
  if (f0 == kInfinity) {
    out.verdict = Verdict::kInducing;
    return out;
  }
  out.evidence.clear();
  for (int k = 1; k <= kmax; ++k) {
    const double t = std::pow(10.0, -k);
    out.evidence.emplace_back(t, (gen.f(t) - f0) / t);
  }
  const Tail ratio = inspect_tail(out.evidence);
  if (ratio.nan) {
    out.verdict = Verdict::kInconclusive;
  } else if (diverges_down(ratio)) {
    out.verdict = Verdict::kInducing;
  } else if (ratio.plateau || ratio.non_decreasing) {
    out.verdict = Verdict::kNotInducing;
  } else {
    out.verdict = Verdict::kInconclusive;
  }
  return out;
}

ArgminResult argmin_f(const Generator& gen, double lo, double hi, std::size_t points) {
  if (!(lo > 0.0) || !(lo < hi)) throw ValidationError("argmin needs 0 < lo < hi");
  const ScanResult scan = kernels::omp::log_grid_argmin([&gen](double t) { return gen.f(t); }, lo, hi, points);

  ArgminResult res{scan.location, scan.value, false};
  if (scan.index > 0 && scan.index + 1 < points) {
    const double a = kernels::log_grid_point(lo, hi, scan.index - 1, points);
    const double b = kernels::log_grid_point(lo, hi, scan.index + 1, points);
    double c = golden_section(gen, a, b);
    // Near a flat minimum f cannot resolve the location beyond ~sqrt(eps);
    // the sign change of f' can.
    if (gen.f_prime(a) < 0.0 && gen.f_prime(b) > 0.0) {
      double x = a, y = b;
      for (int i = 0; i < 200 && y - x > 0.0; ++i) {
        const double mid = 0.5 * (x + y);
        if (mid <= x || mid >= y) break;
        if (gen.f_prime(mid) < 0.0) x = mid; else y = mid;
      }
      const double root = 0.5 * (x + y);
      const double fr = gen.f(root), fc = gen.f(c);
      if (fr <= fc + 4.0 * 2.220446049250313e-16 * std::max(1.0, std::abs(fc))) c = root;
    }
    const double fc = gen.f(c);
    if (fc <= res.value + 1e-15 * std::max(1.0, std::abs(res.value))) res = {c, fc, false};
  }
  res.resistant = res.location >= 1.0 - 1e-9;
  return res;
}

bool is_displacement_resistant(const Generator& gen) { return argmin_f(gen).resistant; }

TaxonomyRow classify(const Generator& gen) {
  const ArgminResult am = argmin_f(gen);
  return {gen.id(), gen.convex(), is_dpo_inducing(gen).verdict == Verdict::kInducing, am.resistant, am.location};
}

std::vector<TaxonomyRow> classify_taxonomy(double alpha) {
  std::vector<TaxonomyRow> rows;
  for (const auto& gen : catalog(alpha)) rows.push_back(classify(gen));
  return rows;
}

}  // namespace fdpo
