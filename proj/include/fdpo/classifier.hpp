#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fdpo/generators.hpp"

namespace fdpo {

enum class Verdict { kInducing, kNotInducing, kInconclusive };
enum class InducingMethod { kLimitTest, kRatioTest };

std::string_view to_string(Verdict v);
std::string_view to_string(InducingMethod m);

struct InducingVerdict {
  Verdict verdict = Verdict::kInconclusive;
  InducingMethod method = InducingMethod::kLimitTest;
  /// (t, sampled value) pairs: f'(t) for the limit test, (f(t) - f(0)) / t
  /// for the ratio test.
  std::vector<std::pair<double, double>> evidence;
};

struct ArgminResult {
  double location = 0.0;
  double value = 0.0;
  bool resistant = false;
};

struct TaxonomyRow {
  std::string id;
  bool convex = false;
  bool inducing = false;
  bool resistant = false;
  double argmin_location = 0.0;
};

inline constexpr double kDivergenceThreshold = -1e6;
inline constexpr double kPlateauTolerance = 1e-6;
inline constexpr std::size_t kArgminGridPoints = 100'000;

/// Decides lim_{t->0+} f'(t) = -infinity from samples at t = 10^-k,
/// k = 1..round(-log10 t_min). The last four samples decide:
///  - strictly decreasing and either below the threshold or with
///    non-shrinking decrements: Inducing;
///  - successive differences all below the plateau tolerance: NotInducing;
///  - otherwise the ratio (f(t) - f(0)) / t is examined, which is Inducing
///    outright when f(0) = +infinity, judged by the same rule when f(0) is
///    finite, and NotInducing when the ratio is eventually non-decreasing
///    as t shrinks (bounded below).
/// NaN samples give Inconclusive.
InducingVerdict is_dpo_inducing(const Generator& gen, double t_min = 1e-12);

/// Global minimizer of f on [lo, hi]: log-grid scan, golden-section
/// refinement of the bracketing cell, then bisection on the sign change of
/// f' when there is one. A minimum at an endpoint is reported as that
/// endpoint.
ArgminResult argmin_f(const Generator& gen, double lo = 1e-8, double hi = 50.0,
                      std::size_t points = kArgminGridPoints);

bool is_displacement_resistant(const Generator& gen);

TaxonomyRow classify(const Generator& gen);
std::vector<TaxonomyRow> classify_taxonomy(double alpha = 0.5);

}  // namespace fdpo
