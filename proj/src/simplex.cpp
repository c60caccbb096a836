#include "fdpo/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <spdlog/spdlog.h>

#include "ascent.hpp"
#include "fdpo/classifier.hpp"
#include "fdpo/error.hpp"

namespace fdpo {
namespace {

constexpr std::size_t kMaxFaceEnumeration = 12;

void check_length(const SimplexInstance& inst, std::span<const double> p) {
  if (p.size() != inst.n()) throw ValidationError("point length does not match the instance");
}

bool ties(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

std::vector<char> penalty_mask(const SimplexInstance& inst, ObjectiveKind kind) {
  std::vector<char> mask(inst.n(), 1);
  if (kind == ObjectiveKind::kPartial)
    for (std::size_t i = 0; i < inst.n(); ++i) mask[i] = inst.in_s(i) ? 1 : 0;
  return mask;
}

SolveResult solve_on(const SimplexInstance& inst, const Generator& gen, std::span<const char> mask,
                     std::vector<std::size_t> support, const SolveOptions& opts, std::size_t restarts) {
  detail::FaceProblem prob{inst.r(), inst.q(), inst.beta(), &gen, mask, std::move(support)};
  return detail::ascend_face(prob, opts, restarts);
}

bool keep_better(SolveResult& best, SolveResult cand) {
  if (!std::isfinite(cand.objective)) return false;
  const double slack = 1e-13 * (1.0 + std::abs(best.objective));
  if (best.p.empty() || cand.objective > best.objective + slack ||
      (cand.objective >= best.objective - slack && cand.residual < best.residual)) {
    best = std::move(cand);
    return true;
  }
  return false;
}

// q_i (f')^-1((r_i + mu) / beta) over `idx`, with mu found by bracketed
// bisection so that the mass is one; returned renormalized, in idx order.
std::vector<double> multiplier_solution(const SimplexInstance& inst, const Generator& gen,
                                        std::span<const std::size_t> idx, double& mu_out) {
  const auto q = inst.q();
  const auto r = inst.r();
  const double beta = inst.beta();
  auto mass = [&](double mu) {
    double m = 0.0;
    for (std::size_t i : idx) m += q[i] * gen.f_prime_inverse((r[i] + mu) / beta);
    return m;
  };
  double rmax = 0.0;
  for (double v : r) rmax = std::max(rmax, std::abs(v));
  double lo = -rmax - 10.0 * beta, hi = rmax + 10.0 * beta;
  for (int i = 0; i < 60 && !(mass(lo) <= 1.0 && mass(hi) >= 1.0); ++i) {
    const double width = hi - lo;
    if (!(mass(lo) <= 1.0)) lo -= width;
    if (!(mass(hi) >= 1.0)) hi += width;
  }
  if (!(mass(lo) <= 1.0 && mass(hi) >= 1.0)) throw NumericalError("no bracket for the multiplier");
  double mu = 0.5 * (lo + hi);
  for (int i = 0; i < 400; ++i) {
    mu = 0.5 * (lo + hi);
    const double m = mass(mu);
    if (std::abs(m - 1.0) <= 1e-12 || mu <= lo || mu >= hi) break;
    if (m < 1.0) lo = mu; else hi = mu;
  }
  mu_out = mu;
  std::vector<double> p;
  double total = 0.0;
  for (std::size_t i : idx) {
    p.push_back(q[i] * gen.f_prime_inverse((r[i] + mu) / beta));
    total += p.back();
  }
  for (double& v : p) v /= total;
  return p;
}

}  // namespace

SimplexInstance::SimplexInstance(std::vector<double> r, Distribution q, double beta, std::vector<std::size_t> s_set)
    : r_(std::move(r)), q_(std::move(q)), beta_(beta), s_set_(std::move(s_set)) {
  if (r_.size() != q_.size()) throw ValidationError("r and q lengths differ");
  for (double v : r_)
    if (!std::isfinite(v)) throw ValidationError("rewards must be finite");
  if (!q_.strictly_positive()) throw ValidationError("reference q must be strictly positive");
  if (!(beta_ > 0.0) || !std::isfinite(beta_)) throw ValidationError("beta must be positive");
  std::sort(s_set_.begin(), s_set_.end());
  if (std::adjacent_find(s_set_.begin(), s_set_.end()) != s_set_.end())
    throw ValidationError("s_set has duplicate indices");
  if (s_set_.empty()) throw ValidationError("s_set must be non-empty");
  if (s_set_.back() >= r_.size()) throw ValidationError("s_set index out of range");
  if (s_set_.size() == r_.size()) throw ValidationError("s_set must be a strict subset of the alphabet");
  in_s_.assign(r_.size(), 0);
  for (std::size_t i : s_set_) in_s_[i] = 1;
}

double SimplexInstance::r_hat() const {
  double best = -kInfinity;
  for (std::size_t i = 0; i < n(); ++i)
    if (!in_s(i)) best = std::max(best, r_[i]);
  return best;
}

std::vector<std::size_t> SimplexInstance::argmax_outside() const {
  const double rh = r_hat();
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n(); ++i)
    if (!in_s(i) && ties(r_[i], rh)) out.push_back(i);
  return out;
}

double objective_full(const SimplexInstance& inst, const Generator& gen, std::span<const double> p) {
  return objective(inst, gen, p, ObjectiveKind::kFull);
}

double objective_partial(const SimplexInstance& inst, const Generator& gen, std::span<const double> p) {
  return objective(inst, gen, p, ObjectiveKind::kPartial);
}

double objective(const SimplexInstance& inst, const Generator& gen, std::span<const double> p, ObjectiveKind kind) {
  check_length(inst, p);
  double linear = 0.0, penalty = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    linear += inst.r()[i] * p[i];
    if (kind == ObjectiveKind::kPartial && !inst.in_s(i)) continue;
    const double term = eval_f(gen, p[i] / inst.q()[i]);
    if (term == kInfinity) return -kInfinity;
    penalty += inst.q()[i] * term;
  }
  return linear - inst.beta() * penalty;
}

SolveResult solve_full(const SimplexInstance& inst, const Generator& gen, const SolveOptions& opts) {
  const auto mask = penalty_mask(inst, ObjectiveKind::kFull);
  std::vector<std::size_t> all(inst.n());
  std::iota(all.begin(), all.end(), 0);
  SolveResult best = solve_on(inst, gen, mask, all, opts, opts.restarts);
  const bool inducing = is_dpo_inducing(gen).verdict == Verdict::kInducing;

  if (inducing && gen.convex() && gen.has_prime_inverse()) {
    // The optimum is the unique interior stationary point; solving for its
    // multiplier directly is sharper on tiny coordinates than the ascent,
    // whose stopping rule weights residuals by p.
    try {
      double mu = 0.0;
      SolveResult dual;
      dual.p = multiplier_solution(inst, gen, all, mu);
      dual.objective = objective_full(inst, gen, dual.p);
      dual.converged = true;
      dual.iterations = best.iterations;
      std::vector<double> g(inst.n());
      double mean = 0.0;
      for (std::size_t i = 0; i < inst.n(); ++i) {
        g[i] = inst.r()[i] - inst.beta() * gen.f_prime(dual.p[i] / inst.q()[i]);
        mean += dual.p[i] * g[i];
      }
      for (std::size_t i = 0; i < inst.n(); ++i) dual.residual = std::max(dual.residual, dual.p[i] * std::abs(g[i] - mean));
      keep_better(best, std::move(dual));
    } catch (const NumericalError& e) {
      spdlog::debug("solve_full: multiplier polish skipped: {}", e.what());
    }
  }

  if (!inducing) {
    if (inst.n() > kMaxFaceEnumeration) {
      spdlog::warn("generator '{}' is not DPO-inducing; optimum may lie on a face not searched (n = {})", gen.id(),
                   inst.n());
    } else {
      // Every proper face, by bitmask.
      const std::size_t full = (std::size_t{1} << inst.n()) - 1;
      for (std::size_t mask_bits = 1; mask_bits < full; ++mask_bits) {
        std::vector<std::size_t> face;
        for (std::size_t i = 0; i < inst.n(); ++i)
          if (mask_bits >> i & 1U) face.push_back(i);
        keep_better(best, solve_on(inst, gen, mask, face, opts, gen.convex() ? 1 : opts.restarts));
      }
    }
  }
  if (!best.converged) spdlog::warn("solve_full: no convergence, residual {:.3e}", best.residual);

  if (gen.kind() == GeneratorKind::kKl) {
    const auto closed = kl_closed_form(inst.r(), inst.q(), inst.beta());
    double dev = 0.0;
    for (std::size_t i = 0; i < closed.size(); ++i) dev = std::max(dev, std::abs(closed[i] - best.p[i]));
    if (dev > 1e-8) spdlog::warn("solve_full: KL solution differs from the closed form by {:.3e}", dev);
  }
  return best;
}

SolveResult solve_partial_numeric(const SimplexInstance& inst, const Generator& gen, const SolveOptions& opts) {
  const auto mask = penalty_mask(inst, ObjectiveKind::kPartial);
  const auto ties_out = inst.argmax_outside();
  std::vector<std::size_t> s_only(inst.s_set().begin(), inst.s_set().end());
  std::vector<std::size_t> with_ties = s_only;
  with_ties.insert(with_ties.end(), ties_out.begin(), ties_out.end());
  std::sort(with_ties.begin(), with_ties.end());
  std::vector<std::size_t> all(inst.n());
  std::iota(all.begin(), all.end(), 0);

  SolveResult best;
  for (const auto& support : {with_ties, s_only, all}) keep_better(best, solve_on(inst, gen, mask, support, opts, opts.restarts));
  if (best.p.empty()) throw NumericalError("solve_partial_numeric: every start produced a non-finite objective");

  // Out-of-S mass only earns r_i, so it belongs on the argmax ties.
  double out_mass = 0.0;
  for (std::size_t i = 0; i < inst.n(); ++i)
    if (!inst.in_s(i)) {
      out_mass += best.p[i];
      best.p[i] = 0.0;
    }
  for (std::size_t i : ties_out) best.p[i] = out_mass / static_cast<double>(ties_out.size());
  best.objective = objective_partial(inst, gen, best.p);
  if (!best.converged) spdlog::warn("solve_partial_numeric: no convergence, residual {:.3e}", best.residual);
  return best;
}

std::string_view to_string(PartialCase c) {
  return c == PartialCase::kFamilyOnArgmax ? "FamilyOnArgmax" : "UniqueInteriorMu";
}

PartialOptimalSet solve_partial_convex(const SimplexInstance& inst, const Generator& gen) {
  if (!gen.convex()) throw ValidationError("solve_partial_convex needs a convex generator");
  if (!gen.has_prime_inverse()) throw ValidationError("solve_partial_convex needs an invertible f'");
  if (is_dpo_inducing(gen).verdict != Verdict::kInducing)
    throw ValidationError("solve_partial_convex needs a DPO-inducing generator");

  const auto s = inst.s_set();
  const auto q = inst.q();
  const auto r = inst.r();
  const double beta = inst.beta();
  const double rh = inst.r_hat();

  PartialOptimalSet out;
  double zsum = 0.0;
  for (std::size_t i : s) {
    const double zi = q[i] * gen.f_prime_inverse((r[i] - rh) / beta);
    out.z.push_back(zi);
    zsum += zi;
  }
  out.canonical.assign(inst.n(), 0.0);

  if (zsum < 1.0) {
    out.kase = PartialCase::kFamilyOnArgmax;
    out.fixed_s_probs = out.z;
    out.free_mass = 1.0 - zsum;
    out.free_indices = inst.argmax_outside();
    for (std::size_t k = 0; k < s.size(); ++k) out.canonical[s[k]] = out.z[k];
    for (std::size_t i : out.free_indices)
      out.canonical[i] = out.free_mass / static_cast<double>(out.free_indices.size());
    return out;
  }

  out.kase = PartialCase::kUniqueInteriorMu;
  double mu = 0.0;
  out.fixed_s_probs = multiplier_solution(inst, gen, s, mu);
  out.mu = mu;
  for (std::size_t k = 0; k < s.size(); ++k) out.canonical[s[k]] = out.fixed_s_probs[k];
  return out;
}

bool verify_kkt_equal_partials(const SimplexInstance& inst, const Generator& gen, std::span<const double> p,
                               ObjectiveKind kind, double tol) {
  check_length(inst, p);
  double lo = kInfinity, hi = -kInfinity;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] > tol)) continue;
    double a = inst.r()[i];
    if (kind == ObjectiveKind::kFull || inst.in_s(i)) a -= inst.beta() * gen.f_prime(p[i] / inst.q()[i]);
    lo = std::min(lo, a);
    hi = std::max(hi, a);
  }
  return !(hi - lo > tol);
}

std::string_view to_string(BoundStatus s) {
  switch (s) {
    case BoundStatus::kHolds: return "holds";
    case BoundStatus::kViolated: return "violated";
    case BoundStatus::kHypothesisViolated: return "hypothesis-violated";
    case BoundStatus::kNoInteriorArgmin: return "no-interior-argmin";
  }
  return "?";
}

BoundCheck check_displacement_bound(const SimplexInstance& inst, std::span<const double> p, double c) {
  check_length(inst, p);
  BoundCheck out{BoundStatus::kHolds, c, -kInfinity};
  if (!(c > 0.0 && c <= 1.0 + 1e-9)) {
    out.status = BoundStatus::kNoInteriorArgmin;
    return out;
  }
  double rs = -kInfinity;
  for (std::size_t i : inst.s_set()) rs = std::max(rs, inst.r()[i]);
  if (rs > inst.r_hat()) {
    out.status = BoundStatus::kHypothesisViolated;
    return out;
  }
  for (std::size_t i : inst.s_set()) out.max_excess = std::max(out.max_excess, p[i] - c * inst.q()[i]);
  if (out.max_excess > 1e-9) out.status = BoundStatus::kViolated;
  return out;
}

BoundCheck check_displacement_bound(const SimplexInstance& inst, const Generator& gen, std::span<const double> p) {
  return check_displacement_bound(inst, p, argmin_f(gen).location);
}

double implied_reward_gap(const Generator& gen, double beta, double w_ratio, double l_ratio) {
  if (!(w_ratio > 0.0) || !(l_ratio > 0.0)) throw ValidationError("implied reward gap needs positive ratios");
  return beta * gen.f_prime(w_ratio) - beta * gen.f_prime(l_ratio);
}

std::vector<double> kl_closed_form(std::span<const double> r, std::span<const double> q, double beta) {
  std::vector<double> logits(r.size());
  double m = -kInfinity;
  for (std::size_t i = 0; i < r.size(); ++i) {
    logits[i] = std::log(q[i]) + r[i] / beta;
    m = std::max(m, logits[i]);
  }
  double z = 0.0;
  for (double& v : logits) z += (v = std::exp(v - m));
  for (double& v : logits) v /= z;
  return logits;
}

}  // namespace fdpo
