#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "fdpo/generators.hpp"

namespace fdpo {

/// One prompt of a finite alignment problem: rewards r, reference q
/// (strictly positive), coefficient beta and the in-sample subset S, which
/// must be non-empty and strictly smaller than the whole alphabet.
class SimplexInstance {
 public:
  SimplexInstance(std::vector<double> r, Distribution q, double beta, std::vector<std::size_t> s_set);

  std::size_t n() const { return r_.size(); }
  std::span<const double> r() const { return r_; }
  std::span<const double> q() const { return q_.probs(); }
  const Distribution& reference() const { return q_; }
  double beta() const { return beta_; }
  std::span<const std::size_t> s_set() const { return s_set_; }
  bool in_s(std::size_t i) const { return in_s_[i] != 0; }

  /// max_{i not in S} r_i.
  double r_hat() const;
  /// Indices outside S attaining r_hat.
  std::vector<std::size_t> argmax_outside() const;

 private:
  std::vector<double> r_;
  Distribution q_;
  double beta_;
  std::vector<std::size_t> s_set_;
  std::vector<char> in_s_;
};

enum class ObjectiveKind { kFull, kPartial };

/// r.p - beta D_f(p || q).
double objective_full(const SimplexInstance& inst, const Generator& gen, std::span<const double> p);
/// r.p - beta sum_{i in S} q_i f(p_i / q_i).
double objective_partial(const SimplexInstance& inst, const Generator& gen, std::span<const double> p);
double objective(const SimplexInstance& inst, const Generator& gen, std::span<const double> p, ObjectiveKind kind);

struct SolveOptions {
  std::size_t restarts = 8;
  std::size_t max_iterations = 5000;
  double tolerance = 1e-10;
  std::uint64_t seed = 0;
};

struct SolveResult {
  std::vector<double> p;
  double objective = 0.0;
  bool converged = false;
  std::size_t iterations = 0;
  /// max_j p_j |G_j - mean G| at the returned point.
  double residual = 0.0;

  Distribution distribution() const { return Distribution(p); }
};

/// Maximizer of the full objective. Inducing generators are solved on the
/// open simplex by multi-start ascent in softmax coordinates; other
/// generators additionally search every face of the simplex (n <= 12).
SolveResult solve_full(const SimplexInstance& inst, const Generator& gen, const SolveOptions& opts = {});

/// Maximizer of the partial objective by multi-start ascent over the
/// supports S, S + argmax-outside-S and the whole alphabet. Mass outside S
/// is moved onto the argmax ties and spread evenly across them.
SolveResult solve_partial_numeric(const SimplexInstance& inst, const Generator& gen, const SolveOptions& opts = {});

enum class PartialCase { kFamilyOnArgmax, kUniqueInteriorMu };
std::string_view to_string(PartialCase c);

/// Closed-form optimal set of the partial objective for a convex generator
/// with invertible f'.
struct PartialOptimalSet {
  PartialCase kase = PartialCase::kFamilyOnArgmax;
  /// z_i = q_i (f')^-1((r_i - r_hat) / beta), in s_set order.
  std::vector<double> z;
  /// Optimal p_i for i in S, in s_set order.
  std::vector<double> fixed_s_probs;
  /// Leftover mass and the ties carrying it (FamilyOnArgmax only).
  double free_mass = 0.0;
  std::vector<std::size_t> free_indices;
  std::optional<double> mu;
  /// Member of the set with the free mass spread evenly over the ties.
  std::vector<double> canonical;
};

PartialOptimalSet solve_partial_convex(const SimplexInstance& inst, const Generator& gen);

/// Equal-partials condition: r_i - beta f'(p_i / q_i) agrees within tol
/// across all coordinates with p_i > tol. For the partial objective the f'
/// term is present only for members of S.
bool verify_kkt_equal_partials(const SimplexInstance& inst, const Generator& gen, std::span<const double> p,
                               ObjectiveKind kind = ObjectiveKind::kFull, double tol = 1e-6);

enum class BoundStatus { kHolds, kViolated, kHypothesisViolated, kNoInteriorArgmin };
std::string_view to_string(BoundStatus s);

struct BoundCheck {
  BoundStatus status = BoundStatus::kHolds;
  double c = 0.0;
  /// max_{i in S} (p_i - c q_i).
  double max_excess = 0.0;
};

/// p_i <= c q_i + 1e-9 on S, where c = argmin f must lie in (0, 1] and the
/// rewards in S must not exceed the best reward outside S.
BoundCheck check_displacement_bound(const SimplexInstance& inst, std::span<const double> p, double c);
BoundCheck check_displacement_bound(const SimplexInstance& inst, const Generator& gen, std::span<const double> p);

/// beta f'(w_ratio) - beta f'(l_ratio).
double implied_reward_gap(const Generator& gen, double beta, double w_ratio, double l_ratio);

/// Closed-form KL optimum p_i proportional to q_i exp(r_i / beta).
std::vector<double> kl_closed_form(std::span<const double> r, std::span<const double> q, double beta);

}  // namespace fdpo
