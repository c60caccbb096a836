#pragma once

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fdpo {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class GeneratorKind {
  kKl,
  kReverseKl,
  kJeffrey,
  kJensenShannon,
  kAlpha,
  kChiSquared,
  kChiPo,
  kSquaredPo,
  kTLogSquared,
};

/// A generating function f : R+ -> R with f(1) = 0, together with its first
/// two derivatives and, where f' is strictly monotone, the inverse of f'.
///
/// Besides the plain evaluators there are log-domain evaluators that take
/// s = log t. The loss code works with log-ratios, so f'(e^s) and
/// t f''(t) at t = e^s are evaluated without forming t explicitly.
///
/// f(0) is an extended real: +infinity is returned deliberately (never by
/// overflow) for entries such as -log t.
class Generator {
 public:
  static Generator kl();
  static Generator reverse_kl();
  static Generator jeffrey();
  static Generator jensen_shannon();
  /// Rejects alpha in {0, 1}, where the formula degenerates.
  static Generator alpha(double alpha);
  static Generator chi_squared();
  static Generator chi_po();
  static Generator squared_po();
  static Generator t_log_squared();

  /// Parses "kl", "reverse_kl", "jeffrey", "js", "alpha:<value>", "chi2",
  /// "chipo", "squaredpo", "t_log_sq". A bare "alpha" uses alpha = 0.5.
  static Generator from_id(std::string_view id);

  const std::string& id() const { return id_; }
  GeneratorKind kind() const { return kind_; }
  std::optional<double> alpha_parameter() const { return alpha_; }
  bool convex() const { return convex_; }
  double f_at_zero() const { return f_at_zero_; }
  bool has_prime_inverse() const;

  double f(double t) const;
  double f_prime(double t) const;
  double f_double_prime(double t) const;

  /// Inverse of f'. Outside the range of f' the boundary sentinels are
  /// returned: 0 below the infimum and +infinity above the supremum.
  double f_prime_inverse(double u) const;

  /// f'(e^s).
  double f_prime_log(double s) const;
  /// d/ds f'(e^s) = t f''(t) at t = e^s.
  double f_prime_log_slope(double s) const;

  friend bool operator==(const Generator& a, const Generator& b) {
    return a.kind_ == b.kind_ && a.alpha_ == b.alpha_;
  }

 private:
  Generator(GeneratorKind kind, std::string id, bool convex, double f_at_zero,
            std::optional<double> alpha = std::nullopt)
      : kind_(kind), id_(std::move(id)), convex_(convex), f_at_zero_(f_at_zero), alpha_(alpha) {}

  GeneratorKind kind_;
  std::string id_;
  bool convex_;
  double f_at_zero_;
  std::optional<double> alpha_;
};

/// The nine catalog entries, in a fixed order. The alpha-divergence entry
/// uses the supplied alpha.
std::vector<Generator> catalog(double alpha = 0.5);

/// A probability vector of length >= 2 summing to 1 within 1e-12.
class Distribution {
 public:
  explicit Distribution(std::vector<double> probs);

  std::span<const double> probs() const { return probs_; }
  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  bool strictly_positive() const;

 private:
  std::vector<double> probs_;
};

/// f evaluated at t >= 0 (t = 0 yields f_at_zero).
double eval_f(const Generator& gen, double t);

/// D_f(p || q) = sum_i q_i f(p_i / q_i). Short-circuits to +infinity as soon
/// as an infinite term appears. q must be strictly positive.
double f_divergence(std::span<const double> p, std::span<const double> q, const Generator& gen);
double f_divergence(const Distribution& p, const Distribution& q, const Generator& gen);

}  // namespace fdpo
