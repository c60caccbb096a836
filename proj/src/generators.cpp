#include "fdpo/generators.hpp"

#include <charconv>
#include <cmath>
#include <numbers>

#include "fdpo/error.hpp"

namespace fdpo {
namespace {

constexpr double kLn2 = std::numbers::ln2;

// t log t with 0 log 0 = 0.
double xlogx(double t) { return t < 1e-300 ? 0.0 : t * std::log(t); }

std::string format_double(double x) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

// Solves g(s) = u for strictly increasing g with derivative dg > 0 over all
// of R. Bracket expansion then Newton steps that fall back to bisection.
template <class G, class DG>
double solve_increasing(G g, DG dg, double u) {
  double lo = -1.0, hi = 1.0;
  for (int i = 0; i < 12 && !(g(lo) <= u); ++i) lo *= 2.0;
  for (int i = 0; i < 12 && !(g(hi) >= u); ++i) hi *= 2.0;
  if (!(g(lo) <= u) || !(g(hi) >= u)) throw NumericalError("f' inverse: no bracket");
  double s = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double val = g(s) - u;
    if (val == 0.0) break;
    if (val < 0.0) lo = s; else hi = s;
    double next = s - val / dg(s);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - s) <= 1e-16 * std::max(1.0, std::abs(s))) {
      s = next;
      break;
    }
    s = next;
  }
  return std::exp(s);
}

}  // namespace

Generator Generator::kl() { return {GeneratorKind::kKl, "kl", true, 0.0}; }
Generator Generator::reverse_kl() { return {GeneratorKind::kReverseKl, "reverse_kl", true, kInfinity}; }
Generator Generator::jeffrey() { return {GeneratorKind::kJeffrey, "jeffrey", true, kInfinity}; }
Generator Generator::jensen_shannon() { return {GeneratorKind::kJensenShannon, "js", true, kLn2}; }

Generator Generator::alpha(double alpha) {
  if (!std::isfinite(alpha) || alpha == 0.0 || alpha == 1.0)
    throw ValidationError("alpha-divergence requires a finite alpha outside {0, 1}");
  const double at_zero = alpha < 1.0 ? 1.0 / (1.0 - alpha) : kInfinity;
  return {GeneratorKind::kAlpha, "alpha:" + format_double(alpha), true, at_zero, alpha};
}

Generator Generator::chi_squared() { return {GeneratorKind::kChiSquared, "chi2", true, 1.0}; }
Generator Generator::chi_po() { return {GeneratorKind::kChiPo, "chipo", true, 0.5}; }
Generator Generator::squared_po() { return {GeneratorKind::kSquaredPo, "squaredpo", false, kInfinity}; }
Generator Generator::t_log_squared() { return {GeneratorKind::kTLogSquared, "t_log_sq", false, 0.0}; }

Generator Generator::from_id(std::string_view id) {
  if (id == "kl") return kl();
  if (id == "reverse_kl") return reverse_kl();
  if (id == "jeffrey") return jeffrey();
  if (id == "js") return jensen_shannon();
  if (id == "chi2") return chi_squared();
  if (id == "chipo") return chi_po();
  if (id == "squaredpo") return squared_po();
  if (id == "t_log_sq") return t_log_squared();
  if (id == "alpha") return alpha(0.5);
  if (id.starts_with("alpha:")) {
    const auto text = id.substr(6);
    double value = 0.0;
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || end != text.data() + text.size() || text.empty())
      throw ValidationError("bad alpha value in generator id '" + std::string(id) + "'");
    return alpha(value);
  }
  throw ValidationError("unknown generator id '" + std::string(id) + "'");
}

bool Generator::has_prime_inverse() const {
  return kind_ != GeneratorKind::kSquaredPo && kind_ != GeneratorKind::kTLogSquared;
}

double Generator::f(double t) const {
  if (t == 0.0) return f_at_zero_;
  const double lt = std::log(t);
  switch (kind_) {
    case GeneratorKind::kKl: return xlogx(t);
    case GeneratorKind::kReverseKl: return -lt;
    case GeneratorKind::kJeffrey: return (t - 1.0) * lt;
    case GeneratorKind::kJensenShannon: return -(t + 1.0) * (std::log1p(t) - kLn2) + xlogx(t);
    case GeneratorKind::kAlpha: {
      const double a = *alpha_;
      // Numerator written with expm1 so it stays accurate near t = 1.
      return (std::expm1((1.0 - a) * lt) - (1.0 - a) * std::expm1(lt)) / (a * (a - 1.0));
    }
    case GeneratorKind::kChiSquared: return (t - 1.0) * (t - 1.0);
    case GeneratorKind::kChiPo: return 0.5 * (t - 1.0) * (t - 1.0) + xlogx(t);
    case GeneratorKind::kSquaredPo: return 0.5 * lt * lt;
    case GeneratorKind::kTLogSquared: return t < 1e-300 ? 0.0 : 0.5 * t * lt * lt;
  }
  return std::nan("");
}

double Generator::f_prime(double t) const {
  if (!(t > 0.0)) throw ValidationError("f' requires t > 0");
  return f_prime_log(std::log(t));
}

double Generator::f_double_prime(double t) const {
  if (!(t > 0.0)) throw ValidationError("f'' requires t > 0");
  return f_prime_log_slope(std::log(t)) / t;
}

double Generator::f_prime_log(double s) const {
  switch (kind_) {
    case GeneratorKind::kKl: return s + 1.0;
    case GeneratorKind::kReverseKl: return -std::exp(-s);
    case GeneratorKind::kJeffrey: return s + 1.0 - std::exp(-s);
    case GeneratorKind::kJensenShannon: return kLn2 - std::log1p(std::exp(-s));
    case GeneratorKind::kAlpha: {
      const double a = *alpha_;
      return -std::expm1(-a * s) / a;
    }
    case GeneratorKind::kChiSquared: return 2.0 * std::expm1(s);
    case GeneratorKind::kChiPo: return std::exp(s) + s;
    case GeneratorKind::kSquaredPo: return s * std::exp(-s);
    case GeneratorKind::kTLogSquared: return 0.5 * s * s + s;
  }
  return std::nan("");
}

double Generator::f_prime_log_slope(double s) const {
  switch (kind_) {
    case GeneratorKind::kKl: return 1.0;
    case GeneratorKind::kReverseKl: return std::exp(-s);
    case GeneratorKind::kJeffrey: return 1.0 + std::exp(-s);
    case GeneratorKind::kJensenShannon: return 1.0 / (1.0 + std::exp(s));
    case GeneratorKind::kAlpha: return std::exp(-*alpha_ * s);
    case GeneratorKind::kChiSquared: return 2.0 * std::exp(s);
    case GeneratorKind::kChiPo: return std::exp(s) + 1.0;
    case GeneratorKind::kSquaredPo: return (1.0 - s) * std::exp(-s);
    case GeneratorKind::kTLogSquared: return s + 1.0;
  }
  return std::nan("");
}

double Generator::f_prime_inverse(double u) const {
  if (std::isnan(u)) throw ValidationError("f' inverse of NaN");
  switch (kind_) {
    case GeneratorKind::kKl: return std::exp(u - 1.0);
    case GeneratorKind::kReverseKl: return u < 0.0 ? -1.0 / u : kInfinity;
    case GeneratorKind::kJeffrey:
      return solve_increasing([](double s) { return s + 1.0 - std::exp(-s); },
                              [](double s) { return 1.0 + std::exp(-s); }, u);
    case GeneratorKind::kJensenShannon: return u < kLn2 ? 1.0 / std::expm1(kLn2 - u) : kInfinity;
    case GeneratorKind::kAlpha: {
      const double a = *alpha_;
      const double m = -a * u;  // log1p argument; needs 1 + m > 0
      if (m <= -1.0) return a > 0.0 ? kInfinity : 0.0;
      return std::exp(-std::log1p(m) / a);
    }
    case GeneratorKind::kChiSquared: return u > -2.0 ? 0.5 * u + 1.0 : 0.0;
    case GeneratorKind::kChiPo:
      return solve_increasing([](double s) { return std::exp(s) + s; },
                              [](double s) { return std::exp(s) + 1.0; }, u);
    case GeneratorKind::kSquaredPo:
    case GeneratorKind::kTLogSquared:
      break;
  }
  throw ValidationError("generator '" + id_ + "' has no invertible f'");
}

std::vector<Generator> catalog(double alpha) {
  return {Generator::kl(),          Generator::reverse_kl(),   Generator::jeffrey(),
          Generator::jensen_shannon(), Generator::alpha(alpha), Generator::chi_squared(),
          Generator::chi_po(),      Generator::squared_po(),   Generator::t_log_squared()};
}

Distribution::Distribution(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.size() < 2) throw ValidationError("distribution needs at least 2 entries");
  double sum = 0.0;
  for (double p : probs_) {
    if (!std::isfinite(p) || p < 0.0) throw ValidationError("distribution entries must be finite and >= 0");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw ValidationError("distribution does not sum to 1");
}

bool Distribution::strictly_positive() const {
  for (double p : probs_)
    if (!(p > 0.0)) return false;
  return true;
}

double eval_f(const Generator& gen, double t) {
  if (std::isnan(t) || t < 0.0) throw ValidationError("f requires t >= 0");
  return gen.f(t);
}

double f_divergence(std::span<const double> p, std::span<const double> q, const Generator& gen) {
  if (p.size() != q.size()) throw ValidationError("f_divergence: length mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(q[i] > 0.0)) throw ValidationError("f_divergence: q must be strictly positive");
    const double term = eval_f(gen, p[i] / q[i]);
    if (term == kInfinity) return kInfinity;
    total += q[i] * term;
  }
  return total;
}

double f_divergence(const Distribution& p, const Distribution& q, const Generator& gen) {
  return f_divergence(p.probs(), q.probs(), gen);
}

}  // namespace fdpo
