#include "fdpo/losses.hpp"

#include <cmath>

#include "fdpo/error.hpp"

namespace fdpo {
namespace {

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

void require_beta(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw ValidationError("beta must be a positive finite number");
}

// Loss -log sigmoid(gap) with d gap / d delta_w = slope_w and
// d gap / d delta_l = -slope_l.
LossValue from_gap(double gap, double slope_w, double slope_l) {
  const double s = sigmoid(-gap);
  return {softplus(-gap), -s * slope_w, s * slope_l};
}

}  // namespace

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double bt_nll(double reward_gap) { return softplus(-reward_gap); }

LossValue dpo_loss(const TripleLogProbs& t, double beta) {
  require_beta(beta);
  return from_gap(beta * (t.delta_w() - t.delta_l()), beta, beta);
}

LossValue fdpo_loss(const TripleLogProbs& t, const Generator& gen, double beta) {
  require_beta(beta);
  const double dw = t.delta_w(), dl = t.delta_l();
  const double gap = beta * gen.f_prime_log(dw) - beta * gen.f_prime_log(dl);
  return from_gap(gap, beta * gen.f_prime_log_slope(dw), beta * gen.f_prime_log_slope(dl));
}

double squaredpo_coefficient(double beta, double lp_theta, double lp_ref, double clip) {
  return beta * std::exp(std::min(lp_ref - lp_theta, clip));
}

LossValue squaredpo_loss(const TripleLogProbs& t, double beta, double clip, bool detach_coefficient) {
  require_beta(beta);
  if (!(clip > 0.0)) throw ValidationError("clip must be positive");
  const double dw = t.delta_w(), dl = t.delta_l();
  const double bw = squaredpo_coefficient(beta, t.lp_theta_w, t.lp_ref_w, clip);
  const double bl = squaredpo_coefficient(beta, t.lp_theta_l, t.lp_ref_l, clip);
  // d(b * delta)/d delta = b (1 - delta) while the coefficient is live.
  auto slope = [&](double b, double d) { return (detach_coefficient || -d >= clip) ? b : b * (1.0 - d); };
  return from_gap(bw * dw - bl * dl, slope(bw, dw), slope(bl, dl));
}

Loss::Loss(std::variant<Dpo, SquaredPo, FDpo> kind, double beta) : kind_(std::move(kind)), beta_(beta) {
  require_beta(beta);
}

Loss Loss::from_id(std::string_view id, double beta, double clip, bool detach) {
  if (id == "dpo") return Loss(Dpo{}, beta);
  if (id == "squaredpo") {
    if (!(clip > 0.0)) throw ValidationError("clip must be positive");
    return Loss(SquaredPo{clip, detach}, beta);
  }
  if (id.starts_with("fdpo:")) return Loss(FDpo{Generator::from_id(id.substr(5))}, beta);
  throw ValidationError("unknown loss id '" + std::string(id) + "'");
}

LossValue Loss::operator()(const TripleLogProbs& t) const {
  if (std::holds_alternative<Dpo>(kind_)) return dpo_loss(t, beta_);
  if (const auto* sq = std::get_if<SquaredPo>(&kind_)) return squaredpo_loss(t, beta_, sq->clip, sq->detach);
  return fdpo_loss(t, std::get<FDpo>(kind_).gen, beta_);
}

std::string Loss::id() const {
  if (std::holds_alternative<Dpo>(kind_)) return "dpo";
  if (std::holds_alternative<SquaredPo>(kind_)) return "squaredpo";
  return "fdpo:" + std::get<FDpo>(kind_).gen.id();
}

double Loss::clip() const {
  if (const auto* sq = std::get_if<SquaredPo>(&kind_)) return sq->clip;
  return kInfinity;
}

}  // namespace fdpo
