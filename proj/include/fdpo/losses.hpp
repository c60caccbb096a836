#pragma once

#include <string>
#include <string_view>
#include <variant>

#include "fdpo/generators.hpp"

namespace fdpo {

/// Natural-log probabilities of one preference triple's winner and loser
/// under the trained and the frozen reference policy.
struct TripleLogProbs {
  double lp_theta_w = 0.0;
  double lp_ref_w = 0.0;
  double lp_theta_l = 0.0;
  double lp_ref_l = 0.0;

  double delta_w() const { return lp_theta_w - lp_ref_w; }
  double delta_l() const { return lp_theta_l - lp_ref_l; }
};

/// Loss value and its partial derivatives with respect to lp_theta_w and
/// lp_theta_l.
struct LossValue {
  double value = 0.0;
  double grad_w = 0.0;
  double grad_l = 0.0;
};

inline constexpr double kDefaultClip = 50.0;

/// -log sigmoid(gap), as softplus(-gap).
double bt_nll(double reward_gap);
/// sigmoid(x), stable for large |x|.
double sigmoid(double x);

LossValue dpo_loss(const TripleLogProbs& t, double beta);
LossValue fdpo_loss(const TripleLogProbs& t, const Generator& gen, double beta);

/// beta * exp(min(lp_ref - lp_theta, clip)).
double squaredpo_coefficient(double beta, double lp_theta, double lp_ref, double clip = kDefaultClip);

/// SquaredPO: DPO with the per-response coefficient above. By default the
/// gradient flows through the coefficient as well; detach_coefficient treats
/// it as a constant. Past the clip the coefficient is constant either way.
LossValue squaredpo_loss(const TripleLogProbs& t, double beta, double clip = kDefaultClip,
                         bool detach_coefficient = false);

/// A loss selected by id: "dpo", "squaredpo", or "fdpo:<generator-id>".
class Loss {
 public:
  struct Dpo {};
  struct SquaredPo {
    double clip = kDefaultClip;
    bool detach = false;
  };
  struct FDpo {
    Generator gen;
  };

  Loss(std::variant<Dpo, SquaredPo, FDpo> kind, double beta);
  static Loss from_id(std::string_view id, double beta, double clip = kDefaultClip, bool detach = false);

  LossValue operator()(const TripleLogProbs& t) const;
  std::string id() const;
  double beta() const { return beta_; }
  bool is_squaredpo() const { return std::holds_alternative<SquaredPo>(kind_); }
  double clip() const;

 private:
  std::variant<Dpo, SquaredPo, FDpo> kind_;
  double beta_;
};

}  // namespace fdpo
