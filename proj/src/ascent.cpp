#include "ascent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fdpo/rng.hpp"

namespace fdpo::detail {
namespace {

constexpr double kMaxStep = 30.0;
constexpr double kEps = std::numeric_limits<double>::epsilon();

struct State {
  std::vector<double> z;
  std::vector<double> logp;  // on the support
  std::vector<double> p;     // full length
  double value = 0.0;
  std::vector<double> grad;  // G_j on the support
  double residual = 0.0;
};

class Face {
 public:
  explicit Face(const FaceProblem& prob) : prob_(prob), m_(prob.support.size()) {}

  // Fills everything but the gradient.
  void evaluate(State& s) const {
    const double zmax = *std::max_element(s.z.begin(), s.z.end());
    double sum = 0.0;
    for (double zj : s.z) sum += std::exp(zj - zmax);
    const double lse = zmax + std::log(sum);
    s.logp.resize(m_);
    s.p.assign(prob_.r.size(), 0.0);
    for (std::size_t j = 0; j < m_; ++j) {
      s.logp[j] = s.z[j] - lse;
      s.p[prob_.support[j]] = std::exp(s.logp[j]);
    }
    double value = 0.0, penalty = 0.0;
    for (std::size_t i = 0; i < s.p.size(); ++i) {
      value += prob_.r[i] * s.p[i];
      if (prob_.penalized[i]) {
        const double term = prob_.gen->f(s.p[i] / prob_.q[i]);
        if (term == kInfinity || std::isnan(term)) {
          s.value = -kInfinity;
          return;
        }
        penalty += prob_.q[i] * term;
      }
    }
    s.value = value - prob_.beta * penalty;
  }

  void gradient(State& s) const {
    s.grad.resize(m_);
    double mean = 0.0;
    for (std::size_t j = 0; j < m_; ++j) {
      const std::size_t i = prob_.support[j];
      double g = prob_.r[i];
      if (prob_.penalized[i]) g -= prob_.beta * prob_.gen->f_prime_log(s.logp[j] - std::log(prob_.q[i]));
      s.grad[j] = g;
      mean += s.p[i] * g;
    }
    s.residual = 0.0;
    for (std::size_t j = 0; j < m_; ++j)
      s.residual = std::max(s.residual, s.p[prob_.support[j]] * std::abs(s.grad[j] - mean));
  }

  // Diagonally preconditioned direction in logit space: the Newton step of
  // the separable objective restricted to sum(dp) = 0. With positive
  // weights it is always an ascent direction.
  std::vector<double> direction(const State& s, double& slope) const {
    std::vector<double> h(m_);
    double wsum = 0.0, wg = 0.0, mean = 0.0;
    for (std::size_t j = 0; j < m_; ++j) {
      const std::size_t i = prob_.support[j];
      double curv = prob_.beta;
      if (prob_.penalized[i]) {
        curv = std::abs(prob_.beta * prob_.gen->f_prime_log_slope(s.logp[j] - std::log(prob_.q[i])));
        curv = std::max(curv, 1e-6 * prob_.beta);
        if (!std::isfinite(curv)) curv = 1e300;
      }
      h[j] = curv;
      const double w = s.p[i] / curv;
      wsum += w;
      wg += w * s.grad[j];
      mean += s.p[i] * s.grad[j];
    }
    const double lambda = wsum > 0.0 ? wg / wsum : mean;
    std::vector<double> d(m_);
    slope = 0.0;
    for (std::size_t j = 0; j < m_; ++j) {
      d[j] = (s.grad[j] - lambda) / h[j];
      slope += s.p[prob_.support[j]] * (s.grad[j] - mean) * d[j];
    }
    return d;
  }

  std::size_t size() const { return m_; }

 private:
  const FaceProblem& prob_;
  std::size_t m_;
};

SolveResult run_once(const Face& face, std::vector<double> z0, const SolveOptions& opts) {
  State cur;
  cur.z = std::move(z0);
  face.evaluate(cur);
  face.gradient(cur);
  std::size_t iter = 0;
  bool converged = cur.residual <= opts.tolerance;
  for (; iter < opts.max_iterations && !converged; ++iter) {
    double slope = 0.0;
    const std::vector<double> d = face.direction(cur, slope);
    double dmax = 0.0;
    for (double dj : d) dmax = std::max(dmax, std::abs(dj));
    if (!(dmax > 0.0) || !std::isfinite(dmax)) break;
    double alpha = std::min(1.0, kMaxStep / dmax);

    bool accepted = false;
    State trial;
    for (int ls = 0; ls < 60; ++ls, alpha *= 0.5) {
      trial.z = cur.z;
      for (std::size_t j = 0; j < d.size(); ++j) trial.z[j] += alpha * d[j];
      face.evaluate(trial);
      if (!std::isfinite(trial.value)) continue;
      if (trial.value >= cur.value + 1e-4 * alpha * slope) {
        accepted = true;
        break;
      }
      // Near the optimum the objective is flat to rounding; accept a step
      // that still shrinks the residual.
      if (trial.value >= cur.value - 8.0 * kEps * (1.0 + std::abs(cur.value))) {
        face.gradient(trial);
        if (trial.residual < cur.residual) {
          accepted = true;
          break;
        }
      }
    }
    if (!accepted) break;
    face.gradient(trial);
    cur = std::move(trial);
    converged = cur.residual <= opts.tolerance;
  }
  return {cur.p, cur.value, converged, iter, cur.residual};
}

bool better(const SolveResult& a, const SolveResult& b) {
  if (a.objective > b.objective + 1e-13 * (1.0 + std::abs(b.objective))) return true;
  if (a.objective < b.objective - 1e-13 * (1.0 + std::abs(b.objective))) return false;
  return a.residual < b.residual;
}

}  // namespace

SolveResult ascend_face(const FaceProblem& prob, const SolveOptions& opts, std::size_t restarts) {
  const Face face(prob);
  CounterRng rng(opts.seed);
  CounterRng face_rng = rng.split(prob.support.size());
  for (std::size_t i : prob.support) face_rng = face_rng.split(i);

  SolveResult best;
  bool have = false;
  for (std::size_t k = 0; k < std::max<std::size_t>(restarts, 1); ++k) {
    CounterRng draw = face_rng.split(k);
    std::vector<double> z0(face.size());
    for (std::size_t j = 0; j < z0.size(); ++j) {
      z0[j] = std::log(prob.q[prob.support[j]]);
      if (k > 0) z0[j] += 2.0 * draw.normal();
    }
    SolveResult res = run_once(face, std::move(z0), opts);
    if (!std::isfinite(res.objective)) continue;
    if (!have || better(res, best)) {
      best = std::move(res);
      have = true;
    }
  }
  if (!have) {
    best.p.assign(prob.r.size(), 0.0);
    best.objective = -kInfinity;
  }
  return best;
}

}  // namespace fdpo::detail
