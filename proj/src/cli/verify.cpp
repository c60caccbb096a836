#include <cmath>
#include <functional>
#include <numbers>

#include "fdpo/classifier.hpp"
#include "fdpo/cli.hpp"
#include "fdpo/error.hpp"
#include "fdpo/losses.hpp"
#include "fdpo/oracle.hpp"
#include "fdpo/rng.hpp"

namespace fdpo::cli {
namespace {

std::string b(bool v) { return v ? "true" : "false"; }

void gradient_suite(std::vector<CheckResult>& out, std::uint64_t seed) {
  struct Named {
    std::string name;
    std::function<Loss(double)> make;
  };
  std::vector<Named> losses = {
      {"dpo", [](double beta) { return Loss::from_id("dpo", beta); }},
      {"squaredpo", [](double beta) { return Loss::from_id("squaredpo", beta); }},
  };
  for (const auto& gen : catalog())
    losses.push_back({"fdpo:" + gen.id(), [gen](double beta) { return Loss(Loss::FDpo{gen}, beta); }});

  CounterRng rng = CounterRng(seed).split("verify.gradients");
  for (const auto& named : losses) {
    std::size_t bad = 0;
    double worst = 0.0;
    for (int k = 0; k < 200; ++k) {
      const Loss loss = named.make(0.05 + 0.95 * rng.uniform());
      TripleLogProbs t{0.0, -0.5 - 4.5 * rng.uniform(), 0.0, -0.5 - 4.5 * rng.uniform()};
      t.lp_theta_w = t.lp_ref_w + 10.0 * rng.uniform() - 5.0;
      t.lp_theta_l = t.lp_ref_l + 10.0 * rng.uniform() - 5.0;
      const LossValue lv = loss(t);
      const std::vector<double> x = {t.lp_theta_w, t.lp_theta_l};
      const auto fd = finite_diff_gradient(
          [&](std::span<const double> v) {
            TripleLogProbs u = t;
            u.lp_theta_w = v[0];
            u.lp_theta_l = v[1];
            return loss(u).value;
          },
          x);
      const bool ok = fd_agrees(lv.grad_w, fd[0], lv.value) && fd_agrees(lv.grad_l, fd[1], lv.value);
      worst = std::max({worst, std::abs(lv.grad_w - fd[0]), std::abs(lv.grad_l - fd[1])});
      bad += ok ? 0 : 1;
    }
    out.push_back({"gradients", named.name, bad == 0,
                   "max |analytic - fd| = " + format_number(worst) + ", failures " + std::to_string(bad) + "/200"});
  }
}

void taxonomy_suite(std::vector<CheckResult>& out) {
  const auto rows = classify_taxonomy();
  const auto want = expected_taxonomy();
  for (std::size_t i = 0; i < want.size(); ++i) {
    const auto& r = rows.at(i);
    const auto& w = want[i];
    const bool ok = r.id == w.id && r.convex == w.convex && r.inducing == w.inducing && r.resistant == w.resistant;
    out.push_back({"taxonomy", w.id, ok,
                   "got (" + b(r.convex) + "," + b(r.inducing) + "," + b(r.resistant) + ") want (" + b(w.convex) +
                       "," + b(w.inducing) + "," + b(w.resistant) + ")"});
  }
}

void argmin_suite(std::vector<CheckResult>& out) {
  for (const auto& gen : catalog()) {
    const ArgminResult am = argmin_f(gen);
    const ScanResult grid = grid_argmin_scalar([&gen](double t) { return gen.f(t); }, 1e-8, 50.0);
    const bool ok = std::abs(am.location - grid.location) <= 3e-5 * std::max(1.0, am.location) &&
                    am.value <= grid.value + 1e-12;
    out.push_back({"argmin", gen.id(), ok,
                   "classifier " + format_number(am.location) + ", grid " + format_number(grid.location)});
  }
  const double kl = argmin_f(Generator::kl()).location;
  const double chipo = argmin_f(Generator::chi_po()).location;
  const double sq = argmin_f(Generator::squared_po()).location;
  out.push_back({"argmin", "kl-constant", std::abs(kl - 0.36788) <= 1e-4, format_number(kl)});
  out.push_back({"argmin", "chipo-constant", std::abs(chipo - 0.56714) <= 1e-4, format_number(chipo)});
  out.push_back({"argmin", "squaredpo-constant", std::abs(sq - 1.0) <= 1e-6, format_number(sq)});
  out.push_back({"argmin", "ordering", kl < chipo && chipo < 1.0 && std::abs(sq - 1.0) <= 1e-6, ""});
}

void solver_suite(std::vector<CheckResult>& out, std::size_t n, std::uint64_t seed) {
  if (n < 2 || n > 4) throw ValidationError("verify --n must lie in [2, 4]");
  const GridSpec spec{n <= 3 ? 1e-3 : 1e-2, n};
  CounterRng rng = CounterRng(seed).split("verify.solver");
  for (const auto& gen : catalog()) {
    if (is_dpo_inducing(gen).verdict != Verdict::kInducing) continue;
    std::size_t bad = 0;
    double worst = 0.0;
    for (int k = 0; k < 4; ++k) {
      const SimplexInstance inst = random_instance(rng, n);
      for (auto kind : {ObjectiveKind::kFull, ObjectiveKind::kPartial}) {
        const SimplexObjective obj = [&](std::span<const double> p) { return objective(inst, gen, p, kind); };
        const SolveResult res = kind == ObjectiveKind::kFull ? solve_full(inst, gen) : solve_partial_numeric(inst, gen);
        const LatticeResult grid = grid_maximize(obj, spec);
        const double slack = lattice_slack(obj, res.p, spec.steps());
        const double shortfall = grid.value - res.objective;
        worst = std::max(worst, shortfall);
        if (shortfall > slack + 1e-12) ++bad;
      }
    }
    out.push_back({"solver", gen.id() + "-vs-grid", bad == 0,
                   "max (grid - solver) = " + format_number(worst) + ", failures " + std::to_string(bad) + "/8"});
  }
  std::size_t bad = 0;
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const SimplexInstance inst = random_instance(rng, n);
    const auto closed = kl_closed_form(inst.r(), inst.q(), inst.beta());
    const SolveResult res = solve_full(inst, Generator::kl());
    double dev = 0.0;
    for (std::size_t i = 0; i < n; ++i) dev = std::max(dev, std::abs(closed[i] - res.p[i]));
    worst = std::max(worst, dev);
    if (dev > 1e-6) ++bad;
  }
  out.push_back({"solver", "kl-closed-form", bad == 0, "max sup-norm deviation " + format_number(worst)});
}

}  // namespace

std::vector<TaxonomyExpectation> expected_taxonomy() {
  return {
      {"kl", true, true, false},         {"reverse_kl", true, true, true}, {"jeffrey", true, true, true},
      {"js", true, true, true},          {"alpha:0.5", true, true, true},  {"chi2", true, false, true},
      {"chipo", true, true, false},      {"squaredpo", false, true, true}, {"t_log_sq", false, false, true},
  };
}

std::vector<CheckResult> run_verify(const std::string& suite, std::size_t n, std::uint64_t seed) {
  std::vector<CheckResult> out;
  const bool all = suite == "all";
  if (all || suite == "gradients") gradient_suite(out, seed);
  if (all || suite == "taxonomy") taxonomy_suite(out);
  if (all || suite == "argmin") argmin_suite(out);
  if (all || suite == "solver") solver_suite(out, n, seed);
  if (out.empty()) throw ValidationError("unknown verify suite '" + suite + "'");
  return out;
}

}  // namespace fdpo::cli
