// One line per acceptance criterion: PASS/FAIL, the measured quantities and
// the wall time. `--only <id>` restricts the run to one criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fdpo/classifier.hpp"
#include "fdpo/cli.hpp"
#include "fdpo/losses.hpp"
#include "fdpo/oracle.hpp"
#include "fdpo/rng.hpp"
#include "fdpo/simplex.hpp"

namespace {

using namespace fdpo;
namespace fs = std::filesystem;
using nlohmann::json;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string id;
  std::function<Outcome()> run;
};

std::string fmt(double x) { return cli::format_number(x); }

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Generators whose optimal solutions are interior: the f-DPO family under test.
std::vector<Generator> inducing_generators() {
  return {Generator::kl(),     Generator::reverse_kl(), Generator::jeffrey(),   Generator::jensen_shannon(),
          Generator::alpha(0.5), Generator::chi_po(),   Generator::squared_po()};
}

std::vector<Generator> convex_inducing_generators() {
  std::vector<Generator> out;
  for (const auto& g : inducing_generators())
    if (g.convex()) out.push_back(g);
  return out;
}

SimplexInstance with_rewards(const SimplexInstance& inst, std::vector<double> r) {
  return SimplexInstance(std::move(r), inst.reference(), inst.beta(),
                         std::vector<std::size_t>(inst.s_set().begin(), inst.s_set().end()));
}

// Lattice maximum of the full or partial objective, one separable term per
// coordinate.
LatticeResult lattice_optimum(const SimplexInstance& inst, const Generator& gen, ObjectiveKind kind,
                              std::size_t steps) {
  std::vector<CoordinateTerm> terms;
  for (std::size_t i = 0; i < inst.n(); ++i) {
    const bool penalized = kind == ObjectiveKind::kFull || inst.in_s(i);
    const double r = inst.r()[i], q = inst.q()[i], beta = inst.beta();
    terms.push_back([&gen, r, q, beta, penalized](double x) {
      return r * x - (penalized ? beta * q * eval_f(gen, x / q) : 0.0);
    });
  }
  LatticeResult best = separable_lattice_maximize(terms, steps);
  best.value = objective(inst, gen, best.point, kind);
  return best;
}

// --- 1 -------------------------------------------------------------------

Outcome taxonomy() {
  struct Row {
    bool convex, inducing, resistant;
  };
  // Expected membership of each catalog generator in the three regions.
  const std::map<std::string, Row> regions = {
      {"kl", {true, true, false}},         {"reverse_kl", {true, true, true}}, {"jeffrey", {true, true, true}},
      {"js", {true, true, true}},          {"alpha:0.5", {true, true, true}},  {"chi2", {true, false, true}},
      {"chipo", {true, true, false}},      {"squaredpo", {false, true, true}}, {"t_log_sq", {false, false, true}},
  };
  const auto start = std::chrono::steady_clock::now();
  const char* argv[] = {"fdpo", "classify", "--all"};
  std::ostringstream out, err;
  const int code = cli::run(3, argv, out, err);
  const double elapsed = seconds_since(start);
  if (code != 0) return {false, "classify exited " + std::to_string(code) + ": " + err.str()};

  std::istringstream lines(out.str());
  std::string line;
  std::getline(lines, line);
  std::size_t rows = 0, mismatches = 0;
  std::string wrong;
  while (std::getline(lines, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    ++rows;
    const auto it = regions.find(cells.at(0));
    const bool ok = it != regions.end() && (cells.at(1) == "true") == it->second.convex &&
                    (cells.at(2) == "true") == it->second.inducing && (cells.at(3) == "true") == it->second.resistant;
    if (!ok) {
      ++mismatches;
      wrong += " " + cells.at(0);
    }
  }
  const bool pass = rows == regions.size() && mismatches == 0 && elapsed < 5.0;
  return {pass, std::to_string(rows) + " rows, " + std::to_string(mismatches) + " mismatches" + wrong + ", " +
                    fmt(elapsed) + " s (limit 5 s)"};
}

// --- 2 -------------------------------------------------------------------

Outcome argmin_constants() {
  const double kl = argmin_f(Generator::kl()).location;
  const double chipo = argmin_f(Generator::chi_po()).location;
  const double sq = argmin_f(Generator::squared_po()).location;
  const bool pass = std::abs(kl - 0.36788) <= 1e-4 && std::abs(chipo - 0.56714) <= 1e-4 &&
                    std::abs(sq - 1.0) <= 1e-6 && kl < chipo && chipo < 1.0;
  return {pass, "kl " + fmt(kl) + ", chipo " + fmt(chipo) + ", squaredpo " + fmt(sq)};
}

// --- 3 -------------------------------------------------------------------

Outcome closed_form_and_grid() {
  const auto start = std::chrono::steady_clock::now();
  CounterRng rng = CounterRng(3).split("acceptance.closed_form");
  double worst_kl = 0.0;
  for (int k = 0; k < 100; ++k) {
    const std::size_t n = 2 + static_cast<std::size_t>(k) % 5;
    const SimplexInstance inst = random_instance(rng, n);
    // p_i proportional to q_i exp(r_i / beta), via a shifted log-sum-exp.
    std::vector<double> logits(n);
    for (std::size_t i = 0; i < n; ++i) logits[i] = std::log(inst.q()[i]) + inst.r()[i] / inst.beta();
    const double top = *std::max_element(logits.begin(), logits.end());
    double z = 0.0;
    for (double l : logits) z += std::exp(l - top);
    const SolveResult res = solve_full(inst, Generator::kl());
    for (std::size_t i = 0; i < n; ++i) worst_kl = std::max(worst_kl, std::abs(res.p[i] - std::exp(logits[i] - top) / z));
  }

  const std::size_t steps = 1000;
  std::size_t failures = 0, checked = 0;
  double worst_excess = -std::numeric_limits<double>::infinity();
  std::string where;
  CounterRng grid_rng = CounterRng(3).split("acceptance.grid");
  for (const auto& gen : inducing_generators()) {
    CounterRng gen_rng = grid_rng.split(gen.id());
    for (int k = 0; k < 100; ++k) {
      const std::size_t n = 2 + static_cast<std::size_t>(k) % 3;
      const SimplexInstance inst = random_instance(gen_rng, n);
      for (auto kind : {ObjectiveKind::kFull, ObjectiveKind::kPartial}) {
        const SolveResult res = kind == ObjectiveKind::kFull ? solve_full(inst, gen) : solve_partial_numeric(inst, gen);
        const SimplexObjective obj = [&](std::span<const double> p) { return objective(inst, gen, p, kind); };
        const LatticeResult grid = lattice_optimum(inst, gen, kind, steps);
        const double slack = lattice_slack(obj, res.p, steps);
        const double excess = (grid.value - res.objective) - slack;
        ++checked;
        if (excess > worst_excess) worst_excess = excess;
        if (excess > 1e-12) {
          ++failures;
          if (where.empty()) where = ", first failure " + gen.id() + " n=" + std::to_string(n);
        }
      }
    }
  }
  const double elapsed = seconds_since(start);
  const bool pass = worst_kl <= 1e-6 && failures == 0 && elapsed < 300.0;
  return {pass, "kl closed form max sup-norm " + fmt(worst_kl) + " (tol 1e-6); grid 1e-3: " + std::to_string(failures) +
                    "/" + std::to_string(checked) + " below oracle beyond slack, max (grid - solver - slack) " +
                    fmt(worst_excess) + where + "; " + fmt(elapsed) + " s (limit 300 s)"};
}

// --- 4 -------------------------------------------------------------------

Outcome partial_case_split() {
  CounterRng rng = CounterRng(4).split("acceptance.case_split");
  const auto gens = convex_inducing_generators();
  std::size_t violations = 0, family = 0, interior = 0;
  std::string first;
  for (int k = 0; k < 200; ++k) {
    const Generator& gen = gens[static_cast<std::size_t>(k) % gens.size()];
    const std::size_t n = 2 + static_cast<std::size_t>(k) % 5;
    const SimplexInstance inst = random_instance(rng, n);
    const PartialOptimalSet set = solve_partial_convex(inst, gen);
    const auto& p = set.canonical;

    double sum_z = 0.0;
    for (std::size_t i : inst.s_set()) sum_z += inst.q()[i] * gen.f_prime_inverse((inst.r()[i] - inst.r_hat()) / inst.beta());

    bool ok = verify_kkt_equal_partials(inst, gen, p, ObjectiveKind::kPartial, 1e-6);
    double total = 0.0;
    for (double v : p) total += v;
    ok = ok && std::abs(total - 1.0) <= 1e-9;
    if (sum_z >= 1.0) {
      ++interior;
      ok = ok && set.kase == PartialCase::kUniqueInteriorMu;
      for (std::size_t i = 0; i < n; ++i)
        if (!inst.in_s(i)) ok = ok && p[i] == 0.0;
    } else {
      ++family;
      ok = ok && set.kase == PartialCase::kFamilyOnArgmax;
      double leftover = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (inst.in_s(i)) {
          const double z = inst.q()[i] * gen.f_prime_inverse((inst.r()[i] - inst.r_hat()) / inst.beta());
          ok = ok && std::abs(p[i] - z) <= 1e-12;
        } else {
          if (inst.r()[i] != inst.r_hat()) ok = ok && p[i] == 0.0;
          leftover += p[i];
        }
      }
      ok = ok && std::abs(leftover - (1.0 - sum_z)) <= 1e-9;
    }
    if (!ok) {
      ++violations;
      if (first.empty()) first = ", first violation " + gen.id() + " instance " + std::to_string(k);
    }
  }
  return {violations == 0, std::to_string(violations) + " violations over 200 instances (" + std::to_string(family) +
                               " leftover-on-argmax, " + std::to_string(interior) + " interior-mu)" + first};
}

// --- 5 -------------------------------------------------------------------

Outcome displacement_bound() {
  CounterRng rng = CounterRng(5).split("acceptance.bound");
  std::size_t violations = 0, tight = 0;
  std::string detail;
  for (const auto& gen : {Generator::kl(), Generator::chi_po()}) {
    const double c = argmin_f(gen).location;
    double worst = -std::numeric_limits<double>::infinity();
    CounterRng gen_rng = rng.split(gen.id());
    for (int k = 0; k < 200; ++k) {
      const std::size_t n = 2 + static_cast<std::size_t>(k) % 5;
      SimplexInstance inst = random_instance(gen_rng, n, 2.0, true);
      // Every other instance uses integer rewards so that in-sample rewards
      // can tie the best out-of-sample reward.
      if (k % 2 == 1) {
        std::vector<double> r(inst.r().begin(), inst.r().end());
        for (double& v : r) v = std::round(v);
        inst = with_rewards(inst, std::move(r));
      }
      const auto p = solve_partial_convex(inst, gen).canonical;
      for (std::size_t i : inst.s_set()) {
        const double excess = p[i] - c * inst.q()[i];
        worst = std::max(worst, excess);
        if (excess > 1e-9) ++violations;
        if (gen.kind() == GeneratorKind::kKl && std::abs(p[i] - std::exp(-1.0) * inst.q()[i]) < 1e-8) ++tight;
      }
    }
    detail += gen.id() + " (c = " + fmt(c) + ") max p_i - c q_i " + fmt(worst) + "; ";
  }
  const bool pass = violations == 0 && tight > 0;
  return {pass, detail + std::to_string(violations) + " violations, " + std::to_string(tight) +
                    " tight kl coordinates within 1e-8"};
}

// --- 6 -------------------------------------------------------------------

Outcome gap_equivalence() {
  CounterRng rng = CounterRng(6).split("acceptance.gaps");
  std::size_t failures = 0, pairs = 0;
  double worst = 0.0, worst_vs_reward = 0.0;
  std::string first, per_gen;
  for (const auto& gen : inducing_generators()) {
    CounterRng gen_rng = rng.split(gen.id());
    double gen_worst = 0.0;
    for (int k = 0; k < 100;) {
      const std::size_t n = 3 + static_cast<std::size_t>(k) % 3;
      const SimplexInstance inst = random_instance(gen_rng, n);
      if (inst.s_set().size() < 2) continue;
      ++k;
      const auto full = solve_full(inst, gen).p;
      const auto partial = gen.convex() ? solve_partial_convex(inst, gen).canonical : solve_partial_numeric(inst, gen).p;
      const auto s = inst.s_set();
      for (std::size_t a = 0; a < s.size(); ++a)
        for (std::size_t b = 0; b < s.size(); ++b) {
          if (a == b) continue;
          const std::size_t w = s[a], l = s[b];
          const double q_w = inst.q()[w], q_l = inst.q()[l];
          const double g_full = implied_reward_gap(gen, inst.beta(), full[w] / q_w, full[l] / q_l);
          const double g_part = implied_reward_gap(gen, inst.beta(), partial[w] / q_w, partial[l] / q_l);
          const double dev = std::abs(g_full - g_part);
          ++pairs;
          worst = std::max(worst, dev);
          gen_worst = std::max(gen_worst, dev);
          worst_vs_reward = std::max(worst_vs_reward, std::abs(g_full - (inst.r()[w] - inst.r()[l])));
          if (!(dev <= 1e-6)) {
            ++failures;
            if (first.empty()) first = ", first failure " + gen.id();
          }
        }
    }
    per_gen += " " + gen.id() + " " + fmt(gen_worst);
  }
  return {failures == 0, std::to_string(failures) + "/" + std::to_string(pairs) +
                             " in-sample pairs disagree, max |full - partial| " + fmt(worst) +
                             ", max |full - reward gap| " + fmt(worst_vs_reward) + first + ";" + per_gen};
}

// --- 7 -------------------------------------------------------------------

TripleLogProbs random_triple(CounterRng& rng, double spread) {
  TripleLogProbs t{0.0, -0.5 - 4.5 * rng.uniform(), 0.0, -0.5 - 4.5 * rng.uniform()};
  t.lp_theta_w = t.lp_ref_w + spread * (2.0 * rng.uniform() - 1.0);
  t.lp_theta_l = t.lp_ref_l + spread * (2.0 * rng.uniform() - 1.0);
  return t;
}

bool same(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)); }

Outcome loss_identities() {
  CounterRng rng = CounterRng(7).split("acceptance.losses");
  const double inf = std::numeric_limits<double>::infinity();
  std::size_t kl_bad = 0, sq_bad = 0;
  for (int k = 0; k < 10000; ++k) {
    const double beta = std::exp(std::log(1e-3) + rng.uniform() * std::log(1e4));
    const TripleLogProbs t = random_triple(rng, 10.0);
    const LossValue d = dpo_loss(t, beta), f = fdpo_loss(t, Generator::kl(), beta);
    if (!(same(d.value, f.value) && same(d.grad_w, f.grad_w) && same(d.grad_l, f.grad_l))) ++kl_bad;
    const LossValue s = squaredpo_loss(t, beta, inf), g = fdpo_loss(t, Generator::squared_po(), beta);
    if (!(same(s.value, g.value) && same(s.grad_w, g.grad_w) && same(s.grad_l, g.grad_l))) ++sq_bad;
  }

  struct Named {
    std::string id;
    bool near_clip;
  };
  std::vector<Named> losses = {{"dpo", false}, {"squaredpo", false}, {"squaredpo", true}};
  for (const auto& gen : catalog()) losses.push_back({"fdpo:" + gen.id(), false});

  std::size_t fd_bad = 0, skipped = 0;
  std::string first;
  for (const auto& named : losses) {
    for (int k = 0; k < 1000; ++k) {
      const Loss loss = Loss::from_id(named.id, 0.05 + 0.95 * rng.uniform());
      TripleLogProbs t = random_triple(rng, 5.0);
      if (named.near_clip) {
        t.lp_theta_w = t.lp_ref_w - (45.0 + 10.0 * rng.uniform());
        t.lp_theta_l = t.lp_ref_l - (45.0 + 10.0 * rng.uniform());
      }
      auto along = [&](int which) {
        return [&, which](double x) {
          TripleLogProbs u = t;
          (which == 0 ? u.lp_theta_w : u.lp_theta_l) = x;
          return loss(u).value;
        };
      };
      if (near_kink(along(0), t.lp_theta_w) || near_kink(along(1), t.lp_theta_l)) {
        ++skipped;
        continue;
      }
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
      if (!(fd_agrees(lv.grad_w, fd[0], lv.value) && fd_agrees(lv.grad_l, fd[1], lv.value))) {
        ++fd_bad;
        if (first.empty()) first = ", first failure " + named.id;
      }
    }
  }
  const bool pass = kl_bad == 0 && sq_bad == 0 && fd_bad == 0;
  return {pass, "fdpo:kl vs dpo " + std::to_string(kl_bad) + "/10000 differ, fdpo:squaredpo vs squaredpo " +
                    std::to_string(sq_bad) + "/10000 differ (tol 1e-12); finite differences " + std::to_string(fd_bad) +
                    "/" + std::to_string(1000 * losses.size() - skipped) + " disagree, " + std::to_string(skipped) +
                    " points at the clip kink skipped" + first};
}

// --- 8 -------------------------------------------------------------------

Outcome clipping() {
  bool ok = true;
  std::string detail;
  for (double beta : {0.01, 0.1, 1.0}) {
    const double lp_theta = -70.0, lp_ref = -10.0;  // lp_ref - lp_theta = 60 exactly
    const double coef = squaredpo_coefficient(beta, lp_theta, lp_ref);
    const double expected = beta * std::exp(50.0);
    ok = ok && coef == expected;
    // Past the threshold the coefficient is a constant, so the winner's
    // slope is the coefficient itself scaled by the sigmoid weight.
    const LossValue lv = squaredpo_loss({lp_theta, lp_ref, -1.0, -1.0}, beta);
    const double weight = sigmoid(expected * 60.0);
    ok = ok && std::abs(lv.grad_w + weight * expected) <= 1e-15 * expected;
    detail += "beta " + fmt(beta) + ": " + fmt(coef) + (coef == expected ? " == " : " != ") + fmt(expected) + "; ";
  }
  return {ok, detail};
}

// --- 9 -------------------------------------------------------------------

struct PairedRuns {
  std::vector<json> dpo, squaredpo;
  double seconds = 0.0;
};

const PairedRuns& paired_runs() {
  static const PairedRuns runs = [] {
    PairedRuns r;
    const auto start = std::chrono::steady_clock::now();
    const cli::TrainExperiment e;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      r.dpo.push_back(cli::train_run(e, "dpo", seed).report);
      r.squaredpo.push_back(cli::train_run(e, "squaredpo", seed).report);
    }
    r.seconds = seconds_since(start);
    return r;
  }();
  return runs;
}

Outcome final_epoch_means() {
  const auto& runs = paired_runs();
  std::size_t wins = 0;
  std::string pairs;
  for (std::size_t i = 0; i < runs.dpo.size(); ++i) {
    const double d = runs.dpo[i]["mean_per_epoch"].back().get<double>();
    const double s = runs.squaredpo[i]["mean_per_epoch"].back().get<double>();
    wins += s > d ? 1 : 0;
    pairs += " (" + fmt(std::round(d * 1e3) / 1e3) + ", " + fmt(std::round(s * 1e3) / 1e3) + ")";
  }
  const bool pass = wins >= 9 && runs.seconds < 600.0;
  return {pass, "squaredpo final mean log-ratio above dpo in " + std::to_string(wins) +
                    "/10 seeds (need 9); (dpo, squaredpo):" + pairs + "; " + fmt(runs.seconds) + " s for 20 runs"};
}

Outcome monotone_fractions() {
  const auto& runs = paired_runs();
  std::size_t wins = 0;
  std::string pairs;
  auto last_fraction = [](const json& rep) -> std::optional<double> {
    const auto& m = rep["monotone_fractions"];
    if (!m.is_array() || m.empty() || m.back()["fraction"].is_null()) return std::nullopt;
    return m.back()["fraction"].get<double>();
  };
  for (std::size_t i = 0; i < runs.dpo.size(); ++i) {
    const auto d = last_fraction(runs.dpo[i]), s = last_fraction(runs.squaredpo[i]);
    if (d && s && *d > *s) ++wins;
    pairs += " (" + (d ? fmt(std::round(*d * 1e3) / 1e3) : "none") + ", " + (s ? fmt(std::round(*s * 1e3) / 1e3) : "none") + ")";
  }
  const bool pass = wins >= 9 && runs.seconds < 600.0;
  return {pass, "dpo monotone-decrease fraction above squaredpo in " + std::to_string(wins) +
                    "/10 seeds (need 9); (dpo, squaredpo):" + pairs};
}

// --- 10 ------------------------------------------------------------------

struct Captured {
  int status = -1;
  std::string out;
};

Captured capture(const std::string& command) {
  Captured c;
  FILE* pipe = ::popen((command + " 2>/dev/null").c_str(), "r");
  if (pipe == nullptr) return c;
  char buf[4096];
  for (std::size_t got; (got = std::fread(buf, 1, sizeof buf, pipe)) > 0;) c.out.append(buf, got);
  c.status = ::pclose(pipe);
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::string tree_contents(const fs::path& root) {
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::string all;
  for (const auto& f : files) all += fs::relative(f, root).string() + "\n" + slurp(f);
  return all;
}

Outcome determinism() {
  const std::string tool = FDPO_TOOL_PATH;
  const fs::path work = fs::temp_directory_path() / "fdpo_acceptance_determinism";
  fs::remove_all(work);
  fs::create_directories(work);
  {
    std::ofstream(work / "instance.json")
        << R"({"n":4,"r":[0.3,1.2,-0.4,1.2],"q":[0.1,0.2,0.3,0.4],"beta":0.5,"s_set":[0,2],"generator":"squaredpo","mode":"partial"})";
  }
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"classify", "classify --all"},
      {"classify-alpha", "classify --gen chipo --gen alpha:0.3"},
      {"solve", "--seed 4 solve --instance " + (work / "instance.json").string()},
      {"train", "--seed 9 --out-dir {dir} train --loss dpo --loss squaredpo --epochs 3 --steps-per-epoch 40"},
      {"verify", "--seed 2 verify --suite taxonomy"},
  };
  std::size_t differing = 0;
  std::string names;
  for (const auto& [name, args] : commands) {
    std::string outputs[2];
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path dir = work / (name + "_" + std::to_string(rep));
      fs::create_directories(dir);
      std::string a = args;
      if (const auto at = a.find("{dir}"); at != std::string::npos) a.replace(at, 5, dir.string());
      // The summary lines name the output directory; compare the files and
      // the exit status instead of that path.
      const Captured c = capture(tool + " " + a);
      outputs[rep] = std::to_string(c.status) + "\n" + (a == args ? c.out : "") + tree_contents(dir);
    }
    if (outputs[0] != outputs[1]) {
      ++differing;
      names += " " + name;
    }
  }
  fs::remove_all(work);
  return {differing == 0, std::to_string(commands.size() - differing) + "/" + std::to_string(commands.size()) +
                              " commands byte-identical across repeats" + (names.empty() ? "" : ", differing:" + names)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app("Acceptance checks");
  std::vector<std::string> only;
  app.add_option("--only", only, "Criterion id to run (repeatable)");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria = {
      {"1", taxonomy},        {"2", argmin_constants},       {"3", closed_form_and_grid},
      {"4", partial_case_split}, {"5", displacement_bound}, {"6", gap_equivalence},
      {"7", loss_identities}, {"8", clipping},               {"9a", final_epoch_means},
      {"9b", monotone_fractions}, {"10", determinism},
  };
  for (const auto& id : only)
    if (std::none_of(criteria.begin(), criteria.end(), [&](const Criterion& c) { return c.id == id; })) {
      std::cerr << "unknown criterion " << id << "\n";
      return 2;
    }

  std::size_t failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << c.id << ": " << o.detail << " [" << fmt(seconds_since(start))
              << " s]" << std::endl;
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
