#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "fdpo/classifier.hpp"
#include "fdpo/cli.hpp"
#include "fdpo/error.hpp"
#include "fdpo/rng.hpp"

namespace fdpo::cli {
namespace {

using nlohmann::json;

// JSON has no infinities; they are written as strings.
json num(double x) {
  if (std::isfinite(x)) return x;
  return format_number(x);
}

json num_array(std::span<const double> v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("invalid JSON in '" + path.string() + "': " + e.what());
  }
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + path.string() + "'");
  out << text;
}

void configure_logging() {
  auto level = spdlog::level::warn;
  if (const char* env = std::getenv("FDPO_LOG")) level = spdlog::level::from_str(env);
  if (!spdlog::get("fdpo")) {
    auto logger = spdlog::stderr_color_mt("fdpo");
    spdlog::set_default_logger(logger);
  }
  spdlog::set_level(level);
}

std::string dir_name(const std::string& loss_id) {
  std::string out = loss_id;
  for (char& c : out)
    if (c == ':' || c == '/') c = '_';
  return out;
}

std::vector<std::string> deviations(const TrainExperiment& e) {
  std::vector<std::string> d = {
      "plain full-batch gradient descent on tabular logits instead of an adaptive-moment optimizer",
      "toy learning rate " + format_number(e.train.lr) + " instead of 5e-7",
      std::string("loss reduction '") + (e.train.reduction == Reduction::kSum ? "sum" : "mean") +
          "' over triples, " + std::to_string(e.train.steps_per_epoch) + " gradient steps per epoch",
      "synthetic Bradley-Terry world with " + std::to_string(e.world.num_prompts) + " prompts and " +
          std::to_string(e.world.vocab_size) + " responses per prompt",
  };
  if (e.world.vocab_size == 2) d.push_back("vocab_size = 2: no out-of-sample response, displacement-free by construction");
  return d;
}

}  // namespace

std::string classify_csv(const std::vector<Generator>& gens) {
  std::string out = "id,convex,inducing,resistant,argmin_location\n";
  auto b = [](bool v) { return v ? "true" : "false"; };
  for (const auto& gen : gens) {
    const TaxonomyRow row = classify(gen);
    out += row.id + "," + b(row.convex) + "," + b(row.inducing) + "," + b(row.resistant) + "," +
           format_number(row.argmin_location) + "\n";
  }
  return out;
}

json solve(const SolveRequest& req, std::uint64_t seed) {
  const auto& inst = req.instance;
  const auto& gen = req.generator;
  SolveOptions opts;
  opts.seed = seed;

  json out;
  out["generator"] = gen.id();
  out["mode"] = req.mode == ObjectiveKind::kFull ? "full" : "partial";
  std::vector<double> p;
  if (req.mode == ObjectiveKind::kFull) {
    const SolveResult res = solve_full(inst, gen, opts);
    p = res.p;
    out["converged"] = res.converged;
  } else if (gen.convex() && gen.has_prime_inverse() && is_dpo_inducing(gen).verdict == Verdict::kInducing) {
    const PartialOptimalSet set = solve_partial_convex(inst, gen);
    p = set.canonical;
    out["case"] = std::string(to_string(set.kase));
    out["mu"] = set.mu ? num(*set.mu) : json(nullptr);
    out["free_indices"] = set.free_indices;
    out["converged"] = true;
  } else {
    const SolveResult res = solve_partial_numeric(inst, gen, opts);
    p = res.p;
    out["converged"] = res.converged;
  }
  out["p"] = num_array(p);
  out["objective"] = num(objective(inst, gen, p, req.mode));
  out["kkt_ok"] = verify_kkt_equal_partials(inst, gen, p, req.mode);

  const BoundCheck bound = check_displacement_bound(inst, gen, p);
  out["bound_status"] = std::string(to_string(bound.status));
  if (req.mode == ObjectiveKind::kPartial &&
      (bound.status == BoundStatus::kHolds || bound.status == BoundStatus::kViolated))
    out["bound_ok"] = bound.status == BoundStatus::kHolds;
  else
    out["bound_ok"] = nullptr;
  out["argmin_c"] = num(bound.c);

  json gaps = json::array();
  const auto s = inst.s_set();
  for (std::size_t a = 0; a < s.size(); ++a)
    for (std::size_t b = a + 1; b < s.size(); ++b) {
      const std::size_t w = s[a], l = s[b];
      json g = {{"winner", w}, {"loser", l}};
      if (p[w] > 0.0 && p[l] > 0.0)
        g["gap"] = num(implied_reward_gap(gen, inst.beta(), p[w] / inst.q()[w], p[l] / inst.q()[l]));
      else
        g["gap"] = nullptr;
      gaps.push_back(g);
    }
  out["implied_gaps"] = gaps;
  return out;
}

RunFiles train_run(const TrainExperiment& e, const std::string& loss_id, std::uint64_t seed) {
  const CounterRng root(seed);
  const std::uint64_t world_seed = root.split("world").key();
  const std::uint64_t sampling_seed = root.split("sampling").key();

  const SyntheticWorld world = generate_world(e.world, world_seed);
  const auto triples = sample_preferences(world, e.pairs_per_prompt, sampling_seed);
  TrainConfig cfg = e.train;
  cfg.loss_id = loss_id;
  const TrainResult tr = train(world, triples, cfg);

  RunFiles files;
  files.aborted = tr.aborted;

  json cps = json::array();
  for (const auto& cp : tr.checkpoints) cps.push_back({{"epoch_tag", cp.epoch_tag}, {"logits", num_array(cp.logits)}});
  files.checkpoints = {{"num_prompts", world.num_prompts}, {"vocab_size", world.vocab_size}, {"checkpoints", cps}};

  json& rep = files.report;
  rep["loss"] = loss_id;
  rep["seed"] = seed;
  rep["config"] = to_json(e);
  rep["deviations"] = deviations(e);
  rep["num_triples"] = triples.size();
  rep["epochs_completed"] = tr.checkpoints.size() - 1;
  rep["aborted"] = tr.aborted;
  if (tr.aborted) rep["abort_reason"] = tr.abort_reason;
  rep["epoch_loss"] = num_array(tr.epoch_loss);

  std::string csv = "triple_id,epoch,logratio\n";
  if (tr.checkpoints.size() >= 2) {
    const DisplacementReport dr = displacement_report(tr.checkpoints, world, triples);
    rep["mean_per_epoch"] = num_array(dr.mean_per_epoch);
    rep["median_per_epoch"] = num_array(dr.median_per_epoch);
    rep["min_per_epoch"] = num_array(dr.min_per_epoch);
    rep["max_per_epoch"] = num_array(dr.max_per_epoch);
    rep["min_logratio"] = num(dr.min_per_epoch.back());
    rep["max_logratio"] = num(dr.max_per_epoch.back());
    rep["decreased_first_epoch"] = dr.decreased_first_epoch;
    if (dr.monotone_fractions.empty()) {
      rep["monotone_fractions"] = nullptr;
    } else {
      json mf = json::array();
      for (const auto& m : dr.monotone_fractions)
        mf.push_back({{"through_epoch", m.through_epoch},
                      {"count", m.count},
                      {"denominator", m.denominator},
                      {"fraction", m.fraction ? json(*m.fraction) : json(nullptr)}});
      rep["monotone_fractions"] = mf;
    }
    for (std::size_t i = 0; i < dr.per_winner_logratio.size(); ++i)
      for (std::size_t ep = 0; ep < dr.per_winner_logratio[i].size(); ++ep)
        csv += std::to_string(i) + "," + std::to_string(ep) + "," + format_number(dr.per_winner_logratio[i][ep]) + "\n";
  } else {
    rep["monotone_fractions"] = nullptr;
  }
  if (Loss::from_id(loss_id, cfg.beta, cfg.clip).is_squaredpo()) {
    json betas = json::array();
    for (const auto& cp : tr.checkpoints) {
      const auto b = winner_effective_betas(cp, world, triples, cfg.beta, cfg.clip);
      double sum = 0.0;
      for (double v : b) sum += v;
      betas.push_back(num(b.empty() ? 0.0 : sum / static_cast<double>(b.size())));
    }
    rep["winner_effective_beta_mean_per_epoch"] = betas;
  }
  files.trajectories_csv = std::move(csv);
  return files;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"f-divergence preference optimization laboratory", "fdpo"};
  app.require_subcommand(1);
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  std::string config_path;
  app.add_option("--seed", seed, "Seed for every random stream")->capture_default_str();
  app.add_option("--out-dir", out_dir, "Directory for output files")->capture_default_str();
  app.add_option("--config", config_path, "JSON config or instance file");

  auto* classify_cmd = app.add_subcommand("classify", "Print the generator taxonomy as CSV");
  bool classify_all = false;
  std::vector<std::string> gen_ids;
  double alpha = 0.5;
  classify_cmd->add_flag("--all", classify_all, "Every catalog generator");
  classify_cmd->add_option("--gen", gen_ids, "Generator id (repeatable)");
  classify_cmd->add_option("--alpha", alpha, "alpha for the catalog alpha-divergence")->capture_default_str();

  auto* solve_cmd = app.add_subcommand("solve", "Solve one simplex instance, JSON in and out");
  std::string instance_path;
  solve_cmd->add_option("--instance", instance_path, "Instance JSON (defaults to --config)");

  auto* train_cmd = app.add_subcommand("train", "Train tabular policies and write displacement reports");
  std::vector<std::string> losses;
  std::optional<std::size_t> epochs, steps;
  std::optional<double> lr, beta;
  train_cmd->add_option("--loss", losses, "dpo, squaredpo or fdpo:<generator>; repeat for paired runs");
  train_cmd->add_option("--epochs", epochs);
  train_cmd->add_option("--steps-per-epoch", steps);
  train_cmd->add_option("--lr", lr);
  train_cmd->add_option("--beta", beta);

  auto* verify_cmd = app.add_subcommand("verify", "Cross-check library against brute-force oracles");
  std::string suite = "all";
  std::size_t verify_n = 3;
  verify_cmd->add_option("--suite", suite)->check(CLI::IsMember({"gradients", "taxonomy", "solver", "argmin", "all"}))
      ->capture_default_str();
  verify_cmd->add_option("--n", verify_n, "Alphabet size for the solver suite")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, er;
    const int code = app.exit(e, o, er);
    out << o.str();
    err << er.str();
    return code == 0 ? 0 : 1;
  }

  configure_logging();
  try {
    if (*classify_cmd) {
      std::vector<Generator> gens;
      if (classify_all) gens = catalog(alpha);
      for (const auto& id : gen_ids) gens.push_back(Generator::from_id(id));
      if (gens.empty()) throw ValidationError("classify: give --all or at least one --gen");
      out << classify_csv(gens);
      return 0;
    }
    if (*solve_cmd) {
      const std::string path = instance_path.empty() ? config_path : instance_path;
      if (path.empty()) throw ValidationError("solve: give --instance or --config");
      const json result = solve(parse_solve_request(read_json_file(path)), seed);
      out << result.dump(2) << "\n";
      return 0;
    }
    if (*train_cmd) {
      TrainExperiment e = config_path.empty() ? TrainExperiment{} : parse_train_experiment(read_json_file(config_path));
      if (!losses.empty()) e.losses = losses;
      if (epochs) e.train.epochs = *epochs;
      if (steps) e.train.steps_per_epoch = *steps;
      if (lr) e.train.lr = *lr;
      if (beta) e.train.beta = *beta;
      for (const auto& id : e.losses) Loss::from_id(id, e.train.beta, e.train.clip);

      const std::filesystem::path root(out_dir);
      std::vector<RunFiles> results(e.losses.size());
      {
        // Independent runs side by side; each owns its state.
        std::vector<std::jthread> workers;
        std::vector<std::exception_ptr> errors(e.losses.size());
        for (std::size_t i = 0; i < e.losses.size(); ++i)
          workers.emplace_back([&, i] {
            try {
              results[i] = train_run(e, e.losses[i], seed);
            } catch (...) {
              errors[i] = std::current_exception();
            }
          });
        workers.clear();
        for (auto& ep : errors)
          if (ep) std::rethrow_exception(ep);
      }
      bool aborted = false;
      for (std::size_t i = 0; i < e.losses.size(); ++i) {
        const auto dir = e.losses.size() == 1 ? root : root / dir_name(e.losses[i]);
        std::filesystem::create_directories(dir);
        write_file(dir / "checkpoints.json", results[i].checkpoints.dump() + "\n");
        write_file(dir / "trajectories.csv", results[i].trajectories_csv);
        write_file(dir / "report.json", results[i].report.dump(2) + "\n");
        aborted = aborted || results[i].aborted;

        const json& rep = results[i].report;
        out << "loss " << e.losses[i] << " -> " << dir.string() << "\n";
        if (rep.contains("mean_per_epoch"))
          for (std::size_t ep = 0; ep < rep["mean_per_epoch"].size(); ++ep)
            out << "  epoch " << ep << " mean " << format_number(rep["mean_per_epoch"][ep].get<double>())
                << " median " << format_number(rep["median_per_epoch"][ep].get<double>()) << "\n";
        if (rep["monotone_fractions"].is_array())
          for (const auto& m : rep["monotone_fractions"])
            out << "  monotone through epoch " << m["through_epoch"].get<std::size_t>() << ": "
                << m["count"].get<std::size_t>() << "/" << m["denominator"].get<std::size_t>() << "\n";
      }
      if (aborted) throw NumericalError("training diverged; partial outputs written");
      return 0;
    }
    if (*verify_cmd) {
      const auto checks = run_verify(suite, verify_n, seed);
      std::size_t failed = 0;
      for (const auto& c : checks) {
        out << (c.passed ? "PASS " : "FAIL ") << c.suite << "/" << c.name;
        if (!c.detail.empty()) out << "  " << c.detail;
        out << "\n";
        failed += c.passed ? 0 : 1;
      }
      out << (failed == 0 ? "all checks passed" : std::to_string(failed) + " check(s) failed") << "\n";
      return failed == 0 ? 0 : 2;
    }
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace fdpo::cli
