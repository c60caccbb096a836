#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fdpo/generators.hpp"
#include "fdpo/simplex.hpp"
#include "fdpo/trainer.hpp"

namespace fdpo::cli {

/// Entry point of the `fdpo` tool. Returns the process exit code:
/// 0 success, 1 validation error, 2 numerical failure.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

struct SolveRequest {
  SimplexInstance instance;
  Generator generator;
  ObjectiveKind mode;
};

/// Parses {n, r, q, beta, s_set, generator, mode}; unknown fields are
/// rejected.
SolveRequest parse_solve_request(const nlohmann::json& j);

struct TrainExperiment {
  WorldConfig world;
  std::size_t pairs_per_prompt = 4;
  TrainConfig train;
  /// Losses to run side by side; one entry means a single run.
  std::vector<std::string> losses{"dpo"};
};

/// Parses {world:{...}, sampling:{...}, loss:{...}, optimizer:{...}};
/// every section and field is optional, unknown ones are rejected.
TrainExperiment parse_train_experiment(const nlohmann::json& j);
nlohmann::json to_json(const TrainExperiment& e);

nlohmann::json solve(const SolveRequest& req, std::uint64_t seed);
std::string classify_csv(const std::vector<Generator>& gens);

struct RunFiles {
  nlohmann::json report;
  nlohmann::json checkpoints;
  std::string trajectories_csv;
  bool aborted = false;
};

/// One training run with its three output documents.
RunFiles train_run(const TrainExperiment& e, const std::string& loss_id, std::uint64_t seed);

struct CheckResult {
  std::string suite;
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Oracle cross-checks: "gradients", "taxonomy", "argmin", "solver" or
/// "all". `n` is the alphabet size for the solver suite.
std::vector<CheckResult> run_verify(const std::string& suite, std::size_t n, std::uint64_t seed);

/// Expected (convex, inducing, resistant) membership of each catalog id.
struct TaxonomyExpectation {
  std::string id;
  bool convex;
  bool inducing;
  bool resistant;
};
std::vector<TaxonomyExpectation> expected_taxonomy();

/// Shortest round-trip decimal form.
std::string format_number(double x);

}  // namespace fdpo::cli
