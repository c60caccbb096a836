#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fdpo/kernels.hpp"
#include "fdpo/losses.hpp"

namespace fdpo {

struct WorldConfig {
  std::size_t num_prompts = 200;
  std::size_t vocab_size = 16;
  double reward_scale = 1.0;
  double ref_logit_scale = 1.0;
};

/// Latent rewards and reference logits, both num_prompts x vocab_size,
/// row-major.
struct SyntheticWorld {
  std::size_t num_prompts = 0;
  std::size_t vocab_size = 0;
  std::vector<double> true_reward;
  std::vector<double> ref_logits;
  std::uint64_t seed = 0;

  double reward(std::size_t prompt, std::size_t response) const { return true_reward[prompt * vocab_size + response]; }
  std::vector<double> ref_log_probs() const;
};

SyntheticWorld generate_world(const WorldConfig& config, std::uint64_t seed);

/// pairs_per_prompt unordered pairs per prompt, each labelled by a
/// Bradley-Terry draw on the latent rewards.
std::vector<PreferenceTriple> sample_preferences(const SyntheticWorld& world, std::size_t pairs_per_prompt,
                                                 std::uint64_t seed);

struct TabularPolicy {
  std::size_t num_prompts = 0;
  std::size_t vocab_size = 0;
  std::vector<double> logits;
  std::string epoch_tag;

  std::vector<double> log_probs() const;
};

enum class Reduction { kSum, kMean };

struct TrainConfig {
  std::string loss_id = "dpo";
  double beta = 0.01;
  double lr = 0.5;
  std::size_t epochs = 4;
  std::size_t steps_per_epoch = 100;
  Reduction reduction = Reduction::kSum;
  double clip = kDefaultClip;
  bool detach_coefficient = false;
  /// OpenMP kernels when true, the serial reference otherwise. Results are
  /// identical either way.
  bool parallel = true;
};

struct TrainResult {
  /// Reference first, then one per completed epoch.
  std::vector<TabularPolicy> checkpoints;
  /// Total loss over the triples at the end of each completed epoch.
  std::vector<double> epoch_loss;
  bool aborted = false;
  std::string abort_reason;
};

/// Full-batch gradient descent on the logits, starting from the reference.
/// A non-finite loss or logit stops training; checkpoints up to the last
/// finished epoch are kept.
TrainResult train(const SyntheticWorld& world, std::span<const PreferenceTriple> triples, const TrainConfig& config);

std::vector<double> chosen_log_ratios(const TabularPolicy& policy, const SyntheticWorld& world,
                                      std::span<const PreferenceTriple> triples);

/// SquaredPO coefficient of every winner under `policy`.
std::vector<double> winner_effective_betas(const TabularPolicy& policy, const SyntheticWorld& world,
                                           std::span<const PreferenceTriple> triples, double beta,
                                           double clip = kDefaultClip);

inline constexpr double kDecreaseTolerance = 1e-12;

struct MonotoneFraction {
  std::size_t through_epoch = 0;
  std::size_t count = 0;
  std::size_t denominator = 0;
  /// Absent when no winner decreased in the first epoch.
  std::optional<double> fraction;
};

struct DisplacementReport {
  /// [triple][epoch], epoch 0 being the reference (all zeros).
  std::vector<std::vector<double>> per_winner_logratio;
  std::vector<double> mean_per_epoch;
  std::vector<double> median_per_epoch;
  std::vector<double> min_per_epoch;
  std::vector<double> max_per_epoch;
  /// Winners whose log-ratio fell in epoch 1.
  std::size_t decreased_first_epoch = 0;
  /// Horizons 2..epochs; empty with fewer than two epochs.
  std::vector<MonotoneFraction> monotone_fractions;
};

DisplacementReport displacement_report(std::span<const TabularPolicy> checkpoints, const SyntheticWorld& world,
                                       std::span<const PreferenceTriple> triples);

}  // namespace fdpo
