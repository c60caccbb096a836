#include "fdpo/trainer.hpp"

#include <algorithm>
#include <cmath>

#include <spdlog/spdlog.h>

#include "fdpo/error.hpp"
#include "fdpo/rng.hpp"

namespace fdpo {
namespace {

std::vector<double> log_softmax(std::span<const double> logits, std::size_t cols) {
  std::vector<double> out(logits.size());
  kernels::omp::log_softmax_rows(logits, cols, out);
  return out;
}

double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + mid);
  return 0.5 * (lower + upper);
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

std::vector<double> SyntheticWorld::ref_log_probs() const { return log_softmax(ref_logits, vocab_size); }

std::vector<double> TabularPolicy::log_probs() const { return log_softmax(logits, vocab_size); }

SyntheticWorld generate_world(const WorldConfig& config, std::uint64_t seed) {
  if (config.num_prompts < 1) throw ValidationError("num_prompts must be at least 1");
  if (config.vocab_size < 2) throw ValidationError("vocab_size must be at least 2");
  if (!std::isfinite(config.reward_scale) || config.reward_scale < 0.0)
    throw ValidationError("reward_scale must be finite and non-negative");
  if (!std::isfinite(config.ref_logit_scale) || config.ref_logit_scale < 0.0)
    throw ValidationError("ref_logit_scale must be finite and non-negative");
  if (config.vocab_size == 2) spdlog::warn("vocab_size = 2 leaves no out-of-sample response: no displacement possible");

  SyntheticWorld world{config.num_prompts, config.vocab_size, {}, {}, seed};
  const std::size_t cells = config.num_prompts * config.vocab_size;
  CounterRng root(seed);
  CounterRng rewards = root.split("world.reward");
  CounterRng ref = root.split("world.ref_logits");
  world.true_reward.resize(cells);
  world.ref_logits.resize(cells);
  for (double& v : world.true_reward) v = config.reward_scale * rewards.normal();
  for (double& v : world.ref_logits) v = config.ref_logit_scale * ref.normal();
  return world;
}

std::vector<PreferenceTriple> sample_preferences(const SyntheticWorld& world, std::size_t pairs_per_prompt,
                                                 std::uint64_t seed) {
  if (pairs_per_prompt < 1) throw ValidationError("pairs_per_prompt must be at least 1");
  if (world.vocab_size < 2) throw ValidationError("vocab_size must be at least 2");
  CounterRng rng = CounterRng(seed).split("preferences");
  std::vector<PreferenceTriple> triples;
  triples.reserve(world.num_prompts * pairs_per_prompt);
  for (std::size_t x = 0; x < world.num_prompts; ++x) {
    for (std::size_t k = 0; k < pairs_per_prompt; ++k) {
      const std::size_t a = rng.below(world.vocab_size);
      std::size_t b = rng.below(world.vocab_size - 1);
      if (b >= a) ++b;
      const double p_a = sigmoid(world.reward(x, a) - world.reward(x, b));
      if (rng.uniform() < p_a) triples.push_back({x, a, b});
      else triples.push_back({x, b, a});
    }
  }
  return triples;
}

TrainResult train(const SyntheticWorld& world, std::span<const PreferenceTriple> triples, const TrainConfig& config) {
  if (!(config.lr >= 0.0) || !std::isfinite(config.lr)) throw ValidationError("lr must be finite and non-negative");
  if (config.epochs < 1) throw ValidationError("epochs must be at least 1");
  if (config.steps_per_epoch < 1) throw ValidationError("steps_per_epoch must be at least 1");
  const std::size_t cols = world.vocab_size;
  for (const auto& t : triples) {
    if (t.prompt >= world.num_prompts || t.winner >= cols || t.loser >= cols)
      throw ValidationError("triple index out of range");
    if (t.winner == t.loser) throw ValidationError("triple winner equals loser");
  }
  const Loss loss = Loss::from_id(config.loss_id, config.beta, config.clip, config.detach_coefficient);

  const auto log_softmax_rows = config.parallel ? kernels::omp::log_softmax_rows : kernels::serial::log_softmax_rows;
  const auto triple_losses = config.parallel ? kernels::omp::triple_losses : kernels::serial::triple_losses;
  const auto softmax_backward = config.parallel ? kernels::omp::softmax_backward : kernels::serial::softmax_backward;

  const std::size_t cells = world.num_prompts * cols;
  std::vector<double> ref_logp(cells);
  log_softmax_rows(world.ref_logits, cols, ref_logp);

  TrainResult result;
  std::vector<double> logits = world.ref_logits;
  result.checkpoints.push_back({world.num_prompts, cols, logits, "ref"});

  const double scale =
      config.reduction == Reduction::kMean && !triples.empty() ? 1.0 / static_cast<double>(triples.size()) : 1.0;
  std::vector<double> logp(cells), grad_logp(cells), grad_logits(cells);
  std::vector<LossValue> values(triples.size());

  auto total_loss = [&](std::span<const LossValue> v) {
    double s = 0.0;
    for (const auto& lv : v) s += lv.value;
    return s;
  };

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    for (std::size_t step = 0; step < config.steps_per_epoch; ++step) {
      log_softmax_rows(logits, cols, logp);
      triple_losses(loss, logp, ref_logp, cols, triples, values);
      std::fill(grad_logp.begin(), grad_logp.end(), 0.0);
      kernels::scatter_triple_grads(triples, values, scale, cols, grad_logp);
      softmax_backward(logp, grad_logp, cols, grad_logits);
      if (!std::isfinite(total_loss(values)) || !all_finite(grad_logits)) {
        result.aborted = true;
        result.abort_reason = "non-finite loss or gradient in epoch " + std::to_string(epoch) + ", step " +
                              std::to_string(step);
        spdlog::error("training aborted: {}", result.abort_reason);
        return result;
      }
      for (std::size_t i = 0; i < cells; ++i) logits[i] -= config.lr * grad_logits[i];
    }
    log_softmax_rows(logits, cols, logp);
    triple_losses(loss, logp, ref_logp, cols, triples, values);
    const double epoch_loss = total_loss(values);
    if (!all_finite(logits) || !std::isfinite(epoch_loss)) {
      result.aborted = true;
      result.abort_reason = "non-finite state at the end of epoch " + std::to_string(epoch);
      spdlog::error("training aborted: {}", result.abort_reason);
      return result;
    }
    result.checkpoints.push_back({world.num_prompts, cols, logits, "epoch-" + std::to_string(epoch)});
    result.epoch_loss.push_back(epoch_loss);
    spdlog::debug("{} epoch {} loss {:.6f}", config.loss_id, epoch, epoch_loss);
  }
  return result;
}

std::vector<double> chosen_log_ratios(const TabularPolicy& policy, const SyntheticWorld& world,
                                      std::span<const PreferenceTriple> triples) {
  if (policy.num_prompts != world.num_prompts || policy.vocab_size != world.vocab_size)
    throw ValidationError("policy and world shapes differ");
  const auto logp = policy.log_probs();
  const auto ref = world.ref_log_probs();
  std::vector<double> out;
  out.reserve(triples.size());
  for (const auto& t : triples) {
    const std::size_t i = t.prompt * world.vocab_size + t.winner;
    out.push_back(logp[i] - ref[i]);
  }
  return out;
}

std::vector<double> winner_effective_betas(const TabularPolicy& policy, const SyntheticWorld& world,
                                           std::span<const PreferenceTriple> triples, double beta, double clip) {
  const auto logp = policy.log_probs();
  const auto ref = world.ref_log_probs();
  std::vector<double> out;
  out.reserve(triples.size());
  for (const auto& t : triples) {
    const std::size_t i = t.prompt * world.vocab_size + t.winner;
    out.push_back(squaredpo_coefficient(beta, logp[i], ref[i], clip));
  }
  return out;
}

DisplacementReport displacement_report(std::span<const TabularPolicy> checkpoints, const SyntheticWorld& world,
                                       std::span<const PreferenceTriple> triples) {
  if (checkpoints.size() < 2) throw ValidationError("displacement report needs at least two checkpoints");
  const std::size_t epochs = checkpoints.size() - 1;
  DisplacementReport rep;
  rep.per_winner_logratio.assign(triples.size(), std::vector<double>(checkpoints.size()));
  for (std::size_t e = 0; e < checkpoints.size(); ++e) {
    const auto ratios = chosen_log_ratios(checkpoints[e], world, triples);
    for (std::size_t i = 0; i < ratios.size(); ++i) rep.per_winner_logratio[i][e] = ratios[i];
    double sum = 0.0;
    for (double v : ratios) sum += v;
    const bool any = !ratios.empty();
    rep.mean_per_epoch.push_back(any ? sum / static_cast<double>(ratios.size()) : std::nan(""));
    rep.median_per_epoch.push_back(median(ratios));
    rep.min_per_epoch.push_back(any ? *std::min_element(ratios.begin(), ratios.end()) : std::nan(""));
    rep.max_per_epoch.push_back(any ? *std::max_element(ratios.begin(), ratios.end()) : std::nan(""));
  }

  // still[i]: winner i has decreased at every checkpoint so far.
  std::vector<char> still(triples.size(), 0);
  for (std::size_t i = 0; i < triples.size(); ++i) {
    const auto& x = rep.per_winner_logratio[i];
    still[i] = x[1] < x[0] - kDecreaseTolerance ? 1 : 0;
    rep.decreased_first_epoch += still[i];
  }
  for (std::size_t h = 2; h <= epochs; ++h) {
    MonotoneFraction mf{h, 0, rep.decreased_first_epoch, std::nullopt};
    for (std::size_t i = 0; i < triples.size(); ++i) {
      const auto& x = rep.per_winner_logratio[i];
      if (still[i] && !(x[h] < x[h - 1] - kDecreaseTolerance)) still[i] = 0;
      mf.count += still[i];
    }
    if (mf.denominator > 0) mf.fraction = static_cast<double>(mf.count) / static_cast<double>(mf.denominator);
    rep.monotone_fractions.push_back(mf);
  }
  return rep;
}

}  // namespace fdpo
