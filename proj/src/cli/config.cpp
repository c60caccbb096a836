#include <charconv>
#include <cmath>
#include <set>

#include "fdpo/cli.hpp"
#include "fdpo/error.hpp"

namespace fdpo::cli {
namespace {

using nlohmann::json;

void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw ValidationError(where + " must be a JSON object");
}

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [key, value] : j.items())
    if (!known.contains(key)) throw ValidationError("unknown field '" + key + "' in " + where);
}

double number(const json& j, const std::string& key) {
  if (!j.is_number()) throw ValidationError("field '" + key + "' must be a number");
  return j.get<double>();
}

std::size_t count(const json& j, const std::string& key) {
  if (!j.is_number_unsigned()) throw ValidationError("field '" + key + "' must be a non-negative integer");
  return j.get<std::size_t>();
}

std::vector<double> number_array(const json& j, const std::string& key) {
  if (!j.is_array()) throw ValidationError("field '" + key + "' must be an array");
  std::vector<double> out;
  for (const auto& v : j) out.push_back(number(v, key));
  return out;
}

template <class T>
void read_opt(const json& j, const std::string& key, T& dst, T (*conv)(const json&, const std::string&)) {
  if (j.contains(key)) dst = conv(j.at(key), key);
}

bool boolean(const json& j, const std::string& key) {
  if (!j.is_boolean()) throw ValidationError("field '" + key + "' must be a boolean");
  return j.get<bool>();
}

std::string string(const json& j, const std::string& key) {
  if (!j.is_string()) throw ValidationError("field '" + key + "' must be a string");
  return j.get<std::string>();
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

SolveRequest parse_solve_request(const json& j) {
  require_object(j, "solve instance");
  reject_unknown(j, {"n", "r", "q", "beta", "s_set", "generator", "mode"}, "solve instance");
  for (const char* key : {"n", "r", "q", "beta", "s_set", "generator"})
    if (!j.contains(key)) throw ValidationError(std::string("missing field '") + key + "' in solve instance");

  const std::size_t n = count(j.at("n"), "n");
  auto r = number_array(j.at("r"), "r");
  auto q = number_array(j.at("q"), "q");
  if (r.size() != n || q.size() != n) throw ValidationError("r and q must have n entries");
  const json& s = j.at("s_set");
  if (!s.is_array()) throw ValidationError("field 's_set' must be an array");
  std::vector<std::size_t> s_set;
  for (const auto& v : s) s_set.push_back(count(v, "s_set"));

  ObjectiveKind mode = ObjectiveKind::kFull;
  if (j.contains("mode")) {
    const std::string m = string(j.at("mode"), "mode");
    if (m == "partial") mode = ObjectiveKind::kPartial;
    else if (m != "full") throw ValidationError("mode must be \"full\" or \"partial\"");
  }
  return {SimplexInstance(std::move(r), Distribution(std::move(q)), number(j.at("beta"), "beta"), std::move(s_set)),
          Generator::from_id(string(j.at("generator"), "generator")), mode};
}

TrainExperiment parse_train_experiment(const json& j) {
  TrainExperiment e;
  require_object(j, "train config");
  reject_unknown(j, {"world", "sampling", "loss", "optimizer"}, "train config");

  if (j.contains("world")) {
    const json& w = j.at("world");
    require_object(w, "world");
    reject_unknown(w, {"num_prompts", "vocab_size", "reward_scale", "ref_logit_scale"}, "world");
    read_opt(w, "num_prompts", e.world.num_prompts, count);
    read_opt(w, "vocab_size", e.world.vocab_size, count);
    read_opt(w, "reward_scale", e.world.reward_scale, number);
    read_opt(w, "ref_logit_scale", e.world.ref_logit_scale, number);
  }
  if (j.contains("sampling")) {
    const json& s = j.at("sampling");
    require_object(s, "sampling");
    reject_unknown(s, {"pairs_per_prompt"}, "sampling");
    read_opt(s, "pairs_per_prompt", e.pairs_per_prompt, count);
  }
  if (j.contains("loss")) {
    const json& l = j.at("loss");
    require_object(l, "loss");
    reject_unknown(l, {"id", "ids", "beta", "clip", "detach_coefficient"}, "loss");
    if (l.contains("id") && l.contains("ids")) throw ValidationError("loss: give either 'id' or 'ids'");
    if (l.contains("id")) e.losses = {string(l.at("id"), "id")};
    if (l.contains("ids")) {
      if (!l.at("ids").is_array() || l.at("ids").empty()) throw ValidationError("loss.ids must be a non-empty array");
      e.losses.clear();
      for (const auto& v : l.at("ids")) e.losses.push_back(string(v, "ids"));
    }
    read_opt(l, "beta", e.train.beta, number);
    read_opt(l, "clip", e.train.clip, number);
    read_opt(l, "detach_coefficient", e.train.detach_coefficient, boolean);
  }
  if (j.contains("optimizer")) {
    const json& o = j.at("optimizer");
    require_object(o, "optimizer");
    reject_unknown(o, {"lr", "epochs", "steps_per_epoch", "reduction"}, "optimizer");
    read_opt(o, "lr", e.train.lr, number);
    read_opt(o, "epochs", e.train.epochs, count);
    read_opt(o, "steps_per_epoch", e.train.steps_per_epoch, count);
    if (o.contains("reduction")) {
      const std::string red = string(o.at("reduction"), "reduction");
      if (red == "sum") e.train.reduction = Reduction::kSum;
      else if (red == "mean") e.train.reduction = Reduction::kMean;
      else throw ValidationError("reduction must be \"sum\" or \"mean\"");
    }
  }
  // Surface bad loss ids before any work is done.
  for (const auto& id : e.losses) Loss::from_id(id, e.train.beta, e.train.clip, e.train.detach_coefficient);
  return e;
}

json to_json(const TrainExperiment& e) {
  return {
      {"world",
       {{"num_prompts", e.world.num_prompts},
        {"vocab_size", e.world.vocab_size},
        {"reward_scale", e.world.reward_scale},
        {"ref_logit_scale", e.world.ref_logit_scale}}},
      {"sampling", {{"pairs_per_prompt", e.pairs_per_prompt}}},
      {"loss",
       {{"ids", e.losses},
        {"beta", e.train.beta},
        {"clip", e.train.clip},
        {"detach_coefficient", e.train.detach_coefficient}}},
      {"optimizer",
       {{"lr", e.train.lr},
        {"epochs", e.train.epochs},
        {"steps_per_epoch", e.train.steps_per_epoch},
        {"reduction", e.train.reduction == Reduction::kSum ? "sum" : "mean"}}},
  };
}

}  // namespace fdpo::cli
