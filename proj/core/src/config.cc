// Copyright 2026 The MTR Lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mtr/config.h"

#include <yaml-cpp/yaml.h>

#include <cstdlib>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "mtr/errors.h"

namespace mtr {
namespace {

using Json = nlohmann::ordered_json;

std::string LinePrefix(const YAML::Mark& mark) {
  if (mark.is_null()) return "";
  return "line " + std::to_string(mark.line + 1) + ": ";
}

template <class T>
const char* TypeName() {
  if constexpr (std::is_same_v<T, bool>) return "a boolean";
  if constexpr (std::is_same_v<T, double>) return "a number";
  if constexpr (std::is_same_v<T, std::string>) return "a string";
  if constexpr (std::is_unsigned_v<T>) return "a non-negative integer";
  return "an integer";
}

// A YAML mapping whose keys must each be consumed exactly once by Get/Child.
// Finish() rejects whatever is left.
class Section {
 public:
  Section(YAML::Node node, std::string path)
      : node_(std::move(node)), path_(std::move(path)) {
    if (node_.IsNull()) return;
    if (!node_.IsMap()) {
      throw ConfigError(LinePrefix(node_.Mark()) + "'" + Display() +
                        "' must be a mapping");
    }
    for (const auto& kv : node_) {
      seen_.insert(kv.first.as<std::string>());
    }
  }

  const YAML::Mark Mark() const { return node_.Mark(); }
  const std::string& path() const { return path_; }

  bool Has(const std::string& key) const { return seen_.count(key) > 0; }

  template <class T>
  void Get(const std::string& key, T& out) {
    if (!Has(key)) return;
    const YAML::Node value = node_[key];
    consumed_.insert(key);
    out = Convert<T>(value, Qualified(key));
  }

  Section Child(const std::string& key) {
    consumed_.insert(key);
    if (!Has(key)) return Section(YAML::Node(), Qualified(key));
    return Section(node_[key], Qualified(key));
  }

  YAML::Node Raw(const std::string& key) {
    consumed_.insert(key);
    return Has(key) ? node_[key] : YAML::Node();
  }

  void Finish() const {
    if (node_.IsNull()) return;
    for (const auto& kv : node_) {
      const std::string key = kv.first.as<std::string>();
      if (!consumed_.count(key)) {
        throw ConfigError(LinePrefix(kv.first.Mark()) + "unknown key '" +
                          Qualified(key) + "'");
      }
    }
  }

  // Runs `validate`, prefixing any ConfigError with this section's line.
  template <class F>
  void Check(F&& validate) const {
    try {
      validate();
    } catch (const ConfigError& e) {
      throw ConfigError(LinePrefix(node_.Mark()) + e.what());
    }
  }

  template <class T>
  static T Convert(const YAML::Node& value, const std::string& name) {
    try {
      if (!value.IsScalar()) throw YAML::Exception(value.Mark(), "");
      if constexpr (std::is_unsigned_v<T> && !std::is_same_v<T, bool>) {
        if (!value.Scalar().empty() && value.Scalar()[0] == '-') {
          throw YAML::Exception(value.Mark(), "");
        }
      }
      return value.as<T>();
    } catch (const YAML::Exception&) {
      throw ConfigError(LinePrefix(value.Mark()) + "'" + name + "' must be " +
                        TypeName<T>());
    }
  }

 private:
  std::string Display() const { return path_.empty() ? "<root>" : path_; }
  std::string Qualified(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  YAML::Node node_;
  std::string path_;
  std::set<std::string> seen_;
  std::set<std::string> consumed_;
};

template <class T>
std::vector<T> ReadList(const YAML::Node& node, const std::string& name) {
  std::vector<T> out;
  if (node.IsNull()) return out;
  if (!node.IsSequence()) {
    throw ConfigError(LinePrefix(node.Mark()) + "'" + name +
                      "' must be a list");
  }
  for (const auto& item : node) {
    out.push_back(Section::Convert<T>(item, name));
  }
  return out;
}

CorruptionMode ReadCorruption(Section s) {
  std::string mode = "none";
  s.Get("mode", mode);
  CorruptionMode out;
  if (mode == "none") {
    out = NoCorruption{};
  } else if (mode == "uniform_replace") {
    UniformReplace m;
    s.Get("p", m.p);
    s.Get("lo", m.lo);
    s.Get("hi", m.hi);
    out = m;
  } else if (mode == "gaussian_noise") {
    GaussianNoise m;
    s.Get("sigma", m.sigma);
    out = m;
  } else if (mode == "early_invert") {
    EarlyInvert m;
    s.Get("frac", m.frac);
    out = m;
  } else if (mode == "state_dependent") {
    StateDependent m;
    s.Get("threshold_state", m.threshold_state);
    s.Get("p", m.p);
    s.Get("lo", m.lo);
    s.Get("hi", m.hi);
    out = m;
  } else {
    throw ConfigError(LinePrefix(s.Mark()) + "unknown corruption mode '" +
                      mode +
                      "' (expected none, uniform_replace, gaussian_noise, "
                      "early_invert or state_dependent)");
  }
  s.Finish();
  s.Check([&] { ValidateCorruption(out); });
  return out;
}

void ReadSd(Section s, SdConfig& sd) {
  s.Get("enabled", sd.enabled);
  s.Get("window", sd.window);
  s.Get("refit_interval", sd.refit_interval);
  s.Get("alpha", sd.alpha);
  std::string name(DescriptorSetName(sd.descriptors));
  s.Get("descriptors", name);
  std::string key(TrustKeyModeName(sd.key));
  s.Get("key", key);
  s.Get("reward_bin_width", sd.reward_bin_width);
  s.Get("probe_step", sd.probe_step);
  s.Get("min_drift_gap", sd.min_drift_gap);
  s.Finish();
  s.Check([&] {
    sd.descriptors = ParseDescriptorSet(name);
    sd.key = ParseTrustKeyMode(key);
    sd.Validate();
  });
}

void ReadPpo(Section s, PpoConfig& p) {
  s.Get("gamma", p.gamma);
  s.Get("gae_lambda", p.gae_lambda);
  s.Get("clip_eps", p.clip_eps);
  s.Get("epochs_per_batch", p.epochs_per_batch);
  s.Get("minibatch_size", p.minibatch_size);
  s.Get("rollout_length", p.rollout_length);
  s.Get("value_coef", p.value_coef);
  s.Get("entropy_coef", p.entropy_coef);
  s.Get("lr0", p.lr0);
  s.Get("total_steps", p.total_steps);
  s.Get("eval_interval", p.eval_interval);
  s.Finish();
  s.Check([&] { p.Validate(); });
}

void ReadSl(Section s, SlConfig& sl) {
  s.Get("dataset", sl.dataset);
  s.Get("total_steps", sl.total_steps);
  s.Get("batch_size", sl.batch_size);
  s.Get("lr", sl.lr);
  s.Get("eval_interval", sl.eval_interval);
  s.Get("regulator", sl.regulator);
  s.Get("refit_interval", sl.refit_interval);
  s.Get("alpha", sl.alpha);
  s.Get("log_entropy", sl.log_entropy);

  Section blobs = s.Child("blobs");
  blobs.Get("classes", sl.blobs.classes);
  blobs.Get("train_per_class", sl.blobs.train_per_class);
  blobs.Get("test_per_class", sl.blobs.test_per_class);
  blobs.Get("dim", sl.blobs.dim);
  blobs.Get("separation", sl.blobs.separation);
  blobs.Get("noise_sigma", sl.blobs.noise_sigma);
  blobs.Finish();

  Section idx = s.Child("idx");
  idx.Get("train_images", sl.idx_train_images);
  idx.Get("train_labels", sl.idx_train_labels);
  idx.Get("test_images", sl.idx_test_images);
  idx.Get("test_labels", sl.idx_test_labels);
  idx.Finish();

  Section bias = s.Child("bias");
  if (bias.Has("flips")) {
    const YAML::Node flips = bias.Raw("flips");
    const std::string name = bias.path() + ".flips";
    if (!flips.IsSequence()) {
      throw ConfigError(LinePrefix(flips.Mark()) + "'" + name +
                        "' must be a list of [from, to] pairs");
    }
    sl.bias.flips.clear();
    for (const auto& pair : flips) {
      const std::vector<int> v = ReadList<int>(pair, name);
      if (v.size() != 2) {
        throw ConfigError(LinePrefix(pair.Mark()) + "'" + name +
                          "' entries must be [from, to] pairs");
      }
      sl.bias.flips.emplace_back(v[0], v[1]);
    }
  }
  bias.Get("active_until_step", sl.bias.active_until_step);
  bias.Finish();
  s.Finish();
  s.Check([&] { sl.Validate(); });
}

void ReadBelief(Section s, BeliefConfig& b) {
  s.Get("mu_star", b.mu_star);
  s.Get("sigma_reliable", b.sigma_reliable);
  s.Get("unreliable_bias", b.unreliable_bias);
  s.Get("unreliable_sigma", b.unreliable_sigma);
  s.Get("p_unreliable", b.p_unreliable);
  s.Get("eta", b.eta);
  s.Get("theta0", b.theta0);
  s.Get("steps", b.steps);
  s.Get("window", b.window);
  s.Get("refit_interval", b.refit_interval);
  s.Get("alpha", b.alpha);
  std::string name(DescriptorSetName(b.descriptors));
  s.Get("descriptors", name);
  s.Finish();
  s.Check([&] {
    b.descriptors = ParseDescriptorSet(name);
    b.Validate();
  });
}

Json CorruptionJson(const CorruptionMode& mode) {
  Json j;
  j["mode"] = CorruptionName(mode);
  if (const auto* m = std::get_if<UniformReplace>(&mode)) {
    j["p"] = m->p;
    j["lo"] = m->lo;
    j["hi"] = m->hi;
  } else if (const auto* m = std::get_if<GaussianNoise>(&mode)) {
    j["sigma"] = m->sigma;
  } else if (const auto* m = std::get_if<EarlyInvert>(&mode)) {
    j["frac"] = m->frac;
  } else if (const auto* m = std::get_if<StateDependent>(&mode)) {
    j["threshold_state"] = m->threshold_state;
    j["p"] = m->p;
    j["lo"] = m->lo;
    j["hi"] = m->hi;
  }
  return j;
}

}  // namespace

std::string_view ExperimentName(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kRl:
      return "rl";
    case ExperimentKind::kSl:
      return "sl";
    case ExperimentKind::kBelief:
      return "belief";
  }
  return "rl";
}

ExperimentKind ParseExperiment(std::string_view name) {
  if (name == "rl") return ExperimentKind::kRl;
  if (name == "sl") return ExperimentKind::kSl;
  if (name == "belief") return ExperimentKind::kBelief;
  throw ConfigError("unknown experiment '" + std::string(name) +
                    "' (expected rl, sl or belief)");
}

std::filesystem::path RunConfig::ResolvedOutputDir() const {
  if (!output_dir.empty()) return output_dir;
  const char* root = std::getenv("MTR_LAB_OUT");
  const std::filesystem::path base =
      root != nullptr && *root != '\0' ? root : "runs";
  return base / std::string(ExperimentName(experiment));
}

void RunConfig::Validate() const {
  rl.Validate();
  sl.Validate();
  belief.Validate();
  if (seeds.empty()) throw ConfigError("seeds must not be empty");
  if (std::set<uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
    throw ConfigError("seeds must be distinct");
  }
  if (k_values.empty()) throw ConfigError("sweep.k_values must not be empty");
  for (int64_t k : k_values) {
    if (k < 1) throw ConfigError("sweep.k_values entries must be >= 1");
  }
}

RunConfig ParseConfig(std::string_view text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    throw ConfigError(LinePrefix(e.mark) + "malformed document: " + e.msg);
  }
  RunConfig config;
  Section top(root, "");

  std::string experiment(ExperimentName(config.experiment));
  top.Get("experiment", experiment);
  top.Check([&] { config.experiment = ParseExperiment(experiment); });
  if (top.Has("seeds")) {
    config.seeds = ReadList<uint64_t>(top.Raw("seeds"), "seeds");
  }
  top.Get("output_dir", config.output_dir);

  Section env = top.Child("env");
  env.Get("name", config.rl.env);
  env.Get("chain_states", config.rl.chain_states);
  env.Get("grid_side", config.rl.grid_side);
  env.Finish();
  env.Check([&] { config.rl.MakeEnv(); });

  Section schedule = top.Child("schedule");
  schedule.Get("clean_end", config.rl.clean_end);
  schedule.Get("corrupt_end", config.rl.corrupt_end);
  schedule.Finish();

  config.rl.corruption = ReadCorruption(top.Child("corruption"));
  ReadSd(top.Child("sd"), config.rl.sd);
  ReadPpo(top.Child("ppo"), config.rl.ppo);
  schedule.Check([&] { config.rl.Schedule().Validate(); });
  top.Get("record_descriptors", config.rl.record_descriptors);

  ReadSl(top.Child("sl"), config.sl);
  ReadBelief(top.Child("belief"), config.belief);

  Section sweep = top.Child("sweep");
  if (sweep.Has("k_values")) {
    config.k_values =
        ReadList<int64_t>(sweep.Raw("k_values"), "sweep.k_values");
  }
  sweep.Finish();
  top.Finish();
  top.Check([&] { config.Validate(); });
  return config;
}

RunConfig LoadConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return ParseConfig(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string EmitConfig(const RunConfig& c) {
  Json j;
  j["experiment"] = ExperimentName(c.experiment);
  j["seeds"] = c.seeds;
  j["output_dir"] = c.output_dir;
  j["env"] = {{"name", c.rl.env},
              {"chain_states", c.rl.chain_states},
              {"grid_side", c.rl.grid_side}};
  j["schedule"] = {{"clean_end", c.rl.clean_end},
                   {"corrupt_end", c.rl.corrupt_end}};
  j["corruption"] = CorruptionJson(c.rl.corruption);
  const SdConfig& sd = c.rl.sd;
  j["sd"] = {{"enabled", sd.enabled},
             {"window", sd.window},
             {"refit_interval", sd.refit_interval},
             {"alpha", sd.alpha},
             {"descriptors", DescriptorSetName(sd.descriptors)},
             {"key", TrustKeyModeName(sd.key)},
             {"reward_bin_width", sd.reward_bin_width},
             {"probe_step", sd.probe_step},
             {"min_drift_gap", sd.min_drift_gap}};
  const PpoConfig& p = c.rl.ppo;
  j["ppo"] = {{"gamma", p.gamma},
              {"gae_lambda", p.gae_lambda},
              {"clip_eps", p.clip_eps},
              {"epochs_per_batch", p.epochs_per_batch},
              {"minibatch_size", p.minibatch_size},
              {"rollout_length", p.rollout_length},
              {"value_coef", p.value_coef},
              {"entropy_coef", p.entropy_coef},
              {"lr0", p.lr0},
              {"total_steps", p.total_steps},
              {"eval_interval", p.eval_interval}};
  j["record_descriptors"] = c.rl.record_descriptors;

  const SlConfig& sl = c.sl;
  Json flips = Json::array();
  for (const auto& [from, to] : sl.bias.flips) flips.push_back({from, to});
  j["sl"] = {{"dataset", sl.dataset},
             {"total_steps", sl.total_steps},
             {"batch_size", sl.batch_size},
             {"lr", sl.lr},
             {"eval_interval", sl.eval_interval},
             {"regulator", sl.regulator},
             {"refit_interval", sl.refit_interval},
             {"alpha", sl.alpha},
             {"log_entropy", sl.log_entropy},
             {"blobs",
              {{"classes", sl.blobs.classes},
               {"train_per_class", sl.blobs.train_per_class},
               {"test_per_class", sl.blobs.test_per_class},
               {"dim", sl.blobs.dim},
               {"separation", sl.blobs.separation},
               {"noise_sigma", sl.blobs.noise_sigma}}},
             {"idx",
              {{"train_images", sl.idx_train_images},
               {"train_labels", sl.idx_train_labels},
               {"test_images", sl.idx_test_images},
               {"test_labels", sl.idx_test_labels}}},
             {"bias",
              {{"flips", flips},
               {"active_until_step", sl.bias.active_until_step}}}};

  const BeliefConfig& b = c.belief;
  j["belief"] = {{"mu_star", b.mu_star},
                 {"sigma_reliable", b.sigma_reliable},
                 {"unreliable_bias", b.unreliable_bias},
                 {"unreliable_sigma", b.unreliable_sigma},
                 {"p_unreliable", b.p_unreliable},
                 {"eta", b.eta},
                 {"theta0", b.theta0},
                 {"steps", b.steps},
                 {"window", b.window},
                 {"refit_interval", b.refit_interval},
                 {"alpha", b.alpha},
                 {"descriptors", DescriptorSetName(b.descriptors)}};
  j["sweep"] = {{"k_values", c.k_values}};
  return j.dump(2) + "\n";
}

std::vector<uint64_t> ParseSeedRange(std::string_view text) {
  auto parse = [&](std::string_view s) -> uint64_t {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
      throw ConfigError("bad seed range '" + std::string(text) +
                        "' (expected a..b)");
    }
    return std::stoull(std::string(s));
  };
  const size_t dots = text.find("..");
  if (dots == std::string_view::npos) return {parse(text)};
  const uint64_t a = parse(text.substr(0, dots));
  const uint64_t b = parse(text.substr(dots + 2));
  if (b < a) {
    throw ConfigError("bad seed range '" + std::string(text) + "': b < a");
  }
  std::vector<uint64_t> out;
  for (uint64_t s = a; s <= b; ++s) out.push_back(s);
  return out;
}

}  // namespace mtr
