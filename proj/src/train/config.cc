// src/train/config.cc

// Copyright 2026  speechchain authors
//
// See COPYING at the top of the source tree for the full license text.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "speechchain/train/config.h"

#include <cstdio>
#include <fstream>
#include <set>

#include "speechchain/errors.h"
#include "speechchain/train/optimizer.h"

namespace speechchain::train {

using nlohmann::json;

namespace {

// Reads an object field by field, then rejects keys nobody asked for.
class StrictReader {
 public:
  StrictReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError("config key '" + Where() + "' must be an object");
  }

  template <class T>
  void Field(const std::string& key, T& out) {
    const json& v = At(key);
    try {
      out = v.get<T>();
    } catch (const json::exception&) {
      throw ConfigError("config key '" + Key(key) + "' has the wrong type");
    }
    if constexpr (std::is_arithmetic_v<T> && !std::is_same_v<T, bool>) {
      if (v.is_boolean()) throw ConfigError("config key '" + Key(key) + "' has the wrong type");
      if (std::is_integral_v<T> && !v.is_number_integer())
        throw ConfigError("config key '" + Key(key) + "' must be an integer");
    }
  }

  StrictReader Child(const std::string& key) { return StrictReader(At(key), Key(key)); }

  void Finish() const {
    for (const auto& item : j_.items())
      if (!seen_.count(item.key())) throw ConfigError("unknown config key '" + Key(item.key()) + "'");
  }

 private:
  const json& At(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) throw ConfigError("missing config key '" + Key(key) + "'");
    return *it;
  }
  std::string Where() const { return path_.empty() ? "<root>" : path_; }
  std::string Key(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

nn::BlockConfig ReadBlock(StrictReader r) {
  nn::BlockConfig c;
  r.Field("model_dim", c.model_dim);
  r.Field("head_count", c.head_count);
  r.Field("ff_dim", c.ff_dim);
  r.Field("layer_count", c.layer_count);
  r.Finish();
  return c;
}

AsrConfig ReadAsr(StrictReader r) {
  AsrConfig c;
  c.encoder = ReadBlock(r.Child("encoder"));
  c.decoder = ReadBlock(r.Child("decoder"));
  r.Field("feature_dim", c.feature_dim);
  r.Field("subsample", c.subsample);
  r.Field("head_init_std", c.head_init_std);
  r.Field("ctc_weight", c.ctc_weight);
  r.Finish();
  return c;
}

TtsConfig ReadTts(StrictReader r) {
  TtsConfig c;
  c.encoder = ReadBlock(r.Child("encoder"));
  c.decoder = ReadBlock(r.Child("decoder"));
  r.Field("feature_dim", c.feature_dim);
  r.Field("speaker_dim", c.speaker_dim);
  r.Field("predictor_hidden", c.predictor_hidden);
  r.Field("postnet_channels", c.postnet_channels);
  r.Field("postnet_kernel", c.postnet_kernel);
  r.Finish();
  return c;
}

SpeakerConfig ReadSpeaker(StrictReader r) {
  SpeakerConfig c;
  r.Field("feature_dim", c.feature_dim);
  r.Field("hidden_dim", c.hidden_dim);
  r.Field("attention_dim", c.attention_dim);
  r.Field("embedding_dim", c.embedding_dim);
  r.Finish();
  return c;
}

corpus::CorpusConfig ReadCorpus(StrictReader r) {
  corpus::CorpusConfig c;
  r.Field("n_speakers", c.n_speakers);
  r.Field("n_paired", c.n_paired);
  r.Field("n_unpaired", c.n_unpaired);
  r.Field("n_validation", c.n_validation);
  r.Field("n_test", c.n_test);
  r.Field("paired_words", c.paired_words);
  r.Field("extra_words", c.extra_words);
  r.Field("min_words", c.min_words);
  r.Field("max_words", c.max_words);
  r.Field("min_word_length", c.min_word_length);
  r.Field("max_word_length", c.max_word_length);
  r.Field("noise_std", c.noise_std);
  r.Field("seed", c.seed);
  r.Finish();
  return c;
}

TrainConfig ReadTrain(StrictReader r) {
  TrainConfig c;
  r.Field("alpha", c.alpha);
  r.Field("lr_pretrain", c.lr_pretrain);
  r.Field("lr_joint", c.lr_joint);
  r.Field("batch_size", c.batch_size);
  r.Field("patience", c.patience);
  r.Field("pretrain_max_epochs", c.pretrain_max_epochs);
  r.Field("phase_a_max_epochs", c.phase_a_max_epochs);
  r.Field("phase_b_epochs", c.phase_b_epochs);
  r.Field("sampling_max_prob", c.sampling_max_prob);
  r.Field("sampling_ramp_epochs", c.sampling_ramp_epochs);
  r.Field("use_spec_augment", c.use_spec_augment);
  StrictReader sa = r.Child("spec_augment");
  sa.Field("time_masks", c.spec_augment.time_masks);
  sa.Field("time_width", c.spec_augment.time_width);
  sa.Field("freq_masks", c.spec_augment.freq_masks);
  sa.Field("freq_width", c.spec_augment.freq_width);
  sa.Finish();
  r.Field("optimizer", c.optimizer);
  r.Field("clip_norm", c.clip_norm);
  r.Field("seed", c.seed);
  r.Field("use_speaker_consistency", c.use_speaker_consistency);
  r.Field("use_stepwise", c.use_stepwise);
  r.Field("decode_max_len", c.decode_max_len);
  r.Finish();
  return c;
}

}  // namespace

void SpecAugmentPolicy::Validate() const {
  if (time_masks < 0 || freq_masks < 0 || time_width < 0 || freq_width < 0)
    throw ConfigError("SpecAugment mask counts and widths must be >= 0");
}

void TrainConfig::Validate() const {
  if (!(alpha >= 0.0)) throw ConfigError("train.alpha must be >= 0");
  if (!(lr_pretrain > 0.0) || !(lr_joint > 0.0)) throw ConfigError("learning rates must be > 0");
  if (batch_size < 1) throw ConfigError("train.batch_size must be >= 1");
  if (patience < 1) throw ConfigError("train.patience must be >= 1");
  if (pretrain_max_epochs < 1 || phase_a_max_epochs < 1 || phase_b_epochs < 0)
    throw ConfigError("epoch limits must be positive");
  if (!(sampling_max_prob >= 0.0 && sampling_max_prob <= 1.0))
    throw ConfigError("train.sampling_max_prob must lie in [0, 1]");
  if (sampling_ramp_epochs < 0) throw ConfigError("train.sampling_ramp_epochs must be >= 0");
  if (clip_norm < 0.0) throw ConfigError("train.clip_norm must be >= 0");
  if (decode_max_len < 1) throw ConfigError("train.decode_max_len must be >= 1");
  spec_augment.Validate();
  ParseOptimizerKind(optimizer);
}

void ExperimentConfig::Validate() const {
  if (name.empty()) throw ConfigError("name must not be empty");
  if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
  try {
    asr.Validate();
    tts.Validate();
    speaker.Validate();
  } catch (const ContractError& e) {
    throw ConfigError(e.what());
  }
  if (corpus.n_speakers < 2) throw ConfigError("corpus.n_speakers must be >= 2");
  if (corpus.n_paired < 1 || corpus.n_validation < 1 || corpus.n_test < 1 || corpus.n_unpaired < 0)
    throw ConfigError("corpus split sizes must be positive");
  if (tts.speaker_dim != speaker.embedding_dim)
    throw ConfigError("tts.speaker_dim must equal speaker.embedding_dim");
  if (asr.feature_dim != corpus::kFeatureDim || tts.feature_dim != corpus::kFeatureDim ||
      speaker.feature_dim != corpus::kFeatureDim)
    throw ConfigError("feature_dim must be " + std::to_string(corpus::kFeatureDim));
  train.Validate();
}

json ToJson(const nn::BlockConfig& c) {
  return {{"model_dim", c.model_dim}, {"head_count", c.head_count},
          {"ff_dim", c.ff_dim}, {"layer_count", c.layer_count}};
}

json ToJson(const corpus::CorpusConfig& c) {
  return {{"n_speakers", c.n_speakers},
          {"n_paired", c.n_paired},
          {"n_unpaired", c.n_unpaired},
          {"n_validation", c.n_validation},
          {"n_test", c.n_test},
          {"paired_words", c.paired_words},
          {"extra_words", c.extra_words},
          {"min_words", c.min_words},
          {"max_words", c.max_words},
          {"min_word_length", c.min_word_length},
          {"max_word_length", c.max_word_length},
          {"noise_std", c.noise_std},
          {"seed", c.seed}};
}

json ToJson(const AsrConfig& c) {
  return {{"encoder", ToJson(c.encoder)},   {"decoder", ToJson(c.decoder)},
          {"feature_dim", c.feature_dim},   {"subsample", c.subsample},
          {"head_init_std", c.head_init_std},
          {"ctc_weight", c.ctc_weight}};
}

json ToJson(const TtsConfig& c) {
  return {{"encoder", ToJson(c.encoder)},
          {"decoder", ToJson(c.decoder)},
          {"feature_dim", c.feature_dim},
          {"speaker_dim", c.speaker_dim},
          {"predictor_hidden", c.predictor_hidden},
          {"postnet_channels", c.postnet_channels},
          {"postnet_kernel", c.postnet_kernel}};
}

json ToJson(const SpeakerConfig& c) {
  return {{"feature_dim", c.feature_dim}, {"hidden_dim", c.hidden_dim},
          {"attention_dim", c.attention_dim}, {"embedding_dim", c.embedding_dim}};
}

json ToJson(const TrainConfig& c) {
  return {{"alpha", c.alpha},
          {"lr_pretrain", c.lr_pretrain},
          {"lr_joint", c.lr_joint},
          {"batch_size", c.batch_size},
          {"patience", c.patience},
          {"pretrain_max_epochs", c.pretrain_max_epochs},
          {"phase_a_max_epochs", c.phase_a_max_epochs},
          {"phase_b_epochs", c.phase_b_epochs},
          {"sampling_max_prob", c.sampling_max_prob},
          {"sampling_ramp_epochs", c.sampling_ramp_epochs},
          {"use_spec_augment", c.use_spec_augment},
          {"spec_augment",
           {{"time_masks", c.spec_augment.time_masks},
            {"time_width", c.spec_augment.time_width},
            {"freq_masks", c.spec_augment.freq_masks},
            {"freq_width", c.spec_augment.freq_width}}},
          {"optimizer", c.optimizer},
          {"clip_norm", c.clip_norm},
          {"seed", c.seed},
          {"use_speaker_consistency", c.use_speaker_consistency},
          {"use_stepwise", c.use_stepwise},
          {"decode_max_len", c.decode_max_len}};
}

json ToJson(const ExperimentConfig& c) {
  return {{"name", c.name},           {"output_dir", c.output_dir},
          {"corpus", ToJson(c.corpus)}, {"asr", ToJson(c.asr)},
          {"tts", ToJson(c.tts)},       {"speaker", ToJson(c.speaker)},
          {"train", ToJson(c.train)}};
}

ExperimentConfig ExperimentConfigFromJson(const json& j) {
  StrictReader r(j, "");
  ExperimentConfig c;
  r.Field("name", c.name);
  r.Field("output_dir", c.output_dir);
  c.corpus = ReadCorpus(r.Child("corpus"));
  c.asr = ReadAsr(r.Child("asr"));
  c.tts = ReadTts(r.Child("tts"));
  c.speaker = ReadSpeaker(r.Child("speaker"));
  c.train = ReadTrain(r.Child("train"));
  r.Finish();
  c.Validate();
  return c;
}

AsrConfig AsrConfigFromJson(const json& j) { return ReadAsr(StrictReader(j, "asr")); }
TtsConfig TtsConfigFromJson(const json& j) { return ReadTts(StrictReader(j, "tts")); }
SpeakerConfig SpeakerConfigFromJson(const json& j) {
  return ReadSpeaker(StrictReader(j, "speaker"));
}

ExperimentConfig LoadExperimentConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingArtifactError("config file not found: " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("cannot parse " + path.string() + ": " + e.what());
  }
  return ExperimentConfigFromJson(j);
}

std::string ConfigHash(const ExperimentConfig& c) {
  json j = ToJson(c);
  j.erase("name");
  j.erase("output_dir");
  const std::string text = j.dump();
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace speechchain::train
