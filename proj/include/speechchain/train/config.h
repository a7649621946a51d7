// include/speechchain/train/config.h

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

#ifndef SPEECHCHAIN_TRAIN_CONFIG_H_
#define SPEECHCHAIN_TRAIN_CONFIG_H_

#include <filesystem>
#include <string>

#include "json.hpp"
#include "speechchain/corpus/synth.h"
#include "speechchain/models/asr.h"
#include "speechchain/models/speaker.h"
#include "speechchain/models/tts.h"

namespace speechchain::train {

// Time masks zero whole frames, frequency masks whole channels. Each mask
// width is uniform on [0, width] (clamped to the extent) at a uniform start.
struct SpecAugmentPolicy {
  int time_masks = 2;
  int time_width = 4;
  int freq_masks = 2;
  int freq_width = 1;

  void Validate() const;
};

struct TrainConfig {
  double alpha = 0.1;             // speaker-consistency weight
  double lr_pretrain = 2e-3;
  double lr_joint = 1e-4;
  int batch_size = 8;
  int patience = 5;               // early stopping, in epochs
  int pretrain_max_epochs = 100;
  int phase_a_max_epochs = 10;
  int phase_b_epochs = 10;
  double sampling_max_prob = 0.4;
  int sampling_ramp_epochs = 20;
  bool use_spec_augment = true;
  SpecAugmentPolicy spec_augment;
  std::string optimizer = "adam";  // or "radam"
  double clip_norm = 0.0;          // 0 disables
  uint64_t seed = 1;
  bool use_speaker_consistency = true;
  bool use_stepwise = true;
  int decode_max_len = 80;

  void Validate() const;
};

struct ExperimentConfig {
  std::string name = "toy";
  std::string output_dir = "runs/toy";
  corpus::CorpusConfig corpus;
  AsrConfig asr;
  TtsConfig tts;
  SpeakerConfig speaker;
  TrainConfig train;

  void Validate() const;
};

nlohmann::json ToJson(const nn::BlockConfig& c);
nlohmann::json ToJson(const corpus::CorpusConfig& c);
nlohmann::json ToJson(const AsrConfig& c);
nlohmann::json ToJson(const TtsConfig& c);
nlohmann::json ToJson(const SpeakerConfig& c);
nlohmann::json ToJson(const TrainConfig& c);
nlohmann::json ToJson(const ExperimentConfig& c);

// Every key must be present and no other key may appear; violations throw
// ConfigError naming the dotted key.
ExperimentConfig ExperimentConfigFromJson(const nlohmann::json& j);
AsrConfig AsrConfigFromJson(const nlohmann::json& j);
TtsConfig TtsConfigFromJson(const nlohmann::json& j);
SpeakerConfig SpeakerConfigFromJson(const nlohmann::json& j);

// MissingArtifactError if absent, ConfigError if malformed.
ExperimentConfig LoadExperimentConfig(const std::filesystem::path& path);

// Hex FNV-1a digest of everything except name and output_dir.
std::string ConfigHash(const ExperimentConfig& c);

}  // namespace speechchain::train

#endif  // SPEECHCHAIN_TRAIN_CONFIG_H_
