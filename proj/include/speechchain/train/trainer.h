// include/speechchain/train/trainer.h

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

#ifndef SPEECHCHAIN_TRAIN_TRAINER_H_
#define SPEECHCHAIN_TRAIN_TRAINER_H_

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "speechchain/corpus/synth.h"
#include "speechchain/metrics/metrics.h"
#include "speechchain/models/asr.h"
#include "speechchain/models/speaker.h"
#include "speechchain/models/tts.h"
#include "speechchain/train/config.h"
#include "speechchain/train/optimizer.h"

namespace speechchain::train {

struct Models {
  Models(const AsrConfig& asr_config, const TtsConfig& tts_config,
         const SpeakerConfig& speaker_config, uint64_t seed);
  explicit Models(const ExperimentConfig& c) : Models(c.asr, c.tts, c.speaker, c.train.seed) {}

  AsrModel asr;
  TtsModel tts;
  SpeakerEmbedder speaker;
};

// Rows of (phase, epoch, split, named values), written as CSV with a fixed
// column set; missing values are left empty.
class TrainingLog {
 public:
  struct Row {
    std::string phase;
    int epoch = 0;
    std::string split;
    std::map<std::string, double> values;
  };
  static const std::vector<std::string>& Columns();

  void Add(const std::string& phase, int epoch, const std::string& split,
           std::map<std::string, double> values);
  const std::vector<Row>& rows() const { return rows_; }
  void WriteCsv(const std::filesystem::path& path) const;

 private:
  std::vector<Row> rows_;
};

// Patience rule on a value to minimize.
class EarlyStopping {
 public:
  explicit EarlyStopping(int patience);
  // Returns true when `value` improves on the best so far.
  bool Update(double value);
  bool ShouldStop() const { return since_best_ >= patience_; }
  int best_epoch() const { return best_epoch_; }
  double best() const { return best_; }

 private:
  int patience_;
  int epoch_ = -1;
  int best_epoch_ = -1;
  int since_best_ = 0;
  double best_;
};

struct PretrainResult {
  std::vector<double> train_loss;
  std::vector<double> valid_loss;
  int best_epoch = -1;
  double valid_accuracy = 0.0;  // speaker model only
};

// Speaker classification on the paired set; the head is dropped and the
// embedder frozen afterwards. Validation accuracy is measured on the
// validation split.
PretrainResult PretrainSpeaker(SpeakerEmbedder& speaker, const corpus::CorpusSplit& data,
                               const TrainConfig& config, TrainingLog* log);
// Scheduled-sampling cross-entropy mixed with the CTC term on paired data.
// Early stopping watches the same mix on validation; the best parameters
// are kept.
PretrainResult PretrainAsr(AsrModel& asr, const corpus::CorpusSplit& data,
                           const TrainConfig& config, TrainingLog* log);
// Teacher-mode TTS loss on paired data, each utterance conditioned on its own
// speaker embedding; early stopping on the validation loss.
PretrainResult PretrainTts(TtsModel& tts, const SpeakerEmbedder& speaker,
                           const corpus::CorpusSplit& data, const TrainConfig& config,
                           TrainingLog* log);

double SpeakerAccuracy(const SpeakerEmbedder& speaker, const std::vector<corpus::Utterance>& set);

struct CurvePoint {
  int epoch = 0;
  std::string phase;  // "init", "A" or "B"
  double perplexity = 0.0;
};

struct ValidationProbe {
  double cycle = 0.0;       // mean cross-entropy of the text given synthesized speech
  double cosine = 0.0;      // mean cos(embed(synthesized), reference embedding)
  double perplexity = 0.0;  // mean perplexity under the pretrained recognizer
};

// Carries a joint run across processes or between runs that share phase A.
struct JointState {
  int epoch = 0;
  int phase_a_epochs = 0;
  int phase_b_epochs = 0;
  std::vector<CurvePoint> curve;
  double human_baseline = 0.0;
  std::map<std::string, Matrix> optimizer;
};
nlohmann::json ToJson(const JointState& s);  // without the optimizer tensors
JointState JointStateFromJson(const nlohmann::json& j);

// Step-wise joint optimization over a randomly mixed stream of paired and
// unpaired items. Phase A trains only the recognizer against a frozen
// synthesizer; phase B also trains the synthesizer except its duration
// predictor. Each phase draws from its own seeded streams.
class JointTrainer {
 public:
  JointTrainer(Models& models, const corpus::CorpusSplit& data, const TrainConfig& config,
               const AsrModel& pretrained_asr, TrainingLog* log);

  // Returns the number of epochs run.
  int RunPhaseA();
  int RunPhaseB();

  ValidationProbe Probe() const;
  double HumanBaseline() const;

  JointState State() const;
  void Restore(const JointState& state);
  const std::vector<CurvePoint>& curve() const { return state_.curve; }
  Optimizer& optimizer() { return optimizer_; }

  // Number of leading unpaired/paired items used per epoch; 0 means all.
  void LimitItemsForTesting(int unpaired, int paired);

 private:
  struct EpochTotals {
    double loss = 0.0, cycle = 0.0, speaker = 0.0, ce = 0.0, tts = 0.0;
    int unpaired = 0, paired = 0;
  };
  EpochTotals RunEpoch(bool phase_b, uint64_t stream);
  void RecordEpoch(const std::string& phase, const EpochTotals& t, const ValidationProbe& p);
  std::vector<Parameter*> AllParams();

  Models& models_;
  const corpus::CorpusSplit& data_;
  TrainConfig config_;
  const AsrModel& pretrained_asr_;
  TrainingLog* log_;
  Optimizer optimizer_;
  std::vector<Matrix> paired_embeddings_;
  std::vector<int> validation_refs_;
  JointState state_;
  int unpaired_limit_ = 0;
  int paired_limit_ = 0;
};

// Sets the freeze flags for a phase: A freezes the whole synthesizer, B only
// its duration predictor. The speaker embedder stays frozen in both.
void FreezeForPhase(Models& models, char phase);

struct Evaluation {
  metrics::MetricsReport report;
  // MCD and F0 RMSE with references from a different speaker.
  double mcd_other_speaker = 0.0;
  double f0_rmse_other_speaker = 0.0;
};

// PER from greedy decoding of `items`; MCD and F0 RMSE from teacher-mode
// resynthesis with references taken from `held_out` utterances of the same
// and of a different speaker. Perplexity is that of the recognizer on the
// ground-truth speech.
Evaluation Evaluate(const Models& models, const std::vector<corpus::Utterance>& items,
                    const std::vector<corpus::Utterance>& held_out, int speaker_count,
                    int decode_max_len, const std::string& split_name);

// Corpus-level PER of greedy decoding.
double TestPer(const AsrModel& asr, const std::vector<corpus::Utterance>& items, int max_len);

}  // namespace speechchain::train

#endif  // SPEECHCHAIN_TRAIN_TRAINER_H_
