// include/speechchain/app/experiment.h

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

#ifndef SPEECHCHAIN_APP_EXPERIMENT_H_
#define SPEECHCHAIN_APP_EXPERIMENT_H_

#include <filesystem>
#include <string>
#include <vector>

#include "speechchain/train/checkpoint.h"
#include "speechchain/train/config.h"
#include "speechchain/train/trainer.h"

namespace speechchain::app {

// Everything a command writes lives under the experiment's output_dir:
//
//   config.json                   effective config of the last command
//   corpus/                       manifest.json + features/
//   pretrain/<model>.ckpt|.csv    speaker, asr, tts
//   joint/phase_a.ckpt            phase A result shared by step-wise runs
//   joint/<method>/               final.ckpt, log.csv, curve.csv, state.json
//   eval/<label>_<split>.json
//   figures/perplexity.svg|.csv
class ExperimentDir {
 public:
  explicit ExperimentDir(std::filesystem::path root) : root_(std::move(root)) {}
  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path Corpus() const { return root_ / "corpus"; }
  std::filesystem::path Pretrained(const std::string& model) const {
    return root_ / "pretrain" / (model + ".ckpt");
  }
  std::filesystem::path PhaseA() const { return root_ / "joint" / "phase_a.ckpt"; }
  std::filesystem::path Joint(const std::string& method) const { return root_ / "joint" / method; }
  std::filesystem::path Eval() const { return root_ / "eval"; }
  std::filesystem::path Figures() const { return root_ / "figures"; }

 private:
  std::filesystem::path root_;
};

// Creates <dir>/.lock exclusively; a second holder gets a runtime_error.
// The file is removed when the lock goes out of scope.
class AdvisoryLock {
 public:
  explicit AdvisoryLock(const std::filesystem::path& dir);
  ~AdvisoryLock();
  AdvisoryLock(const AdvisoryLock&) = delete;
  AdvisoryLock& operator=(const AdvisoryLock&) = delete;

 private:
  std::filesystem::path path_;
};

// "proposed", "no-speaker-consistency", "no-stepwise" or "conventional".
std::string MethodName(bool use_speaker_consistency, bool use_stepwise);

// Renders the corpus. Refuses a non-empty corpus directory unless `force`.
corpus::CorpusSplit GenerateCorpus(const train::ExperimentConfig& config, bool force);

// model: "speaker", "asr" or "tts" (tts needs the speaker checkpoint).
// Writes the checkpoint and the learning-curve CSV; returns the result.
train::PretrainResult Pretrain(const train::ExperimentConfig& config, const std::string& model);

struct JointRun {
  std::string method;
  int phase_a_epochs = 0;
  int phase_b_epochs = 0;
  bool phase_a_reused = false;
  train::JointState state;
  train::ValidationProbe final_probe;
};

// Joint training from the pretrained checkpoints with the ablation flags of
// config.train. A step-wise run reuses joint/phase_a.ckpt when it was written
// under the same config; phase A does not depend on the speaker flag.
JointRun JointTrain(const train::ExperimentConfig& config);

// Loads the named checkpoints over freshly built models and evaluates a
// split ("test" or "validation"). The report is also written under eval/.
train::Evaluation EvaluateCheckpoints(const train::ExperimentConfig& config,
                                      const std::vector<std::filesystem::path>& checkpoints,
                                      const std::string& split, const std::string& label);

// Checkpoints that together hold every parameter of a pretrained or joint
// model: "pretrained" or a method name.
std::vector<std::filesystem::path> ModelCheckpoints(const train::ExperimentConfig& config,
                                                    const std::string& model);

struct PerplexitySeries {
  std::string name;
  std::vector<int> epochs;
  std::vector<double> perplexity;
};

// Reads joint/<method>/curve.csv; MissingArtifactError when absent.
PerplexitySeries ReadCurve(const std::filesystem::path& csv, const std::string& name);

// Writes figures/perplexity.svg and .csv from the step-wise and the
// no-step-wise runs plus the ground-truth baseline. Missing runs are skipped
// with a message in `warnings`; returns the series drawn.
std::vector<PerplexitySeries> PlotPerplexity(const train::ExperimentConfig& config,
                                             std::vector<std::string>* warnings);

// First epoch whose perplexity is below `baseline`, or -1.
int FirstCrossing(const PerplexitySeries& s, double baseline);

void WriteConfig(const train::ExperimentConfig& config);

}  // namespace speechchain::app

#endif  // SPEECHCHAIN_APP_EXPERIMENT_H_
