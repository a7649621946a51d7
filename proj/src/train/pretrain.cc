// src/train/pretrain.cc

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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>

#include "speechchain/errors.h"
#include "speechchain/train/trainer.h"

namespace speechchain::train {

using ad::Tape;
using ad::Var;

Models::Models(const AsrConfig& asr_config, const TtsConfig& tts_config,
               const SpeakerConfig& speaker_config, uint64_t seed)
    : asr(asr_config, seed * 3 + 11), tts(tts_config, seed * 3 + 12),
      speaker(speaker_config, seed * 3 + 13) {}

const std::vector<std::string>& TrainingLog::Columns() {
  static const std::vector<std::string> columns = {
      "loss", "cycle", "speaker", "ce", "tts", "accuracy", "cosine", "perplexity", "per"};
  return columns;
}

void TrainingLog::Add(const std::string& phase, int epoch, const std::string& split,
                      std::map<std::string, double> values) {
  for (const auto& [key, v] : values)
    if (std::find(Columns().begin(), Columns().end(), key) == Columns().end())
      throw ContractError("unknown log column " + key);
  rows_.push_back({phase, epoch, split, std::move(values)});
}

void TrainingLog::WriteCsv(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "phase,epoch,split";
  for (const auto& c : Columns()) out << "," << c;
  out << "\n" << std::setprecision(17);
  for (const Row& r : rows_) {
    out << r.phase << "," << r.epoch << "," << r.split;
    for (const auto& c : Columns()) {
      out << ",";
      auto it = r.values.find(c);
      if (it != r.values.end()) out << it->second;
    }
    out << "\n";
  }
}

EarlyStopping::EarlyStopping(int patience)
    : patience_(patience), best_(std::numeric_limits<double>::infinity()) {
  if (patience < 1) throw ContractError("patience must be >= 1");
}

bool EarlyStopping::Update(double value) {
  ++epoch_;
  if (value < best_) {
    best_ = value;
    best_epoch_ = epoch_;
    since_best_ = 0;
    return true;
  }
  ++since_best_;
  return false;
}

namespace {

// One pass over `order` in minibatches. Each item's loss is divided by the
// size of its batch, so a batch step follows the mean item gradient.
template <class ItemLoss>
double RunBatches(const std::vector<int>& order, int batch_size, ParamSet& params,
                  Optimizer& optimizer, ItemLoss&& item_loss) {
  double total = 0.0;
  const auto all = params.All();
  params.ZeroGrad();
  for (size_t start = 0; start < order.size(); start += batch_size) {
    const size_t end = std::min(order.size(), start + batch_size);
    const double scale = 1.0 / static_cast<double>(end - start);
    for (size_t k = start; k < end; ++k) {
      Tape tape;
      Var loss = item_loss(tape, order[k]);
      total += loss.value()[0];
      tape.Backward(ad::Scale(loss, scale));
      tape.AccumulateParamGrads();
    }
    optimizer.Step(all);
    params.ZeroGrad();
  }
  return total / static_cast<double>(order.size());
}

std::vector<int> Shuffled(int n, Rng& rng) {
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

Optimizer MakeOptimizer(const TrainConfig& c, double lr) {
  OptimizerConfig oc;
  oc.kind = ParseOptimizerKind(c.optimizer);
  oc.learning_rate = lr;
  oc.clip_norm = c.clip_norm;
  return Optimizer(oc);
}

Var SpeakerItemLoss(Tape& tape, const SpeakerEmbedder& speaker, const corpus::Utterance& u) {
  Var logits = speaker.HeadLogits(tape, speaker.Embed(tape, tape.Constant(u.features)));
  const std::vector<int> label = {u.speaker};
  return ad::Scale(ad::Sum(ad::Pick(ad::LogSoftmaxRows(logits), label)), -1.0);
}

void RequireSpeakers(const corpus::CorpusSplit& data) {
  std::vector<int> ids;
  for (const auto& u : data.paired) ids.push_back(u.speaker);
  std::sort(ids.begin(), ids.end());
  if (std::unique(ids.begin(), ids.end()) - ids.begin() < 2)
    throw ContractError("speaker pretraining needs at least 2 speakers");
}

}  // namespace

double SpeakerAccuracy(const SpeakerEmbedder& speaker, const std::vector<corpus::Utterance>& set) {
  int correct = 0;
  for (const auto& u : set) {
    Tape tape(false);
    const Matrix logits = speaker.HeadLogits(tape, speaker.Embed(tape, tape.Constant(u.features))).value();
    const auto row = logits.Row(0);
    correct += (std::max_element(row.begin(), row.end()) - row.begin()) == u.speaker;
  }
  return set.empty() ? 0.0 : static_cast<double>(correct) / set.size();
}

PretrainResult PretrainSpeaker(SpeakerEmbedder& speaker, const corpus::CorpusSplit& data,
                               const TrainConfig& config, TrainingLog* log) {
  RequireSpeakers(data);
  config.Validate();
  speaker.SetFrozen(false);
  speaker.AddHead(static_cast<int>(data.speakers.size()), config.seed * 7 + 1);
  Optimizer opt = MakeOptimizer(config, config.lr_pretrain);
  Rng rng(config.seed * 7 + 2);
  EarlyStopping stop(config.patience);
  PretrainResult result;
  std::map<std::string, Matrix> best = speaker.params().Snapshot();
  for (int epoch = 0; epoch < config.pretrain_max_epochs && !stop.ShouldStop(); ++epoch) {
    const double train = RunBatches(
        Shuffled(static_cast<int>(data.paired.size()), rng), config.batch_size, speaker.params(),
        opt, [&](Tape& t, int i) { return SpeakerItemLoss(t, speaker, data.paired[i]); });
    double valid = 0.0;
    for (const auto& u : data.validation) {
      Tape t(false);
      valid += SpeakerItemLoss(t, speaker, u).value()[0];
    }
    valid /= data.validation.size();
    const double acc = SpeakerAccuracy(speaker, data.validation);
    result.train_loss.push_back(train);
    result.valid_loss.push_back(valid);
    if (stop.Update(valid)) {
      best = speaker.params().Snapshot();
      result.valid_accuracy = acc;
    }
    if (log != nullptr) {
      log->Add("pretrain-speaker", epoch, "train", {{"loss", train}});
      log->Add("pretrain-speaker", epoch, "valid", {{"loss", valid}, {"accuracy", acc}});
    }
  }
  speaker.params().Restore(best);
  result.best_epoch = stop.best_epoch();
  speaker.DropHead();
  speaker.SetFrozen(true);
  return result;
}

PretrainResult PretrainAsr(AsrModel& asr, const corpus::CorpusSplit& data,
                           const TrainConfig& config, TrainingLog* log) {
  config.Validate();
  asr.params().SetFrozen("asr", false);
  Optimizer opt = MakeOptimizer(config, config.lr_pretrain);
  Rng order_rng(config.seed * 7 + 3), sample_rng(config.seed * 7 + 4);
  EarlyStopping stop(config.patience);
  PretrainResult result;
  std::map<std::string, Matrix> best = asr.params().Snapshot();
  for (int epoch = 0; epoch < config.pretrain_max_epochs && !stop.ShouldStop(); ++epoch) {
    const double prob =
        ScheduledSamplingProb(epoch, config.sampling_ramp_epochs, config.sampling_max_prob);
    const double train = RunBatches(
        Shuffled(static_cast<int>(data.paired.size()), order_rng), config.batch_size,
        asr.params(), opt, [&](Tape& t, int i) {
          const auto& u = data.paired[i];
          return asr.PretrainLoss(t, t.Constant(u.features), u.text, prob, sample_rng);
        });
    // Selection uses the full pretraining objective without sampling; the
    // attention CE alone rises early on unseen words while alignment still
    // improves.
    double valid = 0.0, valid_ce = 0.0;
    Rng unused(0);
    for (const auto& u : data.validation) {
      Tape t(false);
      Var memory = asr.Encode(t, t.Constant(u.features));
      const double ce =
          asr.ScheduledSamplingLossFromMemory(t, memory, u.text, 0.0, unused).value()[0];
      Var ctc = asr.CtcLossFromMemory(t, memory, u.text);
      const double w = asr.config().ctc_weight;
      valid_ce += ce;
      valid += ctc.valid() ? (1.0 - w) * ce + w * ctc.value()[0] : ce;
    }
    valid /= data.validation.size();
    valid_ce /= data.validation.size();
    result.train_loss.push_back(train);
    result.valid_loss.push_back(valid);
    if (stop.Update(valid)) best = asr.params().Snapshot();
    if (log != nullptr) {
      log->Add("pretrain-asr", epoch, "train", {{"loss", train}});
      log->Add("pretrain-asr", epoch, "valid",
               {{"loss", valid}, {"ce", valid_ce}, {"perplexity", std::exp(valid_ce)}});
    }
  }
  asr.params().Restore(best);
  result.best_epoch = stop.best_epoch();
  return result;
}

PretrainResult PretrainTts(TtsModel& tts, const SpeakerEmbedder& speaker,
                           const corpus::CorpusSplit& data, const TrainConfig& config,
                           TrainingLog* log) {
  config.Validate();
  tts.params().SetFrozen("tts", false);
  std::vector<Matrix> train_emb, valid_emb;
  for (const auto& u : data.paired) train_emb.push_back(speaker.Embed(u.features));
  for (const auto& u : data.validation) valid_emb.push_back(speaker.Embed(u.features));
  auto item_loss = [&](Tape& t, const corpus::Utterance& u, const Matrix& emb) {
    SynthesisOutput out = tts.Synthesize(t, u.text, emb, SynthesisMode::kTeacher, &u.prosody);
    return TtsLoss(t, out, u.features, u.prosody).total;
  };
  Optimizer opt = MakeOptimizer(config, config.lr_pretrain);
  Rng rng(config.seed * 7 + 5);
  EarlyStopping stop(config.patience);
  PretrainResult result;
  std::map<std::string, Matrix> best = tts.params().Snapshot();
  for (int epoch = 0; epoch < config.pretrain_max_epochs && !stop.ShouldStop(); ++epoch) {
    const double train = RunBatches(
        Shuffled(static_cast<int>(data.paired.size()), rng), config.batch_size, tts.params(), opt,
        [&](Tape& t, int i) { return item_loss(t, data.paired[i], train_emb[i]); });
    double valid = 0.0;
    for (size_t i = 0; i < data.validation.size(); ++i) {
      Tape t(false);
      valid += item_loss(t, data.validation[i], valid_emb[i]).value()[0];
    }
    valid /= data.validation.size();
    result.train_loss.push_back(train);
    result.valid_loss.push_back(valid);
    if (stop.Update(valid)) best = tts.params().Snapshot();
    if (log != nullptr) {
      log->Add("pretrain-tts", epoch, "train", {{"tts", train}});
      log->Add("pretrain-tts", epoch, "valid", {{"tts", valid}});
    }
  }
  tts.params().Restore(best);
  result.best_epoch = stop.best_epoch();
  return result;
}

}  // namespace speechchain::train
