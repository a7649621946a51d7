// src/train/joint.cc

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
#include <numeric>

#include "speechchain/errors.h"
#include "speechchain/train/losses.h"
#include "speechchain/train/trainer.h"

namespace speechchain::train {

using ad::Tape;
using ad::Var;
using nlohmann::json;

namespace {

constexpr uint64_t kPhaseAStream = 0xA11CE;
constexpr uint64_t kPhaseBStream = 0xB0B;

double Cosine(const Matrix& a, const Matrix& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (int i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return dot / std::max(std::sqrt(na) * std::sqrt(nb), 1e-8);
}

}  // namespace

json ToJson(const JointState& s) {
  json curve = json::array();
  for (const CurvePoint& p : s.curve)
    curve.push_back({{"epoch", p.epoch}, {"phase", p.phase}, {"perplexity", p.perplexity}});
  return {{"epoch", s.epoch},
          {"phase_a_epochs", s.phase_a_epochs},
          {"phase_b_epochs", s.phase_b_epochs},
          {"human_baseline", s.human_baseline},
          {"curve", curve}};
}

JointState JointStateFromJson(const json& j) {
  JointState s;
  try {
    s.epoch = j.at("epoch").get<int>();
    s.phase_a_epochs = j.at("phase_a_epochs").get<int>();
    s.phase_b_epochs = j.at("phase_b_epochs").get<int>();
    s.human_baseline = j.at("human_baseline").get<double>();
    for (const json& p : j.at("curve"))
      s.curve.push_back({p.at("epoch").get<int>(), p.at("phase").get<std::string>(),
                         p.at("perplexity").get<double>()});
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad joint-training state: ") + e.what());
  }
  return s;
}

void FreezeForPhase(Models& models, char phase) {
  models.speaker.SetFrozen(true);
  models.asr.params().SetFrozen("asr", false);
  if (phase == 'A') {
    models.tts.params().SetFrozen("tts", true);
  } else if (phase == 'B') {
    models.tts.params().SetFrozen("tts", false);
    models.tts.params().SetFrozen(kTtsDuration, true);
  } else {
    throw ContractError(std::string("unknown phase ") + phase);
  }
}

JointTrainer::JointTrainer(Models& models, const corpus::CorpusSplit& data,
                           const TrainConfig& config, const AsrModel& pretrained_asr,
                           TrainingLog* log)
    : models_(models), data_(data), config_(config), pretrained_asr_(pretrained_asr), log_(log),
      optimizer_([&] {
        config.Validate();
        OptimizerConfig oc;
        oc.kind = ParseOptimizerKind(config.optimizer);
        oc.learning_rate = config.lr_joint;
        oc.clip_norm = config.clip_norm;
        return oc;
      }()) {
  if (data.paired.empty()) throw ContractError("joint training needs paired references");
  if (data.validation.empty()) throw ContractError("joint training needs a validation split");
  for (const auto& u : data.paired) paired_embeddings_.push_back(models.speaker.Embed(u.features));
  Rng rng(config.seed * 7 + 6);
  std::uniform_int_distribution<int> pick(0, static_cast<int>(data.paired.size()) - 1);
  for (size_t i = 0; i < data.validation.size(); ++i) validation_refs_.push_back(pick(rng));
  state_.human_baseline = HumanBaseline();
  state_.curve.push_back({0, "init", Probe().perplexity});
}

void JointTrainer::LimitItemsForTesting(int unpaired, int paired) {
  unpaired_limit_ = unpaired;
  paired_limit_ = paired;
}

std::vector<Parameter*> JointTrainer::AllParams() {
  std::vector<Parameter*> all = models_.asr.params().All();
  for (Parameter* p : models_.tts.params().All()) all.push_back(p);
  return all;
}

double JointTrainer::HumanBaseline() const {
  double total = 0.0;
  for (const auto& u : data_.validation) total += pretrained_asr_.Perplexity(u.features, u.text);
  return total / data_.validation.size();
}

ValidationProbe JointTrainer::Probe() const {
  ValidationProbe p;
  const int n = static_cast<int>(data_.validation.size());
  for (int i = 0; i < n; ++i) {
    const auto& u = data_.validation[i];
    const Matrix& ref = paired_embeddings_[validation_refs_[i]];
    const Matrix x = models_.tts.SynthesizeFree(u.text, ref);
    Tape t(false);
    p.cycle += models_.asr.CeLoss(t, t.Constant(x), u.text).value()[0];
    p.cosine += Cosine(models_.speaker.Embed(x), ref);
    p.perplexity += pretrained_asr_.Perplexity(x, u.text);
  }
  p.cycle /= n;
  p.cosine /= n;
  p.perplexity /= n;
  return p;
}

JointTrainer::EpochTotals JointTrainer::RunEpoch(bool phase_b, uint64_t stream) {
  // Streams are keyed by phase and epoch so that a run resumed between
  // phases replays exactly.
  const uint64_t base = config_.seed * 1000003 + stream * 7919 + state_.epoch;
  Rng order_rng(base), ref_rng(base ^ 0x5EED), mask_rng(base ^ 0xA55A);
  const int n_unpaired = unpaired_limit_ > 0
                             ? std::min<int>(unpaired_limit_, data_.unpaired.size())
                             : static_cast<int>(data_.unpaired.size());
  const int n_paired = paired_limit_ > 0 ? std::min<int>(paired_limit_, data_.paired.size())
                                         : static_cast<int>(data_.paired.size());
  // Indices below n_paired are paired items, the rest unpaired.
  std::vector<int> order(n_paired + n_unpaired);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), order_rng);
  std::uniform_int_distribution<int> pick_ref(0, static_cast<int>(data_.paired.size()) - 1);
  const SpecAugmentPolicy* policy = config_.use_spec_augment ? &config_.spec_augment : nullptr;
  const bool use_sc = phase_b && config_.use_speaker_consistency;

  EpochTotals totals;
  auto params = AllParams();
  for (Parameter* p : params) p->grad.SetZero();
  for (size_t start = 0; start < order.size(); start += config_.batch_size) {
    const size_t end = std::min(order.size(), start + config_.batch_size);
    const double scale = 1.0 / static_cast<double>(end - start);
    for (size_t k = start; k < end; ++k) {
      Tape tape;
      Var loss;
      if (order[k] >= n_paired) {
        const auto& text = data_.unpaired[order[k] - n_paired];
        const Matrix& ref = paired_embeddings_[pick_ref(ref_rng)];
        JointTerms terms = JointLoss(tape, models_.asr, models_.tts, models_.speaker, text, ref,
                                     config_.alpha, use_sc, policy, &mask_rng);
        loss = terms.total;
        totals.cycle += terms.cycle;
        totals.speaker += terms.speaker;
        ++totals.unpaired;
      } else {
        const int i = order[k];
        const auto& u = data_.paired[i];
        loss = models_.asr.CeLoss(tape, tape.Constant(u.features), u.text);
        totals.ce += loss.value()[0];
        if (phase_b) {
          SynthesisOutput out = models_.tts.Synthesize(tape, u.text, paired_embeddings_[i],
                                                       SynthesisMode::kTeacher, &u.prosody);
          Var tts_loss = TtsLoss(tape, out, u.features, u.prosody).total;
          totals.tts += tts_loss.value()[0];
          loss = ad::Add(loss, tts_loss);
        }
        ++totals.paired;
      }
      totals.loss += loss.value()[0];
      tape.Backward(ad::Scale(loss, scale));
      tape.AccumulateParamGrads();
    }
    optimizer_.Step(params);
    for (Parameter* p : params) p->grad.SetZero();
  }
  ++state_.epoch;
  return totals;
}

void JointTrainer::RecordEpoch(const std::string& phase, const EpochTotals& t,
                               const ValidationProbe& p) {
  state_.curve.push_back({state_.epoch, phase, p.perplexity});
  if (log_ == nullptr) return;
  const double items = std::max(1, t.unpaired + t.paired);
  std::map<std::string, double> train = {{"loss", t.loss / items}};
  if (t.unpaired > 0) {
    train["cycle"] = t.cycle / t.unpaired;
    train["speaker"] = t.speaker / t.unpaired;
  }
  if (t.paired > 0) {
    train["ce"] = t.ce / t.paired;
    train["tts"] = t.tts / t.paired;
  }
  log_->Add("joint-" + phase, state_.epoch, "train", train);
  log_->Add("joint-" + phase, state_.epoch, "valid",
            {{"cycle", p.cycle}, {"cosine", p.cosine}, {"perplexity", p.perplexity}});
}

int JointTrainer::RunPhaseA() {
  FreezeForPhase(models_, 'A');
  EarlyStopping stop(config_.patience);
  stop.Update(Probe().cycle);
  std::map<std::string, Matrix> best = models_.asr.params().Snapshot();
  int epochs = 0;
  while (epochs < config_.phase_a_max_epochs && !stop.ShouldStop()) {
    EpochTotals t = RunEpoch(false, kPhaseAStream);
    ++epochs;
    ValidationProbe p = Probe();
    RecordEpoch("A", t, p);
    if (stop.Update(p.cycle)) best = models_.asr.params().Snapshot();
  }
  models_.asr.params().Restore(best);
  state_.phase_a_epochs = epochs;
  return epochs;
}

int JointTrainer::RunPhaseB() {
  FreezeForPhase(models_, 'B');
  for (int e = 0; e < config_.phase_b_epochs; ++e) {
    EpochTotals t = RunEpoch(true, kPhaseBStream);
    RecordEpoch("B", t, Probe());
    ++state_.phase_b_epochs;
  }
  return config_.phase_b_epochs;
}

JointState JointTrainer::State() const {
  JointState s = state_;
  s.optimizer = optimizer_.ExportState();
  return s;
}

void JointTrainer::Restore(const JointState& state) {
  state_ = state;
  state_.optimizer.clear();
  optimizer_.ImportState(state.optimizer);
}

}  // namespace speechchain::train
