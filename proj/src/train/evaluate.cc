// src/train/evaluate.cc

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

#include <cmath>

#include "speechchain/corpus/phonemes.h"
#include "speechchain/errors.h"
#include "speechchain/train/trainer.h"

namespace speechchain::train {

double TestPer(const AsrModel& asr, const std::vector<corpus::Utterance>& items, int max_len) {
  long edits = 0, tokens = 0;
  for (const auto& u : items) {
    const corpus::PhonemeSequence hyp = asr.GreedyDecode(u.features, max_len);
    edits += metrics::EditDistance(u.text, hyp);
    tokens += static_cast<long>(u.text.size());
  }
  if (tokens == 0) throw ContractError("PER over an empty set");
  return 100.0 * static_cast<double>(edits) / static_cast<double>(tokens);
}

Evaluation Evaluate(const Models& models, const std::vector<corpus::Utterance>& items,
                    const std::vector<corpus::Utterance>& held_out, int speaker_count,
                    int decode_max_len, const std::string& split_name) {
  if (items.empty()) throw ContractError("cannot evaluate an empty split");
  // First held-out utterance of each speaker serves as its reference.
  std::vector<int> ref_of(speaker_count, -1);
  for (size_t i = 0; i < held_out.size(); ++i) {
    const int s = held_out[i].speaker;
    if (s >= 0 && s < speaker_count && ref_of[s] < 0) ref_of[s] = static_cast<int>(i);
  }
  for (int s = 0; s < speaker_count; ++s)
    if (ref_of[s] < 0)
      throw ContractError("no held-out reference for speaker " + std::to_string(s));
  std::vector<Matrix> ref_emb;
  for (int s = 0; s < speaker_count; ++s)
    ref_emb.push_back(models.speaker.Embed(held_out[ref_of[s]].features));

  Evaluation ev;
  metrics::MetricsReport& r = ev.report;
  r.split = split_name;
  r.utterances = static_cast<int>(items.size());
  r.per_percent = TestPer(models.asr, items, decode_max_len);
  for (const auto& u : items) {
    r.tokens += static_cast<int>(u.text.size());
    r.perplexity += models.asr.Perplexity(u.features, u.text);
    for (int other = 0; other < 2; ++other) {
      const int s = other ? (u.speaker + 1) % speaker_count : u.speaker;
      ad::Tape tape(false);
      const Matrix x = models.tts
                           .Synthesize(tape, u.text, ref_emb[s], SynthesisMode::kTeacher,
                                       &u.prosody)
                           .features.value();
      const double mcd = metrics::MelCepstralDistortion(u.features, x);
      const double f0 = metrics::F0Rmse(u.features, x, corpus::kF0Channel);
      if (other) {
        ev.mcd_other_speaker += mcd;
        ev.f0_rmse_other_speaker += f0;
      } else {
        r.mcd_db += mcd;
        r.f0_rmse += f0;
      }
    }
  }
  const double n = static_cast<double>(items.size());
  r.perplexity /= n;
  r.mcd_db /= n;
  r.f0_rmse /= n;
  ev.mcd_other_speaker /= n;
  ev.f0_rmse_other_speaker /= n;
  return ev;
}

}  // namespace speechchain::train
