// src/corpus/synth.cc

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

#include "speechchain/corpus/synth.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "speechchain/errors.h"

namespace speechchain::corpus {

std::vector<ToySpeaker> MakeSpeakers(int count, Rng& rng) {
  if (count < 1) throw ContractError("speaker count must be positive");
  std::uniform_real_distribution<double> jitter(0.0, 0.5);
  // Independent orderings per attribute; bin k of each attribute is
  // [k, k + 0.5] / count of its span, so ranges never overlap.
  std::vector<int> tilt_order(count), gain_order(count);
  for (int i = 0; i < count; ++i) tilt_order[i] = gain_order[i] = i;
  std::shuffle(tilt_order.begin(), tilt_order.end(), rng);
  std::shuffle(gain_order.begin(), gain_order.end(), rng);
  std::vector<ToySpeaker> out;
  for (int k = 0; k < count; ++k) {
    ToySpeaker s;
    s.id = k;
    s.f0_base = 1.0 + 1.6 * (k + jitter(rng)) / count;
    s.spectral_tilt = -0.5 + 1.0 * (tilt_order[k] + jitter(rng)) / count;
    s.energy_gain = 0.7 + 0.8 * (gain_order[k] + jitter(rng)) / count;
    out.push_back(s);
  }
  return out;
}

Rendered Render(const PhonemeSequence& text, const ToySpeaker& speaker, Rng* noise,
                double noise_std) {
  if (text.empty()) throw ContractError("render: empty text");
  Rendered r;
  int frames = 0;
  for (int token : text) frames += AcousticsOf(token).duration;
  r.features = Matrix(frames, kFeatureDim);
  int row = 0;
  for (int token : text) {
    const TokenAcoustics& a = AcousticsOf(token);
    std::array<double, kFeatureDim> frame{};
    double energy2 = 0.0;
    for (int c = 1; c < kFeatureDim; ++c) {
      const double tilt = std::exp(speaker.spectral_tilt * (c - 8.0) / 7.0);
      frame[c] = a.spectrum[c] * tilt * speaker.energy_gain;
      energy2 += frame[c] * frame[c];
    }
    frame[kF0Channel] = speaker.f0_base * a.pitch_factor;
    for (int d = 0; d < a.duration; ++d, ++row)
      for (int c = 0; c < kFeatureDim; ++c) r.features(row, c) = frame[c];
    r.prosody.pitch.push_back(frame[kF0Channel]);
    r.prosody.energy.push_back(std::sqrt(energy2));
    r.prosody.duration.push_back(a.duration);
  }
  if (noise && noise_std > 0.0) {
    std::normal_distribution<double> n(0.0, noise_std);
    for (int i = 0; i < r.features.size(); ++i) r.features[i] += n(*noise);
  }
  return r;
}

std::vector<int> RunLengths(const Matrix& features) {
  std::vector<int> runs;
  for (int t = 0; t < features.rows(); ++t) {
    const bool same = t > 0 && std::equal(features.Row(t).begin(), features.Row(t).end(),
                                          features.Row(t - 1).begin());
    if (same)
      ++runs.back();
    else
      runs.push_back(1);
  }
  return runs;
}

namespace {

PhonemeSequence RandomWord(Rng& rng, const CorpusConfig& c) {
  std::uniform_int_distribution<int> len(c.min_word_length, c.max_word_length);
  std::uniform_int_distribution<int> phone(kFirstPhoneme, kFirstPhoneme + kPhonemeCount - 1);
  PhonemeSequence w(len(rng));
  for (size_t i = 0; i < w.size(); ++i) {
    do {
      w[i] = phone(rng);
    } while (i > 0 && w[i] == w[i - 1]);  // adjacent repeats would merge runs
  }
  return w;
}

PhonemeSequence Join(const std::vector<const PhonemeSequence*>& words) {
  PhonemeSequence s;
  for (size_t i = 0; i < words.size(); ++i) {
    if (i) s.push_back(kSpace);
    s.insert(s.end(), words[i]->begin(), words[i]->end());
  }
  return s;
}

}  // namespace

CorpusSplit MakeSplits(const CorpusConfig& config) {
  if (config.n_speakers < 2) throw ContractError("corpus needs at least 2 speakers");
  if (config.min_words < 1 || config.max_words < config.min_words ||
      config.min_word_length < 1 || config.max_word_length < config.min_word_length ||
      config.paired_words < 1 || config.extra_words < 1)
    throw ContractError("invalid corpus grammar settings");
  CorpusSplit split;
  split.config = config;
  Rng rng(config.seed);
  split.speakers = MakeSpeakers(config.n_speakers, rng);

  std::set<PhonemeSequence> seen_words;
  auto fresh_words = [&](int n) {
    std::vector<PhonemeSequence> words;
    while (static_cast<int>(words.size()) < n) {
      PhonemeSequence w = RandomWord(rng, config);
      if (seen_words.insert(w).second) words.push_back(std::move(w));
    }
    return words;
  };
  split.paired_words = fresh_words(config.paired_words);
  split.extra_words = fresh_words(config.extra_words);

  std::set<PhonemeSequence> seen_sentences;
  std::uniform_int_distribution<int> count(config.min_words, config.max_words);
  auto sentence = [&](bool extended, bool require_extra) {
    const int np = static_cast<int>(split.paired_words.size());
    const int total = extended ? np + static_cast<int>(split.extra_words.size()) : np;
    std::uniform_int_distribution<int> pick(0, total - 1);
    std::uniform_int_distribution<int> pick_extra(np, total - 1);
    for (;;) {
      std::vector<const PhonemeSequence*> words(count(rng));
      std::vector<int> ids(words.size());
      for (int& id : ids) id = pick(rng);
      if (require_extra) {
        std::uniform_int_distribution<int> slot(0, static_cast<int>(ids.size()) - 1);
        bool has_extra = false;
        for (int id : ids) has_extra = has_extra || id >= np;
        if (!has_extra) ids[slot(rng)] = pick_extra(rng);
      }
      for (size_t i = 0; i < ids.size(); ++i)
        words[i] = ids[i] < np ? &split.paired_words[ids[i]] : &split.extra_words[ids[i] - np];
      PhonemeSequence s = Join(words);
      if (seen_sentences.insert(s).second) return s;
    }
  };

  Rng noise_rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  auto utterances = [&](int n, const std::string& prefix, bool extended, bool noisy) {
    std::vector<Utterance> out;
    for (int i = 0; i < n; ++i) {
      Utterance u;
      char id[64];
      std::snprintf(id, sizeof id, "%s_%04d", prefix.c_str(), i);
      u.id = id;
      u.speaker = i % config.n_speakers;
      u.text = sentence(extended, false);
      Rendered r = Render(u.text, split.speakers[u.speaker], noisy ? &noise_rng : nullptr,
                          noisy ? config.noise_std : 0.0);
      u.features = std::move(r.features);
      u.prosody = std::move(r.prosody);
      out.push_back(std::move(u));
    }
    return out;
  };
  split.paired = utterances(config.n_paired, "paired", false, true);
  for (int i = 0; i < config.n_unpaired; ++i) split.unpaired.push_back(sentence(true, true));
  split.validation = utterances(config.n_validation, "valid", true, false);
  split.test = utterances(config.n_test, "test", true, false);
  return split;
}

}  // namespace speechchain::corpus
