// tests/unit/corpus_test.cc

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
#include <filesystem>
#include <set>

#include <gtest/gtest.h>

#include "speechchain/corpus/io.h"
#include "speechchain/corpus/synth.h"
#include "speechchain/errors.h"

namespace speechchain::corpus {
namespace {

CorpusConfig SmallConfig() {
  CorpusConfig c;
  c.n_paired = 40;
  c.n_unpaired = 60;
  c.n_validation = 12;
  c.n_test = 12;
  c.seed = 17;
  return c;
}

TEST(Render, FrameCountIsSumOfDurations) {
  ToySpeaker s{0, 1.3, 0.1, 1.1};
  const PhonemeSequence text = {4, 9, kSpace, 12, 5, 30};
  Rendered r = Render(text, s);
  int total = 0;
  for (int d : r.prosody.duration) total += d;
  EXPECT_EQ(r.features.rows(), total);
  EXPECT_EQ(r.features.cols(), kFeatureDim);
  EXPECT_EQ(r.prosody.size(), static_cast<int>(text.size()));
}

TEST(Render, F0ChannelMeanIsBaseTimesPitchFactor) {
  ToySpeaker s{0, 1.7, -0.2, 0.9};
  const PhonemeSequence text = {7, kSpace, 8, 19};
  Rendered r = Render(text, s);
  int row = 0;
  for (size_t i = 0; i < text.size(); ++i) {
    const TokenAcoustics& a = AcousticsOf(text[i]);
    double mean = 0.0;
    for (int d = 0; d < a.duration; ++d) mean += r.features(row + d, kF0Channel);
    mean /= a.duration;
    EXPECT_DOUBLE_EQ(mean, s.f0_base * a.pitch_factor);
    EXPECT_DOUBLE_EQ(r.prosody.pitch[i], s.f0_base * a.pitch_factor);
    row += a.duration;
  }
}

TEST(Render, DurationsWithinTwoToSixAndSpaceIsOneFrame) {
  for (int p = kFirstPhoneme; p < kVocabSize; ++p) {
    EXPECT_GE(AcousticsOf(p).duration, 2);
    EXPECT_LE(AcousticsOf(p).duration, 6);
  }
  EXPECT_EQ(AcousticsOf(kSpace).duration, 1);
}

TEST(Render, UnknownTokenRejected) {
  ToySpeaker s;
  EXPECT_THROW(Render({4, kEos}, s), ContractError);
  EXPECT_THROW(Render({}, s), ContractError);
}

TEST(Render, NoiseLeavesProsodyExact) {
  ToySpeaker s{0, 1.2, 0.0, 1.0};
  Rng rng(3);
  Rendered clean = Render({5, 6, 7}, s);
  Rendered noisy = Render({5, 6, 7}, s, &rng, 0.01);
  EXPECT_EQ(clean.prosody.pitch, noisy.prosody.pitch);
  EXPECT_EQ(clean.prosody.duration, noisy.prosody.duration);
  EXPECT_FALSE(clean.features == noisy.features);
  EXPECT_LT(MaxAbsDiff(clean.features, noisy.features), 0.1);
}

TEST(Splits, SameSeedIsBitIdentical) {
  CorpusSplit a = MakeSplits(SmallConfig());
  CorpusSplit b = MakeSplits(SmallConfig());
  ASSERT_EQ(a.paired.size(), b.paired.size());
  for (size_t i = 0; i < a.paired.size(); ++i) {
    EXPECT_EQ(a.paired[i].text, b.paired[i].text);
    EXPECT_EQ(a.paired[i].features, b.paired[i].features);
  }
  EXPECT_EQ(a.unpaired, b.unpaired);
  CorpusConfig other = SmallConfig();
  other.seed = 18;
  EXPECT_NE(MakeSplits(other).unpaired, a.unpaired);
}

TEST(Splits, DefaultSizes) {
  CorpusConfig c;
  CorpusSplit s = MakeSplits(c);
  EXPECT_EQ(s.speakers.size(), 4u);
  EXPECT_EQ(s.paired.size(), 200u);
  EXPECT_EQ(s.unpaired.size(), 800u);
  for (const Utterance& u : s.paired) {
    int words = 1;
    for (int t : u.text) words += t == kSpace;
    EXPECT_GE(words, 3);
    EXPECT_LE(words, 10);
  }
}

TEST(Splits, TooFewSpeakersRejected) {
  CorpusConfig c = SmallConfig();
  c.n_speakers = 1;
  EXPECT_THROW(MakeSplits(c), ContractError);
}

TEST(Splits, PairedAndUnpairedTextsAreDisjointAndUnpairedHasNewWords) {
  CorpusSplit s = MakeSplits(SmallConfig());
  std::set<PhonemeSequence> paired;
  for (const Utterance& u : s.paired) paired.insert(u.text);
  std::set<PhonemeSequence> extra(s.extra_words.begin(), s.extra_words.end());
  for (const PhonemeSequence& text : s.unpaired) {
    EXPECT_EQ(paired.count(text), 0u);
    bool has_extra = false;
    PhonemeSequence word;
    for (size_t i = 0; i <= text.size(); ++i) {
      if (i == text.size() || text[i] == kSpace) {
        has_extra = has_extra || extra.count(word);
        word.clear();
      } else {
        word.push_back(text[i]);
      }
    }
    EXPECT_TRUE(has_extra);
  }
}

TEST(Splits, RenderIsInjectiveOverCorpus) {
  CorpusSplit s = MakeSplits(SmallConfig());
  std::vector<const Utterance*> all;
  for (const auto* set : {&s.validation, &s.test})
    for (const Utterance& u : *set) all.push_back(&u);
  // Add same texts under every other speaker.
  std::vector<Utterance> extra;
  for (const Utterance& u : s.validation)
    for (const ToySpeaker& spk : s.speakers) {
      if (spk.id == u.speaker) continue;
      Utterance v = u;
      v.speaker = spk.id;
      v.features = Render(u.text, spk).features;
      extra.push_back(std::move(v));
    }
  for (const Utterance& u : extra) all.push_back(&u);
  for (size_t i = 0; i < all.size(); ++i)
    for (size_t j = i + 1; j < all.size(); ++j) {
      const bool same_input = all[i]->text == all[j]->text && all[i]->speaker == all[j]->speaker;
      EXPECT_EQ(all[i]->features == all[j]->features, same_input);
    }
}

TEST(Splits, RunLengthsRecoverDurations) {
  CorpusSplit s = MakeSplits(SmallConfig());
  for (const Utterance& u : s.validation) EXPECT_EQ(RunLengths(u.features), u.prosody.duration);
  for (const Utterance& u : s.paired) {
    Rendered clean = Render(u.text, s.speakers[u.speaker]);
    EXPECT_EQ(RunLengths(clean.features), u.prosody.duration);
  }
}

// A nearest-centroid classifier on utterance-mean features is linear; it
// must separate the synthetic speakers.
TEST(Splits, SpeakersLinearlySeparable) {
  CorpusSplit s = MakeSplits(SmallConfig());
  const int n = static_cast<int>(s.speakers.size());
  std::vector<std::vector<double>> centroid(n, std::vector<double>(kFeatureDim, 0.0));
  std::vector<int> counts(n, 0);
  auto mean_features = [](const Matrix& f) {
    std::vector<double> m(kFeatureDim, 0.0);
    for (int t = 0; t < f.rows(); ++t)
      for (int c = 0; c < kFeatureDim; ++c) m[c] += f(t, c) / f.rows();
    return m;
  };
  for (const Utterance& u : s.paired) {
    auto m = mean_features(u.features);
    for (int c = 0; c < kFeatureDim; ++c) centroid[u.speaker][c] += m[c];
    ++counts[u.speaker];
  }
  for (int k = 0; k < n; ++k)
    for (double& v : centroid[k]) v /= counts[k];
  int correct = 0, total = 0;
  for (const auto* set : {&s.validation, &s.test})
    for (const Utterance& u : *set) {
      auto m = mean_features(u.features);
      int best = 0;
      double best_d = 1e300;
      for (int k = 0; k < n; ++k) {
        double d = 0;
        for (int c = 0; c < kFeatureDim; ++c) d += (m[c] - centroid[k][c]) * (m[c] - centroid[k][c]);
        if (d < best_d) best_d = d, best = k;
      }
      correct += best == u.speaker;
      ++total;
    }
  EXPECT_GT(static_cast<double>(correct) / total, 0.95);
}

TEST(CorpusIo, RoundTripIsExact) {
  CorpusSplit s = MakeSplits(SmallConfig());
  const auto dir = std::filesystem::temp_directory_path() / "speechchain_corpus_io_test";
  std::filesystem::remove_all(dir);
  WriteCorpus(dir, s);
  CorpusSplit r = ReadCorpus(dir);
  ASSERT_EQ(r.paired.size(), s.paired.size());
  for (size_t i = 0; i < s.paired.size(); ++i) {
    EXPECT_EQ(r.paired[i].features, s.paired[i].features);
    EXPECT_EQ(r.paired[i].prosody.pitch, s.paired[i].prosody.pitch);
    EXPECT_EQ(r.paired[i].prosody.energy, s.paired[i].prosody.energy);
  }
  EXPECT_EQ(r.unpaired, s.unpaired);
  EXPECT_EQ(r.speakers[2].f0_base, s.speakers[2].f0_base);
  EXPECT_EQ(r.config.seed, s.config.seed);
  std::filesystem::remove_all(dir);
  EXPECT_THROW(ReadCorpus(dir), MissingArtifactError);
}

TEST(CorpusIo, TruncatedFeatureFileRejected) {
  const auto path = std::filesystem::temp_directory_path() / "speechchain_trunc.feat";
  Matrix m(5, kFeatureDim, 0.25);
  WriteFeatureFile(path, m);
  EXPECT_EQ(ReadFeatureFile(path), m);
  std::filesystem::resize_file(path, std::filesystem::file_size(path) - 8);
  EXPECT_THROW(ReadFeatureFile(path), FormatError);
  std::filesystem::resize_file(path, 6);
  EXPECT_THROW(ReadFeatureFile(path), FormatError);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace speechchain::corpus
