// src/corpus/io.cc

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

#include "speechchain/corpus/io.h"

#include <cstdint>
#include <cstring>
#include <fstream>

#include "json.hpp"
#include "speechchain/errors.h"

namespace speechchain::corpus {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr char kFeatureMagic[4] = {'S', 'C', 'F', 'T'};
constexpr uint32_t kFeatureVersion = 1;

json ConfigToJson(const CorpusConfig& c) {
  return {{"n_speakers", c.n_speakers},       {"n_paired", c.n_paired},
          {"n_unpaired", c.n_unpaired},       {"n_validation", c.n_validation},
          {"n_test", c.n_test},               {"paired_words", c.paired_words},
          {"extra_words", c.extra_words},     {"min_words", c.min_words},
          {"max_words", c.max_words},         {"min_word_length", c.min_word_length},
          {"max_word_length", c.max_word_length}, {"noise_std", c.noise_std},
          {"seed", c.seed}};
}

CorpusConfig ConfigFromJson(const json& j) {
  CorpusConfig c;
  c.n_speakers = j.at("n_speakers");
  c.n_paired = j.at("n_paired");
  c.n_unpaired = j.at("n_unpaired");
  c.n_validation = j.at("n_validation");
  c.n_test = j.at("n_test");
  c.paired_words = j.at("paired_words");
  c.extra_words = j.at("extra_words");
  c.min_words = j.at("min_words");
  c.max_words = j.at("max_words");
  c.min_word_length = j.at("min_word_length");
  c.max_word_length = j.at("max_word_length");
  c.noise_std = j.at("noise_std");
  c.seed = j.at("seed");
  return c;
}

json UtteranceToJson(const Utterance& u) {
  return {{"id", u.id},
          {"speaker", u.speaker},
          {"text", u.text},
          {"pitch", u.prosody.pitch},
          {"energy", u.prosody.energy},
          {"duration", u.prosody.duration},
          {"frames", u.features.rows()},
          {"features", "features/" + u.id + ".feat"}};
}

Utterance UtteranceFromJson(const json& j, const fs::path& dir) {
  Utterance u;
  u.id = j.at("id");
  u.speaker = j.at("speaker");
  u.text = j.at("text").get<PhonemeSequence>();
  u.prosody.pitch = j.at("pitch").get<std::vector<double>>();
  u.prosody.energy = j.at("energy").get<std::vector<double>>();
  u.prosody.duration = j.at("duration").get<std::vector<int>>();
  u.features = ReadFeatureFile(dir / j.at("features").get<std::string>());
  if (u.features.rows() != j.at("frames").get<int>())
    throw FormatError("frame count mismatch for utterance " + u.id);
  return u;
}

}  // namespace

void WriteFeatureFile(const fs::path& path, const Matrix& features) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  const int32_t rows = features.rows(), cols = features.cols();
  out.write(kFeatureMagic, 4);
  out.write(reinterpret_cast<const char*>(&kFeatureVersion), sizeof kFeatureVersion);
  out.write(reinterpret_cast<const char*>(&rows), sizeof rows);
  out.write(reinterpret_cast<const char*>(&cols), sizeof cols);
  out.write(reinterpret_cast<const char*>(features.data()),
            static_cast<std::streamsize>(features.size() * sizeof(double)));
  if (!out) throw FormatError("short write to " + path.string());
}

Matrix ReadFeatureFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingArtifactError("feature file not found: " + path.string());
  char magic[4];
  uint32_t version = 0;
  int32_t rows = 0, cols = 0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&version), sizeof version);
  in.read(reinterpret_cast<char*>(&rows), sizeof rows);
  in.read(reinterpret_cast<char*>(&cols), sizeof cols);
  if (!in || std::memcmp(magic, kFeatureMagic, 4) != 0)
    throw FormatError("not a feature file: " + path.string());
  if (version != kFeatureVersion)
    throw FormatError("feature file version " + std::to_string(version) + " unsupported");
  if (rows <= 0 || cols <= 0 || static_cast<int64_t>(rows) * cols > (1LL << 28))
    throw FormatError("bad feature shape in " + path.string());
  std::vector<double> values(static_cast<size_t>(rows) * cols);
  in.read(reinterpret_cast<char*>(values.data()),
          static_cast<std::streamsize>(values.size() * sizeof(double)));
  if (!in) throw FormatError("truncated feature file " + path.string());
  return Matrix(rows, cols, std::move(values));
}

void WriteCorpus(const fs::path& dir, const CorpusSplit& split) {
  fs::create_directories(dir / "features");
  json manifest;
  manifest["format_version"] = kCorpusFormatVersion;
  manifest["config"] = ConfigToJson(split.config);
  json speakers = json::array();
  for (const ToySpeaker& s : split.speakers)
    speakers.push_back({{"id", s.id},
                        {"f0_base", s.f0_base},
                        {"spectral_tilt", s.spectral_tilt},
                        {"energy_gain", s.energy_gain}});
  manifest["speakers"] = speakers;
  manifest["paired_words"] = split.paired_words;
  manifest["extra_words"] = split.extra_words;
  manifest["unpaired"] = split.unpaired;
  for (const auto& [name, set] :
       {std::pair{"paired", &split.paired}, std::pair{"validation", &split.validation},
        std::pair{"test", &split.test}}) {
    json arr = json::array();
    for (const Utterance& u : *set) {
      arr.push_back(UtteranceToJson(u));
      WriteFeatureFile(dir / "features" / (u.id + ".feat"), u.features);
    }
    manifest[name] = arr;
  }
  std::ofstream out(dir / "manifest.json");
  if (!out) throw FormatError("cannot write manifest in " + dir.string());
  // max_digits10 keeps doubles exact through the text round trip.
  out << manifest.dump(1) << '\n';
}

CorpusSplit ReadCorpus(const fs::path& dir) {
  const fs::path manifest_path = dir / "manifest.json";
  if (!fs::exists(manifest_path))
    throw MissingArtifactError("corpus manifest not found: " + manifest_path.string());
  std::ifstream in(manifest_path);
  json manifest;
  try {
    manifest = json::parse(in);
    if (manifest.at("format_version").get<int>() != kCorpusFormatVersion)
      throw FormatError("unsupported corpus format version");
    CorpusSplit split;
    split.config = ConfigFromJson(manifest.at("config"));
    for (const json& s : manifest.at("speakers"))
      split.speakers.push_back(
          {s.at("id"), s.at("f0_base"), s.at("spectral_tilt"), s.at("energy_gain")});
    split.paired_words = manifest.at("paired_words").get<std::vector<PhonemeSequence>>();
    split.extra_words = manifest.at("extra_words").get<std::vector<PhonemeSequence>>();
    split.unpaired = manifest.at("unpaired").get<std::vector<PhonemeSequence>>();
    for (const json& u : manifest.at("paired")) split.paired.push_back(UtteranceFromJson(u, dir));
    for (const json& u : manifest.at("validation"))
      split.validation.push_back(UtteranceFromJson(u, dir));
    for (const json& u : manifest.at("test")) split.test.push_back(UtteranceFromJson(u, dir));
    return split;
  } catch (const json::exception& e) {
    throw FormatError("malformed corpus manifest: " + std::string(e.what()));
  }
}

}  // namespace speechchain::corpus
