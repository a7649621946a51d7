// include/speechchain/corpus/io.h

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

#ifndef SPEECHCHAIN_CORPUS_IO_H_
#define SPEECHCHAIN_CORPUS_IO_H_

#include <filesystem>

#include "speechchain/corpus/synth.h"

namespace speechchain::corpus {

// Directory layout:
//   manifest.json          corpus config, speakers, texts, prosody, splits
//   features/<id>.feat     one binary feature file per utterance
//
// Feature file: magic "SCFT", uint32 version, int32 rows, int32 cols, then
// rows * cols little-endian float64 values in row-major order.
inline constexpr int kCorpusFormatVersion = 1;

void WriteCorpus(const std::filesystem::path& dir, const CorpusSplit& split);
// Throws MissingArtifactError when the manifest is absent and FormatError on
// malformed content.
CorpusSplit ReadCorpus(const std::filesystem::path& dir);

void WriteFeatureFile(const std::filesystem::path& path, const Matrix& features);
Matrix ReadFeatureFile(const std::filesystem::path& path);

}  // namespace speechchain::corpus

#endif  // SPEECHCHAIN_CORPUS_IO_H_
