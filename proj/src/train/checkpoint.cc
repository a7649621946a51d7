// src/train/checkpoint.cc

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

#include "speechchain/train/checkpoint.h"

#include <cstring>
#include <fstream>

#include "speechchain/errors.h"

namespace speechchain::train {

using nlohmann::json;

namespace {

constexpr char kMagic[4] = {'S', 'C', 'C', 'K'};

json TensorEntry(const std::string& name, const Matrix& m) {
  return {{"name", name}, {"rows", m.rows()}, {"cols", m.cols()}};
}

void WriteValues(std::ofstream& out, const Matrix& m) {
  out.write(reinterpret_cast<const char*>(m.data()),
            static_cast<std::streamsize>(m.size() * sizeof(double)));
}

}  // namespace

void Checkpoint::Capture(const ParamSet& set) {
  for (const Parameter* p : set.All()) {
    params[p->name] = p->value;
    if (p->frozen) {
      frozen.insert(p->name);
    } else {
      frozen.erase(p->name);
    }
  }
}

void Checkpoint::Apply(ParamSet& set) const {
  for (Parameter* p : set.All()) {
    auto it = params.find(p->name);
    if (it == params.end()) throw MissingArtifactError("checkpoint lacks parameter " + p->name);
    if (!it->second.SameShape(p->value))
      throw FormatError("checkpoint parameter " + p->name + " has shape " +
                        it->second.ShapeString() + ", model expects " + p->value.ShapeString());
    p->value = it->second;
    p->frozen = frozen.count(p->name) > 0;
  }
}

std::map<std::string, bool> Checkpoint::PartitionFrozen() const {
  std::map<std::string, bool> out;
  for (const auto& [name, value] : params) {
    const std::string part = PartitionOf(name);
    const bool f = frozen.count(name) > 0;
    auto [it, fresh] = out.try_emplace(part, f);
    if (!fresh) it->second = it->second && f;
  }
  return out;
}

bool Checkpoint::operator==(const Checkpoint& o) const {
  return epoch == o.epoch && config_hash == o.config_hash && metadata == o.metadata &&
         params == o.params && frozen == o.frozen && optimizer == o.optimizer;
}

void SaveCheckpoint(const std::filesystem::path& path, const Checkpoint& c) {
  json header;
  header["epoch"] = c.epoch;
  header["config_hash"] = c.config_hash;
  header["metadata"] = c.metadata;
  header["frozen"] = c.frozen;
  header["partitions"] = c.PartitionFrozen();
  header["params"] = json::array();
  for (const auto& [name, m] : c.params) header["params"].push_back(TensorEntry(name, m));
  header["optimizer"] = json::array();
  for (const auto& [name, m] : c.optimizer) header["optimizer"].push_back(TensorEntry(name, m));
  const std::string text = header.dump();

  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(kMagic, 4);
    const uint32_t version = kCheckpointVersion;
    const uint64_t length = text.size();
    out.write(reinterpret_cast<const char*>(&version), sizeof(version));
    out.write(reinterpret_cast<const char*>(&length), sizeof(length));
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    for (const auto& [name, m] : c.params) WriteValues(out, m);
    for (const auto& [name, m] : c.optimizer) WriteValues(out, m);
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint LoadCheckpoint(const std::filesystem::path& path, const std::string& expected_hash,
                          std::vector<std::string>* warnings) {
  if (!std::filesystem::exists(path))
    throw MissingArtifactError("checkpoint not found: " + path.string());
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingArtifactError("cannot open checkpoint " + path.string());
  const uintmax_t file_size = std::filesystem::file_size(path);
  const std::string where = " in " + path.string();

  char magic[4];
  uint32_t version = 0;
  uint64_t length = 0;
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
    throw FormatError("not a checkpoint" + where);
  if (!in.read(reinterpret_cast<char*>(&version), sizeof(version)) ||
      !in.read(reinterpret_cast<char*>(&length), sizeof(length)))
    throw FormatError("truncated checkpoint header" + where);
  if (version != kCheckpointVersion)
    throw FormatError("checkpoint version " + std::to_string(version) + ", expected " +
                      std::to_string(kCheckpointVersion) + where);
  if (length > file_size) throw FormatError("truncated checkpoint header" + where);
  std::string text(length, '\0');
  if (!in.read(text.data(), static_cast<std::streamsize>(length)))
    throw FormatError("truncated checkpoint header" + where);

  Checkpoint c;
  std::vector<std::pair<std::string, Matrix>> params, optimizer;
  uint64_t payload = 0;
  try {
    const json header = json::parse(text);
    c.epoch = header.at("epoch").get<int>();
    c.config_hash = header.at("config_hash").get<std::string>();
    c.metadata = header.at("metadata");
    for (const auto& name : header.at("frozen")) c.frozen.insert(name.get<std::string>());
    auto read_list = [&](const json& list, std::vector<std::pair<std::string, Matrix>>& dst) {
      for (const auto& e : list) {
        const int rows = e.at("rows").get<int>(), cols = e.at("cols").get<int>();
        if (rows <= 0 || cols <= 0) throw FormatError("bad tensor shape" + where);
        dst.emplace_back(e.at("name").get<std::string>(), Matrix(rows, cols));
        payload += static_cast<uint64_t>(rows) * cols * sizeof(double);
      }
    };
    read_list(header.at("params"), params);
    read_list(header.at("optimizer"), optimizer);
  } catch (const json::exception& e) {
    throw FormatError(std::string("corrupt checkpoint header: ") + e.what() + where);
  }
  const uint64_t expected_size = 4 + sizeof(version) + sizeof(length) + length + payload;
  if (file_size != expected_size)
    throw FormatError("checkpoint size " + std::to_string(file_size) + " bytes, expected " +
                      std::to_string(expected_size) + where);
  for (auto* list : {&params, &optimizer})
    for (auto& [name, m] : *list)
      if (!in.read(reinterpret_cast<char*>(m.data()),
                   static_cast<std::streamsize>(m.size() * sizeof(double))))
        throw FormatError("truncated checkpoint payload" + where);
  for (auto& [name, m] : params) c.params.emplace(name, std::move(m));
  for (auto& [name, m] : optimizer) c.optimizer.emplace(name, std::move(m));

  if (!expected_hash.empty() && expected_hash != c.config_hash && warnings != nullptr)
    warnings->push_back("checkpoint " + path.string() + " was written under config " +
                        c.config_hash + ", current config is " + expected_hash);
  return c;
}

}  // namespace speechchain::train
