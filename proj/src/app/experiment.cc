// src/app/experiment.cc

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

#include "speechchain/app/experiment.h"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "speechchain/corpus/io.h"
#include "speechchain/errors.h"

namespace speechchain::app {

namespace fs = std::filesystem;
using nlohmann::json;
using train::Checkpoint;
using train::ExperimentConfig;

namespace {

// Hash that ignores the ablation flags, so every method of one experiment
// accepts the same pretrained and phase A checkpoints.
std::string BaseHash(const ExperimentConfig& config) {
  ExperimentConfig c = config;
  c.train.use_speaker_consistency = true;
  c.train.use_stepwise = true;
  return train::ConfigHash(c);
}

Checkpoint LoadChecked(const fs::path& path, const ExperimentConfig& config) {
  std::vector<std::string> warnings;
  Checkpoint c = train::LoadCheckpoint(path, BaseHash(config), &warnings);
  for (const auto& w : warnings) std::cerr << "warning: " << path.string() << ": " << w << "\n";
  return c;
}

void WriteText(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string ReadText(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingArtifactError("missing " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void SaveModelCheckpoint(const fs::path& path, const ExperimentConfig& config,
                         std::vector<const ParamSet*> sets, json metadata,
                         const std::map<std::string, Matrix>& optimizer, int epoch) {
  Checkpoint c;
  for (const ParamSet* s : sets) c.Capture(*s);
  c.config_hash = BaseHash(config);
  c.metadata = std::move(metadata);
  c.optimizer = optimizer;
  c.epoch = epoch;
  fs::create_directories(path.parent_path());
  train::SaveCheckpoint(path, c);
}

void WriteCurve(const fs::path& path, const train::JointState& s) {
  std::ostringstream out;
  out << std::setprecision(17) << "epoch,phase,perplexity,human_baseline\n";
  for (const auto& p : s.curve)
    out << p.epoch << "," << p.phase << "," << p.perplexity << "," << s.human_baseline << "\n";
  WriteText(path, out.str());
}

}  // namespace

AdvisoryLock::AdvisoryLock(const fs::path& dir) : path_(dir / ".lock") {
  fs::create_directories(dir);
  const int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
  if (fd < 0)
    throw std::runtime_error("experiment directory is in use (remove " + path_.string() +
                             " if no other command is running)");
  const std::string pid = std::to_string(::getpid()) + "\n";
  if (::write(fd, pid.data(), pid.size()) < 0) {
    // The lock holds without the pid; it only helps humans.
  }
  ::close(fd);
}

AdvisoryLock::~AdvisoryLock() {
  std::error_code ec;
  fs::remove(path_, ec);
}

std::string MethodName(bool use_speaker_consistency, bool use_stepwise) {
  if (use_speaker_consistency && use_stepwise) return "proposed";
  if (use_stepwise) return "no-speaker-consistency";
  if (use_speaker_consistency) return "no-stepwise";
  return "conventional";
}

void WriteConfig(const ExperimentConfig& config) {
  WriteText(fs::path(config.output_dir) / "config.json", ToJson(config).dump(2) + "\n");
}

corpus::CorpusSplit GenerateCorpus(const ExperimentConfig& config, bool force) {
  const ExperimentDir dir(config.output_dir);
  const fs::path out = dir.Corpus();
  if (fs::exists(out) && !fs::is_empty(out)) {
    if (!force)
      throw std::runtime_error(out.string() + " is not empty; pass --force to overwrite");
    fs::remove_all(out);
  }
  corpus::CorpusSplit split = corpus::MakeSplits(config.corpus);
  corpus::WriteCorpus(out, split);
  return split;
}

train::PretrainResult Pretrain(const ExperimentConfig& config, const std::string& model) {
  if (model != "speaker" && model != "asr" && model != "tts")
    throw ConfigError("unknown model to pretrain: " + model);
  const ExperimentDir dir(config.output_dir);
  const corpus::CorpusSplit data = corpus::ReadCorpus(dir.Corpus());
  train::Models m(config);
  train::TrainingLog log;
  train::PretrainResult r;
  const ParamSet* params = nullptr;
  if (model == "speaker") {
    r = train::PretrainSpeaker(m.speaker, data, config.train, &log);
    params = &m.speaker.params();
  } else if (model == "asr") {
    r = train::PretrainAsr(m.asr, data, config.train, &log);
    params = &m.asr.params();
  } else {
    LoadChecked(dir.Pretrained("speaker"), config).Apply(m.speaker.params());
    m.speaker.SetFrozen(true);
    r = train::PretrainTts(m.tts, m.speaker, data, config.train, &log);
    params = &m.tts.params();
  }
  json meta = {{"model", model},
               {"best_epoch", r.best_epoch},
               {"epochs", r.valid_loss.size()},
               {"valid_loss", r.valid_loss.empty() ? 0.0 : r.valid_loss[r.best_epoch]}};
  if (model == "speaker") meta["valid_accuracy"] = r.valid_accuracy;
  SaveModelCheckpoint(dir.Pretrained(model), config, {params}, meta, {},
                      static_cast<int>(r.valid_loss.size()));
  log.WriteCsv(dir.root() / "pretrain" / (model + ".csv"));
  return r;
}

JointRun JointTrain(const ExperimentConfig& config) {
  const ExperimentDir dir(config.output_dir);
  const corpus::CorpusSplit data = corpus::ReadCorpus(dir.Corpus());
  train::Models m(config);
  LoadChecked(dir.Pretrained("speaker"), config).Apply(m.speaker.params());
  LoadChecked(dir.Pretrained("tts"), config).Apply(m.tts.params());
  const Checkpoint asr_ckpt = LoadChecked(dir.Pretrained("asr"), config);
  asr_ckpt.Apply(m.asr.params());
  AsrModel pretrained(config.asr, 0);
  asr_ckpt.Apply(pretrained.params());
  pretrained.params().SetFrozen("asr", true);

  JointRun run;
  run.method = MethodName(config.train.use_speaker_consistency, config.train.use_stepwise);
  const fs::path run_dir = dir.Joint(run.method);
  train::TrainingLog log;
  train::JointTrainer trainer(m, data, config.train, pretrained, &log);
  std::string phase_a_log;
  if (config.train.use_stepwise) {
    const fs::path shared = dir.PhaseA();
    const fs::path shared_log = dir.root() / "joint" / "phase_a.csv";
    bool reuse = false;
    if (fs::exists(shared) && fs::exists(shared_log)) {
      Checkpoint c = train::LoadCheckpoint(shared);
      if (c.config_hash == BaseHash(config)) {
        c.Apply(m.asr.params());
        train::JointState s = train::JointStateFromJson(c.metadata.at("state"));
        s.optimizer = c.optimizer;
        trainer.Restore(s);
        reuse = true;
      }
    }
    if (!reuse) {
      trainer.RunPhaseA();
      const train::JointState s = trainer.State();
      SaveModelCheckpoint(shared, config, {&m.asr.params()}, {{"state", train::ToJson(s)}},
                          s.optimizer, s.epoch);
      log.WriteCsv(shared_log);
      log = train::TrainingLog();
    }
    phase_a_log = ReadText(shared_log);
    run.phase_a_reused = reuse;
  }
  trainer.RunPhaseB();
  run.state = trainer.State();
  run.phase_a_epochs = run.state.phase_a_epochs;
  run.phase_b_epochs = run.state.phase_b_epochs;
  run.final_probe = trainer.Probe();

  json meta = {{"method", run.method},
               {"use_speaker_consistency", config.train.use_speaker_consistency},
               {"use_stepwise", config.train.use_stepwise},
               {"state", train::ToJson(run.state)}};
  SaveModelCheckpoint(run_dir / "final.ckpt", config,
                      {&m.asr.params(), &m.tts.params(), &m.speaker.params()}, meta,
                      run.state.optimizer, run.state.epoch);
  // The log holds phase A rows (possibly from the shared run) then phase B.
  log.WriteCsv(run_dir / "log.csv");
  if (!phase_a_log.empty()) {
    std::string b = ReadText(run_dir / "log.csv");
    b = b.substr(b.find('\n') + 1);
    WriteText(run_dir / "log.csv", phase_a_log + b);
  }
  WriteCurve(run_dir / "curve.csv", run.state);
  json state = train::ToJson(run.state);
  state["final_probe"] = {{"cycle", run.final_probe.cycle},
                          {"cosine", run.final_probe.cosine},
                          {"perplexity", run.final_probe.perplexity}};
  WriteText(run_dir / "state.json", state.dump(2) + "\n");
  return run;
}

std::vector<fs::path> ModelCheckpoints(const ExperimentConfig& config, const std::string& model) {
  const ExperimentDir dir(config.output_dir);
  if (model == "pretrained")
    return {dir.Pretrained("speaker"), dir.Pretrained("asr"), dir.Pretrained("tts")};
  return {dir.Joint(model) / "final.ckpt"};
}

train::Evaluation EvaluateCheckpoints(const ExperimentConfig& config,
                                      const std::vector<fs::path>& checkpoints,
                                      const std::string& split, const std::string& label) {
  const ExperimentDir dir(config.output_dir);
  const corpus::CorpusSplit data = corpus::ReadCorpus(dir.Corpus());
  const std::vector<corpus::Utterance>* items = nullptr;
  const std::vector<corpus::Utterance>* held_out = nullptr;
  if (split == "test") {
    items = &data.test;
    held_out = &data.validation;
  } else if (split == "validation") {
    items = &data.validation;
    held_out = &data.test;
  } else {
    throw MissingArtifactError("split not found: " + split);
  }
  Checkpoint merged;
  for (const fs::path& p : checkpoints) {
    Checkpoint c = LoadChecked(p, config);
    for (auto& [name, value] : c.params) merged.params[name] = std::move(value);
    merged.frozen.insert(c.frozen.begin(), c.frozen.end());
  }
  train::Models m(config);
  merged.Apply(m.asr.params());
  merged.Apply(m.tts.params());
  merged.Apply(m.speaker.params());
  train::Evaluation ev = train::Evaluate(m, *items, *held_out, config.corpus.n_speakers,
                                         config.train.decode_max_len, split);
  ev.report.config_hash = BaseHash(config);
  json j = metrics::ToJson(ev.report);
  j["label"] = label;
  j["mcd_other_speaker"] = ev.mcd_other_speaker;
  j["f0_rmse_other_speaker"] = ev.f0_rmse_other_speaker;
  WriteText(dir.Eval() / (label + "_" + split + ".json"), j.dump(2) + "\n");
  return ev;
}

PerplexitySeries ReadCurve(const fs::path& csv, const std::string& name) {
  std::istringstream in(ReadText(csv));
  std::string line;
  std::getline(in, line);
  if (line.rfind("epoch,phase,perplexity", 0) != 0)
    throw FormatError(csv.string() + ": unexpected header");
  PerplexitySeries s;
  s.name = name;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string epoch, phase, ppl;
    if (!std::getline(row, epoch, ',') || !std::getline(row, phase, ',') ||
        !std::getline(row, ppl, ','))
      throw FormatError(csv.string() + ": short row");
    s.epochs.push_back(std::stoi(epoch));
    s.perplexity.push_back(std::stod(ppl));
  }
  return s;
}

int FirstCrossing(const PerplexitySeries& s, double baseline) {
  for (size_t i = 0; i < s.epochs.size(); ++i)
    if (s.perplexity[i] < baseline) return s.epochs[i];
  return -1;
}

namespace {

std::string Svg(const std::vector<PerplexitySeries>& series, const char* const* colors) {
  const double w = 640, h = 400, left = 60, right = 170, top = 30, bottom = 50;
  int max_epoch = 1;
  double lo = 1e300, hi = -1e300;
  for (const auto& s : series) {
    for (int e : s.epochs) max_epoch = std::max(max_epoch, e);
    for (double p : s.perplexity) {
      lo = std::min(lo, p);
      hi = std::max(hi, p);
    }
  }
  if (!(hi > lo)) {
    hi = lo + 1.0;
    lo -= 1.0;
  }
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;
  auto x = [&](double e) { return left + (w - left - right) * e / max_epoch; };
  auto y = [&](double p) { return top + (h - top - bottom) * (hi - p) / (hi - lo); };
  std::ostringstream o;
  o << std::fixed << std::setprecision(2);
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<line x1=\"" << left << "\" y1=\"" << h - bottom << "\" x2=\"" << w - right << "\" y2=\""
    << h - bottom << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
    << h - bottom << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double p = lo + (hi - lo) * i / 4.0;
    o << "<text x=\"" << left - 6 << "\" y=\"" << y(p) + 4 << "\" text-anchor=\"end\">" << p
      << "</text>\n";
    const int e = static_cast<int>(std::lround(max_epoch * i / 4.0));
    o << "<text x=\"" << x(e) << "\" y=\"" << h - bottom + 16 << "\" text-anchor=\"middle\">" << e
      << "</text>\n";
  }
  o << "<text x=\"" << (left + w - right) / 2 << "\" y=\"" << h - 12
    << "\" text-anchor=\"middle\">epoch</text>\n";
  o << "<text x=\"16\" y=\"" << (top + h - bottom) / 2 << "\" transform=\"rotate(-90 16 "
    << (top + h - bottom) / 2 << ")\" text-anchor=\"middle\">perplexity</text>\n";
  for (size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    o << "<polyline fill=\"none\" stroke=\"" << colors[k] << "\" stroke-width=\"2\" points=\"";
    for (size_t i = 0; i < s.epochs.size(); ++i)
      o << x(s.epochs[i]) << "," << y(s.perplexity[i]) << " ";
    o << "\"/>\n";
    const double ly = top + 18.0 * k + 6;
    o << "<line x1=\"" << w - right + 10 << "\" y1=\"" << ly << "\" x2=\"" << w - right + 34
      << "\" y2=\"" << ly << "\" stroke=\"" << colors[k] << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << w - right + 40 << "\" y=\"" << ly + 4 << "\">" << s.name << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace

std::vector<PerplexitySeries> PlotPerplexity(const ExperimentConfig& config,
                                             std::vector<std::string>* warnings) {
  const ExperimentDir dir(config.output_dir);
  auto find_run = [&](std::initializer_list<const char*> methods) -> std::string {
    for (const char* m : methods)
      if (fs::exists(dir.Joint(m) / "curve.csv")) return m;
    return "";
  };
  struct Wanted {
    const char* label;
    std::string method;
  };
  const Wanted wanted[] = {
      {"with step-wise", find_run({"proposed", "no-speaker-consistency"})},
      {"without step-wise", find_run({"no-stepwise", "conventional"})},
  };
  std::vector<PerplexitySeries> series;
  double baseline = 0.0;
  bool have_baseline = false;
  for (const Wanted& w : wanted) {
    if (w.method.empty()) {
      if (warnings != nullptr) warnings->push_back(std::string("no run for series '") + w.label + "'");
      continue;
    }
    series.push_back(ReadCurve(dir.Joint(w.method) / "curve.csv",
                               std::string(w.label) + " (" + w.method + ")"));
    if (!have_baseline) {
      baseline = json::parse(ReadText(dir.Joint(w.method) / "state.json")).at("human_baseline");
      have_baseline = true;
    }
  }
  if (series.empty()) throw MissingArtifactError("no joint-training runs under " + dir.root().string());
  PerplexitySeries human{"ground-truth speech", {}, {}};
  int max_epoch = 0;
  for (const auto& s : series) max_epoch = std::max(max_epoch, s.epochs.back());
  for (int e = 0; e <= max_epoch; ++e) {
    human.epochs.push_back(e);
    human.perplexity.push_back(baseline);
  }
  series.push_back(human);

  std::ostringstream csv;
  csv << std::setprecision(17) << "series,epoch,perplexity\n";
  for (const auto& s : series)
    for (size_t i = 0; i < s.epochs.size(); ++i)
      csv << "\"" << s.name << "\"," << s.epochs[i] << "," << s.perplexity[i] << "\n";
  WriteText(dir.Figures() / "perplexity.csv", csv.str());
  // Blue with step-wise, orange without, black ground truth.
  static const char* const kColors[] = {"#1f77b4", "#ff7f0e", "#000000"};
  std::vector<const char*> colors;
  for (size_t i = 0; i < 2; ++i)
    if (!wanted[i].method.empty()) colors.push_back(kColors[i]);
  colors.push_back(kColors[2]);
  WriteText(dir.Figures() / "perplexity.svg", Svg(series, colors.data()));
  return series;
}

}  // namespace speechchain::app
