// tools/speechchain_main.cc

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

// speechchain: corpus generation, pretraining, joint training, evaluation
// and the perplexity figure for one experiment directory.
//
// Exit codes: 0 success, 2 config error, 3 missing artifact, 4 runtime failure.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "speechchain/app/experiment.h"
#include "speechchain/errors.h"
#include "speechchain/metrics/metrics.h"

namespace {

using speechchain::train::ExperimentConfig;

constexpr int kConfigExit = 2;
constexpr int kMissingExit = 3;
constexpr int kRuntimeExit = 4;

ExperimentConfig LoadConfig(const std::string& path, const std::string& output_dir) {
  ExperimentConfig c = path.empty() ? ExperimentConfig{}
                                    : speechchain::train::LoadExperimentConfig(path);
  if (!output_dir.empty()) c.output_dir = output_dir;
  c.Validate();
  return c;
}

int Run(int argc, char** argv) {
  CLI::App app{"Semi-supervised joint TTS/ASR training on a synthetic corpus"};
  app.require_subcommand(0, 1);
  std::string config_path, output_dir;
  bool print_config = false;
  app.add_option("-c,--config", config_path, "Experiment config (JSON); defaults apply if omitted");
  app.add_option("-o,--output-dir", output_dir, "Override the config's output_dir");
  app.add_flag("--print-config", print_config, "Print the effective config and exit");

  auto* gen = app.add_subcommand("gen-corpus", "Render the synthetic corpus");
  bool force = false;
  gen->add_flag("--force", force, "Overwrite an existing corpus");

  auto* pre = app.add_subcommand("pretrain", "Pretrain one model on the paired data");
  std::string model;
  pre->add_option("model", model, "asr, tts or speaker")
      ->required()
      ->check(CLI::IsMember({"asr", "tts", "speaker"}));

  auto* joint = app.add_subcommand("joint-train", "Joint training from the pretrained models");
  bool no_sc = false, no_stepwise = false;
  joint->add_flag("--no-speaker-consistency", no_sc, "Drop the speaker-consistency term");
  joint->add_flag("--no-stepwise", no_stepwise, "Skip phase A and train both models at once");

  auto* eval = app.add_subcommand("eval", "Evaluate a pretrained or jointly trained model");
  std::string eval_model = "proposed", split = "test";
  std::vector<std::string> checkpoints;
  eval->add_option("--model", eval_model,
                   "pretrained, proposed, no-speaker-consistency, no-stepwise or conventional");
  eval->add_option("--checkpoint", checkpoints, "Explicit checkpoint files (override --model)");
  eval->add_option("--split", split, "test or validation");

  auto* plot = app.add_subcommand("plot-perplexity", "Write the perplexity figure and CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigExit;
  }

  ExperimentConfig config = LoadConfig(config_path, output_dir);
  if (*joint) {
    config.train.use_speaker_consistency = !no_sc;
    config.train.use_stepwise = !no_stepwise;
  }
  if (print_config) {
    std::cout << speechchain::train::ToJson(config).dump(2) << "\n";
    return 0;
  }
  if (app.get_subcommands().empty()) {
    std::cerr << app.help();
    return kConfigExit;
  }

  namespace app_ns = speechchain::app;
  app_ns::AdvisoryLock lock(config.output_dir);
  app_ns::WriteConfig(config);
  if (*gen) {
    auto split_data = app_ns::GenerateCorpus(config, force);
    std::cout << "corpus: " << split_data.paired.size() << " paired, "
              << split_data.unpaired.size() << " unpaired, " << split_data.validation.size()
              << " validation, " << split_data.test.size() << " test\n";
  } else if (*pre) {
    auto r = app_ns::Pretrain(config, model);
    std::cout << model << ": " << r.valid_loss.size() << " epochs, best " << r.best_epoch
              << ", valid loss " << r.valid_loss[r.best_epoch];
    if (model == "speaker") std::cout << ", valid accuracy " << r.valid_accuracy;
    std::cout << "\n";
  } else if (*joint) {
    auto r = app_ns::JointTrain(config);
    std::cout << r.method << ": phase A " << r.phase_a_epochs << " epochs"
              << (r.phase_a_reused ? " (reused)" : "") << ", phase B " << r.phase_b_epochs
              << " epochs, valid cosine " << r.final_probe.cosine << ", valid perplexity "
              << r.final_probe.perplexity << "\n";
  } else if (*eval) {
    std::vector<std::filesystem::path> paths(checkpoints.begin(), checkpoints.end());
    const std::string label = checkpoints.empty() ? eval_model : "custom";
    if (paths.empty()) paths = app_ns::ModelCheckpoints(config, eval_model);
    auto ev = app_ns::EvaluateCheckpoints(config, paths, split, label);
    std::cout << speechchain::metrics::FormatRow(label, ev.report) << "\n"
              << "other-speaker reference: MCD " << ev.mcd_other_speaker << " dB, F0 RMSE "
              << ev.f0_rmse_other_speaker << "\n";
  } else if (*plot) {
    std::vector<std::string> warnings;
    auto series = app_ns::PlotPerplexity(config, &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
    const double baseline = series.back().perplexity.front();
    for (size_t i = 0; i + 1 < series.size(); ++i)
      std::cout << series[i].name << ": first epoch below ground truth "
                << app_ns::FirstCrossing(series[i], baseline) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return Run(argc, argv);
  } catch (const speechchain::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigExit;
  } catch (const speechchain::MissingArtifactError& e) {
    std::cerr << "missing artifact: " << e.what() << "\n";
    return kMissingExit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeExit;
  }
}
