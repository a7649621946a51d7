// src/train/optimizer.cc

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

#include "speechchain/train/optimizer.h"

#include <cmath>

#include "speechchain/errors.h"

namespace speechchain::train {

OptimizerKind ParseOptimizerKind(const std::string& name) {
  if (name == "adam") return OptimizerKind::kAdam;
  if (name == "radam") return OptimizerKind::kRAdam;
  throw ConfigError("unknown optimizer '" + name + "' (expected adam or radam)");
}

std::string OptimizerName(OptimizerKind kind) {
  return kind == OptimizerKind::kAdam ? "adam" : "radam";
}

Optimizer::Optimizer(const OptimizerConfig& config) : config_(config) {
  if (!(config.learning_rate > 0.0)) throw ContractError("learning rate must be positive");
  if (!(config.beta1 >= 0.0 && config.beta1 < 1.0 && config.beta2 >= 0.0 && config.beta2 < 1.0))
    throw ContractError("optimizer betas must lie in [0, 1)");
  if (config.clip_norm < 0.0) throw ContractError("clip_norm must be >= 0");
}

double Optimizer::Step(std::span<Parameter* const> params) {
  double sq = 0.0;
  for (const Parameter* p : params) {
    if (p->frozen) continue;
    for (double g : p->grad.values()) sq += g * g;
  }
  const double norm = std::sqrt(sq);
  double scale = 1.0;
  if (config_.clip_norm > 0.0 && norm > config_.clip_norm) scale = config_.clip_norm / norm;

  const double b1 = config_.beta1, b2 = config_.beta2;
  const double rho_inf = 2.0 / (1.0 - b2) - 1.0;
  for (Parameter* p : params) {
    if (p->frozen) continue;
    if (!p->grad.SameShape(p->value)) throw ShapeError("gradient shape of " + p->name);
    auto [it, fresh] = state_.try_emplace(p->name);
    Moments& s = it->second;
    if (fresh) {
      s.m = Matrix(p->value.rows(), p->value.cols());
      s.v = Matrix(p->value.rows(), p->value.cols());
    }
    ++s.step;
    const double bc1 = 1.0 - std::pow(b1, static_cast<double>(s.step));
    const double bc2 = 1.0 - std::pow(b2, static_cast<double>(s.step));
    double rect = 1.0;
    bool adaptive = true;
    if (config_.kind == OptimizerKind::kRAdam) {
      const double bt = std::pow(b2, static_cast<double>(s.step));
      const double rho = rho_inf - 2.0 * s.step * bt / (1.0 - bt);
      if (rho > 4.0) {
        rect = std::sqrt((rho - 4.0) * (rho - 2.0) * rho_inf /
                         ((rho_inf - 4.0) * (rho_inf - 2.0) * rho));
      } else {
        adaptive = false;
      }
    }
    const double lr = config_.learning_rate;
    for (int i = 0; i < p->value.size(); ++i) {
      const double g = p->grad[i] * scale;
      s.m[i] = b1 * s.m[i] + (1.0 - b1) * g;
      s.v[i] = b2 * s.v[i] + (1.0 - b2) * g * g;
      const double m_hat = s.m[i] / bc1;
      if (adaptive) {
        const double v_hat = s.v[i] / bc2;
        p->value[i] -= lr * rect * m_hat / (std::sqrt(v_hat) + config_.epsilon);
      } else {
        p->value[i] -= lr * m_hat;
      }
    }
  }
  return norm;
}

std::map<std::string, Matrix> Optimizer::ExportState() const {
  std::map<std::string, Matrix> out;
  for (const auto& [name, s] : state_) {
    out[name + "#m"] = s.m;
    out[name + "#v"] = s.v;
    out[name + "#t"] = Matrix::Scalar(static_cast<double>(s.step));
  }
  return out;
}

void Optimizer::ImportState(const std::map<std::string, Matrix>& state) {
  state_.clear();
  for (const auto& [key, value] : state) {
    const auto hash = key.rfind('#');
    if (hash == std::string::npos || hash + 2 != key.size())
      throw FormatError("bad optimizer state entry '" + key + "'");
    Moments& s = state_[key.substr(0, hash)];
    switch (key.back()) {
      case 'm': s.m = value; break;
      case 'v': s.v = value; break;
      case 't': s.step = static_cast<long>(value[0]); break;
      default: throw FormatError("bad optimizer state entry '" + key + "'");
    }
  }
}

}  // namespace speechchain::train
