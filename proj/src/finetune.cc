// src/finetune.cc

// Copyright 2026  The pdnn-cpp Authors

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


#include "pdnn/finetune.h"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>

#include "pdnn/errors.h"

namespace pdnn {

namespace {

std::vector<std::string_view> Split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t end = text.find(sep, start);
    out.push_back(text.substr(start, end == std::string_view::npos ? end : end - start));
    if (end == std::string_view::npos) return out;
    start = end + 1;
  }
}

double ParseReal(std::string_view token, std::size_t field) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (token.empty() || ec != std::errc() || ptr != token.data() + token.size() ||
      !std::isfinite(value))
    throw ParseError("lrate: field " + std::to_string(field) + " ('" + std::string(token) +
                         "') is not a number",
                     field);
  return value;
}

std::size_t ParseCount(std::string_view token, std::size_t field) {
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (token.empty() || ec != std::errc() || ptr != token.data() + token.size() || value == 0)
    throw ParseError("lrate: field " + std::to_string(field) + " ('" + std::string(token) +
                         "') is not a positive epoch count",
                     field);
  return value;
}

void Require(bool ok, std::size_t field, const std::string &what) {
  if (!ok) throw ParseError("lrate: field " + std::to_string(field) + ": " + what, field);
}

std::string Fmt(const char *format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

std::size_t ArgMax(std::span<const double> row) {
  return static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
}

void CheckLabels(const std::vector<FrameRecord> &records, std::size_t num_classes) {
  for (const auto &r : records)
    if (r.label >= num_classes)
      throw DataError("label " + std::to_string(r.label) + " of utterance " +
                      std::to_string(r.utt_index) + " frame " + std::to_string(r.frame_index) +
                      " is out of range for " + std::to_string(num_classes) + " targets");
}

}  // namespace

LrSchedule ParseLrSchedule(std::string_view text) {
  const auto fields = Split(text, ':');
  LrSchedule s;
  if (fields[0] == "C") {
    Require(fields.size() == 3, std::min<std::size_t>(fields.size(), 3),
            "constant schedule is C:lr:epochs");
    s.mode = LrSchedule::Mode::kConstant;
    s.start_lr = ParseReal(fields[1], 1);
    Require(s.start_lr > 0, 1, "learning rate must be positive");
    s.max_epochs = ParseCount(fields[2], 2);
    return s;
  }
  if (fields[0] != "D")
    throw ParseError("lrate: field 0 must be 'D' or 'C', got '" + std::string(fields[0]) + "'", 0);
  Require(fields.size() == 5, std::min<std::size_t>(fields.size(), 5),
          "decay schedule is D:start:scale:decay_th,stop_th:max_epochs");
  s.mode = LrSchedule::Mode::kDecay;
  s.start_lr = ParseReal(fields[1], 1);
  Require(s.start_lr > 0, 1, "learning rate must be positive");
  s.scale_by = ParseReal(fields[2], 2);
  Require(s.scale_by > 0 && s.scale_by < 1, 2, "scale factor must lie in (0, 1)");
  const auto thresholds = Split(fields[3], ',');
  Require(thresholds.size() == 2, 3, "expected decay_th,stop_th");
  s.decay_threshold = ParseReal(thresholds[0], 3);
  s.stop_threshold = ParseReal(thresholds[1], 3);
  Require(s.decay_threshold >= 0 && s.stop_threshold >= 0, 3, "thresholds must be >= 0");
  s.max_epochs = ParseCount(fields[4], 4);
  return s;
}

std::string FormatLrSchedule(const LrSchedule &s) {
  auto g = [](double v) { return Fmt("%.17g", v); };
  if (s.mode == LrSchedule::Mode::kConstant)
    return "C:" + g(s.start_lr) + ":" + std::to_string(s.max_epochs);
  return "D:" + g(s.start_lr) + ":" + g(s.scale_by) + ":" + g(s.decay_threshold) + "," +
         g(s.stop_threshold) + ":" + std::to_string(s.max_epochs);
}

std::string_view TrainPhaseName(TrainPhase phase) {
  switch (phase) {
    case TrainPhase::kInitial: return "initial";
    case TrainPhase::kDecaying: return "decaying";
    case TrainPhase::kStopped: return "stopped";
  }
  return "?";
}

TrainState InitialTrainState(const LrSchedule &schedule) {
  TrainState state;
  state.current_lr = schedule.start_lr;
  return state;
}

bool NextLr(const LrSchedule &schedule, TrainState *state) {
  if (state->phase == TrainPhase::kStopped) return false;
  if (state->epoch >= schedule.max_epochs) {
    state->phase = TrainPhase::kStopped;
    return false;
  }
  if (schedule.mode == LrSchedule::Mode::kConstant) return true;

  const auto &h = state->error_history;
  const double improvement = h.size() < 2 ? std::numeric_limits<double>::infinity()
                                          : h[h.size() - 2] - h.back();
  if (state->phase == TrainPhase::kInitial) {
    if (improvement < schedule.decay_threshold) {
      state->phase = TrainPhase::kDecaying;
      state->current_lr *= schedule.scale_by;
    }
    return true;
  }
  if (improvement < schedule.stop_threshold) {
    state->phase = TrainPhase::kStopped;
    return false;
  }
  state->current_lr *= schedule.scale_by;
  return true;
}

std::string FormatEpochLog(const EpochStats &s) {
  return "epoch " + std::to_string(s.epoch) + " lr " + Fmt("%.6g", s.lr) + " train-xent " +
         Fmt("%.6f", s.train_xent) + " train-fer " + Fmt("%.4f", s.train_fer) + "% valid-fer " +
         Fmt("%.4f", s.valid_fer) + "%";
}

EpochStats SgdEpoch(Network *net, PartitionSource &data, double lr, std::size_t batch_size,
                    SeededRng &rng) {
  if (batch_size == 0) throw DomainError("batch size must be positive");
  if (data.feature_dim() != net->input_dim())
    throw DataError("training data has dimension " + std::to_string(data.feature_dim()) +
                    ", network input is " + std::to_string(net->input_dim()));
  const auto start = std::chrono::steady_clock::now();
  EpochStats stats;
  stats.lr = lr;
  double xent = 0.0;
  std::size_t errors = 0, frames = 0;
  data.Rewind();
  while (auto part = data.Next(rng)) {
    CheckLabels(part->records, net->output_dim());
    for (std::size_t b = 0; b < part->records.size(); b += batch_size) {
      const std::size_t n = std::min(batch_size, part->records.size() - b);
      LabeledBatch batch = MakeBatch(std::span(part->records).subspan(b, n));
      ForwardPass pass = Forward(*net, batch.features, Mode::kTrain, rng);
      Gradients grads = Backward(*net, pass, batch.labels);
      if (!std::isfinite(grads.loss))
        throw TrainingError("training cross-entropy is not finite (lr " + Fmt("%g", lr) + ")");
      for (std::size_t i = 0; i < n; i++)
        if (ArgMax(pass.output().Row(i)) != batch.labels[i]) errors++;
      xent += grads.loss * static_cast<double>(n);
      frames += n;
      auto params = net->ParameterBlocks();
      auto blocks = grads.Blocks();
      for (std::size_t k = 0; k < params.size(); k++) AddScaled(-lr, blocks[k], params[k]);
    }
  }
  if (frames > 0) {
    stats.train_xent = xent / static_cast<double>(frames);
    stats.train_fer = 100.0 * static_cast<double>(errors) / static_cast<double>(frames);
  }
  stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return stats;
}

double Evaluate(const Network &net, PartitionSource &data) {
  if (data.num_frames() == 0) throw DomainError("cannot evaluate on data with no frames");
  if (data.feature_dim() != net.input_dim())
    throw DataError("evaluation data has dimension " + std::to_string(data.feature_dim()) +
                    ", network input is " + std::to_string(net.input_dim()));
  // Record order does not matter here; a private rng keeps the caller's
  // sequence untouched.
  SeededRng rng(0);
  std::size_t errors = 0, frames = 0;
  constexpr std::size_t kChunk = 1024;
  data.Rewind();
  while (auto part = data.Next(rng)) {
    for (std::size_t b = 0; b < part->records.size(); b += kChunk) {
      const std::size_t n = std::min(kChunk, part->records.size() - b);
      LabeledBatch batch = MakeBatch(std::span(part->records).subspan(b, n));
      Matrix posteriors = Infer(net, batch.features);
      for (std::size_t i = 0; i < n; i++)
        if (ArgMax(posteriors.Row(i)) != batch.labels[i]) errors++;
      frames += n;
    }
  }
  if (frames == 0) throw DomainError("cannot evaluate on data with no frames");
  return 100.0 * static_cast<double>(errors) / static_cast<double>(frames);
}

TrainState Finetune(Network *net, PartitionSource &train, PartitionSource &valid,
                    const FinetuneOptions &options, SeededRng &rng, TrainState state) {
  if (!net->has_softmax()) throw DomainError("fine-tuning needs a network ending in softmax");
  if (valid.feature_dim() != net->input_dim())
    throw DataError("validation data has dimension " + std::to_string(valid.feature_dim()) +
                    ", network input is " + std::to_string(net->input_dim()));
  while (state.phase != TrainPhase::kStopped && state.epoch < options.schedule.max_epochs) {
    EpochStats stats = SgdEpoch(net, train, state.current_lr, options.batch_size, rng);
    stats.valid_fer = Evaluate(*net, valid);
    stats.epoch = ++state.epoch;
    state.error_history.push_back(stats.valid_fer);
    NextLr(options.schedule, &state);
    if (options.on_epoch) options.on_epoch(stats, state);
  }
  return state;
}

}  // namespace pdnn
