// pdnn/finetune.h

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

// Supervised fine-tuning by minibatch SGD with a validation-driven
// learning-rate schedule.
//
// Schedule strings:
//   "D:start:scale:decay_th,stop_th:max_epochs"
//       Train at `start` while the validation frame error keeps improving
//       by at least decay_th (absolute percentage points) per epoch.  Once
//       it improves by less, multiply the rate by `scale` after every
//       epoch, and stop as soon as an epoch improves by less than stop_th.
//       Training never runs past max_epochs.
//   "C:lr:epochs"
//       Constant rate for exactly `epochs` epochs.

#ifndef PDNN_FINETUNE_H_
#define PDNN_FINETUNE_H_

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "pdnn/network.h"
#include "pdnn/pfile-io.h"
#include "pdnn/random.h"

namespace pdnn {

struct LrSchedule {
  enum class Mode { kDecay, kConstant };

  Mode mode = Mode::kConstant;
  double start_lr = 0.08;
  double scale_by = 0.5;
  double decay_threshold = 0.0;
  double stop_threshold = 0.0;
  std::size_t max_epochs = 1;

  bool operator==(const LrSchedule &) const = default;
};

// ParseError whose position is the index of the offending ':'-separated
// field.
LrSchedule ParseLrSchedule(std::string_view text);
std::string FormatLrSchedule(const LrSchedule &schedule);

enum class TrainPhase { kInitial, kDecaying, kStopped };
std::string_view TrainPhaseName(TrainPhase phase);

struct TrainState {
  std::size_t epoch = 0;  // completed epochs
  double current_lr = 0.0;
  TrainPhase phase = TrainPhase::kInitial;
  std::vector<double> error_history;  // validation frame error % per epoch

  bool operator==(const TrainState &) const = default;
};

TrainState InitialTrainState(const LrSchedule &schedule);

// Advances the schedule after an epoch whose validation error has just
// been appended to error_history (and epoch incremented).  Updates
// current_lr and phase; returns false when training should stop.
bool NextLr(const LrSchedule &schedule, TrainState *state);

struct EpochStats {
  std::size_t epoch = 0;
  double lr = 0.0;
  double train_xent = 0.0;  // mean over frames
  double train_fer = 0.0;   // %, train-mode posteriors
  double valid_fer = 0.0;   // %
  double seconds = 0.0;
};

// `epoch <n> lr <lr> train-xent <x> train-fer <f>% valid-fer <v>%`
std::string FormatEpochLog(const EpochStats &stats);

// One pass over every partition of `data` in minibatches of `batch_size`
// (the last one may be short), each followed by params -= lr * grad.
// Fills the train statistics.  DataError naming the record on an
// out-of-range label; TrainingError when the loss stops being finite.
EpochStats SgdEpoch(Network *net, PartitionSource &data, double lr, std::size_t batch_size,
                    SeededRng &rng);

// Frame error % of infer-mode argmax posteriors over all of `data`.
// DomainError when `data` holds no frames.
double Evaluate(const Network &net, PartitionSource &data);

struct FinetuneOptions {
  LrSchedule schedule;
  std::size_t batch_size = 256;
  // Called after every epoch with the stats of that epoch and the state
  // the next epoch would start from.
  std::function<void(const EpochStats &, const TrainState &)> on_epoch;
};

// Runs epochs until the schedule stops, starting from `state` (a fresh
// InitialTrainState or one restored from a checkpoint).  Returns the final
// state.
TrainState Finetune(Network *net, PartitionSource &train, PartitionSource &valid,
                    const FinetuneOptions &options, SeededRng &rng, TrainState state);

}  // namespace pdnn

#endif  // PDNN_FINETUNE_H_
