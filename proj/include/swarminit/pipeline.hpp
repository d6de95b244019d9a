// Copyright 2026 The swarminit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "swarminit/baselines.hpp"
#include "swarminit/correspondence.hpp"
#include "swarminit/planner.hpp"
#include "swarminit/sdp_rotation.hpp"
#include "swarminit/simulator.hpp"

namespace swarminit {

struct PipelineParams {
  // Counted in epochs.
  int min_num_observations = 2;
  int max_epochs = 30;
  // m^2 per epoch; stop when objective <= tau * epochs and the rank
  // certificate holds.
  double tau = 1e-3;
  double rank_tolerance = 1e-6;
  double solver_tolerance = 1e-8;
  double gate_min = 0.5;
  // Drop observations with no plausible mutual partner before solving, and
  // re-solve on mutually matched observations after assignment.
  bool reject_outliers = true;
  // Spurious detections injected per epoch (robustness experiments).
  int false_positives_per_epoch = 0;
  // Wall-clock fields are zeroed when false so reports are byte-stable.
  bool record_wall_times = true;
};

struct BenchmarkParams {
  std::vector<int> n_drones{2, 3, 4, 5, 6, 7, 8};
  std::vector<double> sigmas{0.0, 0.02, 0.05, 0.10, 0.20};
  int trials = 20;
  // Epochs per scene; 0 means 2N.
  int epochs = 0;
  // Random displacement of every drone between epochs, meters.
  double move_distance = 2.0;
  std::uint64_t seed = 1;
  int threads = 1;
};

struct Config {
  WorldConfig world;
  PlannerParams planner;
  PipelineParams pipeline;
  BenchmarkParams benchmark;
};

/// Throws ErrorCode::kInvalidConfig.
void Validate(const Config& config);

struct IterationRecord {
  int epochs = 0;
  double objective = 0.0;
  int numeric_rank = 0;
  bool complete = false;
};

struct StageTimes {
  double scan = 0.0;
  double rotation = 0.0;
  double correspondence = 0.0;
  double planning = 0.0;
  double total = 0.0;
};

/// Agreement of the final assignment with simulator truth.
struct MatchStats {
  int true_observations = 0;
  int correct = 0;
  int wrong = 0;
  // Injected detections that were assigned an identity.
  int spurious_matched = 0;
};

struct RunReport {
  std::vector<IterationRecord> iterations;
  YawVector rotations;
  std::vector<std::optional<Eigen::Vector3d>> translations;
  CorrespondenceGraph graph;
  std::vector<int> unreachable;
  double yaw_mae = std::numeric_limits<double>::quiet_NaN();
  double translation_rmse = std::numeric_limits<double>::quiet_NaN();
  MatchStats matches;
  StageTimes times;
  int epochs = 0;
  // "converged" or "max_epochs_exceeded".
  std::string status;
  std::string reason;
};

/// Result of solving one batch of epochs: rotations, assignment and
/// translations. Exposed for replay and tests.
struct SolveOutcome {
  SdpSolution sdp;
  Correspondences correspondences;
  TranslationRecovery recovery;
  // Records actually used for the final solve.
  std::vector<EpochRecord> used;
  double rotation_time = 0.0;
  double correspondence_time = 0.0;
};

/// Removes observations that have no counterpart of matching range and
/// opposite height at the same epoch. `tolerance` is in meters.
EpochRecord DropNonMutual(const EpochRecord& record, double tolerance);

/// Rotation, assignment and translation stages on accumulated records.
SolveOutcome SolveEpochs(const std::vector<EpochRecord>& records, double sigma,
                         const PipelineParams& params);

/// Closed loop inside the simulator: scan, solve, plan, move. `trace`, when
/// given, receives every raw epoch record.
RunReport RunInit(const Config& config, std::vector<EpochRecord>* trace = nullptr);

/// Re-runs the solve stages on a recorded trace, one iteration per epoch
/// prefix. Truth metrics are left NaN.
RunReport Replay(const std::vector<EpochRecord>& trace, const Config& config);

struct MethodResult {
  double yaw_mae = 0.0;
  double solve_time = 0.0;
  bool converged = false;
  double objective = 0.0;
};

struct BenchmarkTrial {
  int n_drones = 0;
  double sigma = 0.0;
  int trial = 0;
  MethodResult sdp;
  MethodResult lm;
  MethodResult gn;
  int sdp_rank = 0;
};

struct BenchmarkRow {
  std::string method;
  int n_drones = 0;
  double sigma = 0.0;
  int trial = 0;
  double yaw_mae = 0.0;
  double solve_time = 0.0;
  bool converged = false;
};

/// Epoch records of one benchmark scene plus its truth.
struct BenchmarkScene {
  std::vector<EpochRecord> records;
  GroundTruth truth;
  // Per epoch, observer and track: the observed drone.
  std::vector<std::vector<std::vector<int>>> identities;
};

BenchmarkScene MakeBenchmarkScene(const Config& config, int n_drones, double sigma,
                                  std::uint64_t seed);

/// Every (n_drones, sigma, trial) cell of the grid, in grid order.
std::vector<BenchmarkTrial> RunBenchmarkTrials(const Config& config);

/// Three rows (SDP, LM, GN) per trial.
std::vector<BenchmarkRow> ToRows(const std::vector<BenchmarkTrial>& trials);

}  // namespace swarminit
