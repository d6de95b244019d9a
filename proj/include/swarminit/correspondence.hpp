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

#include <Eigen/Core>
#include <optional>
#include <span>
#include <vector>

#include "swarminit/error.hpp"
#include "swarminit/geometry.hpp"
#include "swarminit/sdp_rotation.hpp"
#include "swarminit/simulator.hpp"

namespace swarminit {

struct ObservationRef {
  int epoch = 0;
  int observer = 0;
  int track = 0;

  friend bool operator==(const ObservationRef&, const ObservationRef&) = default;
  friend auto operator<=>(const ObservationRef&, const ObservationRef&) = default;
};

/// Mutual-consistency error of two observations made at the same epoch:
/// |W_i p_i + W_x p_x| with W the estimated body-to-world yaw of each
/// observer. Zero for a true mutual pair under exact rotations.
double MatchCost(const Rotation2& world_yaw_i, const Eigen::Vector3d& p_i,
                 const Rotation2& world_yaw_x, const Eigen::Vector3d& p_x);

/// Matching errors for one observer at one epoch. Rows are the observer's
/// observations, columns every observation made at that epoch; cells that
/// pair the observer with itself are +inf.
struct CostBlock {
  int epoch = 0;
  int observer = 0;
  std::vector<ObservationRef> rows;
  std::vector<ObservationRef> columns;
  Eigen::MatrixXd cost;
};

/// One block per (epoch, observer with at least one observation).
std::vector<CostBlock> BuildCostBlocks(std::span<const EpochRecord> records,
                                       const YawVector& rotations);

/// Gated assignment result for one cost block.
struct AssignmentSlice {
  std::vector<int> row_to_col;  // -1 when unmatched
  // Sum of matched costs plus `gate` per unmatched row.
  double total_cost = 0.0;
};

/// Minimum-cost one-to-one assignment in which a row may stay unmatched at a
/// price of `gate`; cells above the gate are never used.
AssignmentSlice Assign(const Eigen::MatrixXd& cost, double gate);

/// Binary correspondence of one drone's observations at one epoch to drone
/// identities (rows x N). Rows and columns each sum to at most one and the
/// owner's own column is always zero.
struct AssignmentMatrix {
  int owner = 0;
  int epoch = 0;
  std::vector<ObservationRef> rows;
  Eigen::MatrixXi entries;
  // Matching error of the accepted cell, per row (NaN when unmatched).
  std::vector<double> costs;

  /// Row index matched to drone `identity`, if any.
  std::optional<int> RowFor(int identity) const;
  /// Identity assigned to `row`, if any.
  std::optional<int> IdentityOf(int row) const;
};

struct Correspondences {
  double gate = 0.0;
  std::vector<CostBlock> blocks;
  std::vector<AssignmentSlice> slices;  // parallel to blocks
  std::vector<AssignmentMatrix> matrices;
};

/// Per-epoch gated Hungarian matching followed by a vote: every observation
/// collects the identity implied by its own row match and by each block that
/// matched it as a column; an identity wins on a strict majority.
Correspondences MatchObservations(std::span<const EpochRecord> records,
                                  const YawVector& rotations, double gate);

/// max(0.5, 5 sigma + 2 d_max theta_err) with
/// theta_err = sqrt(objective / n_epochs) / d_mean.
double DefaultGate(double sigma, const SdpSolution& solution,
                   std::span<const EpochRecord> records, double floor = 0.5);

struct GraphEdge {
  int from = 0;  // observer
  int to = 0;    // observed identity
  // Estimate of t_to - t_from in the world frame, averaged over every
  // accepted observation of `to` by `from`.
  Eigen::Vector3d vector = Eigen::Vector3d::Zero();
  double cost = 0.0;    // mean matching error
  double spread = 0.0;  // max pairwise distance between per-epoch estimates
  int support = 0;      // number of observations behind the edge
};

struct CorrespondenceGraph {
  int n_nodes = 0;
  std::vector<GraphEdge> edges;  // sorted by (from, to)

  const GraphEdge* Find(int from, int to) const;
};

struct TranslationRecovery {
  CorrespondenceGraph graph;
  // t^w_{i,t0}; empty for drones not reachable from drone 0.
  std::vector<std::optional<Eigen::Vector3d>> translations;
  // Max pairwise distance between path estimates that were averaged.
  std::vector<double> spread;
  std::vector<int> unreachable;
};

class DisconnectedGraph : public Error {
 public:
  explicit DisconnectedGraph(TranslationRecovery partial);
  const TranslationRecovery& partial() const { return partial_; }

 private:
  TranslationRecovery partial_;
};

/// Builds the identity graph and propagates translations from drone 0 in
/// depth-first order; each newly reached drone averages the estimates from
/// all previously reached drones that observed it.
/// Throws DisconnectedGraph (carrying the partial result) when some drone is
/// unreachable.
TranslationRecovery FuseAndRecover(const Correspondences& assignments,
                                   std::span<const EpochRecord> records,
                                   const YawVector& rotations);

}  // namespace swarminit
