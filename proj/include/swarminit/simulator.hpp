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
#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "swarminit/geometry.hpp"

namespace swarminit {

struct Box {
  Eigen::Vector3d min{-5.0, -5.0, 1.0};
  Eigen::Vector3d max{5.0, 5.0, 2.0};
};

/// Vertical cylinder, described by its footprint.
struct Circle {
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  double radius = 0.0;
};

enum class Formation { kRandom, kRotationSymmetric };

struct WorldConfig {
  int n_drones = 4;
  Box arena;
  double min_spawn_separation = 1.2;
  double sensor_range = 8.0;
  double obs_noise_sigma = 0.0;
  double odom_yaw_drift_sigma = 0.0;
  // Per-move odometry position noise (meters, per axis). Zero by default.
  double odom_position_sigma = 0.0;
  std::uint64_t seed = 0;
  std::vector<Circle> obstacles;
  Formation formation = Formation::kRandom;
  // Circle radius for Formation::kRotationSymmetric.
  double formation_radius = 3.0;
};

/// Throws ErrorCode::kInvalidConfig.
void Validate(const WorldConfig& config);

/// One anonymous detection. `vector` is expressed in the observer's body
/// frame at the epoch; `track` is a per-epoch index with no identity meaning.
struct Observation {
  int observer = 0;
  int epoch = 0;
  Eigen::Vector3d vector = Eigen::Vector3d::Zero();
  int track = 0;
};

/// Each drone's yaw and position relative to its own initial frame, as
/// reported by its (possibly drifting) odometry.
struct Odometry {
  YawVector yaws;
  std::vector<Eigen::Vector3d> positions;
};

struct EpochRecord {
  int epoch = 0;
  Odometry odometry;
  // Sorted by observer, then track.
  std::vector<Observation> observations;

  int n_drones() const { return static_cast<int>(odometry.yaws.size()); }
  std::vector<Observation> ObservationsOf(int observer) const;
  int CountFor(int observer) const;
};

struct GroundTruth {
  // World frame is drone 0's frame at t0, so poses_t0[0] is identity.
  std::vector<Pose> poses_t0;

  YawVector yaws() const;
  std::vector<Eigen::Vector3d> translations() const;
};

/// Simulated swarm. Single owner; not thread-safe.
class World {
 public:
  const WorldConfig& config() const { return config_; }
  int size() const { return static_cast<int>(arena_pose_.size()); }

  /// True pose in the arena frame.
  const Pose& arena_pose(int drone) const { return arena_pose_.at(drone); }

  /// Pose as the drone's own odometry reports it, in its initial frame.
  Pose OdometryPose(int drone) const;

  /// Obstacles within sensor range of `drone`, in its odometry frame.
  std::vector<Circle> LocalObstacles(int drone) const;

  /// Identity of each observation in a past scan: result[observer][track].
  const std::vector<std::vector<int>>& TrackIdentities(int epoch) const;

  /// Maps a position in the drone's odometry frame into the arena frame.
  Eigen::Vector3d OdometryToArena(int drone, const Eigen::Vector3d& p) const;
  Eigen::Vector3d ArenaToOdometry(int drone, const Eigen::Vector3d& p) const;

 private:
  friend std::pair<World, GroundTruth> Spawn(const WorldConfig& config);
  friend EpochRecord ScanEpoch(World& world, int epoch_index);
  friend void MoveDrone(World& world, int drone,
                        std::span<const Eigen::Vector3d> waypoints);

  WorldConfig config_;
  std::mt19937_64 rng_;
  std::vector<Pose> arena_pose_;
  std::vector<Pose> initial_arena_pose_;
  std::vector<double> yaw_drift_;
  std::vector<Eigen::Vector3d> odom_position_;
  std::vector<std::pair<int, std::vector<std::vector<int>>>> identities_;
};

/// Places the swarm. Throws ErrorCode::kArenaTooSmall after 10,000 rejected
/// samples.
std::pair<World, GroundTruth> Spawn(const WorldConfig& config);

/// Every drone turns in place and reports all neighbours within range.
EpochRecord ScanEpoch(World& world, int epoch_index);

/// Kinematic move along waypoints given in the drone's odometry frame.
void MoveDrone(World& world, int drone,
               std::span<const Eigen::Vector3d> waypoints);

/// Test hook: appends a non-mutual observation. No range gate is applied.
EpochRecord InjectFalsePositive(EpochRecord record, int observer,
                                const Eigen::Vector3d& vector);

/// SplitMix64-derived seed for an independent random stream.
std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t stream);

}  // namespace swarminit
