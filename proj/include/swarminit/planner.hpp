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
#include <random>
#include <span>
#include <vector>

#include "swarminit/simulator.hpp"

namespace swarminit {

struct PlannerParams {
  double d_safe = 1.0;          // meters, min inter-drone distance
  double move_cap_ratio = 0.4;  // of the nearest-drone distance
  double p_explore = 0.15;
  double clearance = 0.3;       // meters, obstacle inflation
  double max_step = 1.0;        // meters, also the exploration radius when alone
  double min_step = 0.05;       // shorter moves are dropped (hold position)
};

/// Throws ErrorCode::kInvalidConfig.
void Validate(const PlannerParams& params);

/// Everything a drone knows when planning: its own odometry position and the
/// latest detections, both in its own odometry frame.
struct PlanContext {
  Eigen::Vector3d self_position = Eigen::Vector3d::Zero();
  // Relative vectors to detected drones, rotated into the odometry frame.
  std::vector<Eigen::Vector3d> local_observations;
  std::vector<Circle> obstacles;
  PlannerParams params;
};

/// Picks the next observation position (constant altitude). With
/// probability p_explore, or when nothing is detected, steps in a random
/// direction; otherwise heads for the farthest detected drone, stopping d_safe
/// short of every detected drone. Steps are capped at move_cap_ratio times
/// the nearest detected distance and at max_step.
Eigen::Vector3d SelectTarget(const PlanContext& ctx, std::mt19937_64& rng);

/// Pushes `target` out of inflated obstacles, iterating up to 10 times. A
/// target at an obstacle center is pushed toward `self_position`.
/// Throws ErrorCode::kNoValidPosition.
Eigen::Vector3d AdjustForObstacles(const Eigen::Vector3d& target,
                                   std::span<const Circle> obstacles, double clearance,
                                   const Eigen::Vector3d& self_position);

/// Collision-free polyline from start to target. Each blocking obstacle is
/// bypassed along tangent lines of its inflated circle (at most 3 detours).
/// Throws ErrorCode::kPathNotFound.
std::vector<Eigen::Vector3d> PlanPath(const Eigen::Vector3d& start,
                                      const Eigen::Vector3d& target,
                                      std::span<const Circle> obstacles, double clearance);

/// True when the segment a-b comes closer than `radius` to `center` (XY).
bool SegmentHitsCircle(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                       const Eigen::Vector2d& center, double radius);

}  // namespace swarminit
