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

#include "swarminit/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace swarminit {
namespace {

constexpr int kMaxSpawnAttempts = 10000;
constexpr double kNoiseTruncation = 6.0;

Eigen::Vector2d Xy(const Eigen::Vector3d& v) { return v.head<2>(); }

Eigen::Vector3d Gaussian3(std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::Vector3d n;
  do {
    n = {normal(rng), normal(rng), normal(rng)};
  } while (n.norm() > kNoiseTruncation);
  return n;
}

bool InsideObstacle(const WorldConfig& config, const Eigen::Vector3d& p) {
  return std::any_of(config.obstacles.begin(), config.obstacles.end(),
                     [&](const Circle& c) {
                       return (Xy(p) - c.center).norm() <= c.radius;
                     });
}

bool InsideArena(const Box& box, const Eigen::Vector3d& p) {
  return (p.array() >= box.min.array()).all() &&
         (p.array() <= box.max.array()).all();
}

}  // namespace

std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t stream) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(seed ^ mix(stream));
}

void Validate(const WorldConfig& config) {
  auto fail = [](const std::string& what) {
    throw Error(ErrorCode::kInvalidConfig, what);
  };
  if (config.n_drones < 2 || config.n_drones > 64) {
    fail("n_drones must be in [2, 64]");
  }
  if (config.obs_noise_sigma < 0 || config.odom_yaw_drift_sigma < 0 ||
      config.odom_position_sigma < 0) {
    fail("sigmas must be non-negative");
  }
  if (!(config.min_spawn_separation > 0)) {
    fail("min_spawn_separation must be positive");
  }
  if (!(config.sensor_range > 0)) fail("sensor_range must be positive");
  if ((config.arena.max.array() < config.arena.min.array()).any()) {
    fail("arena max must dominate arena min");
  }
  for (const auto& c : config.obstacles) {
    if (!(c.radius > 0)) fail("obstacle radius must be positive");
  }
  if (config.formation == Formation::kRotationSymmetric &&
      !(config.formation_radius > 0)) {
    fail("formation_radius must be positive");
  }
}

std::vector<Observation> EpochRecord::ObservationsOf(int observer) const {
  std::vector<Observation> out;
  for (const auto& o : observations) {
    if (o.observer == observer) out.push_back(o);
  }
  return out;
}

int EpochRecord::CountFor(int observer) const {
  return static_cast<int>(std::count_if(
      observations.begin(), observations.end(),
      [observer](const Observation& o) { return o.observer == observer; }));
}

YawVector GroundTruth::yaws() const {
  YawVector out;
  for (const auto& p : poses_t0) out.push_back(p.yaw);
  return out;
}

std::vector<Eigen::Vector3d> GroundTruth::translations() const {
  std::vector<Eigen::Vector3d> out;
  for (const auto& p : poses_t0) out.push_back(p.position);
  return out;
}

Pose World::OdometryPose(int drone) const {
  const double rel = arena_pose_.at(drone).yaw.theta() -
                     initial_arena_pose_.at(drone).yaw.theta() +
                     yaw_drift_.at(drone);
  return Pose{odom_position_.at(drone), Rotation2(rel)};
}

Eigen::Vector3d World::OdometryToArena(int drone,
                                       const Eigen::Vector3d& p) const {
  const Pose odom = OdometryPose(drone);
  const Pose& truth = arena_pose_.at(drone);
  const Eigen::Vector3d body = ApplyYaw(odom.yaw.inverse(), p - odom.position);
  return truth.position + ApplyYaw(truth.yaw, body);
}

Eigen::Vector3d World::ArenaToOdometry(int drone,
                                       const Eigen::Vector3d& p) const {
  const Pose odom = OdometryPose(drone);
  const Pose& truth = arena_pose_.at(drone);
  const Eigen::Vector3d body = ApplyYaw(truth.yaw.inverse(), p - truth.position);
  return odom.position + ApplyYaw(odom.yaw, body);
}

std::vector<Circle> World::LocalObstacles(int drone) const {
  const Pose odom = OdometryPose(drone);
  const Pose& truth = arena_pose_.at(drone);
  // arena -> body -> odometry
  const Rotation2 arena_to_odom = Compose(odom.yaw, truth.yaw.inverse());
  std::vector<Circle> out;
  for (const auto& c : config_.obstacles) {
    const Eigen::Vector2d rel = c.center - Xy(truth.position);
    if (rel.norm() - c.radius > config_.sensor_range) continue;
    const Eigen::Vector2d in_odom = arena_to_odom.matrix() * rel;
    out.push_back(Circle{Xy(odom.position) + in_odom, c.radius});
  }
  return out;
}

const std::vector<std::vector<int>>& World::TrackIdentities(int epoch) const {
  for (const auto& [e, ids] : identities_) {
    if (e == epoch) return ids;
  }
  throw Error(ErrorCode::kInvalidConfig,
              "no scan recorded for epoch " + std::to_string(epoch));
}

std::pair<World, GroundTruth> Spawn(const WorldConfig& config) {
  Validate(config);
  World world;
  world.config_ = config;
  world.rng_.seed(config.seed);
  auto& rng = world.rng_;
  const int n = config.n_drones;
  const Box& box = config.arena;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto sample_in = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
  auto uniform_yaw = [&] { return Rotation2(sample_in(-kPi, kPi)); };

  std::vector<Pose> poses;
  if (config.formation == Formation::kRotationSymmetric) {
    const Eigen::Vector3d center = 0.5 * (box.min + box.max);
    for (int i = 0; i < n; ++i) {
      const double angle = 2.0 * kPi * i / n;
      Pose p;
      p.position = center + config.formation_radius *
                                Eigen::Vector3d(std::cos(angle), std::sin(angle), 0.0);
      p.yaw = Rotation2(angle + 0.5 * kPi);
      if (!InsideArena(box, p.position) || InsideObstacle(config, p.position)) {
        throw Error(ErrorCode::kArenaTooSmall,
                    "symmetric formation does not fit the arena");
      }
      poses.push_back(p);
    }
    const double chord = 2.0 * config.formation_radius * std::sin(kPi / n);
    if (chord < config.min_spawn_separation) {
      throw Error(ErrorCode::kArenaTooSmall,
                  "symmetric formation violates min_spawn_separation");
    }
  } else {
    int attempts = 0;
    while (static_cast<int>(poses.size()) < n) {
      if (++attempts > kMaxSpawnAttempts) {
        throw Error(ErrorCode::kArenaTooSmall,
                    "could not place " + std::to_string(n) + " drones after " +
                        std::to_string(kMaxSpawnAttempts) + " attempts");
      }
      const Eigen::Vector3d candidate(sample_in(box.min.x(), box.max.x()),
                                      sample_in(box.min.y(), box.max.y()),
                                      sample_in(box.min.z(), box.max.z()));
      if (InsideObstacle(config, candidate)) continue;
      const bool crowded = std::any_of(poses.begin(), poses.end(), [&](const Pose& q) {
        return (Xy(q.position) - Xy(candidate)).norm() < config.min_spawn_separation;
      });
      if (crowded) continue;
      poses.push_back(Pose{candidate, uniform_yaw()});
    }
  }

  world.arena_pose_ = poses;
  world.initial_arena_pose_ = poses;
  world.yaw_drift_.assign(n, 0.0);
  world.odom_position_.assign(n, Eigen::Vector3d::Zero());

  GroundTruth truth;
  const Rotation2 inv0 = poses[0].yaw.inverse();
  for (const auto& p : poses) {
    truth.poses_t0.push_back(
        Pose{ApplyYaw(inv0, p.position - poses[0].position), Compose(inv0, p.yaw)});
  }
  return {std::move(world), std::move(truth)};
}

EpochRecord ScanEpoch(World& world, int epoch_index) {
  auto& rng = world.rng_;
  const auto& cfg = world.config_;
  const int n = world.size();
  std::uniform_real_distribution<double> turn(-kPi, kPi);
  std::normal_distribution<double> normal(0.0, 1.0);

  for (int i = 0; i < n; ++i) {
    auto& pose = world.arena_pose_[i];
    pose.yaw = Compose(pose.yaw, Rotation2(turn(rng)));
    world.yaw_drift_[i] += cfg.odom_yaw_drift_sigma * normal(rng);
  }

  EpochRecord record;
  record.epoch = epoch_index;
  for (int i = 0; i < n; ++i) {
    const Pose odom = world.OdometryPose(i);
    record.odometry.yaws.push_back(odom.yaw);
    record.odometry.positions.push_back(odom.position);
  }

  std::vector<std::vector<int>> identities(n);
  for (int j = 0; j < n; ++j) {
    const Pose& observer = world.arena_pose_[j];
    std::vector<std::pair<int, Eigen::Vector3d>> seen;
    for (int i = 0; i < n; ++i) {
      if (i == j) continue;
      const Eigen::Vector3d offset = world.arena_pose_[i].position - observer.position;
      if (offset.norm() > cfg.sensor_range) continue;
      const Eigen::Vector3d noise = cfg.obs_noise_sigma * Gaussian3(rng);
      seen.emplace_back(i, ApplyYaw(observer.yaw.inverse(), offset) + noise);
    }
    std::shuffle(seen.begin(), seen.end(), rng);
    for (int t = 0; t < static_cast<int>(seen.size()); ++t) {
      record.observations.push_back(Observation{j, epoch_index, seen[t].second, t});
      identities[j].push_back(seen[t].first);
    }
  }
  world.identities_.emplace_back(epoch_index, std::move(identities));
  return record;
}

void MoveDrone(World& world, int drone, std::span<const Eigen::Vector3d> waypoints) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double sigma = world.config_.odom_position_sigma;
  for (const auto& w : waypoints) {
    const Eigen::Vector3d from = world.odom_position_.at(drone);
    if ((w - from).norm() == 0.0) continue;
    const Eigen::Vector3d arena_target = world.OdometryToArena(drone, w);
    world.arena_pose_[drone].position = arena_target;
    const Eigen::Vector3d slip(normal(world.rng_), normal(world.rng_), 0.0);
    world.odom_position_[drone] = w + sigma * slip;
  }
}

EpochRecord InjectFalsePositive(EpochRecord record, int observer,
                                const Eigen::Vector3d& vector) {
  const int track = record.CountFor(observer);
  auto pos = std::find_if(record.observations.begin(), record.observations.end(),
                          [observer](const Observation& o) { return o.observer > observer; });
  record.observations.insert(pos, Observation{observer, record.epoch, vector, track});
  return record;
}

}  // namespace swarminit
