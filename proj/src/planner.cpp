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

#include "swarminit/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "swarminit/geometry.hpp"

namespace swarminit {
namespace {

constexpr double kContactTolerance = 1e-9;
constexpr int kMaxAdjustIterations = 10;
constexpr int kMaxDetours = 3;

Eigen::Vector2d Xy(const Eigen::Vector3d& v) { return v.head<2>(); }

// Longest step along `dir` that keeps every detection safe even if it moves
// toward us at the same time: each drone may close at most half of the slack
// |o| - d_safe along the line to a neighbor. Inside a d_safe disk already,
// only moves that do not close the distance are free.
double SafeStepLength(std::span<const Eigen::Vector3d> obs, const Eigen::Vector2d& dir,
                      double d_safe) {
  double allowed = std::numeric_limits<double>::infinity();
  for (const auto& o3 : obs) {
    const Eigen::Vector2d o = Xy(o3);
    const double dist = o.norm();
    const double along = dist > 0 ? dir.dot(o) / dist : 1.0;
    if (along <= 0) continue;
    allowed = std::min(allowed, std::max(0.0, 0.5 * (dist - d_safe)) / along);
  }
  return allowed;
}

struct Inflated {
  Eigen::Vector2d center;
  double radius;
};

double PolylineLength(const Eigen::Vector2d& a, const std::vector<Eigen::Vector2d>& mid,
                      const Eigen::Vector2d& b) {
  double len = 0.0;
  Eigen::Vector2d prev = a;
  for (const auto& p : mid) {
    len += (p - prev).norm();
    prev = p;
  }
  return len + (b - prev).norm();
}

// Vertices of the polygon circumscribed about `circle` that connect the
// tangent line through a with the tangent line through b. side = +1 passes
// the circle counter-clockwise, -1 clockwise.
std::vector<Eigen::Vector2d> TangentDetour(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                                           const Inflated& circle, int side) {
  const Eigen::Vector2d ra = a - circle.center;
  const Eigen::Vector2d rb = b - circle.center;
  const double beta_a = std::acos(std::min(1.0, circle.radius / ra.norm()));
  const double beta_b = std::acos(std::min(1.0, circle.radius / rb.norm()));
  const double ang_a = std::atan2(ra.y(), ra.x());
  const double ang_b = std::atan2(rb.y(), rb.x());
  const double start = ang_a + side * beta_a;
  const double end = ang_b - side * beta_b;
  double sweep = std::fmod(side * (end - start), 2.0 * kPi);
  if (sweep < 0) sweep += 2.0 * kPi;
  const int pieces = std::max(1, static_cast<int>(std::ceil(sweep / (0.5 * kPi))));
  const double step = sweep / pieces;
  const double vertex_radius = circle.radius / std::cos(0.5 * step);
  std::vector<Eigen::Vector2d> out;
  for (int i = 0; i < pieces; ++i) {
    const double mid = start + side * (i + 0.5) * step;
    out.push_back(circle.center + vertex_radius * Eigen::Vector2d(std::cos(mid), std::sin(mid)));
  }
  return out;
}

}  // namespace

void Validate(const PlannerParams& params) {
  auto fail = [](const char* what) { throw Error(ErrorCode::kInvalidConfig, what); };
  if (!(params.move_cap_ratio > 0 && params.move_cap_ratio < 0.5)) {
    fail("move_cap_ratio must be in (0, 0.5)");
  }
  if (!(params.p_explore >= 0 && params.p_explore <= 1)) fail("p_explore must be in [0, 1]");
  if (!(params.d_safe > 0)) fail("d_safe must be positive");
  if (!(params.clearance >= 0)) fail("clearance must be non-negative");
  if (!(params.max_step > 0)) fail("max_step must be positive");
  if (!(params.min_step >= 0)) fail("min_step must be non-negative");
}

bool SegmentHitsCircle(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                       const Eigen::Vector2d& center, double radius) {
  const Eigen::Vector2d ab = b - a;
  const double len2 = ab.squaredNorm();
  const double t = len2 > 0 ? std::clamp((center - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (a + t * ab - center).norm() < radius - kContactTolerance;
}

Eigen::Vector3d SelectTarget(const PlanContext& ctx, std::mt19937_64& rng) {
  const auto& p = ctx.params;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double coin = unit(rng);
  const double heading = -kPi + 2.0 * kPi * unit(rng);

  const auto& obs = ctx.local_observations;
  double cap = p.max_step;
  Eigen::Vector2d dir(std::cos(heading), std::sin(heading));
  if (!obs.empty()) {
    double nearest = std::numeric_limits<double>::infinity();
    double farthest = -1.0;
    Eigen::Vector2d far_dir = Eigen::Vector2d::UnitX();
    for (const auto& o : obs) {
      const double d = Xy(o).norm();
      nearest = std::min(nearest, d);
      if (d > farthest) {
        farthest = d;
        if (d > 0) far_dir = Xy(o) / d;
      }
    }
    cap = std::min(cap, p.move_cap_ratio * nearest);
    if (coin >= p.p_explore) dir = far_dir;
  }

  const double step = std::min(cap, SafeStepLength(obs, dir, p.d_safe));
  if (step < p.min_step) return ctx.self_position;
  Eigen::Vector3d target = ctx.self_position;
  target.head<2>() += step * dir;
  return target;
}

Eigen::Vector3d AdjustForObstacles(const Eigen::Vector3d& target,
                                   std::span<const Circle> obstacles, double clearance,
                                   const Eigen::Vector3d& self_position) {
  Eigen::Vector3d out = target;
  auto first_violation = [&]() -> const Circle* {
    for (const auto& c : obstacles) {
      if ((Xy(out) - c.center).norm() < c.radius + clearance - kContactTolerance) return &c;
    }
    return nullptr;
  };
  for (int iter = 0; iter < kMaxAdjustIterations; ++iter) {
    const Circle* hit = first_violation();
    if (!hit) return out;
    Eigen::Vector2d away = Xy(out) - hit->center;
    if (away.norm() < 1e-12) away = Xy(self_position) - hit->center;
    if (away.norm() < 1e-12) away = Eigen::Vector2d::UnitX();
    out.head<2>() = hit->center + (hit->radius + clearance) * away.normalized();
  }
  if (first_violation()) {
    throw Error(ErrorCode::kNoValidPosition,
                "target still inside an obstacle after adjustment");
  }
  return out;
}

std::vector<Eigen::Vector3d> PlanPath(const Eigen::Vector3d& start,
                                      const Eigen::Vector3d& target,
                                      std::span<const Circle> obstacles, double clearance) {
  if ((target - start).norm() < 1e-12) return {start};

  // Obstacles the endpoints already sit in the inflation margin of are
  // shrunk to keep the endpoints outside.
  std::vector<Inflated> inflated;
  for (const auto& c : obstacles) {
    const double endpoint_dist =
        std::min((Xy(start) - c.center).norm(), (Xy(target) - c.center).norm());
    if (endpoint_dist <= c.radius) {
      throw Error(ErrorCode::kPathNotFound, "path endpoint inside an obstacle");
    }
    inflated.push_back({c.center, std::min(c.radius + clearance, endpoint_dist)});
  }

  std::vector<Eigen::Vector2d> path{Xy(start), Xy(target)};
  for (int detours = 0;; ++detours) {
    std::optional<std::size_t> segment;
    const Inflated* blocker = nullptr;
    double blocker_t = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s + 1 < path.size() && !segment; ++s) {
      const Eigen::Vector2d ab = path[s + 1] - path[s];
      for (const auto& c : inflated) {
        if (!SegmentHitsCircle(path[s], path[s + 1], c.center, c.radius)) continue;
        const double t = (c.center - path[s]).dot(ab) / ab.squaredNorm();
        if (t < blocker_t) {
          blocker_t = t;
          blocker = &c;
        }
      }
      if (blocker) segment = s;
    }
    if (!segment) break;
    if (detours == kMaxDetours) {
      throw Error(ErrorCode::kPathNotFound, "too many obstacle detours");
    }
    const Eigen::Vector2d a = path[*segment];
    const Eigen::Vector2d b = path[*segment + 1];
    const double room = std::min((a - blocker->center).norm(), (b - blocker->center).norm()) -
                        blocker->radius;
    const Inflated padded{blocker->center,
                          blocker->radius + std::max(0.0, std::min(0.05 * blocker->radius,
                                                                   0.5 * room))};
    const auto left = TangentDetour(a, b, padded, +1);
    const auto right = TangentDetour(a, b, padded, -1);
    const auto& chosen =
        PolylineLength(a, right, b) < PolylineLength(a, left, b) ? right : left;
    path.insert(path.begin() + static_cast<std::ptrdiff_t>(*segment) + 1, chosen.begin(),
                chosen.end());
  }

  std::vector<Eigen::Vector3d> out;
  for (std::size_t i = 0; i < path.size(); ++i) {
    const double z = i + 1 == path.size() ? target.z() : start.z();
    out.emplace_back(path[i].x(), path[i].y(), z);
  }
  return out;
}

}  // namespace swarminit
