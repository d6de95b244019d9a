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
#include <vector>

#include "swarminit/error.hpp"

namespace swarminit {

inline constexpr double kPi = 3.14159265358979323846;

/// Maps an angle onto (-pi, pi].
double WrapAngle(double theta);

/// Planar rotation about +Z. The angle is canonical; matrix() is a derived
/// view.
class Rotation2 {
 public:
  Rotation2() = default;
  explicit Rotation2(double theta) : theta_(WrapAngle(theta)) {}

  static Rotation2 Identity() { return Rotation2(); }

  double theta() const { return theta_; }
  Eigen::Matrix2d matrix() const;
  Rotation2 inverse() const { return Rotation2(-theta_); }

  friend bool operator==(const Rotation2&, const Rotation2&) = default;

 private:
  double theta_ = 0.0;
};

/// Yaw-only pose. Roll and pitch are zero by construction.
struct Pose {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Rotation2 yaw;
};

/// One yaw per drone, indexed by drone id.
using YawVector = std::vector<Rotation2>;

Rotation2 Compose(const Rotation2& a, const Rotation2& b);

/// Rotates v about Z; the Z component passes through untouched.
Eigen::Vector3d ApplyYaw(const Rotation2& r, const Eigen::Vector3d& v);

/// Nearest rotation to m in Frobenius norm.
/// Throws ErrorCode::kDegenerateBlock when the direction is undefined.
Rotation2 ProjectToSo2(const Eigen::Matrix2d& m);

/// Mean absolute wrapped difference between two gauge-fixed yaw vectors.
/// Throws ErrorCode::kLengthMismatch.
double YawMae(const YawVector& estimated, const YawVector& truth);

/// Expresses every yaw relative to entry 0, so entry 0 becomes identity.
YawVector GaugeFix(const YawVector& yaws);

YawVector YawsFromAngles(const std::vector<double>& thetas);
std::vector<double> AnglesOf(const YawVector& yaws);

}  // namespace swarminit
