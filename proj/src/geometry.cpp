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

#include "swarminit/geometry.hpp"

#include <cmath>

namespace swarminit {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kDegenerateBlock: return "DegenerateBlock";
    case ErrorCode::kArenaTooSmall: return "ArenaTooSmall";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kSolverDiverged: return "SolverDiverged";
    case ErrorCode::kSingularNormalEquations: return "SingularNormalEquations";
    case ErrorCode::kDisconnectedGraph: return "DisconnectedGraph";
    case ErrorCode::kNoValidPosition: return "NoValidPosition";
    case ErrorCode::kPathNotFound: return "PathNotFound";
    case ErrorCode::kMaxEpochsExceeded: return "MaxEpochsExceeded";
    case ErrorCode::kParseError: return "ParseError";
  }
  return "Unknown";
}

double WrapAngle(double theta) {
  double wrapped = std::remainder(theta, 2.0 * kPi);
  if (wrapped <= -kPi) wrapped += 2.0 * kPi;
  return wrapped;
}

Eigen::Matrix2d Rotation2::matrix() const {
  const double c = std::cos(theta_);
  const double s = std::sin(theta_);
  Eigen::Matrix2d m;
  m << c, -s, s, c;
  return m;
}

Rotation2 Compose(const Rotation2& a, const Rotation2& b) {
  return Rotation2(a.theta() + b.theta());
}

Eigen::Vector3d ApplyYaw(const Rotation2& r, const Eigen::Vector3d& v) {
  const double c = std::cos(r.theta());
  const double s = std::sin(r.theta());
  return {c * v.x() - s * v.y(), s * v.x() + c * v.y(), v.z()};
}

Rotation2 ProjectToSo2(const Eigen::Matrix2d& m) {
  // argmax_theta tr(R(theta)^T m) has the closed form below.
  const double cos_part = m(0, 0) + m(1, 1);
  const double sin_part = m(1, 0) - m(0, 1);
  if (std::abs(cos_part) < 1e-12 && std::abs(sin_part) < 1e-12) {
    throw Error(ErrorCode::kDegenerateBlock,
                "block has no dominant rotational component");
  }
  return Rotation2(std::atan2(sin_part, cos_part));
}

double YawMae(const YawVector& estimated, const YawVector& truth) {
  if (estimated.size() != truth.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                "estimated has " + std::to_string(estimated.size()) +
                    " yaws, truth has " + std::to_string(truth.size()));
  }
  if (truth.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    sum += std::abs(WrapAngle(estimated[i].theta() - truth[i].theta()));
  }
  return sum / static_cast<double>(truth.size());
}

YawVector GaugeFix(const YawVector& yaws) {
  if (yaws.empty()) return {};
  const Rotation2 inv0 = yaws.front().inverse();
  YawVector out;
  out.reserve(yaws.size());
  for (const auto& r : yaws) out.push_back(Compose(inv0, r));
  return out;
}

YawVector YawsFromAngles(const std::vector<double>& thetas) {
  YawVector out;
  out.reserve(thetas.size());
  for (double t : thetas) out.emplace_back(t);
  return out;
}

std::vector<double> AnglesOf(const YawVector& yaws) {
  std::vector<double> out;
  out.reserve(yaws.size());
  for (const auto& r : yaws) out.push_back(r.theta());
  return out;
}

}  // namespace swarminit
