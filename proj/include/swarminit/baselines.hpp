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
#include <utility>

#include "swarminit/geometry.hpp"
#include "swarminit/sdp_rotation.hpp"

namespace swarminit {

struct LocalSolveReport {
  YawVector yaws;  // gauge-fixed
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  double wall_time = 0.0;  // seconds
  // Set when Gauss-Newton met singular normal equations and took a gradient
  // step instead.
  bool singular_fallback = false;
};

struct LocalSolveOptions {
  int max_iterations = 100;
  double step_tolerance = 1e-10;
  double gradient_tolerance = 1e-9;
  double initial_damping = 1e-3;
};

/// tr(q Z(thetas)) and its gradient with respect to every angle. Solvers keep
/// theta_0 fixed, so entry 0 of the gradient is informational only.
std::pair<double, Eigen::VectorXd> ObjectiveAndJacobian(const YawVector& thetas,
                                                        const QMatrix& q);

/// Gauss-Newton with backtracking on the unrelaxed yaw objective.
LocalSolveReport SolveGn(const QMatrix& q, const YawVector& init,
                         const LocalSolveOptions& options = {});

/// Levenberg-Marquardt on the unrelaxed yaw objective.
LocalSolveReport SolveLm(const QMatrix& q, const YawVector& init,
                         const LocalSolveOptions& options = {});

}  // namespace swarminit
