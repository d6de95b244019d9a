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

namespace swarminit {

/// Stopping and safeguard parameters for the interior point solver.
struct IpmOptions {
  double tolerance = 1e-8;
  int max_iterations = 200;
  // Fraction of the step to the boundary of the PSD cone.
  double step_fraction = 0.98;
  // Iteration continues past `tolerance` toward this level while progress
  // lasts.
  double target_tolerance = 1e-19;
};

struct IpmResult {
  Eigen::MatrixXd x;  // primal
  Eigen::VectorXd y;  // dual multipliers, three per 2x2 block
  Eigen::MatrixXd s;  // dual slack C - A*(y)
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double relative_gap = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Solves  min <C, X>  s.t.  X >= 0,  X_ii = I_2 for every 2x2 diagonal block,
/// with a primal-dual path-following method (Nesterov-Todd scaling,
/// Mehrotra predictor-corrector). C must be symmetric with even dimension.
///
/// Convergence is declared when the relative primal and dual residuals and
/// the relative duality gap |p - d| / (1 + |p| + |d|), measured on the
/// problem with C scaled to unit Frobenius norm, all fall below
/// options.tolerance. The result is returned either way; check `converged`.
IpmResult SolveBlockIdentitySdp(const Eigen::MatrixXd& cost,
                                const IpmOptions& options = {});

}  // namespace swarminit
